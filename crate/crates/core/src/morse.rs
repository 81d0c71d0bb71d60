//! The Taylor digraph, matching validation, critical cells, and the Morse
//! complex over the two-element field.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{self, BitVec};
use crate::ideal::{GenSubset, LcmTable, MonomialIdeal, Multidegree};
use crate::matching::{Grading, MatchedEdge, Matching};

/// Default cap on memoized gradient-flow entries per homological degree.
pub const DEFAULT_PATH_BUDGET: usize = 1 << 24;

/// A reason a set of edges fails to be a homogeneous acyclic matching.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NotTaylorEdge { edge: MatchedEdge },
    VertexReused { vertex: GenSubset },
    LabelMismatch { edge: MatchedEdge },
    Cycle { through: GenSubset },
}

/// Checks vertex-disjointness, label equality along edges, and acyclicity of
/// the digraph with matched edges reversed. Returns every violation found.
pub fn validate_matching<G: Grading>(ideal: &MonomialIdeal, grading: &G, matching: &Matching) -> Vec<Violation> {
    let mut out = Vec::new();
    let full = ideal.full_set();
    let mut owner: HashMap<GenSubset, usize> = HashMap::new();
    let mut lcm_preserving = true;
    for (k, e) in matching.edges().iter().enumerate() {
        if e.removed().is_none() || !e.sigma.is_subset(full) {
            out.push(Violation::NotTaylorEdge { edge: *e });
            continue;
        }
        for v in [e.sigma, e.tau] {
            if owner.insert(v, k).is_some() {
                out.push(Violation::VertexReused { vertex: v });
            }
        }
        if grading.label(ideal, e.sigma) != grading.label(ideal, e.tau) {
            out.push(Violation::LabelMismatch { edge: *e });
        }
        if ideal.lcm_of(e.sigma) != ideal.lcm_of(e.tau) {
            lcm_preserving = false;
        }
    }
    if !out.is_empty() {
        return out;
    }
    if let Some(v) = find_cycle(ideal, matching, lcm_preserving) {
        out.push(Violation::Cycle { through: v });
    }
    out
}

// Unmatched edges go down, matched edges go up. When every matched edge keeps
// the lcm, a cycle cannot leave an lcm class, so only lcm-preserving down edges
// are followed.
fn find_cycle(ideal: &MonomialIdeal, matching: &Matching, within_classes: bool) -> Option<GenSubset> {
    let n = ideal.ngens();
    let size = 1usize << n;
    let table = within_classes.then(|| LcmTable::build(ideal, 63).expect("cap checked by caller"));
    let mut down_partner = vec![u64::MAX; size];
    let mut up_partner = vec![u64::MAX; size];
    for e in matching.edges() {
        down_partner[e.sigma.bits() as usize] = e.tau.bits();
        up_partner[e.tau.bits() as usize] = e.sigma.bits();
    }
    let successors = |v: usize| -> Vec<usize> {
        let mut out = Vec::new();
        if up_partner[v] != u64::MAX {
            out.push(up_partner[v] as usize);
        }
        let candidates = match &table {
            Some(t) => t.bridges[v],
            None => v as u64,
        };
        for g in GenSubset(candidates).iter() {
            let w = v & !(1usize << g);
            if down_partner[v] != w as u64 {
                out.push(w);
            }
        }
        out
    };
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut color = vec![0u8; size];
    for start in 0..size {
        if color[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(start, successors(start))];
        color[start] = 1;
        while let Some((v, next)) = stack.last_mut() {
            match next.pop() {
                Some(w) => match color[w] {
                    0 => {
                        color[w] = 1;
                        let succ = successors(w);
                        stack.push((w, succ));
                    }
                    1 => return Some(GenSubset(w as u64)),
                    _ => {}
                },
                None => {
                    color[*v] = 2;
                    stack.pop();
                }
            }
        }
    }
    None
}

/// Critical subsets grouped by cardinality, each with its lcm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalCells {
    pub by_degree: Vec<Vec<(GenSubset, Multidegree)>>,
}

impl CriticalCells {
    pub fn counts(&self) -> Vec<usize> {
        self.by_degree.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.by_degree.iter().map(Vec::len).sum()
    }
}

/// All subsets not covered by an edge of the matching, including the empty set.
pub fn critical_cells(ideal: &MonomialIdeal, matching: &Matching, cap: usize) -> Result<CriticalCells> {
    ideal.check_cap(cap)?;
    let n = ideal.ngens();
    let matched = matching.partners();
    let mut by_degree = vec![Vec::new(); n + 1];
    for s in 0..1u64 << n {
        let sigma = GenSubset(s);
        if !matched.contains_key(&sigma) {
            by_degree[sigma.len()].push((sigma, ideal.lcm_of(sigma)));
        }
    }
    Ok(CriticalCells { by_degree })
}

/// Free resolution induced by an acyclic matching, with coefficients mod 2.
///
/// `columns[i][j]` is the boundary of the `j`-th degree-`i` cell, as a bit
/// vector over the degree-`i-1` cells. `columns[0]` is empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorseComplex {
    pub cells: Vec<Vec<GenSubset>>,
    pub multidegrees: Vec<Vec<Multidegree>>,
    pub columns: Vec<Vec<BitVec>>,
}

#[derive(Serialize)]
struct ComplexJson<'a> {
    cells: Vec<Vec<Vec<usize>>>,
    multidegrees: &'a [Vec<Multidegree>],
    differentials: Vec<DifferentialJson>,
}

#[derive(Serialize)]
struct DifferentialJson {
    degree: usize,
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, u8)>,
}

impl MorseComplex {
    pub fn ranks(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    /// Entry of `d_degree` at (row in degree-1, col in degree).
    pub fn entry(&self, degree: usize, row: usize, col: usize) -> bool {
        self.columns[degree][col].get(row)
    }

    /// Sparse triplet form: per degree, cells as sorted index arrays and `(row, col, 1)` entries.
    pub fn to_json(&self) -> serde_json::Value {
        let differentials = (1..self.columns.len())
            .map(|i| DifferentialJson {
                degree: i,
                rows: self.cells[i - 1].len(),
                cols: self.cells[i].len(),
                entries: self.columns[i]
                    .iter()
                    .enumerate()
                    .flat_map(|(c, col)| col.ones().map(move |r| (r, c, 1u8)))
                    .collect(),
            })
            .collect();
        serde_json::to_value(ComplexJson {
            cells: self
                .cells
                .iter()
                .map(|d| d.iter().map(|s| s.indices()).collect())
                .collect(),
            multidegrees: &self.multidegrees,
            differentials,
        })
        .expect("complex serializes")
    }
}

/// Builds the Morse complex by summing gradient paths mod 2.
///
/// A path leaves a critical cell through one of its facets, climbs each
/// matched edge it meets and descends again, and stops at a critical cell of
/// the same dimension. Path counts are memoized per intermediate cell.
pub fn morse_differential(
    ideal: &MonomialIdeal,
    matching: &Matching,
    cap: usize,
    path_budget: usize,
) -> Result<MorseComplex> {
    let critical = critical_cells(ideal, matching, cap)?;
    let mut up: HashMap<GenSubset, GenSubset> = HashMap::new();
    let mut down: HashMap<GenSubset, GenSubset> = HashMap::new();
    for e in matching.edges() {
        up.insert(e.tau, e.sigma);
        down.insert(e.sigma, e.tau);
    }
    let top = critical.by_degree.iter().rposition(|d| !d.is_empty()).unwrap_or(0);
    let cells: Vec<Vec<GenSubset>> = critical.by_degree[..=top]
        .iter()
        .map(|d| d.iter().map(|(s, _)| *s).collect())
        .collect();
    let multidegrees: Vec<Vec<Multidegree>> = critical.by_degree[..=top]
        .iter()
        .map(|d| d.iter().map(|(_, m)| m.clone()).collect())
        .collect();
    let mut columns = vec![Vec::new()];
    for i in 1..=top {
        let targets = &cells[i - 1];
        let index: HashMap<GenSubset, usize> = targets.iter().enumerate().map(|(k, s)| (*s, k)).collect();
        let mut memo: HashMap<GenSubset, BitVec> = HashMap::new();
        let mut col_vecs = Vec::with_capacity(cells[i].len());
        for &sigma in &cells[i] {
            let mut col = BitVec::zeros(targets.len());
            for g in sigma.iter() {
                let face = sigma.without(g);
                let f = flow(face, &index, &up, &down, &mut memo, targets.len(), path_budget)
                    .map_err(|_| Error::PathBudget { degree: i })?;
                col.xor_assign(&f);
            }
            col_vecs.push(col);
        }
        columns.push(col_vecs);
    }
    Ok(MorseComplex {
        cells,
        multidegrees,
        columns,
    })
}

/// Mod-2 count of gradient paths from `start` to each critical cell of its dimension.
fn flow(
    start: GenSubset,
    index: &HashMap<GenSubset, usize>,
    up: &HashMap<GenSubset, GenSubset>,
    down: &HashMap<GenSubset, GenSubset>,
    memo: &mut HashMap<GenSubset, BitVec>,
    width: usize,
    budget: usize,
) -> std::result::Result<BitVec, ()> {
    if let Some(v) = memo.get(&start) {
        return Ok(v.clone());
    }
    // Explicit post-order traversal; the matched digraph is acyclic so this terminates.
    let mut stack = vec![(start, false)];
    while let Some((cell, expanded)) = stack.pop() {
        if memo.contains_key(&cell) {
            continue;
        }
        let mut value = BitVec::zeros(width);
        if let Some(&k) = index.get(&cell) {
            value.set(k, true);
        } else if down.contains_key(&cell) {
            // matched with a lower cell: paths die here
        } else if let Some(&coface) = up.get(&cell) {
            let faces: Vec<GenSubset> = coface
                .iter()
                .map(|g| coface.without(g))
                .filter(|&f| f != cell)
                .collect();
            if !expanded {
                let pending: Vec<GenSubset> = faces.iter().copied().filter(|f| !memo.contains_key(f)).collect();
                if !pending.is_empty() {
                    stack.push((cell, true));
                    stack.extend(pending.into_iter().map(|f| (f, false)));
                    continue;
                }
            }
            for f in faces {
                value.xor_assign(&memo[&f]);
            }
        }
        memo.insert(cell, value);
        if memo.len() > budget {
            return Err(());
        }
    }
    Ok(memo[&start].clone())
}

/// Outcome of [`verify_resolution_report`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResolutionReport {
    pub squares_to_zero: bool,
    /// Multidegrees whose strand has the wrong homology.
    pub bad_strands: Vec<Multidegree>,
}

impl ResolutionReport {
    pub fn ok(&self) -> bool {
        self.squares_to_zero && self.bad_strands.is_empty()
    }
}

/// `d² = 0` and every strand `{cells with lcm | b}` for `b` in the lcm lattice is
/// acyclic with `H_0 = k` exactly when `b ∉ I`.
pub fn verify_resolution(ideal: &MonomialIdeal, complex: &MorseComplex) -> bool {
    verify_resolution_report(ideal, complex).ok()
}

pub fn verify_resolution_report(ideal: &MonomialIdeal, complex: &MorseComplex) -> ResolutionReport {
    let squares_to_zero = (2..complex.columns.len()).all(|i| {
        complex.columns[i].iter().all(|col| {
            let mut acc = BitVec::zeros(complex.cells[i - 2].len());
            for r in col.ones() {
                acc.xor_assign(&complex.columns[i - 1][r]);
            }
            acc.is_zero()
        })
    });
    let mut lattice: Vec<Multidegree> = complex.multidegrees.iter().flatten().cloned().collect();
    lattice.push(Multidegree::one(ideal.nvars()));
    lattice.sort();
    lattice.dedup();
    let bad_strands = lattice.into_iter().filter(|b| !strand_ok(ideal, complex, b)).collect();
    ResolutionReport {
        squares_to_zero,
        bad_strands,
    }
}

fn strand_ok(ideal: &MonomialIdeal, complex: &MorseComplex, b: &Multidegree) -> bool {
    let masks: Vec<BitVec> = complex
        .multidegrees
        .iter()
        .map(|ms| {
            let mut v = BitVec::zeros(ms.len());
            for (k, m) in ms.iter().enumerate() {
                v.set(k, m.divides(b));
            }
            v
        })
        .collect();
    let dims: Vec<usize> = masks.iter().map(BitVec::count_ones).collect();
    let mut ranks = vec![0usize];
    for i in 1..complex.columns.len() {
        let rows: Vec<BitVec> = masks[i]
            .ones()
            .map(|c| {
                let mut col = complex.columns[i][c].clone();
                col.and_assign(&masks[i - 1]);
                col
            })
            .collect();
        ranks.push(gf2::rank(rows));
    }
    let homology = gf2::homology_dims(&dims, &ranks);
    let expect_h0 = usize::from(!ideal.contains(b));
    homology
        .iter()
        .enumerate()
        .all(|(i, &h)| h == if i == 0 { expect_h0 } else { 0 })
}
