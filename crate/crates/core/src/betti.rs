//! Multigraded Betti numbers over the two-element field, minimality of Morse
//! matchings, and the order-search certificate for edge ideals.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::classify::is_cochordal;
use crate::combinat::{rooted_tree_edge_order, to_graph6, Graph};
use crate::error::{Error, Result};
use crate::gf2::{self, BitVec};
use crate::ideal::{GenSubset, LcmTable, MonomialIdeal, Multidegree, TotalOrder};
use crate::matching::{gbm_matching, BmEngine, FiberedOrders, LcmGrading, Matching};
use crate::morse::critical_cells;
use crate::search::{search_orders, Outcome, SearchConfig};

/// Nonzero `β_{i,m}(S/I)`, keyed by `(i, m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    entries: BTreeMap<(usize, Multidegree), usize>,
}

#[derive(Serialize)]
struct BettiEntryJson {
    i: usize,
    m: String,
    value: usize,
}

impl BettiTable {
    fn from_entries(entries: impl IntoIterator<Item = ((usize, Multidegree), usize)>) -> Self {
        BettiTable {
            entries: entries.into_iter().filter(|(_, v)| *v > 0).collect(),
        }
    }

    pub fn get(&self, i: usize, m: &Multidegree) -> usize {
        self.entries.get(&(i, m.clone())).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, &Multidegree, usize)> {
        self.entries.iter().map(|((i, m), v)| (*i, m, *v))
    }

    /// Total Betti numbers `β_0, β_1, …` up to the last nonzero one.
    pub fn totals(&self) -> Vec<usize> {
        let top = self.entries.keys().map(|(i, _)| *i).max().unwrap_or(0);
        let mut out = vec![0; top + 1];
        for ((i, _), v) in &self.entries {
            out[*i] += v;
        }
        out
    }

    /// `Σ_i β_{i,m}`.
    pub fn sum_at(&self, m: &Multidegree) -> usize {
        self.entries.iter().filter(|((_, k), _)| k == m).map(|(_, v)| v).sum()
    }

    pub fn to_json(&self, ideal: &MonomialIdeal) -> serde_json::Value {
        let entries: Vec<BettiEntryJson> = self
            .entries()
            .map(|(i, m, value)| BettiEntryJson {
                i,
                m: ideal.format_monomial(m),
                value,
            })
            .collect();
        serde_json::json!({ "totals": self.totals(), "entries": entries })
    }
}

/// Homology of one chain complex given per-degree cell lists and a facet map.
fn homology<F>(cells: &[Vec<u64>], facets: F) -> Vec<usize>
where
    F: Fn(u64) -> Vec<u64>,
{
    let dims: Vec<usize> = cells.iter().map(Vec::len).collect();
    let mut ranks = vec![0usize];
    for k in 1..cells.len() {
        let index: HashMap<u64, usize> = cells[k - 1].iter().enumerate().map(|(j, &c)| (c, j)).collect();
        let rows = cells[k]
            .iter()
            .map(|&c| {
                let mut row = BitVec::zeros(cells[k - 1].len());
                for f in facets(c) {
                    row.flip(index[&f]);
                }
                row
            })
            .collect();
        ranks.push(gf2::rank(rows));
    }
    gf2::homology_dims(&dims, &ranks)
}

/// Betti numbers from the Taylor complex tensored with the field: in degree
/// `b` the cells are the subsets with lcm exactly `b`, and a facet survives
/// only when it keeps the lcm (that is, when a bridge is removed).
pub fn betti_numbers_taylor(ideal: &MonomialIdeal, cap: usize) -> Result<BettiTable> {
    let table = LcmTable::build(ideal, cap)?;
    let members = table.members_by_class();
    let per_class: Vec<Vec<((usize, Multidegree), usize)>> = members
        .par_iter()
        .enumerate()
        .map(|(c, sets)| {
            let top = sets.iter().map(|s| s.len()).max().unwrap_or(0);
            let mut cells = vec![Vec::new(); top + 1];
            for s in sets {
                cells[s.len()].push(s.bits());
            }
            let h = homology(&cells, |s| {
                table.bridges(GenSubset(s)).iter().map(|g| s & !(1 << g)).collect()
            });
            h.into_iter()
                .enumerate()
                .map(|(i, v)| ((i, table.classes[c].clone()), v))
                .collect()
        })
        .collect();
    Ok(BettiTable::from_entries(per_class.into_iter().flatten()))
}

/// Betti numbers from upper Koszul simplicial complexes: for `b` in the lcm
/// lattice, `K^b` has faces the squarefree `τ | b` with `b/τ ∈ I`, and
/// `β_{i,b}(S/I) = dim H̃_{i-2}(K^b)`.
pub fn betti_numbers_koszul(ideal: &MonomialIdeal, cap: usize) -> Result<BettiTable> {
    let lattice: Vec<Multidegree> = ideal.lcm_lattice(cap)?.into_iter().collect();
    let per_degree: Vec<Vec<((usize, Multidegree), usize)>> = lattice
        .par_iter()
        .map(|b| {
            if b.is_one() {
                return vec![((0, b.clone()), 1)];
            }
            let support = b.support();
            let mut cells: Vec<Vec<u64>> = vec![Vec::new(); support.count_ones() as usize + 1];
            // submasks of the support, including the empty face
            let mut tau = support;
            loop {
                let mut exps = b.exponents().to_vec();
                for v in GenSubset(tau).iter() {
                    exps[v] -= 1;
                }
                if ideal.contains(&Multidegree::new(exps)) {
                    cells[tau.count_ones() as usize].push(tau);
                }
                if tau == 0 {
                    break;
                }
                tau = (tau - 1) & support;
            }
            while cells.last().is_some_and(Vec::is_empty) {
                cells.pop();
            }
            let h = homology(&cells, |t| GenSubset(t).iter().map(|v| t & !(1 << v)).collect());
            // chain index k holds faces of dimension k - 1; H̃_{k-1} gives β_{k+1}
            h.into_iter()
                .enumerate()
                .map(|(k, v)| ((k + 1, b.clone()), v))
                .collect()
        })
        .collect();
    Ok(BettiTable::from_entries(per_degree.into_iter().flatten()))
}

/// Betti numbers of `S/I`, computed by both oracles and cross-checked.
pub fn betti_numbers(ideal: &MonomialIdeal, cap: usize) -> Result<BettiTable> {
    let taylor = betti_numbers_taylor(ideal, cap)?;
    let koszul = betti_numbers_koszul(ideal, cap)?;
    if taylor != koszul {
        let ((degree, m), _) = taylor
            .entries
            .iter()
            .chain(koszul.entries.iter())
            .find(|((i, m), _)| taylor.get(*i, m) != koszul.get(*i, m))
            .expect("tables differ somewhere");
        return Err(Error::OracleMismatch {
            degree: *degree,
            multidegree: ideal.format_monomial(m),
        });
    }
    Ok(taylor)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Surplus {
    pub multidegree: Multidegree,
    pub critical: usize,
    pub betti: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalityReport {
    pub minimal: bool,
    /// Every multidegree whose critical-cell count exceeds `Σ_i β_{i,m}`.
    pub surplus: Vec<Surplus>,
}

/// Compares critical-cell counts per multidegree against the Betti numbers.
pub fn is_minimal(ideal: &MonomialIdeal, matching: &Matching, cap: usize) -> Result<MinimalityReport> {
    let betti = betti_numbers(ideal, cap)?;
    is_minimal_against(ideal, matching, &betti, cap)
}

/// As [`is_minimal`] with precomputed Betti numbers.
pub fn is_minimal_against(
    ideal: &MonomialIdeal,
    matching: &Matching,
    betti: &BettiTable,
    cap: usize,
) -> Result<MinimalityReport> {
    let mut counts: BTreeMap<Multidegree, usize> = BTreeMap::new();
    for (_, m) in critical_cells(ideal, matching, cap)?.by_degree.into_iter().flatten() {
        *counts.entry(m).or_default() += 1;
    }
    let surplus: Vec<Surplus> = counts
        .into_iter()
        .filter_map(|(m, critical)| {
            let b = betti.sum_at(&m);
            (critical != b).then_some(Surplus {
                multidegree: m,
                critical,
                betti: b,
            })
        })
        .collect();
    Ok(MinimalityReport {
        minimal: surplus.is_empty(),
        surplus,
    })
}

/// One multidegree of a generalized Barile-Macchia certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeCertificate {
    pub m: String,
    pub a: usize,
    /// Generators dividing `m`, `≻`-descending.
    pub order: Vec<String>,
    pub critical_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GbmCertificate {
    pub graph: String,
    pub result: bool,
    pub cochordal: bool,
    pub per_degree: Vec<DegreeCertificate>,
    /// Orders evaluated, summed over multidegrees.
    pub budget_spent: u64,
}

/// Looks for per-multidegree orders making the generalized Barile-Macchia
/// matching of `I(G)` (lcm grading) minimal.
///
/// Co-chordal graphs are accepted at once. Otherwise every multidegree `m`
/// of the lcm lattice is treated separately: only the generators dividing `m`
/// affect the critical count at `m`, so orders on those generators are
/// searched until the count equals `Σ_i β_{i,m}`. `config.budget` applies to
/// each multidegree. A negative result means the budget ran out.
pub fn certify_minimal_gbm(g: &Graph, config: &SearchConfig, cap: usize) -> Result<GbmCertificate> {
    let graph6 = to_graph6(g);
    if is_cochordal(g) {
        return Ok(GbmCertificate {
            graph: graph6,
            result: true,
            cochordal: true,
            per_degree: Vec::new(),
            budget_spent: 0,
        });
    }
    let ideal = g.edge_ideal()?;
    let n = ideal.ngens();
    let betti = betti_numbers(&ideal, cap)?;
    let table = LcmTable::build(&ideal, cap)?;
    let engine = BmEngine::new(&table);
    let edges = g.edges();

    let results: Vec<(Option<TotalOrder>, u64)> = (0..table.classes.len())
        .into_par_iter()
        .map(|c| {
            let m = &table.classes[c];
            let a = betti.sum_at(m);
            let inside: Vec<usize> = (0..n).filter(|&k| ideal.generator(k).divides(m)).collect();
            let embed = |local: &TotalOrder| {
                let mut ranking: Vec<usize> = local.ranking().iter().map(|&k| inside[k]).collect();
                ranking.extend((0..n).filter(|k| !inside.contains(k)));
                TotalOrder::new(ranking).expect("permutation")
            };
            let heuristics = restricted_tree_order(g, &edges, &inside, m)
                .into_iter()
                .collect::<Vec<_>>();
            let report = search_orders(inside.len(), None, &heuristics, &[], config, |local| {
                engine.fiber_critical_count(c, &embed(local)) == a
            });
            match report.outcome {
                Outcome::Found(local) => (Some(embed(&local)), report.orders_tested),
                _ => (None, report.orders_tested),
            }
        })
        .collect();

    let budget_spent = results.iter().map(|r| r.1).sum();
    let mut per_degree = Vec::new();
    let mut orders = BTreeMap::new();
    for (c, (order, _)) in results.iter().enumerate() {
        let Some(order) = order else { continue };
        let m = &table.classes[c];
        per_degree.push(DegreeCertificate {
            m: ideal.format_monomial(m),
            a: betti.sum_at(m),
            order: order
                .ranking()
                .iter()
                .filter(|&&k| ideal.generator(k).divides(m))
                .map(|&k| ideal.format_generator(k))
                .collect(),
            critical_count: engine.fiber_critical_count(c, order),
        });
        orders.insert(m.clone(), order.clone());
    }
    let result = results.iter().all(|r| r.0.is_some());
    if result {
        let fibered = FiberedOrders {
            orders,
            default: TotalOrder::identity(n),
        };
        let matching = gbm_matching(&ideal, &LcmGrading, &fibered, cap)?;
        if !is_minimal_against(&ideal, &matching, &betti, cap)?.minimal {
            return Err(Error::MatchingInvariant(
                "assembled per-multidegree orders do not give a minimal matching".into(),
            ));
        }
    }
    Ok(GbmCertificate {
        graph: graph6,
        result,
        cochordal: false,
        per_degree,
        budget_spent,
    })
}

/// The rooted-tree edge order of the subgraph spanned by the edges dividing
/// `m`, in local indices, when that subgraph is a tree on the support of `m`.
fn restricted_tree_order(g: &Graph, edges: &[(usize, usize)], inside: &[usize], m: &Multidegree) -> Option<TotalOrder> {
    let vertices: Vec<usize> = (0..g.n()).filter(|&v| m.ord(v) > 0).collect();
    let local = |v: usize| vertices.iter().position(|&w| w == v).expect("support vertex");
    let mut sub = Graph::empty(vertices.len());
    for &k in inside {
        let (u, v) = edges[k];
        sub.add_edge(local(u), local(v)).ok()?;
    }
    if !sub.is_tree() {
        return None;
    }
    // sub's edge list is in the same relative order as `inside`
    rooted_tree_edge_order(&sub, 0).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::named_graph;
    use crate::ideal::DEFAULT_ENUMERATION_CAP as CAP;
    use crate::matching::bm_matching;
    use crate::search::Strategy as SearchStrategy;
    use proptest::prelude::*;

    fn ideal(text: &str) -> MonomialIdeal {
        MonomialIdeal::parse(text).unwrap()
    }

    fn mono(i: &MonomialIdeal, text: &str) -> Multidegree {
        let d = i.nvars();
        let mut e = vec![0u16; d];
        for c in text.chars() {
            let v = i.names().iter().position(|n| n == &c.to_string()).unwrap();
            e[v] += 1;
        }
        Multidegree::new(e)
    }

    #[test]
    fn principal_ideal() {
        let x = ideal("x");
        let b = betti_numbers(&x, CAP).unwrap();
        assert_eq!(b.get(0, &Multidegree::one(1)), 1);
        assert_eq!(b.get(1, &mono(&x, "x")), 1);
        assert_eq!(b.totals(), vec![1, 1]);
    }

    #[test]
    fn triangle_and_path() {
        let c3 = ideal("x*y\ny*z\nz*x");
        let b = betti_numbers(&c3, CAP).unwrap();
        assert_eq!(b.totals(), vec![1, 3, 2]);
        assert_eq!(b.get(2, &mono(&c3, "xyz")), 2);

        let p4 = ideal("a*b\nb*c\nc*d");
        let b = betti_numbers(&p4, CAP).unwrap();
        assert_eq!(b.totals(), vec![1, 3, 2]);
        assert_eq!(b.get(2, &mono(&p4, "abc")), 1);
        assert_eq!(b.get(2, &mono(&p4, "bcd")), 1);
        assert_eq!(b.get(2, &mono(&p4, "abcd")), 0);
    }

    #[test]
    fn minimality_examples() {
        let c3 = ideal("x*y\ny*z\nz*x");
        let bm = bm_matching(&c3, &TotalOrder::identity(3), CAP).unwrap();
        assert!(is_minimal(&c3, &bm, CAP).unwrap().minimal);
        let r = is_minimal(&c3, &Matching::default(), CAP).unwrap();
        assert!(!r.minimal);
        assert_eq!(
            r.surplus,
            vec![Surplus {
                multidegree: mono(&c3, "xyz"),
                critical: 4,
                betti: 2
            }]
        );
        let xy = ideal("x\ny");
        assert!(is_minimal(&xy, &Matching::default(), CAP).unwrap().minimal);
    }

    #[test]
    fn certify_examples() {
        let config = SearchConfig::new(SearchStrategy::Exhaustive);
        let c3 = certify_minimal_gbm(&named_graph("cycle", Some(3)).unwrap(), &config, CAP).unwrap();
        assert!(c3.result && c3.cochordal && c3.per_degree.is_empty());

        let p4 = certify_minimal_gbm(&named_graph("path", Some(4)).unwrap(), &config, CAP).unwrap();
        assert!(p4.result);

        let c5 = certify_minimal_gbm(&named_graph("cycle", Some(5)).unwrap(), &config, CAP).unwrap();
        assert!(c5.result && !c5.cochordal);
        for d in &c5.per_degree {
            assert_eq!(d.a, d.critical_count);
        }

        let mut broke = config.clone();
        broke.budget.max_orders = Some(0);
        let c5 = certify_minimal_gbm(&named_graph("cycle", Some(5)).unwrap(), &broke, CAP).unwrap();
        assert!(!c5.result);
        assert_eq!(c5.budget_spent, 0);
    }

    #[test]
    fn edge_ideal_linear_strand() {
        let g = named_graph("cyclohexane-123", None).unwrap();
        let i = g.edge_ideal().unwrap();
        let b = betti_numbers(&i, CAP).unwrap();
        for k in 0..i.ngens() {
            assert_eq!(b.get(1, i.generator(k)), 1);
        }
    }

    // Euler characteristic of the Taylor strand at m versus the alternating Betti sum.
    fn euler_consistent(i: &MonomialIdeal, b: &BettiTable) -> bool {
        let table = LcmTable::build(i, CAP).unwrap();
        table.members_by_class().iter().enumerate().all(|(c, sets)| {
            let chi: i64 = sets.iter().map(|s| if s.len() % 2 == 0 { 1 } else { -1 }).sum();
            let alt: i64 = b
                .entries()
                .filter(|(_, m, _)| *m == &table.classes[c])
                .map(|(k, _, v)| if k % 2 == 0 { v as i64 } else { -(v as i64) })
                .sum();
            chi == alt
        })
    }

    fn arb_ideal() -> impl Strategy<Value = MonomialIdeal> {
        prop::collection::vec(prop::collection::vec(0u16..3, 1..6), 1..8).prop_filter_map("shape", |raw| {
            let d = raw[0].len();
            let raw: Vec<Vec<u16>> = raw
                .into_iter()
                .map(|mut v| {
                    v.resize(d, 0);
                    v
                })
                .collect();
            MonomialIdeal::from_exponents(raw).ok()
        })
    }

    proptest! {
        #[test]
        fn oracles_agree_and_table_invariants(i in arb_ideal()) {
            let t = betti_numbers_taylor(&i, CAP).unwrap();
            let k = betti_numbers_koszul(&i, CAP).unwrap();
            prop_assert_eq!(&t, &k);
            prop_assert_eq!(t.get(0, &Multidegree::one(i.nvars())), 1);
            prop_assert_eq!(t.entries().filter(|(d, _, _)| *d == 0).count(), 1);
            prop_assert_eq!(t.totals()[1], i.ngens());
            prop_assert!(euler_consistent(&i, &t));
        }

        #[test]
        fn critical_counts_dominate_betti(i in arb_ideal(), seed in 0u64..1000) {
            let n = i.ngens();
            let mut r: Vec<usize> = (0..n).collect();
            r.rotate_left(seed as usize % n);
            let bm = bm_matching(&i, &TotalOrder::new(r).unwrap(), CAP).unwrap();
            let betti = betti_numbers(&i, CAP).unwrap();
            let cc = critical_cells(&i, &bm, CAP).unwrap();
            let mut by: BTreeMap<(usize, Multidegree), usize> = BTreeMap::new();
            for (k, cells) in cc.by_degree.iter().enumerate() {
                for (_, m) in cells {
                    *by.entry((k, m.clone())).or_default() += 1;
                }
            }
            for (k, m, v) in betti.entries() {
                prop_assert!(by.get(&(k, m.clone())).copied().unwrap_or(0) >= v);
            }
            let report = is_minimal_against(&i, &bm, &betti, CAP).unwrap();
            let exact = betti.entries().all(|(k, m, v)| by.get(&(k, m.clone())).copied().unwrap_or(0) == v)
                && by.iter().all(|((k, m), &v)| betti.get(*k, m) == v);
            prop_assert_eq!(report.minimal, exact);
        }
    }
}
