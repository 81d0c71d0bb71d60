//! Generic ideals, linear quotients, co-chordal graphs, and the gradings and
//! fibered orders built from them.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::combinat::Graph;
use crate::error::{Error, Result};
use crate::ideal::{GenSubset, LcmTable, MonomialIdeal, Multidegree, TotalOrder};
use crate::matching::{FiberedOrders, Grading, LcmGrading};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericReport {
    pub generic: bool,
    /// The first offending pair of generator indices.
    pub witness: Option<(usize, usize)>,
}

fn min_exponents(ideal: &MonomialIdeal) -> Vec<u16> {
    (0..ideal.nvars())
        .map(|i| ideal.generators().iter().map(|g| g.ord(i)).min().unwrap_or(0))
        .collect()
}

/// Whether every pair of generators sharing an exponent above the ideal's
/// minimum admits a third generator `m″ | lcm(m, m′)` that falls short of
/// `lcm(m, m′)` in variable `j` exactly when `lcm(m, m′)` exceeds the ideal's
/// minimum exponent in `j`.
pub fn is_generic(ideal: &MonomialIdeal) -> GenericReport {
    let floor = min_exponents(ideal);
    let n = ideal.ngens();
    for a in 0..n {
        for b in (a + 1)..n {
            let (m, mp) = (ideal.generator(a), ideal.generator(b));
            let triggered = (0..ideal.nvars()).any(|i| m.ord(i) == mp.ord(i) && m.ord(i) > floor[i]);
            if !triggered {
                continue;
            }
            let l = m.lcm(mp);
            let separated = (0..n).filter(|&c| c != a && c != b).any(|c| {
                let mpp = ideal.generator(c);
                mpp.divides(&l) && (0..ideal.nvars()).all(|j| (l.ord(j) > mpp.ord(j)) == (l.ord(j) > floor[j]))
            });
            if !separated {
                return GenericReport {
                    generic: false,
                    witness: Some((a, b)),
                };
            }
        }
    }
    GenericReport {
        generic: true,
        witness: None,
    }
}

/// Generators lying in some inclusion-minimal subset with lcm `p`, for every realized `p`.
pub fn sigma_blocks(table: &LcmTable) -> Vec<GenSubset> {
    let mut blocks = vec![GenSubset::EMPTY; table.classes.len()];
    for s in 0..table.size() {
        // inclusion-minimal within its lcm class iff it has no bridge
        if table.bridges[s] == 0 {
            let c = table.class[s] as usize;
            blocks[c] = blocks[c].union(GenSubset(s as u64));
        }
    }
    blocks
}

/// The lcm grading with, for each multidegree `p`, the order placing the union
/// of the inclusion-minimal subsets with lcm `p` above all other generators.
/// Both blocks are internally in ascending index order.
pub fn generic_fiber_orders(ideal: &MonomialIdeal, cap: usize) -> Result<(LcmGrading, FiberedOrders<Multidegree>)> {
    let table = LcmTable::build(ideal, cap)?;
    let n = ideal.ngens();
    let mut orders = BTreeMap::new();
    for (c, block) in sigma_blocks(&table).into_iter().enumerate() {
        let ranking: Vec<usize> = block
            .iter()
            .chain(GenSubset::full(n).difference(block).iter())
            .collect();
        orders.insert(table.classes[c].clone(), TotalOrder::new(ranking)?);
    }
    Ok((
        LcmGrading,
        FiberedOrders {
            orders,
            default: TotalOrder::identity(n),
        },
    ))
}

/// `cover[m][m′]`: generators `m″` with `lcm(m, m″) = m·x_j` for some `j`
/// and `lcm(m, m″) | lcm(m, m′)`.
fn linear_covers(ideal: &MonomialIdeal) -> Vec<Vec<u64>> {
    let n = ideal.ngens();
    let linear: Vec<Vec<bool>> = (0..n)
        .map(|m| {
            (0..n)
                .map(|k| {
                    let g = ideal.generator(m);
                    let l = g.lcm(ideal.generator(k));
                    k != m && l.degree() == g.degree() + 1
                })
                .collect()
        })
        .collect();
    (0..n)
        .map(|m| {
            let g = ideal.generator(m);
            (0..n)
                .map(|mp| {
                    let target = g.lcm(ideal.generator(mp));
                    (0..n)
                        .filter(|&k| linear[m][k] && g.lcm(ideal.generator(k)).divides(&target))
                        .fold(0u64, |acc, k| acc | 1 << k)
                })
                .collect()
        })
        .collect()
}

fn can_follow(cover: &[Vec<u64>], placed: u64, m: usize) -> bool {
    let mut rest = placed;
    while rest != 0 {
        let mp = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if cover[m][mp] & placed == 0 {
            return false;
        }
    }
    true
}

/// An order with linear quotients, if one exists.
///
/// Generators are placed from the `⊐`-smallest up. Whether `m` may be placed
/// next depends only on the set already placed, so the search memoizes dead
/// sets and runs in `O(2^n · n²)` time at worst. Higher-degree generators are
/// tried first at each step.
pub fn linear_quotients_order(ideal: &MonomialIdeal, cap: usize) -> Result<Option<TotalOrder>> {
    ideal.check_cap(cap)?;
    let n = ideal.ngens();
    let cover = linear_covers(ideal);
    let mut candidates: Vec<usize> = (0..n).collect();
    candidates.sort_by_key(|&m| (std::cmp::Reverse(ideal.generator(m).degree()), m));
    let full = GenSubset::full(n).bits();
    let mut dead: HashSet<u64> = HashSet::new();
    let mut sequence: Vec<usize> = Vec::with_capacity(n);
    // explicit DFS: stack of (placed set, next candidate slot)
    let mut stack: Vec<(u64, usize)> = vec![(0, 0)];
    while let Some(&mut (placed, ref mut slot)) = stack.last_mut() {
        if placed == full {
            sequence.reverse();
            return Ok(Some(TotalOrder::new(sequence)?));
        }
        let next = candidates[*slot..]
            .iter()
            .position(|&m| placed >> m & 1 == 0 && can_follow(&cover, placed, m) && !dead.contains(&(placed | 1 << m)));
        match next {
            Some(k) => {
                let m = candidates[*slot + k];
                *slot += k + 1;
                sequence.push(m);
                stack.push((placed | 1 << m, 0));
            }
            None => {
                dead.insert(placed);
                stack.pop();
                sequence.pop();
            }
        }
    }
    Ok(None)
}

/// Checks the linear-quotients condition for every generator against all `⊐`-smaller ones.
pub fn validate_lq_order(ideal: &MonomialIdeal, order: &TotalOrder) -> Result<()> {
    if order.len() != ideal.ngens() {
        return Err(Error::InvalidOrder(format!(
            "order has {} generators, the ideal has {}",
            order.len(),
            ideal.ngens()
        )));
    }
    let cover = linear_covers(ideal);
    for &m in order.ranking() {
        let below = order.below(m).bits();
        if !can_follow(&cover, below, m) {
            return Err(Error::NotLinearQuotients(format!(
                "generator {} has a non-linear colon against smaller generators",
                ideal.format_generator(m)
            )));
        }
    }
    Ok(())
}

/// Data extracted from an order with linear quotients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LqStructure {
    pub order: TotalOrder,
    /// For each generator `m`: variable `j` ↦ witness `n_j^m`, the `⊐`-smallest
    /// generator below `m` with `lcm(n, m) = x_j·m`.
    pub witnesses: Vec<BTreeMap<usize, usize>>,
    /// Realized pairs `(α, m)` with `α = lcm σ` and `m = max σ` for some nonempty σ.
    pub fibers: BTreeSet<(Multidegree, usize)>,
}

impl LqStructure {
    pub fn j_set(&self, m: usize) -> Vec<usize> {
        self.witnesses[m].keys().copied().collect()
    }

    /// `N_m`, the chosen witnesses of `m`.
    pub fn n_set(&self, m: usize) -> GenSubset {
        GenSubset::from_indices(self.witnesses[m].values().copied())
    }

    /// `M_α`.
    pub fn maxima(&self, alpha: &Multidegree) -> Vec<usize> {
        self.fibers
            .iter()
            .filter(|(a, _)| a == alpha)
            .map(|(_, m)| *m)
            .collect()
    }
}

pub fn lq_structure(ideal: &MonomialIdeal, order: &TotalOrder, cap: usize) -> Result<LqStructure> {
    validate_lq_order(ideal, order)?;
    let table = LcmTable::build(ideal, cap)?;
    let n = ideal.ngens();
    let witnesses = (0..n)
        .map(|m| {
            let g = ideal.generator(m);
            let mut map = BTreeMap::new();
            // ⊐-smallest first, so the first hit per variable is kept
            for &k in order.ranking().iter().rev() {
                if !order.succ(m, k) {
                    continue;
                }
                let l = g.lcm(ideal.generator(k));
                if l.degree() == g.degree() + 1 {
                    let j = (0..ideal.nvars())
                        .find(|&j| l.ord(j) != g.ord(j))
                        .expect("lcm differs in one variable");
                    map.entry(j).or_insert(k);
                }
            }
            map
        })
        .collect();
    let fibers = (1..table.size() as u64)
        .map(|s| {
            let sigma = GenSubset(s);
            (table.lcm(sigma).clone(), order.max_of(sigma).expect("nonempty"))
        })
        .collect();
    Ok(LqStructure {
        order: order.clone(),
        witnesses,
        fibers,
    })
}

/// `f(σ) = (lcm σ, max_⊐ σ)`; the empty set has no maximum.
#[derive(Clone, Debug)]
pub struct LqGrading {
    pub order: TotalOrder,
}

pub type LqLabel = (Multidegree, Option<usize>);

impl Grading for LqGrading {
    type Label = LqLabel;

    fn label(&self, ideal: &MonomialIdeal, sigma: GenSubset) -> LqLabel {
        (ideal.lcm_of(sigma), self.order.max_of(sigma))
    }

    /// `(α, m) ≤ (α′, m′)` iff `α` strictly divides `α′`, or `α = α′` and `m ⊑ m′`.
    fn label_le(&self, a: &LqLabel, b: &LqLabel) -> bool {
        if a.0 != b.0 {
            return a.0.divides(&b.0);
        }
        match (a.1, b.1) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(x), Some(y)) => x == y || self.order.succ(y, x),
        }
    }

    fn witness(&self, label: &LqLabel) -> Multidegree {
        label.0.clone()
    }
}

/// Per-fiber orders for the grading `(lcm, max)`: in fiber `(α, m)`, generators
/// outside `N_m` come first in `⊐` order, then `N_m` with `n_j ≻ n_{j′}` iff `j > j′`.
pub fn lq_fiber_orders(s: &LqStructure) -> (LqGrading, FiberedOrders<LqLabel>) {
    let n = s.order.len();
    let per_max: Vec<TotalOrder> = (0..n)
        .map(|m| {
            let nm = s.n_set(m);
            let mut ranking: Vec<usize> = s.order.ranking().iter().copied().filter(|&g| !nm.contains(g)).collect();
            ranking.extend(s.witnesses[m].values().rev());
            TotalOrder::new(ranking).expect("permutation")
        })
        .collect();
    let orders = s
        .fibers
        .iter()
        .map(|(alpha, m)| ((alpha.clone(), Some(*m)), per_max[*m].clone()))
        .collect();
    (
        LqGrading { order: s.order.clone() },
        FiberedOrders {
            orders,
            default: s.order.clone(),
        },
    )
}

/// Lexicographic breadth-first search order.
fn lex_bfs(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut labels: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for step in 0..n {
        let v = (0..n)
            .filter(|&v| !visited[v])
            .max_by(|&a, &b| labels[a].cmp(&labels[b]).then(b.cmp(&a)))
            .expect("unvisited vertex");
        visited[v] = true;
        order.push(v);
        for w in 0..n {
            if !visited[w] && g.has_edge(v, w) {
                labels[w].push(n - step);
            }
        }
    }
    order
}

/// Chordality by checking that reversed LexBFS order is a perfect elimination order.
pub fn is_chordal(g: &Graph) -> bool {
    let order = lex_bfs(g);
    let mut pos = vec![0usize; g.n()];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    order.iter().all(|&v| {
        let earlier: Vec<usize> = (0..g.n()).filter(|&w| g.has_edge(v, w) && pos[w] < pos[v]).collect();
        match earlier.iter().max_by_key(|&&w| pos[w]) {
            None => true,
            Some(&u) => earlier.iter().all(|&w| w == u || g.has_edge(u, w)),
        }
    })
}

pub fn is_cochordal(g: &Graph) -> bool {
    is_chordal(&g.complement())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::{connected_graphs, named_graph};
    use crate::ideal::DEFAULT_ENUMERATION_CAP as CAP;
    use crate::matching::validate_grading;
    use proptest::prelude::*;

    fn ideal(text: &str) -> MonomialIdeal {
        MonomialIdeal::parse(text).unwrap()
    }

    // Quantifier-by-quantifier transcription of the generic condition.
    fn generic_brute(i: &MonomialIdeal) -> bool {
        let n = i.ngens();
        let d = i.nvars();
        let ord_i = |j: usize| (0..n).map(|k| i.generator(k).exponents()[j]).min().unwrap();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let (m, mp) = (i.generator(a).exponents(), i.generator(b).exponents());
                if !(0..d).any(|j| m[j] == mp[j] && m[j] > ord_i(j)) {
                    continue;
                }
                let ok = (0..n).any(|c| {
                    let mpp = i.generator(c).exponents();
                    c != a
                        && c != b
                        && (0..d).all(|j| mpp[j] <= m[j].max(mp[j]))
                        && (0..d).all(|j| (m[j].max(mp[j]) > mpp[j]) == (m[j].max(mp[j]) > ord_i(j)))
                });
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    fn brute_lq_exists(i: &MonomialIdeal) -> bool {
        let mut r: Vec<usize> = (0..i.ngens()).collect();
        loop {
            if validate_lq_order(i, &TotalOrder::new(r.clone()).unwrap()).is_ok() {
                return true;
            }
            if !crate::search::next_permutation(&mut r) {
                return false;
            }
        }
    }

    // No induced cycle of length at least four.
    fn chordal_brute(g: &Graph) -> bool {
        let n = g.n();
        (0u64..1 << n).filter(|s| s.count_ones() >= 4).all(|s| {
            let vs: Vec<usize> = (0..n).filter(|&v| s >> v & 1 == 1).collect();
            let all_two = vs.iter().all(|&v| (g.neighbors(v) & s).count_ones() == 2);
            let mut sub = Graph::empty(vs.len());
            for (a, &u) in vs.iter().enumerate() {
                for (b, &w) in vs.iter().enumerate().skip(a + 1) {
                    if g.has_edge(u, w) {
                        sub.add_edge(a, b).unwrap();
                    }
                }
            }
            !(all_two && sub.is_connected())
        })
    }

    #[test]
    fn generic_examples() {
        assert!(is_generic(&ideal("x\ny")).generic);
        assert!(is_generic(&ideal("x^2*y\nx*z\ny*z^2")).generic);
        let c3 = ideal("x*y\ny*z\nz*x");
        assert_eq!(
            is_generic(&c3),
            GenericReport {
                generic: false,
                witness: Some((0, 1))
            }
        );
        assert_eq!(c3.format_generator(0), "x*y");
        assert_eq!(c3.format_generator(1), "y*z");
    }

    #[test]
    fn generic_orders_examples() {
        let xy = ideal("x\ny");
        let (_, o) = generic_fiber_orders(&xy, CAP).unwrap();
        assert_eq!(o.get(&xy.lcm_of(GenSubset(0b11))).ranking(), &[0, 1]);

        let p4 = ideal("a*b\nb*c\nc*d");
        let (_, o) = generic_fiber_orders(&p4, CAP).unwrap();
        assert_eq!(o.get(&p4.lcm_of(GenSubset(0b111))).ranking(), &[0, 2, 1]);

        let g = ideal("x^2*y\nx*z\ny*z^2");
        let table = LcmTable::build(&g, CAP).unwrap();
        let top = table.class_of(GenSubset(0b111));
        // brute force: union of subsets with that lcm and no proper subset with it
        let minimal: GenSubset = (1u64..8)
            .map(GenSubset)
            .filter(|&s| table.class_of(s) == top)
            .filter(|&s| {
                (1u64..8)
                    .map(GenSubset)
                    .all(|t| t == s || !t.is_subset(s) || table.class_of(t) != top)
            })
            .fold(GenSubset::EMPTY, GenSubset::union);
        assert_eq!(sigma_blocks(&table)[top], minimal);
    }

    #[test]
    fn lq_examples() {
        let xy = ideal("x\ny");
        assert!(linear_quotients_order(&xy, CAP).unwrap().is_some());
        let c3 = ideal("x*y\ny*z\nz*x");
        let o = linear_quotients_order(&c3, CAP).unwrap().unwrap();
        validate_lq_order(&c3, &o).unwrap();
        assert!(linear_quotients_order(&ideal("a*b\nc*d"), CAP).unwrap().is_none());
        assert!(matches!(
            validate_lq_order(&ideal("a*b\nc*d"), &TotalOrder::identity(2)),
            Err(Error::NotLinearQuotients(_))
        ));
    }

    #[test]
    fn lq_structure_examples() {
        let xy = ideal("x\ny");
        let o = TotalOrder::identity(2);
        let s = lq_structure(&xy, &o, CAP).unwrap();
        // x ⊐ y: x sees y with lcm(x, y) = x·y
        assert_eq!(s.j_set(0), vec![1]);
        assert!(s.j_set(1).is_empty());
        assert_eq!(s.witnesses[0][&1], 1);

        let principal = ideal("x^2*y");
        let s = lq_structure(&principal, &TotalOrder::identity(1), CAP).unwrap();
        assert!(s.witnesses[0].is_empty());
        let (grading, orders) = lq_fiber_orders(&s);
        assert_eq!(orders.orders.len(), 1);
        validate_grading(&principal, &grading).unwrap();

        let c3 = ideal("x*y\ny*z\nz*x");
        let o = linear_quotients_order(&c3, CAP).unwrap().unwrap();
        let s = lq_structure(&c3, &o, CAP).unwrap();
        let mut sizes = Vec::new();
        for m in 0..3 {
            for (&j, &w) in &s.witnesses[m] {
                assert!(o.succ(m, w));
                let l = c3.generator(m).lcm(c3.generator(w));
                assert_eq!(l.degree(), c3.generator(m).degree() + 1);
                assert_eq!(l.ord(j), c3.generator(m).ord(j) + 1);
            }
            sizes.push(s.j_set(m).len());
        }
        // (xy, yz) : zx = (y), and the first generator has an empty colon
        sizes.sort();
        assert_eq!(sizes, vec![0, 1, 1]);
        for (alpha, _) in &s.fibers {
            assert!(!s.maxima(alpha).is_empty());
        }
    }

    #[test]
    fn lq_fibers_of_two_variables() {
        let xy = ideal("x\ny");
        let s = lq_structure(&xy, &TotalOrder::identity(2), CAP).unwrap();
        let (grading, orders) = lq_fiber_orders(&s);
        validate_grading(&xy, &grading).unwrap();
        let keys: Vec<LqLabel> = orders.orders.keys().cloned().collect();
        assert_eq!(
            keys,
            vec![
                (xy.lcm_of(GenSubset(0b10)), Some(1)),
                (xy.lcm_of(GenSubset(0b01)), Some(0)),
                (xy.lcm_of(GenSubset(0b11)), Some(0)),
            ]
        );
        // fiber with max x: N_x = {y} goes to the bottom
        assert_eq!(orders.get(&keys[2]).ranking(), &[0, 1]);
    }

    #[test]
    fn lq_fibers_of_the_four_cycle() {
        use crate::betti::is_minimal;
        use crate::matching::{gbm_matching, gbm_matching_in_fibers};
        use crate::morse::validate_matching;

        let c4 = named_graph("cycle", Some(4)).unwrap().edge_ideal().unwrap();
        let o = linear_quotients_order(&c4, CAP).unwrap().unwrap();
        let s = lq_structure(&c4, &o, CAP).unwrap();
        let (grading, orders) = lq_fiber_orders(&s);
        // the top generator together with its two witnesses has only itself as a bridge
        assert!(matches!(
            gbm_matching(&c4, &grading, &orders, CAP),
            Err(Error::GradingHypothesis { .. })
        ));
        let m = gbm_matching_in_fibers(&c4, &grading, &orders, CAP).unwrap();
        assert!(validate_matching(&c4, &grading, &m).is_empty());
        assert!(is_minimal(&c4, &m, CAP).unwrap().minimal);
    }

    #[test]
    fn cochordal_examples() {
        assert!(is_cochordal(&named_graph("complete", Some(5)).unwrap()));
        assert!(is_cochordal(&named_graph("cycle", Some(3)).unwrap()));
        assert!(!is_cochordal(&named_graph("cycle", Some(5)).unwrap()));
    }

    #[test]
    fn chordality_matches_brute_force_and_lq_exists_for_cochordal() {
        for n in 2..=6 {
            for g in connected_graphs(n) {
                assert_eq!(is_chordal(&g), chordal_brute(&g), "{:?}", g.edges());
                let co = is_cochordal(&g);
                let i = g.edge_ideal().unwrap();
                let lq = linear_quotients_order(&i, CAP).unwrap();
                if co {
                    validate_lq_order(&i, lq.as_ref().unwrap()).unwrap();
                }
                if n <= 5 {
                    assert_eq!(lq.is_some(), brute_lq_exists(&i));
                }
            }
        }
    }

    fn arb_ideal() -> impl Strategy<Value = MonomialIdeal> {
        prop::collection::vec(prop::collection::vec(0u16..4, 3), 1..7)
            .prop_filter_map("nonunit", |raw| MonomialIdeal::from_exponents(raw).ok())
    }

    proptest! {
        #[test]
        fn generic_matches_brute_force(i in arb_ideal()) {
            prop_assert_eq!(is_generic(&i).generic, generic_brute(&i));
        }

        #[test]
        fn lq_search_is_sound_and_complete(i in arb_ideal()) {
            match linear_quotients_order(&i, CAP).unwrap() {
                Some(o) => prop_assert!(validate_lq_order(&i, &o).is_ok()),
                None => prop_assert!(!brute_lq_exists(&i)),
            }
        }
    }
}
