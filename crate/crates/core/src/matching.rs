//! Bridges, gaps and the two matching constructions on the Taylor digraph:
//! the (generalized) Barile-Macchia algorithm and the (generalized) Lyubeznik
//! matching.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal::{GenSubset, LcmTable, MonomialIdeal, Multidegree, TotalOrder};

/// An lcm-compatible grading of the Taylor complex.
///
/// Implementations must be order-preserving (`σ ⊆ τ` implies
/// `label(σ) <= label(τ)` in the fiber order) and must factor the lcm map
/// through [`Grading::witness`]. [`validate_grading`] checks both.
pub trait Grading: Sync {
    type Label: Clone + Ord + Debug + Send + Sync;

    fn label(&self, ideal: &MonomialIdeal, sigma: GenSubset) -> Self::Label;

    /// The fiber partial order.
    fn label_le(&self, a: &Self::Label, b: &Self::Label) -> bool;

    /// The multidegree every subset in this fiber has as its lcm.
    fn witness(&self, label: &Self::Label) -> Multidegree;
}

/// `f = lcm`, fibers are multidegrees ordered by divisibility.
#[derive(Clone, Copy, Debug, Default)]
pub struct LcmGrading;

impl Grading for LcmGrading {
    type Label = Multidegree;

    fn label(&self, ideal: &MonomialIdeal, sigma: GenSubset) -> Multidegree {
        ideal.lcm_of(sigma)
    }

    fn label_le(&self, a: &Multidegree, b: &Multidegree) -> bool {
        a.divides(b)
    }

    fn witness(&self, label: &Multidegree) -> Multidegree {
        label.clone()
    }
}

/// Checks order preservation on covering pairs and lcm compatibility on every subset.
pub fn validate_grading<G: Grading>(ideal: &MonomialIdeal, grading: &G) -> Result<()> {
    let n = ideal.ngens();
    for s in 0..1u64 << n {
        let sigma = GenSubset(s);
        let label = grading.label(ideal, sigma);
        if grading.witness(&label) != ideal.lcm_of(sigma) {
            return Err(Error::GradingHypothesis {
                sigma: sigma.indices(),
                detail: format!("label {label:?} is not lcm-compatible"),
            });
        }
        for g in sigma.iter() {
            let below = grading.label(ideal, sigma.without(g));
            if !grading.label_le(&below, &label) {
                return Err(Error::GradingHypothesis {
                    sigma: sigma.indices(),
                    detail: format!("grading decreases when adding generator {g}"),
                });
            }
        }
    }
    Ok(())
}

/// One total order per fiber, with a fallback for unlisted fibers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberedOrders<L: Ord> {
    pub orders: BTreeMap<L, TotalOrder>,
    pub default: TotalOrder,
}

impl<L: Ord> FiberedOrders<L> {
    pub fn constant(order: TotalOrder) -> Self {
        FiberedOrders {
            orders: BTreeMap::new(),
            default: order,
        }
    }

    pub fn get(&self, label: &L) -> &TotalOrder {
        self.orders.get(label).unwrap_or(&self.default)
    }
}

/// A directed Taylor-digraph edge `sigma → tau` with `tau = sigma ∖ {g}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatchedEdge {
    pub sigma: GenSubset,
    pub tau: GenSubset,
}

impl MatchedEdge {
    /// The generator removed along the edge, if the pair really is a Taylor edge.
    pub fn removed(&self) -> Option<usize> {
        let diff = self.sigma.difference(self.tau);
        (self.tau.is_subset(self.sigma) && diff.len() == 1).then(|| diff.iter().next().unwrap())
    }
}

/// A set of matched edges, kept sorted by source.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matching {
    edges: Vec<MatchedEdge>,
}

impl Matching {
    pub fn from_edges(mut edges: Vec<MatchedEdge>) -> Self {
        edges.sort();
        edges.dedup();
        Matching { edges }
    }

    pub fn edges(&self) -> &[MatchedEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Partner of every matched vertex. Later edges win on conflicts; use
    /// `morse::validate_matching` to detect those.
    pub fn partners(&self) -> HashMap<GenSubset, GenSubset> {
        let mut map = HashMap::with_capacity(2 * self.edges.len());
        for e in &self.edges {
            map.insert(e.sigma, e.tau);
            map.insert(e.tau, e.sigma);
        }
        map
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("matching serializes")
    }
}

/// `{m ∈ σ : lcm(σ ∖ m) = lcm(σ)}`.
pub fn bridges(ideal: &MonomialIdeal, sigma: GenSubset) -> GenSubset {
    let full = ideal.lcm_of(sigma);
    GenSubset::from_indices(sigma.iter().filter(|&m| ideal.lcm_of(sigma.without(m)) == full))
}

/// `{m ∉ σ : m | lcm(σ)}`.
pub fn gaps(ideal: &MonomialIdeal, sigma: GenSubset) -> GenSubset {
    let l = ideal.lcm_of(sigma);
    GenSubset::from_indices((0..ideal.ngens()).filter(|&m| !sigma.contains(m) && ideal.generator(m).divides(&l)))
}

/// The `≻`-smallest bridge, or `None` when σ has no bridge.
pub fn sbridge(ideal: &MonomialIdeal, order: &TotalOrder, sigma: GenSubset) -> Option<usize> {
    order.min_of(bridges(ideal, sigma))
}

/// Gaps `m` of σ such that `σ ∪ {m}` has no new bridge dominated by `m`.
pub fn true_gaps(ideal: &MonomialIdeal, order: &TotalOrder, sigma: GenSubset) -> GenSubset {
    let own = bridges(ideal, sigma);
    GenSubset::from_indices(gaps(ideal, sigma).iter().filter(|&m| {
        let fresh = bridges(ideal, sigma.with(m)).difference(own);
        fresh.intersection(order.below(m)).is_empty()
    }))
}

/// Subsets of cardinality at least 3, by decreasing cardinality and then ascending bits.
pub(crate) fn omega_order(subsets: impl IntoIterator<Item = GenSubset>) -> Vec<GenSubset> {
    let mut v: Vec<GenSubset> = subsets.into_iter().filter(|s| s.len() >= 3).collect();
    v.sort_by(|a, b| b.len().cmp(&a.len()).then(a.bits().cmp(&b.bits())));
    v
}

/// Algorithm 2.6 over the subsets in `omega` (already in processing order).
///
/// `order_for(σ)` supplies the total order used for σ's smallest bridge; all
/// subsets that can share a target must use the same order. Step (3) keeps,
/// for each target, the edge whose smallest bridge is `≻`-smallest.
pub(crate) fn run_barile_macchia<'a, B, O>(omega: &[GenSubset], bridges_of: B, order_for: O) -> Vec<MatchedEdge>
where
    B: Fn(GenSubset) -> GenSubset,
    O: Fn(GenSubset) -> &'a TotalOrder,
{
    let mut removed: HashSet<GenSubset> = HashSet::new();
    // target -> (source, rank of its smallest bridge)
    let mut winner: HashMap<GenSubset, (GenSubset, usize)> = HashMap::new();
    for &sigma in omega {
        if removed.contains(&sigma) {
            continue;
        }
        let order = order_for(sigma);
        let Some(sb) = order.min_of(bridges_of(sigma)) else {
            continue;
        };
        let tau = sigma.without(sb);
        removed.insert(tau);
        let rank = order.position(sb);
        winner
            .entry(tau)
            .and_modify(|w| {
                if rank > w.1 {
                    *w = (sigma, rank);
                }
            })
            .or_insert((sigma, rank));
    }
    winner
        .into_iter()
        .map(|(tau, (sigma, _))| MatchedEdge { sigma, tau })
        .collect()
}

/// Barile-Macchia matching for a single total order.
pub fn bm_matching(ideal: &MonomialIdeal, order: &TotalOrder, cap: usize) -> Result<Matching> {
    let table = LcmTable::build(ideal, cap)?;
    Ok(BmEngine::new(&table).matching(order))
}

/// Reusable Barile-Macchia runner over a precomputed [`LcmTable`].
///
/// Matched pairs share their lcm, so the algorithm can be run one lcm class
/// at a time; `fiber_critical_count` does exactly that.
pub struct BmEngine<'t> {
    table: &'t LcmTable,
    omega: Vec<GenSubset>,
    omega_by_class: Vec<Vec<GenSubset>>,
    class_sizes: Vec<usize>,
}

impl<'t> BmEngine<'t> {
    pub fn new(table: &'t LcmTable) -> Self {
        let members = table.members_by_class();
        let class_sizes = members.iter().map(Vec::len).collect();
        let omega_by_class: Vec<Vec<GenSubset>> = members.into_iter().map(omega_order).collect();
        let omega = omega_order((0..table.size() as u64).map(GenSubset));
        BmEngine {
            table,
            omega,
            omega_by_class,
            class_sizes,
        }
    }

    pub fn table(&self) -> &LcmTable {
        self.table
    }

    pub fn matching(&self, order: &TotalOrder) -> Matching {
        Matching::from_edges(run_barile_macchia(&self.omega, |s| self.table.bridges(s), |_| order))
    }

    /// Generalized BM matching for the lcm grading with one order per lcm class.
    pub fn matching_per_class<'o>(&self, order_for_class: impl Fn(usize) -> &'o TotalOrder) -> Matching {
        Matching::from_edges(run_barile_macchia(
            &self.omega,
            |s| self.table.bridges(s),
            |s| order_for_class(self.table.class_of(s)),
        ))
    }

    /// Number of BM-critical subsets in each lcm class.
    pub fn critical_counts(&self, order: &TotalOrder) -> Vec<usize> {
        let mut counts = self.class_sizes.clone();
        for e in self.matching(order).edges() {
            counts[self.table.class_of(e.sigma)] -= 2;
        }
        counts
    }

    /// Number of critical subsets with lcm in class `class` when Algorithm 2.6 runs on that
    /// fiber alone with `order`.
    pub fn fiber_critical_count(&self, class: usize, order: &TotalOrder) -> usize {
        let edges = run_barile_macchia(&self.omega_by_class[class], |s| self.table.bridges(s), |_| order);
        self.class_sizes[class] - 2 * edges.len()
    }
}

/// Generalized Barile-Macchia matching: Algorithm 2.6 on every fiber `f⁻¹(p)` with `≻_p`.
///
/// Checks that removing the fiber-wise smallest bridge never leaves the fiber.
/// Under that hypothesis targets stay in their source's fiber, so a single pass
/// in global cardinality order, using each subset's own fiber order, produces the
/// same union of per-fiber runs.
pub fn gbm_matching<G: Grading>(
    ideal: &MonomialIdeal,
    grading: &G,
    orders: &FiberedOrders<G::Label>,
    cap: usize,
) -> Result<Matching> {
    let table = LcmTable::build(ideal, cap)?;
    let labels = all_labels(ideal, grading);
    for s in 0..table.size() {
        let sigma = GenSubset(s as u64);
        let order = orders.get(&labels[s]);
        if let Some(sb) = order.min_of(table.bridges(sigma)) {
            let tau = sigma.without(sb);
            if labels[tau.bits() as usize] != labels[s] {
                return Err(Error::GradingHypothesis {
                    sigma: sigma.indices(),
                    detail: format!(
                        "removing smallest bridge {sb} moves {:?} to {:?}",
                        labels[s],
                        labels[tau.bits() as usize]
                    ),
                });
            }
        }
    }
    let omega = omega_order((0..table.size() as u64).map(GenSubset));
    Ok(Matching::from_edges(run_barile_macchia(
        &omega,
        |s| table.bridges(s),
        |s| orders.get(&labels[s.bits() as usize]),
    )))
}

/// Algorithm 2.6 run inside each fiber without the hypothesis check: a subset
/// whose smallest bridge leads out of its fiber is left unmatched.
///
/// Coincides with [`gbm_matching`] whenever that succeeds. Needed for gradings
/// such as `(lcm σ, max σ)` where the only bridge of σ can be its maximum.
pub fn gbm_matching_in_fibers<G: Grading>(
    ideal: &MonomialIdeal,
    grading: &G,
    orders: &FiberedOrders<G::Label>,
    cap: usize,
) -> Result<Matching> {
    let table = LcmTable::build(ideal, cap)?;
    let labels = all_labels(ideal, grading);
    let order_of = |s: GenSubset| orders.get(&labels[s.bits() as usize]);
    let omega = omega_order((0..table.size() as u64).map(GenSubset));
    Ok(Matching::from_edges(run_barile_macchia(
        &omega,
        |s| {
            let b = table.bridges(s);
            match order_of(s).min_of(b) {
                Some(sb) if labels[s.without(sb).bits() as usize] == labels[s.bits() as usize] => b,
                _ => GenSubset(0),
            }
        },
        order_of,
    )))
}

fn all_labels<G: Grading>(ideal: &MonomialIdeal, grading: &G) -> Vec<G::Label> {
    (0..1u64 << ideal.ngens())
        .map(|s| grading.label(ideal, GenSubset(s)))
        .collect()
}

/// `(v_L(σ), m_L(σ))` for σ listed as `m_1 ≻ … ≻ m_q`.
///
/// `v_L` is the largest `k` such that some generator `m ≺ m_k` divides
/// `lcm(m_1, …, m_k)`; `m_L` is the `≻`-smallest generator dividing that
/// prefix lcm. Returns `None` when no such `k` exists.
pub fn vl_ml(ideal: &MonomialIdeal, order: &TotalOrder, sigma: GenSubset) -> Option<(usize, usize)> {
    let sorted = order.sorted_desc(sigma);
    let mut prefix = Vec::with_capacity(sorted.len());
    let mut acc = Multidegree::one(ideal.nvars());
    for &g in &sorted {
        acc = acc.lcm(ideal.generator(g));
        prefix.push(acc.clone());
    }
    let n = ideal.ngens();
    for k in (0..sorted.len()).rev() {
        let mk = sorted[k];
        let witness = (0..n).any(|m| order.succ(mk, m) && ideal.generator(m).divides(&prefix[k]));
        if witness {
            let ml = (0..n)
                .filter(|&m| ideal.generator(m).divides(&prefix[k]))
                .max_by_key(|&m| order.position(m))
                .expect("m_k divides its own prefix");
            return Some((k + 1, ml));
        }
    }
    None
}

/// Generalized Lyubeznik matching `⋃_p A_p`.
///
/// Both representatives `σ ∖ m_L` and `σ ∪ m_L` must produce the same edge,
/// and the result must be vertex-disjoint; either failure is reported with the
/// offending subset.
pub fn lyubeznik_matching<G: Grading>(
    ideal: &MonomialIdeal,
    grading: &G,
    orders: &FiberedOrders<G::Label>,
    cap: usize,
) -> Result<Matching> {
    ideal.check_cap(cap)?;
    let labels = all_labels(ideal, grading);
    let mut by_source: BTreeMap<GenSubset, GenSubset> = BTreeMap::new();
    for (s, label) in labels.iter().enumerate() {
        let sigma = GenSubset(s as u64);
        let order = orders.get(label);
        let Some((_, ml)) = vl_ml(ideal, order, sigma) else {
            continue;
        };
        let up = sigma.with(ml);
        let down = sigma.without(ml);
        if labels[up.bits() as usize] != labels[down.bits() as usize] {
            return Err(Error::GradingHypothesis {
                sigma: sigma.indices(),
                detail: format!("σ ∪ m_L and σ ∖ m_L lie in different fibers (m_L = {ml})"),
            });
        }
        let other = sigma.toggle(ml);
        let partner = vl_ml(ideal, orders.get(&labels[other.bits() as usize]), other);
        if partner.map(|p| p.1) != Some(ml) {
            return Err(Error::MatchingInvariant(format!(
                "m_L not well defined: {sigma} gives {ml}, {other} gives {partner:?}"
            )));
        }
        if let Some(prev) = by_source.insert(up, down) {
            if prev != down {
                return Err(Error::MatchingInvariant(format!(
                    "source {up} matched to both {prev} and {down}"
                )));
            }
        }
    }
    let matching = Matching::from_edges(
        by_source
            .into_iter()
            .map(|(sigma, tau)| MatchedEdge { sigma, tau })
            .collect(),
    );
    let mut seen = HashSet::new();
    for e in matching.edges() {
        for v in [e.sigma, e.tau] {
            if !seen.insert(v) {
                return Err(Error::MatchingInvariant(format!("vertex {v} used twice")));
            }
        }
    }
    Ok(matching)
}

/// A subset where `m_L` exists, lies in σ, and differs from the smallest bridge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MlSbridgeMismatch {
    pub sigma: GenSubset,
    pub m_l: usize,
    pub sbridge: Option<usize>,
}

/// Lists every σ violating `m_L(σ) = sbridge(σ)` (both taken in σ's fiber order).
pub fn compare_ml_sbridge<G: Grading>(
    ideal: &MonomialIdeal,
    grading: &G,
    orders: &FiberedOrders<G::Label>,
    cap: usize,
) -> Result<Vec<MlSbridgeMismatch>> {
    let table = LcmTable::build(ideal, cap)?;
    let mut out = Vec::new();
    for s in 0..table.size() {
        let sigma = GenSubset(s as u64);
        let order = orders.get(&grading.label(ideal, sigma));
        if let Some((_, ml)) = vl_ml(ideal, order, sigma) {
            if sigma.contains(ml) {
                let sb = order.min_of(table.bridges(sigma));
                if sb != Some(ml) {
                    out.push(MlSbridgeMismatch {
                        sigma,
                        m_l: ml,
                        sbridge: sb,
                    });
                }
            }
        }
    }
    Ok(out)
}
