//! Subset types, bridge-friendliness of an order, and the search for a
//! bridge-friendly order.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ideal::{GenSubset, LcmTable, MonomialIdeal, TotalOrder};
use crate::search::{self, Outcome, SearchConfig};

/// Type flags of one subset under one order. The flags are independent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SubsetClassification {
    pub type1: bool,
    pub potentially_type2: bool,
    pub type2: bool,
}

/// Precomputed bridge data for repeated checks under many orders.
///
/// Bridges and gaps do not depend on the order, and neither does the set of
/// new bridges created by adjoining a gap, so one [`LcmTable`] serves every order.
pub struct BridgeChecker {
    table: LcmTable,
    /// Subsets with at least one bridge, by cardinality then bits.
    bridged: Vec<GenSubset>,
    /// Start of each cardinality block in `bridged`.
    blocks: Vec<usize>,
}

/// Per-order view: positions and `below` masks.
struct OrderView {
    position: Vec<usize>,
    below: Vec<u64>,
}

impl OrderView {
    fn new(order: &TotalOrder) -> Self {
        let n = order.len();
        OrderView {
            position: order.positions().to_vec(),
            below: (0..n).map(|g| order.below(g).bits()).collect(),
        }
    }

    fn min_of(&self, set: u64) -> Option<usize> {
        GenSubset(set).iter().max_by_key(|&g| self.position[g])
    }
}

impl BridgeChecker {
    pub fn new(ideal: &MonomialIdeal, cap: usize) -> Result<Self> {
        let table = LcmTable::build(ideal, cap)?;
        let mut bridged: Vec<GenSubset> = (0..table.size() as u64)
            .map(GenSubset)
            .filter(|&s| table.bridges[s.bits() as usize] != 0)
            .collect();
        bridged.sort_by_key(|s| (s.len(), s.bits()));
        let mut blocks = vec![0];
        for k in 1..bridged.len() {
            if bridged[k].len() != bridged[k - 1].len() {
                blocks.push(k);
            }
        }
        blocks.push(bridged.len());
        Ok(BridgeChecker { table, bridged, blocks })
    }

    pub fn table(&self) -> &LcmTable {
        &self.table
    }

    fn true_gaps(&self, view: &OrderView, sigma: GenSubset) -> u64 {
        let s = sigma.bits() as usize;
        let own = self.table.bridges[s];
        let mut out = 0u64;
        for m in self.table.gaps(sigma).iter() {
            let fresh = self.table.bridges[s | 1 << m] & !own;
            if fresh & view.below[m] == 0 {
                out |= 1 << m;
            }
        }
        out
    }

    /// Smallest bridge of σ when σ is potentially-type-2.
    fn pt2_sbridge(&self, view: &OrderView, sigma: GenSubset) -> Option<usize> {
        let sb = view.min_of(self.table.bridges[sigma.bits() as usize])?;
        // a bridge that dominates no true gap exists iff the smallest one does
        (self.true_gaps(view, sigma) & view.below[sb] == 0).then_some(sb)
    }

    pub fn classify(&self, order: &TotalOrder, sigma: GenSubset) -> SubsetClassification {
        let view = OrderView::new(order);
        let bridges = self.table.bridges[sigma.bits() as usize];
        let true_gaps = self.true_gaps(&view, sigma);
        let type1 = view.min_of(true_gaps).is_some_and(|t| bridges & view.below[t] == 0);
        let sb = self.pt2_sbridge(&view, sigma);
        SubsetClassification {
            type1,
            potentially_type2: sb.is_some(),
            type2: sb.is_some_and(|sb| self.type2_given(&view, sigma, sb)),
        }
    }

    fn type2_given(&self, view: &OrderView, sigma: GenSubset, sb: usize) -> bool {
        let tau = sigma.without(sb);
        (0..self.table.n).filter(|&g| g != sb && !tau.contains(g)).all(|g| {
            let other = tau.with(g);
            self.pt2_sbridge(view, other) != Some(g) || view.position[g] < view.position[sb]
        })
    }

    pub fn is_type2(&self, order: &TotalOrder, sigma: GenSubset) -> Result<bool> {
        let view = OrderView::new(order);
        let sb = self
            .pt2_sbridge(&view, sigma)
            .ok_or_else(|| Error::NotPotentiallyType2(sigma.indices()))?;
        Ok(self.type2_given(&view, sigma, sb))
    }

    /// The smallest potentially-type-2 subset that is not type-2, by cardinality then bits.
    ///
    /// Potentially-type-2 subsets sharing `σ ∖ sbridge(σ)` all have the same
    /// cardinality, and in each such group only the one whose smallest bridge is
    /// `≻`-smallest is type-2. The scan therefore stops at the first cardinality
    /// containing a group of size two or more.
    pub fn counterexample(&self, order: &TotalOrder) -> Option<GenSubset> {
        let view = OrderView::new(order);
        let mut groups: HashMap<GenSubset, (GenSubset, usize)> = HashMap::new();
        for w in self.blocks.windows(2) {
            groups.clear();
            let mut failing: Option<GenSubset> = None;
            let note = |s: GenSubset, failing: &mut Option<GenSubset>| {
                if failing.is_none_or(|f| s.bits() < f.bits()) {
                    *failing = Some(s);
                }
            };
            for &sigma in &self.bridged[w[0]..w[1]] {
                let Some(sb) = self.pt2_sbridge(&view, sigma) else {
                    continue;
                };
                let tau = sigma.without(sb);
                let pos = view.position[sb];
                match groups.get_mut(&tau) {
                    None => {
                        groups.insert(tau, (sigma, pos));
                    }
                    Some(best) => {
                        if pos > best.1 {
                            note(best.0, &mut failing);
                            *best = (sigma, pos);
                        } else {
                            note(sigma, &mut failing);
                        }
                    }
                }
            }
            if failing.is_some() {
                return failing;
            }
        }
        None
    }

    pub fn is_bridge_friendly(&self, order: &TotalOrder) -> bool {
        self.counterexample(order).is_none()
    }
}

pub fn classify_subset(
    ideal: &MonomialIdeal,
    order: &TotalOrder,
    sigma: GenSubset,
    cap: usize,
) -> Result<SubsetClassification> {
    ideal.check_subset(sigma)?;
    Ok(BridgeChecker::new(ideal, cap)?.classify(order, sigma))
}

pub fn is_type2(ideal: &MonomialIdeal, order: &TotalOrder, sigma: GenSubset, cap: usize) -> Result<bool> {
    ideal.check_subset(sigma)?;
    BridgeChecker::new(ideal, cap)?.is_type2(order, sigma)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BridgeFriendlyReport {
    pub bridge_friendly: bool,
    pub counterexample: Option<GenSubset>,
}

pub fn is_bridge_friendly(ideal: &MonomialIdeal, order: &TotalOrder, cap: usize) -> Result<BridgeFriendlyReport> {
    let counterexample = BridgeChecker::new(ideal, cap)?.counterexample(order);
    Ok(BridgeFriendlyReport {
        bridge_friendly: counterexample.is_none(),
        counterexample,
    })
}

/// Maps a permutation of the variables to the permutation it induces on the generators.
pub fn generator_permutation(ideal: &MonomialIdeal, var_perm: &[usize]) -> Result<Vec<usize>> {
    let d = ideal.nvars();
    let mut seen = vec![false; d];
    if var_perm.len() != d
        || !var_perm
            .iter()
            .all(|&v| v < d && !std::mem::replace(&mut seen[v], true))
    {
        return Err(Error::InvalidSymmetry(format!(
            "{var_perm:?} is not a permutation of {d} variables"
        )));
    }
    ideal
        .generators()
        .iter()
        .map(|g| {
            let mut image = vec![0u16; d];
            for (v, &e) in g.exponents().iter().enumerate() {
                image[var_perm[v]] = e;
            }
            ideal
                .generators()
                .iter()
                .position(|h| h.exponents() == image.as_slice())
                .ok_or_else(|| Error::InvalidSymmetry(format!("{var_perm:?} does not preserve the generators")))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BridgeFriendlyOutcome {
    Found,
    NotBridgeFriendly,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeFriendlySearch {
    pub outcome: BridgeFriendlyOutcome,
    pub order: Option<TotalOrder>,
    /// For a negative or unknown result, the smallest failing subset under the first order tried.
    pub counterexample: Option<GenSubset>,
    pub orders_tested: u64,
}

/// Looks for a bridge-friendly order.
///
/// `symmetry` is a list of variable permutations preserving the generating
/// set; bridge-friendliness is invariant under them, so the exhaustive stage
/// visits one order per orbit. `heuristics` are tried after `given`.
pub fn search_bridge_friendly(
    ideal: &MonomialIdeal,
    given: Option<&TotalOrder>,
    heuristics: &[TotalOrder],
    symmetry: &[Vec<usize>],
    config: &SearchConfig,
    cap: usize,
) -> Result<BridgeFriendlySearch> {
    let group = symmetry
        .iter()
        .map(|p| generator_permutation(ideal, p))
        .collect::<Result<Vec<_>>>()?;
    let checker = BridgeChecker::new(ideal, cap)?;
    let report = search::search_orders(ideal.ngens(), given, heuristics, &group, config, |o| {
        checker.is_bridge_friendly(o)
    });
    let first = given.cloned().unwrap_or_else(|| TotalOrder::identity(ideal.ngens()));
    let (outcome, order) = match report.outcome {
        Outcome::Found(o) => (BridgeFriendlyOutcome::Found, Some(o)),
        Outcome::Exhausted => (BridgeFriendlyOutcome::NotBridgeFriendly, None),
        Outcome::Unknown => (BridgeFriendlyOutcome::Unknown, None),
    };
    let counterexample = order.is_none().then(|| checker.counterexample(&first)).flatten();
    Ok(BridgeFriendlySearch {
        outcome,
        order,
        counterexample,
        orders_tested: report.orders_tested,
    })
}
