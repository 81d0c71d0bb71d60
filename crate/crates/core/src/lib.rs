//! Exact Morse resolutions of monomial ideals from matchings on the Taylor complex.
//!
//! The [`matching`] module builds Barile-Macchia and Lyubeznik matchings, [`morse`]
//! turns a matching into a complex over the two-element field, and [`betti`]
//! decides whether that complex is minimal. [`bridge_friendly`], [`classify`] and
//! [`combinat`] cover ideal classes and the order constructions for them.

pub mod betti;
pub mod bridge_friendly;
pub mod classify;
pub mod combinat;
pub mod error;
pub mod gf2;
pub mod ideal;
pub mod matching;
pub mod morse;
pub mod search;

pub use betti::{betti_numbers, certify_minimal_gbm, is_minimal, BettiTable, GbmCertificate, MinimalityReport};
pub use bridge_friendly::{is_bridge_friendly, search_bridge_friendly, BridgeChecker, BridgeFriendlyOutcome};
pub use combinat::{Graph, HostTree, Hypergraph};
pub use error::{Error, Result};
pub use ideal::{GenSubset, LcmTable, Monomial, MonomialIdeal, Multidegree, TotalOrder, DEFAULT_ENUMERATION_CAP};
pub use matching::{
    bm_matching, gbm_matching, gbm_matching_in_fibers, lyubeznik_matching, FiberedOrders, Grading, LcmGrading,
    MatchedEdge, Matching,
};
pub use morse::{critical_cells, morse_differential, validate_matching, verify_resolution, MorseComplex};
pub use search::{Budget, SearchConfig, Strategy};
