use thiserror::Error;

/// Errors raised by the resolution engine and its combinatorial front ends.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty generating set")]
    EmptyGeneratingSet,

    #[error("monomial has {found} exponents, expected {expected}")]
    VariableCountMismatch { expected: usize, found: usize },

    #[error("the monomial 1 cannot be a generator")]
    UnitGenerator,

    #[error("exponent overflow in {0}")]
    ExponentOverflow(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("generator count exceeds enumeration budget ({generators} > {cap})")]
    EnumerationBudget { generators: usize, cap: usize },

    #[error("subset {0:#b} references generators outside the ideal")]
    InvalidSubset(u64),

    #[error("invalid total order: {0}")]
    InvalidOrder(String),

    #[error("grading hypothesis violated at {sigma:?}: {detail}")]
    GradingHypothesis { sigma: Vec<usize>, detail: String },

    #[error("matching invariant violated: {0}")]
    MatchingInvariant(String),

    #[error("gradient path table exceeds budget in homological degree {degree}")]
    PathBudget { degree: usize },

    #[error("subset {0:?} is not potentially-type-2")]
    NotPotentiallyType2(Vec<usize>),

    #[error("invalid symmetry: {0}")]
    InvalidSymmetry(String),

    #[error("order does not satisfy the linear quotients condition: {0}")]
    NotLinearQuotients(String),

    #[error("graph has no edges")]
    EdgelessGraph,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not a tree")]
    NotATree,

    #[error("graph is not connected and unicyclic")]
    NotUnicyclic,

    #[error("hypergraph is not a Sperner system: {0}")]
    NotSperner(String),

    #[error("unknown named graph `{0}`")]
    UnknownGraph(String),

    #[error("malformed graph6 string: {0}")]
    Graph6(String),

    #[error("vertex sets do not match")]
    VertexMismatch,

    #[error("host tree check failed: {0}")]
    HostTree(String),

    #[error("path length must be at least 2, got {0}")]
    PathLength(usize),

    #[error("Betti number oracles disagree at homological degree {degree}, multidegree {multidegree}")]
    OracleMismatch { degree: usize, multidegree: String },

    #[error("search budget exceeded")]
    BudgetExceeded,
}

pub type Result<T> = std::result::Result<T, Error>;
