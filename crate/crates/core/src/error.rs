use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cover relations contain a cycle")]
    CycleDetected,
    #[error("poset is not naturally labeled: {0} precedes {1} but {0} > {1}")]
    NotNaturallyLabeled(usize, usize),
    #[error("malformed input (line {line}): {msg}")]
    MalformedInput { line: usize, msg: String },
    #[error("{what} exceeds the configured cap of {cap}")]
    SizeLimitExceeded { what: &'static str, cap: usize },
    #[error("set {0:?} is not an element of the upper-set lattice")]
    NotInLattice(Vec<usize>),
    #[error("index {index} is out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("{0} is not a linear extension of the poset")]
    NotALinearExtension(String),
    #[error("poset is not a rooted forest")]
    NotRootedForest,
    #[error("poset is not a consecutively labeled union of chains")]
    NotUnionOfChains,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("a prefix sum of the weights vanishes")]
    ZeroDenominator,
    #[error("matrix is not column-stochastic")]
    NotStochastic,
    #[error("stationary system is singular (chain is reducible)")]
    SolverSingular,
    #[error("candidate set exhausted: spectrum is nonlinear")]
    CandidateSetExhausted,
    #[error("monoid closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("element list is not closed under the product")]
    NotClosed,
    #[error("rate p_x must be strictly positive")]
    NonPositiveRate,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("{0} is not in the permutation subset")]
    NotInSubset(String),
    #[error("chain is not a geodesic in weak order: {0}")]
    NotAGeodesic(String),
}

impl Error {
    pub(crate) fn malformed(line: usize, msg: impl Into<String>) -> Self {
        Error::MalformedInput {
            line,
            msg: msg.into(),
        }
    }
}
