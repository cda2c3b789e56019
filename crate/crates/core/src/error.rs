use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Two bit strings of different length were combined.
    #[error("bit string length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    /// A parameter is outside the documented domain of an operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A dense-oracle request would allocate more than the configured budget.
    /// The limit is `CLONETRADE_MAX_DIM` (total Hilbert-space dimension).
    #[error("dimension budget exceeded: requested {requested}, limit {limit} (raise CLONETRADE_MAX_DIM to override)")]
    BudgetExceeded { requested: usize, limit: usize },

    /// The eigenvalue-lift ratio came out k-dependent, so the spectrum
    /// recursion does not apply to the supplied coefficients.
    #[error("recursion hypothesis violated")]
    RecursionHypothesisViolated,

    /// A trade-off solver was asked for fidelities no machine can reach.
    #[error("targets outside achievable region")]
    OutsideAchievableRegion,

    /// Rank-1 reduction was requested for the global-fidelity label L = N,
    /// which is handled by the closed-form symmetric solution instead.
    #[error("global fidelity has no rank-1 reduction here (solved case)")]
    NoRank1Reduction,

    /// The reduction exists but its coefficients collapse (gamma1 = gamma2 or
    /// vanishing sum), so per-site elimination cannot continue.
    #[error("degenerate reduction")]
    DegenerateReduction,

    /// A numeric precondition failed (negative radicand, value outside [0,1], ...).
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
