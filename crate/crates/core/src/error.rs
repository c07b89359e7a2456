use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentError {
    #[error("degree bound must be even and at least 2, got {0}")]
    OddDegree(u32),

    #[error("need at least one variable")]
    NoVariables,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid quadrature request: {0}")]
    InvalidQuadrature(String),

    #[error("quadrature rule would have {0} nodes, limit is 10^7")]
    TooManyNodes(u128),

    #[error("deterministic sphere rules support at most 4 coordinates, got {0}; pass a seed for the Monte Carlo rule")]
    UnsupportedDimension(usize),

    #[error("integrand is not finite at node {0}")]
    NonFiniteIntegrand(usize),

    #[error("exponential integral overflows (log f = {0:.3})")]
    Overflow(f64),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("moment matrix of the reference measure is not positive definite")]
    Preconditioner,

    #[error("point {0} lies outside the domain")]
    OutsideDomain(String),

    #[error("{0}")]
    NotInBarrierDomain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, MomentError>;
