use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {re} + {im}i is not inside the unit disc")]
    OutsideDisc { re: f64, im: f64 },

    #[error("duplicate points at indices {first} and {second}")]
    DuplicatePoints { first: usize, second: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sequence needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("point lies inside the exclusion disc of node {node}")]
    InsideExclusion { node: usize },

    #[error("node {node} is the origin; the derivative identity divides by its conjugate")]
    OriginNode { node: usize },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("{0}")]
    Hypothesis(String),

    #[error("residue cancellation failed at node {node}: relative defect {defect:.3e}")]
    ResidueCancellation { node: usize, defect: f64 },

    #[error("witness undefined at block {block}: m_n = {m} < 2")]
    WitnessUndefined { block: usize, m: usize },

    #[error("malformed input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
