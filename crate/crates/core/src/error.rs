use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("supremum of an empty family is ill-posed")]
    EmptySupremum,

    #[error("cannot parse {input:?} as a {what}")]
    Parse { what: &'static str, input: String },

    #[error("insufficient resolution: {usable} usable samples, need at least {required}")]
    InsufficientResolution { usable: usize, required: usize },

    #[error("module is not zero-dimensional: measured von Neumann dimension {dimension}")]
    NotZeroDimensional { dimension: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(
        "ball budget of {budget} elements exceeded at radius {radius_reached} \
         (largest feasible walk length {max_feasible_steps})"
    )]
    BudgetExceeded {
        budget: usize,
        radius_reached: usize,
        max_feasible_steps: usize,
    },

    #[error("inconclusive decay classification: {0}")]
    Inconclusive(String),

    #[error("walk specifications differ: {0}")]
    MismatchedWalk(String),
}
