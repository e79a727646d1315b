use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("initial condition is not finite at cell {cell} (xi slice {slice})")]
    NonFiniteInitial { cell: usize, slice: usize },

    #[error("non-finite value in cell {cell}, component {comp}, xi slice {slice}")]
    NonFinite {
        cell: usize,
        comp: usize,
        slice: usize,
    },

    #[error("water depth {depth} is not positive in cell {cell}")]
    Domain { cell: usize, depth: f64 },

    #[error("feedback law {law} cannot be used with model {model}: {reason}")]
    LawMismatch {
        law: String,
        model: String,
        reason: String,
    },

    #[error("all characteristic speeds vanish; no CFL time step exists")]
    Stationary,

    #[error("step limit of {0} exceeded before reaching the final time")]
    StepLimit(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("power-law fit failed: {0}")]
    Fit(String),

    #[error("distribution has zero total mass")]
    ZeroMass,
}

impl Error {
    /// True for failures that mean "this node's solution broke down" rather
    /// than a programming or configuration error.
    pub fn is_numeric_breakdown(&self) -> bool {
        matches!(self, Error::NonFinite { .. } | Error::Domain { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
