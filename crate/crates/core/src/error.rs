use thiserror::Error;

/// Errors raised by source validation and the statistics built on top of it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed source document: {0}")]
    Json(String),

    #[error("{which} alphabet is empty")]
    EmptyAlphabet { which: &'static str },

    #[error("duplicate symbol label {0:?}")]
    DuplicateSymbol(String),

    #[error("joint matrix must be {rows}x{cols}, found {found}")]
    Shape { rows: usize, cols: usize, found: String },

    #[error("probability {value} at ({x}, {y}) is negative or not finite")]
    InvalidProbability { x: String, y: String, value: f64 },

    #[error("mass {mass} exceeds tolerance")]
    Mass { mass: f64 },

    #[error("y symbol {0:?} has zero marginal mass")]
    ZeroMassColumn(String),

    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),

    #[error("sequence lengths differ: x has {x}, y has {y}")]
    LengthMismatch { x: usize, y: usize },

    #[error("enumeration needs {required} type tuples, cap is {cap}")]
    BudgetExceeded { required: u128, cap: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable code for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Json(_) => "malformed_json",
            Error::EmptyAlphabet { .. }
            | Error::DuplicateSymbol(_)
            | Error::Shape { .. }
            | Error::InvalidProbability { .. }
            | Error::Mass { .. }
            | Error::ZeroMassColumn(_) => "invalid_source",
            Error::UnknownSymbol(_) | Error::LengthMismatch { .. } => "invalid_sequence",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
