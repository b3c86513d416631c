use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("dark index {d} out of range 1..={max}")]
    DarkIndexOutOfRange { d: usize, max: usize },

    #[error("{field} negative")]
    NegativeRate { field: &'static str },

    #[error("{field} is not finite")]
    NonFiniteRate { field: &'static str },

    #[error("invalid spectral function: {0}")]
    InvalidSpectrum(String),

    #[error("sandwich operators are not orthogonal (B\u{2020}A \u{2260} 0)")]
    NonOrthogonalSandwich,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("trace drift {drift:.3e} at t = {t}; use a smaller time step")]
    StepInstability { t: f64, drift: f64 },

    #[error("{0}")]
    TooLarge(String),
}
