use thiserror::Error;

/// Errors raised by table construction, solution concepts and simulations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unit set of size {size} exceeds the enumeration bound of {bound}")]
    TooManyUnits { size: usize, bound: usize },
    #[error("duplicate unit name `{0}`")]
    DuplicateUnit(String),
    #[error("unknown unit `{0}`")]
    UnknownUnit(String),
    #[error("unit index {index} out of range for {size} units")]
    UnitIndex { index: usize, size: usize },
    #[error("invalid coalition: {0}")]
    InvalidCoalition(String),
    #[error("characteristic table is missing an entry for {0}")]
    MissingEntry(String),
    #[error("non-finite worth {value} for {coalition}")]
    NonFinite { coalition: String, value: f64 },
    #[error("sample count must be positive")]
    ZeroSamples,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("learner failure at interaction {interaction}: {message}")]
    Learner { interaction: usize, message: String },
    #[error("simulation of {coalition} (replicate {replicate}) failed: {message}")]
    Cell {
        coalition: String,
        replicate: usize,
        message: String,
    },
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
