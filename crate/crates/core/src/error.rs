use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("negative entry {value} in {matrix} at ({row}, {col})")]
    NegativeEntry {
        matrix: &'static str,
        row: usize,
        col: usize,
        value: f64,
    },

    #[error("row {row} of E has no strictly positive entry")]
    ZeroControlRow { row: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("validation failed: {0}")]
    ValidationFailed(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("no convergence after {iterations} iterations (estimate {estimate}, gap {gap})")]
    NoConvergence {
        iterations: usize,
        estimate: f64,
        gap: f64,
    },

    #[error("defective eigenvalue {lambda}: inverse iteration stagnated")]
    DefectiveEigenvalue { lambda: f64 },

    #[error("LP numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("{ties} tied channels exceed the enumeration cap")]
    TieExplosion { ties: usize },

    #[error("closed loop is not Metzler (off-diagonal entry {value} at ({row}, {col}))")]
    NonMetzlerClosedLoop { row: usize, col: usize, value: f64 },

    #[error("controller entry ({row}, {col}) violates |K| <= E")]
    ControllerOutOfBounds { row: usize, col: usize },

    #[error("cost row s - K'r has negative entry {value} at {index}")]
    NegativeCostRow { index: usize, value: f64 },

    #[error("solve failed: {0}")]
    SolveFailed(String),

    #[error("water network invariant violated: {0}")]
    InvariantViolation(String),

    #[error("certificate contradiction: {0}")]
    Contradiction(String),
}

impl Error {
    /// Coarse failure class used by front ends to pick exit codes.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::DimensionMismatch(_)
            | Error::NegativeEntry { .. }
            | Error::ZeroControlRow { .. }
            | Error::ValidationFailed(_)
            | Error::ModelMismatch(_)
            | Error::InvariantViolation(_)
            | Error::InvalidArgument(_)
            | Error::ControllerOutOfBounds { .. } => ErrorClass::Validation,
            Error::Parse(_) | Error::Io(_) => ErrorClass::Io,
            _ => ErrorClass::Solve,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NegativeEntry { .. } => "NegativeEntry",
            Error::ZeroControlRow { .. } => "ZeroControlRow",
            Error::Parse(_) => "ParseError",
            Error::Io(_) => "IoError",
            Error::ValidationFailed(_) => "ValidationFailed",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::NonFiniteState { .. } => "NonFiniteState",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::DefectiveEigenvalue { .. } => "DefectiveEigenvalue",
            Error::NumericalBreakdown(_) => "NumericalBreakdown",
            Error::ModelMismatch(_) => "ModelMismatch",
            Error::TieExplosion { .. } => "TieExplosion",
            Error::NonMetzlerClosedLoop { .. } => "NonMetzlerClosedLoop",
            Error::ControllerOutOfBounds { .. } => "ControllerOutOfBounds",
            Error::NegativeCostRow { .. } => "NegativeCostRow",
            Error::SolveFailed(_) => "SolveFailed",
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::Contradiction(_) => "Contradiction",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Solve,
    Io,
}
