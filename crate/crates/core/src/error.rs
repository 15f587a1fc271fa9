use thiserror::Error;

/// Errors raised by geometry construction, the cell solvers, the Maxwell
/// solvers and configuration handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid spacing {spacing} does not divide delta/8 = {eighth}")]
    SpacingMisaligned { spacing: String, eighth: String },

    #[error("linear solver did not converge: relative residual {residual:.3e} after {iterations} iterations (tolerance {tolerance:.1e})")]
    SolverDiverged {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("potential {0} cannot be constructed for this obstacle topology")]
    NotConstructible(String),

    #[error("cut set does not support {0}")]
    CutMismatch(String),

    #[error("permittivity must satisfy Re > 0 and Im > 0, got {re} + {im}i")]
    InvalidEpsilon { re: f64, im: f64 },

    #[error("measurement plane x3 = {plane} is outside the admissible range ({reason})")]
    PlaneOutOfRange { plane: f64, reason: String },

    #[error("invalid Hardy profile #{index}: {reason}")]
    ProfileInvalid { index: usize, reason: String },

    #[error("config field `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("projected problem size {unknowns} exceeds the budget of {cap} unknowns")]
    AbortOnBudget { unknowns: usize, cap: usize },

    #[error("grid: {0}")]
    InvalidGrid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}
