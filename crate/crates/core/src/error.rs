use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("negative evolution time t = {0}")]
    NegativeTime(f64),

    #[error("time t = {0} is singular for this operation (sin Ωt = 0 or t = 0)")]
    SingularTime(f64),

    #[error("kernel is not integrable: {0}")]
    NonIntegrable(String),

    #[error("state is not physical: {0}")]
    NonPhysical(String),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("grid under-resolves the state: {0}")]
    UnderResolved(String),

    #[error("negative eigenvalue {value:e} exceeds the clipping threshold; grid resolution failure")]
    NegativeSpectrum { value: f64 },

    #[error("objective is flat (D = 0); every initial state is optimal")]
    DegenerateObjective,

    #[error("minimizer did not converge after {iterations} iterations (best C = {best_re} + {best_im}i, S = {best_s:e})")]
    NotConverged {
        iterations: usize,
        best_re: f64,
        best_im: f64,
        best_s: f64,
    },

    #[error("decoherence time diverges: {0}")]
    Divergent(String),

    #[error("medium is not spatially homogeneous: field `{0}` varies")]
    Inhomogeneous(&'static str),

    #[error("spectrum: {0}")]
    Spectrum(String),

    #[error("spectrum file line {line}: {message}")]
    SpectrumParse { line: usize, message: String },

    #[error("frequency {omega} lies at or beyond the tabulated support [{lo}, {hi}]")]
    OutsideSupport { omega: f64, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
