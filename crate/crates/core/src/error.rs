use thiserror::Error;

/// Physical-input violations detected while validating a system specification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecViolation {
    #[error("mode count must be positive")]
    NoModes,
    #[error("{name} must be {expected}x{expected}, got {rows}x{cols}")]
    Shape {
        name: &'static str,
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("{name} contains a non-finite entry")]
    NonFinite { name: &'static str },
    #[error("omega is not Hermitian (max deviation {deviation:e})")]
    OmegaNotHermitian { deviation: f64 },
    #[error("gamma is not Hermitian (max deviation {deviation:e})")]
    GammaNotHermitian { deviation: f64 },
    #[error("gamma is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    GammaNotPositiveDefinite { min_eigenvalue: f64 },
    #[error("thermal occupation must be finite and non-negative, got {value}")]
    NegativeThermalOccupation { value: f64 },
}

impl SpecViolation {
    /// Stable snake-case name.
    pub fn code(&self) -> &'static str {
        match self {
            Self::NoModes => "no_modes",
            Self::Shape { .. } => "shape",
            Self::NonFinite { .. } => "non_finite",
            Self::OmegaNotHermitian { .. } => "omega_not_hermitian",
            Self::GammaNotHermitian { .. } => "gamma_not_hermitian",
            Self::GammaNotPositiveDefinite { .. } => "gamma_not_positive_definite",
            Self::NegativeThermalOccupation { .. } => "negative_thermal_occupation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid system specification: {0}")]
    InvalidSpec(#[from] SpecViolation),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("eigensolver failed to converge for sector ({u}, {v})")]
    EigenSolver { u: usize, v: usize },

    #[error("internal consistency failure in {what}: residual {residual:e} exceeds {tolerance:e}")]
    Consistency {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error(
        "initial state holds up to {photons} photons in total; the linear propagator needs a per-mode cutoff of at least {needed}, got {cutoff}"
    )]
    MissingSpareLevel { photons: usize, needed: usize, cutoff: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid time {0}: must be finite and non-negative")]
    InvalidTime(f64),

    #[error("times must be strictly ascending: {previous} is followed by {next}")]
    TimesNotAscending { previous: f64, next: f64 },

    #[error("invalid cutoff: {0}")]
    InvalidCutoff(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
