//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong between a config file and a finished run.
#[derive(Debug, Error)]
pub enum Error {
    /// Wavelength outside the crystal's declared Sellmeier validity window.
    #[error("wavelength {wavelength_um:.4} um outside validity window [{min_um:.2}, {max_um:.2}] um")]
    WavelengthOutOfWindow {
        wavelength_um: f64,
        min_um: f64,
        max_um: f64,
    },

    /// The Sellmeier form itself returned a non-physical index.
    #[error("sellmeier evaluation out of range at {wavelength_um:.4} um (n^2 = {n_squared:.4})")]
    SellmeierOutOfRange { wavelength_um: f64, n_squared: f64 },

    /// Collinear degenerate phase matching has no cut-angle solution.
    #[error("phase matching infeasible: target index {target:.6} outside attainable [{min:.6}, {max:.6}]")]
    PhaseMatchingInfeasible { target: f64, min: f64, max: f64 },

    /// Refraction out of the crystal is total-internally reflected.
    #[error("total internal reflection: n sin(theta) = {sine:.6} exceeds 1")]
    TotalInternalReflection { sine: f64 },

    /// Transverse matching has no idler solution.
    #[error("no conjugate idler angle: {reason}")]
    NoConjugateAngle { reason: String },

    /// Grating order is evanescent at the requested frequency.
    #[error("evanescent grating order: |sin(theta0) - 2 pi c D / omega| = {argument:.6} exceeds 1")]
    EvanescentOrder { argument: f64 },

    /// Integral bandwidth is undefined because the central value vanishes.
    #[error("bandwidth undefined: central spectral value R(0) is zero")]
    UndefinedBandwidth,

    /// Adaptive quadrature did not reach its tolerance.
    #[error("quadrature failed to converge: {panels} panels refined to depth {depth}, error estimate {estimate:.3e}")]
    QuadratureNonConvergent {
        panels: usize,
        depth: usize,
        estimate: f64,
    },

    /// A requested grid or sweep range is empty or inverted.
    #[error("empty or inverted range for {axis}")]
    EmptyRange { axis: &'static str },

    /// A domain type invariant was violated.
    #[error("invalid {field}: {message}")]
    InvalidSpec { field: String, message: String },

    /// Configuration file could not be parsed or validated.
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    /// File I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code classification: 2 for configuration problems,
    /// 3 for numerical/pipeline failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidSpec { .. } | Error::Io(_) => 2,
            _ => 3,
        }
    }

    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidSpec {
            field: field.into(),
            message: message.into(),
        }
    }
}
