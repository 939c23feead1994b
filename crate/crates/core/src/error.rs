use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The control detuning sits on top of the adiabatically eliminated level,
    /// so the light-shift expansion breaks down.
    #[error("invalid adiabatic elimination: |delta_36 - delta_c| = {gap:.3e} is below {epsilon:.1e}")]
    Elimination { gap: f64, epsilon: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("numerical instability at t = {time:.4}: |rho| = {magnitude:.3e} exceeds bound {bound:.3e}; reduce dt")]
    Instability { time: f64, magnitude: f64, bound: f64 },

    #[error(
        "calibration did not converge: residual {residual:.4} >= {tolerance} \
         (best beta = {beta:.4}, gamma_inh = {gamma_inh:.5})"
    )]
    CalibrationNonConvergence {
        beta: f64,
        gamma_inh: f64,
        residual: f64,
        tolerance: f64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    /// Errors that come from solving rather than from the input description.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Elimination { .. } | Error::Instability { .. } | Error::CalibrationNonConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
