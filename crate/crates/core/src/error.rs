use thiserror::Error;

/// Errors raised by the engine model, its statistics and its optimizers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OttoError {
    /// A physical parameter is outside its admissible domain.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A truncated level sum did not reach the requested accuracy.
    #[error("level sum not converged at {levels} levels (last term ratio {tail_ratio:e})")]
    NotConverged { levels: usize, tail_ratio: f64 },

    /// No bracket could be found for a monotone root search.
    #[error("root search failed: {0}")]
    Bracket(&'static str),

    /// Both contact times vanish, so the periodic state is undetermined.
    #[error("degenerate cycle: both bath contact times are zero")]
    DegenerateCycle,

    /// A denominator in the ξ-factors vanished.
    #[error("degenerate ξ-factor denominator")]
    DegenerateXi,

    /// Efficiency requested outside the engine region.
    #[error("efficiency is undefined outside engine mode (mode: {0})")]
    NotAnEngine(crate::cycle::Mode),

    /// Relative fluctuation requested at a point with zero mean work.
    #[error("zero mean work: relative power fluctuation is undefined on a mode boundary")]
    ModeBoundary,

    /// The finite-time transition kernel of the hot isochore was not provided.
    #[error("finite-time heat statistics need an explicit transition kernel")]
    KernelUnavailable,

    /// An iterative solver stopped without meeting its tolerance.
    #[error("{solver} did not converge (residual {residual:e})")]
    NoConvergence { solver: &'static str, residual: f64 },

    /// The power landscape has no interior maximum with positive work.
    #[error("no engine-mode power maximum exists for these parameters")]
    NoEngineOptimum,
}

pub type Result<T> = std::result::Result<T, OttoError>;

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(OttoError::InvalidParameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}
