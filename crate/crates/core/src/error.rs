use thiserror::Error;

/// Errors reported by the gasket-solenoid library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("invalid exponent range: min {min} > max {max}")]
    InvalidRange { min: i32, max: i32 },

    #[error("point {point} is outside the domain of the map (source cell {cell})")]
    DomainViolation { point: String, cell: String },

    #[error("point {0} is not in the gasket tower")]
    NotInGasket(String),

    #[error("incompatible domains: {0}")]
    IncompatibleDomains(String),

    #[error("cell sizes differ: {0} vs {1}")]
    SizeMismatch(String, String),

    #[error("word is not composable at position {0}")]
    NonComposable(usize),

    #[error("word cannot be reduced to descending generators: {0}")]
    NotReducible(String),

    #[error("vertex {0} is not sampled")]
    NotSampled(String),

    #[error("operator is not geometric (no invariance level)")]
    NotGeometric,

    #[error("operator support is unbounded above the window")]
    UnboundedSupport,

    #[error("operator support exponent {support} exceeds window level {level}")]
    SupportExceedsWindow { support: i32, level: u32 },

    #[error("declared invariance level {level} failed verification: {detail}")]
    InvarianceViolation { level: u32, detail: String },

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("series diverges for s = {s} (abscissa {abscissa})")]
    Divergent { s: f64, abscissa: f64 },

    #[error("at least two epsilon values are required, got {0}")]
    TooFewSamples(usize),

    #[error("distance certificate failed: {0}")]
    CertificateFailure(String),

    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl Error {
    /// Whether the error reports a failed verification rather than bad input.
    pub fn is_verification_failure(&self) -> bool {
        matches!(
            self,
            Error::CertificateFailure(_)
                | Error::CheckFailed(_)
                | Error::InvarianceViolation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
