use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge: estimate {estimate}, error estimate {error:e}")]
    NonConvergent { estimate: f64, error: f64 },

    #[error("integrand returned NaN at x = {at}")]
    NaNEncountered { at: f64 },

    #[error("characteristic function is not conjugate-symmetric (or phi(0) != 1): {0}")]
    AsymmetricCharFn(String),

    #[error("inversion changed by {max_change:e} when the frequency window was doubled")]
    AliasingSuspected { max_change: f64 },

    #[error("characteristic function does not decay: |phi(U)| = {modulus:e}")]
    NonDecayingCharFn { modulus: f64 },

    #[error("negative density {value:e} at x = {x}")]
    NegativeDensity { x: f64, value: f64 },

    #[error("represented process is not special: {0}")]
    NotSpecial(String),

    #[error("representing function is incompatible with the jump law: {0}")]
    Incompatible(String),

    #[error("expectation is not finite: {0}")]
    NonIntegrable(String),

    #[error("compensator jump equals -1 at time {time}")]
    DegenerateJump { time: f64 },

    #[error("conditioning on a null event ({0})")]
    ConditioningOnNull(&'static str),

    #[error("degenerate denominator in optimal fraction: {0}")]
    DegenerateDenominator(f64),

    #[error("invalid tilt: {0}")]
    InvalidTilt(String),

    #[error("jump measure cannot be simulated directly: {0}")]
    UnsupportedJumpMeasure(String),

    #[error("representing function is undefined at simulated jump {jump}")]
    IncompatibleJump { jump: f64 },

    #[error("complex-valued representation has no real triplet: {0}")]
    ComplexRepresentation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures of a numerical routine as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergent { .. }
                | Error::NaNEncountered { .. }
                | Error::AliasingSuspected { .. }
                | Error::NonDecayingCharFn { .. }
                | Error::NegativeDensity { .. }
                | Error::DegenerateJump { .. }
        )
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonConvergent { .. } => "non_convergent",
            Error::NaNEncountered { .. } => "nan_encountered",
            Error::AsymmetricCharFn(_) => "asymmetric_char_fn",
            Error::AliasingSuspected { .. } => "aliasing_suspected",
            Error::NonDecayingCharFn { .. } => "non_decaying_char_fn",
            Error::NegativeDensity { .. } => "negative_density",
            Error::NotSpecial(_) => "not_special",
            Error::Incompatible(_) => "incompatible",
            Error::NonIntegrable(_) => "non_integrable",
            Error::DegenerateJump { .. } => "degenerate_jump",
            Error::ConditioningOnNull(_) => "conditioning_on_null",
            Error::DegenerateDenominator(_) => "degenerate_denominator",
            Error::InvalidTilt(_) => "invalid_tilt",
            Error::UnsupportedJumpMeasure(_) => "unsupported_jump_measure",
            Error::IncompatibleJump { .. } => "incompatible_jump",
            Error::ComplexRepresentation(_) => "complex_representation",
            Error::InvalidInput(_) => "invalid_input",
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
