use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The zero mode of a massless field has no frequency scale.
    #[error("degenerate mode: k = 0 with mass = 0 has no frequency scale")]
    DegenerateMode,

    #[error("gamma = {0} outside the supported domain [0, 1 - 1e-12]")]
    GammaOutOfRange(f64),

    #[error("entropy = {0} bits outside the supported domain [0, 41]")]
    EntropyOutOfRange(f64),

    #[error("invalid integration config: {0}")]
    InvalidConfig(String),

    #[error("integrator exceeded {0} steps")]
    StepLimitExceeded(usize),

    #[error("integrator step size underflow (h = {0:e})")]
    StepSizeUnderflow(f64),

    #[error("oracle regime unsupported: {0}")]
    RegimeUnsupported(String),

    #[error("out-region matching matrix ill-conditioned (condition number {0:e})")]
    MatchingIllConditioned(f64),

    #[error("massless field: parameters are unidentifiable from entanglement")]
    MasslessUnidentifiable,

    #[error("estimator outside its validity regime: m*sqrt(eps)/E = {0} exceeds 0.5")]
    RegimeViolation(f64),

    #[error("sigma estimator denominator -(E/4) d ln(gamma)/dE - 1 = {0} is not positive")]
    DenominatorNonpositive(f64),

    #[error("relative energy step {0:e} outside the supported range [1e-4, 1e-2]")]
    StepTooSmall(f64),

    #[error("all entropies are zero: parameters are unidentifiable")]
    Unidentifiable,

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
