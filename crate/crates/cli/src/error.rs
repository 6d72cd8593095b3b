use expansion_entanglement::Error;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ORACLE_THRESHOLD: i32 = 3;
pub const EXIT_REGIME: i32 = 4;
pub const EXIT_UNIDENTIFIABLE: i32 = 5;
pub const EXIT_NOT_CONVERGED: i32 = 6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::RegimeViolation(_) | Error::DenominatorNonpositive(_) => EXIT_REGIME,
            Error::Unidentifiable | Error::MasslessUnidentifiable => EXIT_UNIDENTIFIABLE,
            // The integrator gave up, so agreement could not be shown.
            Error::StepLimitExceeded(_) | Error::StepSizeUnderflow(_) => EXIT_ORACLE_THRESHOLD,
            _ => EXIT_USAGE,
        };
        Self::new(code, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}
