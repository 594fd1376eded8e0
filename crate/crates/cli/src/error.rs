use std::fmt;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration value or file.
    Config(String),
    Core(cdma_core::Error),
    Io(std::io::Error),
    /// One or more verification properties failed.
    VerifyFailed(usize),
}

impl CliError {
    /// 2 for invalid configurations and violated hypotheses, 3 for numerical
    /// non-convergence, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) | CliError::VerifyFailed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "invalid configuration: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::VerifyFailed(n) => write!(f, "{n} verification properties failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<cdma_core::Error> for CliError {
    fn from(e: cdma_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(cdma_core::Error::HypothesisViolated("h".into())).exit_code(), 2);
        let nc = cdma_core::Error::NonConvergence { context: String::new(), iterations: 3, residual: 1.0 };
        assert_eq!(CliError::Core(nc).exit_code(), 3);
        assert_eq!(CliError::VerifyFailed(1).exit_code(), 1);
    }
}
