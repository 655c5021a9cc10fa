use std::fmt;

/// Process exit codes: 0 success, 1 usage/schema error, 2 solver
/// failure, 3 resource cap.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(hdkde::Error),
    /// A core error with run context (e.g. the failing α of a sweep);
    /// the exit code class of the source is preserved.
    Context {
        message: String,
        source: hdkde::Error,
    },
    Io(std::io::Error),
}

impl CliError {
    pub fn context(message: impl Into<String>) -> impl FnOnce(hdkde::Error) -> CliError {
        let message = message.into();
        move |source| CliError::Context { message, source }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Context { message, source } => write!(f, "{message}: {source}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<hdkde::Error> for CliError {
    fn from(e: hdkde::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Core(e) | CliError::Context { source: e, .. } => match e {
                hdkde::Error::ResourceCap { .. } => 3,
                hdkde::Error::InvalidSpectrum(_)
                | hdkde::Error::InvalidConfig(_)
                | hdkde::Error::Io(_) => 1,
                hdkde::Error::Domain { .. }
                | hdkde::Error::BracketFailure { .. }
                | hdkde::Error::NonConvergence { .. } => 2,
            },
        }
    }
}
