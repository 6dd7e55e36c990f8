use thiserror::Error;

/// Failures surfaced by the command line, each with its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Input that does not parse or is not a valid distribution or channel.
    #[error("malformed input: {0}")]
    Malformed(String),
    /// Well-formed input outside the domain of the requested quantity.
    #[error("{0}")]
    Domain(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) | CliError::Io { .. } => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl From<ldp_contraction::Error> for CliError {
    fn from(e: ldp_contraction::Error) -> Self {
        if e.is_malformed_input() {
            CliError::Malformed(e.to_string())
        } else {
            CliError::Domain(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
