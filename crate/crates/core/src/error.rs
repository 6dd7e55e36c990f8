use thiserror::Error;

/// Errors produced by the divergence, bound and harness layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distribution is empty")]
    Empty,

    #[error("alphabet sizes differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("negative or non-finite probability {value} at index {index}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),

    #[error("channel row {row} is invalid: {source}")]
    InvalidRow {
        row: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("channel rows have inconsistent lengths ({expected} vs {found} at row {row})")]
    RaggedChannel {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("generator {generator} has no convention for q({index}) = 0 with p({index}) > 0")]
    UndefinedAtZero {
        generator: &'static str,
        index: usize,
    },

    #[error("distributions do not share a support (index {0})")]
    SupportMismatch(usize),

    #[error("curve abscissae must be strictly increasing (index {0})")]
    CurveNotIncreasing(usize),

    #[error("curve ordinate at index {0} is not finite")]
    CurveNotFinite(usize),

    #[error("sampler failed to produce a private channel after {0} attempts")]
    RetriesExhausted(usize),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }

    /// True for errors caused by malformed probability data rather than by
    /// out-of-domain parameters.
    pub fn is_malformed_input(&self) -> bool {
        matches!(
            self,
            Error::Empty
                | Error::LengthMismatch(..)
                | Error::InvalidProbability { .. }
                | Error::NotNormalized(_)
                | Error::InvalidRow { .. }
                | Error::RaggedChannel { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
