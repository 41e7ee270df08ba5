use thiserror::Error;

/// Harness failures, grouped by the CLI exit code they map to.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("data: {0}")]
    Data(String),
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
    #[error("io: {context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Data(_) | Self::Io { .. } => 2,
            Self::Degenerate(_) => 3,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io {
            context: context.into(),
            source,
        }
    }
}

impl From<robust_mean::Error> for HarnessError {
    fn from(e: robust_mean::Error) -> Self {
        match e {
            robust_mean::Error::InvalidParameter(_) => Self::Usage(e.to_string()),
            robust_mean::Error::Degenerate(_) => Self::Degenerate(e.to_string()),
            _ => Self::Data(e.to_string()),
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
