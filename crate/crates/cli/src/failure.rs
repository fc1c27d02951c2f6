use std::fmt;

use biomedner::annotate::AnnotateError;
use biomedner::corpus::{ChunkError, CorpusError, SampleError};
use biomedner::dedup::DedupError;
use biomedner::eval::EvalError;
use biomedner::matcher::MatcherError;
use biomedner::quality::QualityError;

/// A command failure, classified by the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or configuration (exit 1).
    Usage(String),
    /// Unreadable or invalid input data (exit 2).
    Data(String),
    /// An LLM endpoint or embedding provider failed (exit 3).
    External(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::External(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Failure::Data(msg.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Data(m) => write!(f, "data error: {m}"),
            Failure::External(m) => write!(f, "external service error: {m}"),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

macro_rules! data_failure {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Data(e.to_string())
            }
        }
    )*};
}

data_failure!(CorpusError, ChunkError, SampleError, DedupError, QualityError, EvalError);

impl From<MatcherError> for Failure {
    fn from(e: MatcherError) -> Self {
        match e {
            MatcherError::EncoderFailure(_) => Failure::External(e.to_string()),
            MatcherError::InvalidThreshold(_) => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<AnnotateError> for Failure {
    fn from(e: AnnotateError) -> Self {
        match e {
            AnnotateError::Client { .. } | AnnotateError::SchemaViolation { .. } => Failure::External(e.to_string()),
            AnnotateError::CorpusTooSmall { .. } => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}
