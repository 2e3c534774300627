use std::path::PathBuf;

use crate::fcm::ConceptId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid fcm: {}", .0.join("; "))]
    InvalidFcm(Vec<String>),

    #[error("concept {0} is not part of this map")]
    UnknownConcept(ConceptId),

    #[error("concept {0} is already present")]
    DuplicateConcept(ConceptId),

    #[error("self-loop on concept {0} is not allowed")]
    SelfLoop(ConceptId),

    #[error("weight {0} is outside [-1, 1]")]
    WeightOutOfRange(f64),

    #[error("membership input {0} is outside [0, 1]")]
    MembershipDomain(f64),

    #[error("matrix dimensions differ: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("position ({x}, {y}, {z}) is outside the world bounds")]
    OutOfBounds { x: f64, y: f64, z: f64 },

    #[error("timestamp {t} ms precedes the last recorded time {last} ms")]
    TimeRegression { t: u64, last: u64 },

    #[error("unknown activity `{0}`")]
    UnknownActivity(String),

    #[error("avatar is not inside the interaction radius of `{0}`")]
    NotInRange(String),

    #[error("invalid world: {0}")]
    InvalidWorld(String),

    #[error("{kind} `{id}` not found")]
    NotFound { kind: &'static str, id: String },

    #[error("invalid script: {0}")]
    InvalidScript(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Parse {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Parse {
            context: context.into(),
            source,
        }
    }
}
