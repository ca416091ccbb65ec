use std::path::PathBuf;

use crate::graph::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("edge list contains no edges")]
    EmptyGraph,

    #[error("edge ({user}, {item}) out of bounds for a {num_users}x{num_items} graph")]
    EdgeOutOfBounds {
        user: u32,
        item: u32,
        num_users: usize,
        num_items: usize,
    },

    #[error("{side:?} side has {expected} nodes but the assignment covers {actual}")]
    DimensionMismatch {
        side: Side,
        expected: usize,
        actual: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("user {user} has no positive-mass candidate and the uniform fallback is disabled")]
    ZeroMass { user: u32 },

    #[error("sample {index}: {source}")]
    Sample {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
