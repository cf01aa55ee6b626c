use std::path::PathBuf;

use thiserror::Error;

use crate::cqm::CqmError;
use crate::network::{LinkId, ZoneId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown link id {0}")]
    UnknownLink(LinkId),

    #[error("unknown zone id {0}")]
    UnknownZone(ZoneId),

    #[error("no route from zone {origin} to zone {destination} carrying positive demand")]
    Unreachable { origin: ZoneId, destination: ZoneId },

    #[error("capacity {capacity} is at or below the routable floor {floor}")]
    CapacityBelowFloor { capacity: f64, floor: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("scenario failed validation:\n{}", .0.join("\n"))]
    Validation(Vec<String>),

    #[error("search space too large: {levels} levels over {links} links exceeds {limit} grid points")]
    SearchSpaceTooLarge { levels: usize, links: usize, limit: u64 },

    #[error(transparent)]
    Cqm(#[from] CqmError),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
