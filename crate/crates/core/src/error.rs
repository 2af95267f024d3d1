use thiserror::Error;

use crate::cluster::ClusterError;
use crate::fit::FitError;
use crate::ingest::{FetchError, IngestError};
use crate::stats::StatsError;
use crate::storm::StormError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Storm(#[from] StormError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("no storm reports found in {0}")]
    NoReports(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status: 2 usage, 3 data, 4 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Stats(_) | Error::Fit(FitError::NoConvergence { .. }) | Error::Fit(FitError::Stats(_)) => 4,
            Error::Storm(StormError::InvalidCount) | Error::Storm(StormError::InvalidVelocity(..)) => 2,
            Error::Storm(StormError::Stats(_)) => 4,
            Error::Cluster(ClusterError::InvalidThreshold(_)) | Error::Cluster(ClusterError::InvalidTimeScale(_)) => 2,
            _ => 3,
        }
    }
}
