//! Hail storm damage model built around the chi distribution.
//!
//! The crate covers the whole pipeline: a forward model of a traveling
//! binormal storm, ingestion of radar hail-event CSV files, single-linkage
//! clustering of events into storms, weighted binormal estimation, radial
//! (Mahalanobis) reduction, least-squares CDF fits and goodness-of-fit
//! reporting with SVG plots.

pub mod cluster;
pub mod error;
pub mod event;
pub mod fit;
pub mod ingest;
pub mod report;
pub mod stats;
pub mod storm;

pub use error::{Error, Result};
pub use event::HailEvent;
