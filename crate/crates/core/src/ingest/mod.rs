//! Hail-event CSV ingestion and the Severe Weather Data Inventory client.

mod csv_io;
mod swdi;

pub use csv_io::{parse_csv, write_csv, Dataset, IngestError, ParseOptions, RawRecord, SkipReason, SkippedRow};
pub use swdi::{fetch_swdi, swdi_url, FetchError, SwdiClient, DEFAULT_SWDI_BASE, DEFAULT_SWDI_PRODUCT};
