use std::time::Duration;

use chrono::NaiveDate;
use thiserror::Error;

pub const DEFAULT_SWDI_BASE: &str = "http://www.ncdc.noaa.gov/swdiws";
pub const DEFAULT_SWDI_PRODUCT: &str = "hail";

const BODY_LIMIT: u64 = 1 << 30;

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("start date {start} is after end date {end}")]
    InvalidRange { start: NaiveDate, end: NaiveDate },
    #[error("transport failure for {url}: {message}")]
    Transport { url: String, message: String },
    #[error("{url} answered HTTP {status}")]
    Status { url: String, status: u16 },
    #[error("{url} returned an empty body")]
    EmptyBody { url: String },
}

/// `<base>/csv/<product>/<YYYYMMDD>:<YYYYMMDD>`.
pub fn swdi_url(base: &str, product: &str, start: NaiveDate, end: NaiveDate) -> String {
    format!(
        "{}/csv/{}/{}:{}",
        base.trim_end_matches('/'),
        product,
        start.format("%Y%m%d"),
        end.format("%Y%m%d")
    )
}

/// Blocking client for the Severe Weather Data Inventory CSV service. One
/// request per call, no retries.
#[derive(Debug, Clone)]
pub struct SwdiClient {
    base: String,
    product: String,
    agent: ureq::Agent,
}

impl SwdiClient {
    pub fn new(base: impl Into<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            base: base.into(),
            product: DEFAULT_SWDI_PRODUCT.to_string(),
            agent,
        }
    }

    pub fn with_product(mut self, product: impl Into<String>) -> Self {
        self.product = product.into();
        self
    }

    /// Raw CSV body for events between `start` and `end` (inclusive dates).
    pub fn fetch(&self, start: NaiveDate, end: NaiveDate) -> Result<String, FetchError> {
        if start > end {
            return Err(FetchError::InvalidRange { start, end });
        }
        let url = swdi_url(&self.base, &self.product, start, end);
        let transport = |e: ureq::Error| FetchError::Transport {
            url: url.clone(),
            message: e.to_string(),
        };
        let mut response = self.agent.get(&url).call().map_err(transport)?;
        let status = response.status().as_u16();
        if !(200..300).contains(&status) {
            return Err(FetchError::Status { url, status });
        }
        let body = response
            .body_mut()
            .with_config()
            .limit(BODY_LIMIT)
            .read_to_string()
            .map_err(transport)?;
        if body.is_empty() {
            return Err(FetchError::EmptyBody { url });
        }
        Ok(body)
    }
}

pub fn fetch_swdi(start: NaiveDate, end: NaiveDate, base: &str) -> Result<String, FetchError> {
    SwdiClient::new(base).fetch(start, end)
}
