use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

/// One radar hail detection: time, location and severe probability.
///
/// `prob` doubles as the event's weight in every estimator and lies in
/// `(0, 1]`. Longitude and latitude are treated as planar coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HailEvent {
    pub time: DateTime<Utc>,
    pub lon: f64,
    pub lat: f64,
    pub prob: f64,
}

impl HailEvent {
    pub fn new(time: DateTime<Utc>, lon: f64, lat: f64, prob: f64) -> Self {
        Self {
            time,
            lon,
            lat,
            prob,
        }
    }

    pub fn location(&self) -> [f64; 2] {
        [self.lon, self.lat]
    }

    pub fn is_valid(&self) -> bool {
        self.lon.is_finite() && self.lat.is_finite() && self.prob > 0.0 && self.prob <= 1.0
    }
}
