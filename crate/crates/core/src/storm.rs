//! Forward model of a traveling storm.
//!
//! At time `t` the damage kernel is a unit binormal centered at `t·v`, and
//! the storm intensity follows a standard normal envelope in `t`. The
//! time-integrated damage is again binormal, with covariance
//! `I + v vᵀ`.

use std::f64::consts::PI;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::event::HailEvent;
use crate::stats::{self, normal_pdf, StatsError, SymPosDefMatrix};

/// Largest accepted speed; beyond it `I + v vᵀ` is numerically singular.
pub const MAX_SPEED: f64 = 1e5;

/// Time-integration window for the quadrature route. The intensity is
/// below 1e-30 of its peak outside it.
pub const TIME_WINDOW: f64 = 12.0;

/// Seconds of wall-clock time per unit of model time, used only to stamp
/// simulated events.
pub const SECONDS_PER_TIME_UNIT: f64 = 3600.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StormError {
    #[error("velocity ({0}, {1}) must be finite with speed below {MAX_SPEED}")]
    InvalidVelocity(f64, f64),
    #[error("event count must be at least 1")]
    InvalidCount,
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Constant storm velocity (east, north), in coordinate units per unit time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Velocity2 {
    v1: f64,
    v2: f64,
}

impl Velocity2 {
    pub fn new(v1: f64, v2: f64) -> Result<Self, StormError> {
        if !v1.is_finite() || !v2.is_finite() || v1.hypot(v2) > MAX_SPEED {
            return Err(StormError::InvalidVelocity(v1, v2));
        }
        Ok(Self { v1, v2 })
    }

    pub fn zero() -> Self {
        Self { v1: 0.0, v2: 0.0 }
    }

    pub fn v1(&self) -> f64 {
        self.v1
    }

    pub fn v2(&self) -> f64 {
        self.v2
    }

    pub fn norm_sq(&self) -> f64 {
        self.v1 * self.v1 + self.v2 * self.v2
    }

    fn dot(&self, x: [f64; 2]) -> f64 {
        self.v1 * x[0] + self.v2 * x[1]
    }
}

/// Standard-form parameters of the time-integrated damage density.
#[derive(Debug, Clone, PartialEq)]
pub struct TravelingStormParams {
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
    /// `sqrt(1 + ‖v‖²)`.
    pub alpha: f64,
    pub covariance: SymPosDefMatrix,
}

pub fn covariance_from_velocity(v: Velocity2) -> TravelingStormParams {
    let sigma1 = (1.0 + v.v1 * v.v1).sqrt();
    let sigma2 = (1.0 + v.v2 * v.v2).sqrt();
    let rho = v.v1 * v.v2 / (sigma1 * sigma2);
    let covariance = SymPosDefMatrix::from_2x2(sigma1 * sigma1, v.v1 * v.v2, sigma2 * sigma2)
        .expect("I + v vᵀ is positive definite for bounded v");
    TravelingStormParams {
        sigma1,
        sigma2,
        rho,
        alpha: (1.0 + v.norm_sq()).sqrt(),
        covariance,
    }
}

/// Damage density at `x` of a storm momentarily centered at `center`.
pub fn instantaneous_damage(x: [f64; 2], center: [f64; 2]) -> f64 {
    let dx = x[0] - center[0];
    let dy = x[1] - center[1];
    (-0.5 * (dx * dx + dy * dy)).exp() / (2.0 * PI)
}

/// Storm intensity at time `t`; peaks at `t = 0` with unit time scale.
pub fn intensity(t: f64) -> f64 {
    normal_pdf(t)
}

/// Closed-form total damage density at `x`.
pub fn total_damage_closed(x: [f64; 2], v: Velocity2) -> f64 {
    let alpha_sq = 1.0 + v.norm_sq();
    let proj = v.dot(x);
    let exponent = -0.5 * (x[0] * x[0] + x[1] * x[1] - proj * proj / alpha_sq);
    exponent.exp() / (2.0 * PI * alpha_sq.sqrt())
}

/// Total damage density at `x` by direct integration of intensity times the
/// moving kernel over `t ∈ [-12, 12]`.
pub fn total_damage_quadrature(x: [f64; 2], v: Velocity2) -> Result<f64, StatsError> {
    stats::quad::integrate(
        |t| intensity(t) * instantaneous_damage(x, [t * v.v1, t * v.v2]),
        -TIME_WINDOW,
        TIME_WINDOW,
        1e-12,
    )
}

/// Reference instant for simulated time stamps.
pub fn simulation_epoch() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2010, 1, 1, 0, 0, 0).unwrap()
}

/// Draws `count` events from the generative model: `t ~ N(0, 1)`, then the
/// location from a unit binormal centered at `t·v`. Events carry weight 1.
pub fn sample_events(count: usize, v: Velocity2, seed: u64) -> Result<Vec<HailEvent>, StormError> {
    if count == 0 {
        return Err(StormError::InvalidCount);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let epoch = simulation_epoch();
    let mut events: Vec<HailEvent> = (0..count)
        .map(|_| {
            let t: f64 = StandardNormal.sample(&mut rng);
            let z1: f64 = StandardNormal.sample(&mut rng);
            let z2: f64 = StandardNormal.sample(&mut rng);
            let offset = Duration::seconds((t * SECONDS_PER_TIME_UNIT).round() as i64);
            HailEvent::new(epoch + offset, t * v.v1 + z1, t * v.v2 + z2, 1.0)
        })
        .collect();
    events.sort_by_key(|e| e.time);
    Ok(events)
}
