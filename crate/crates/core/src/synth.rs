//! Deterministic trajectory generator with planted ground-truth homes.
//!
//! Each user gets a home drawn uniformly in a metro-scale box and a two-week
//! routine around it: nights at home, weekday daytimes at a workplace a fixed
//! offset east, weekend daytimes back at home. Every candidate ping survives
//! an independent dropout draw, so coverage matches `1 − dropout` on average.
//!
//! GPS noise is split into a per-user constant bias (standard deviation
//! `0.8σ`) plus per-ping scatter (`0.6σ`); since `0.8² + 0.6² = 1`, each
//! ping's marginal displacement from its anchor is exactly `N(0, σ²)` per
//! axis. The split matters: it makes a user's night cloud hang together as
//! one slightly offset cluster instead of re-centering itself per ping, the
//! way a consistently biased receiver behaves, and it keeps grid-bin
//! estimates stable across bin sizes because every bin sees the same offset
//! cluster.
//!
//! Everything is driven by one [`SplitMix64`] stream per user, seeded with
//! `seed ^ user_index`, with a pinned draw order (home, bias, then per ping:
//! dropout, minute, second, scatter), so a spec regenerates byte-identically.

use std::collections::BTreeMap;

use chrono::{Days, FixedOffset, NaiveDate, TimeZone};
use thiserror::Error;

use crate::geo::LocalProjection;
use crate::model::{GeoCoord, GpsPoint, Timestamp, UserTrajectory};
use crate::rng::SplitMix64;
use crate::temporal::HourWindow;

/// Fraction of sigma allocated to the per-user constant bias; the remainder
/// (`sqrt(1 − 0.8²) = 0.6`) is per-ping scatter.
const BIAS_FRACTION: f64 = 0.8;

/// First day of the generated period (a Monday, so days 0–4 of each week
/// are workdays).
const BASE_DATE: (i32, u32, u32) = (2025, 6, 2);

/// Home box: a ~20 km square of mid-latitude suburbia.
const LAT_RANGE: (f64, f64) = (29.55, 29.75);
const LON_RANGE: (f64, f64) = (-82.42, -82.22);

/// Hours generated at the night rate and anchored at home.
const NIGHT: HourWindow = HourWindow {
    start_hour: 22,
    end_hour: 6,
};

/// Invalid generator settings.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("{field} must be finite and ≥ 0, got {value}")]
    NegativeRate { field: &'static str, value: f64 },
    #[error("dropout must lie in [0, 1], got {0}")]
    DropoutOutOfRange(f64),
}

/// Settings for one synthetic dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_users: usize,
    pub days: u32,
    /// Per-axis standard deviation of a ping's displacement from its anchor.
    pub sigma_m: f64,
    /// Eastward offset of the weekday workplace.
    pub work_offset_m: f64,
    /// Candidate pings per hour inside the night window.
    pub night_rate_per_h: f64,
    /// Candidate pings per hour outside the night window.
    pub day_rate_per_h: f64,
    /// Probability that any candidate ping is discarded.
    pub dropout: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_users: 50,
            days: 14,
            sigma_m: 10.0,
            work_offset_m: 2000.0,
            night_rate_per_h: 2.0,
            day_rate_per_h: 40.0,
            dropout: 0.52,
            seed: 7,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let rate = |field: &'static str, value: f64| {
            if value.is_finite() && value >= 0.0 {
                Ok(())
            } else {
                Err(SynthError::NegativeRate { field, value })
            }
        };
        rate("sigma_m", self.sigma_m)?;
        rate("work_offset_m", self.work_offset_m)?;
        rate("night_rate_per_h", self.night_rate_per_h)?;
        rate("day_rate_per_h", self.day_rate_per_h)?;
        if !(0.0..=1.0).contains(&self.dropout) || self.dropout.is_nan() {
            return Err(SynthError::DropoutOutOfRange(self.dropout));
        }
        Ok(())
    }
}

fn generate_user(spec: &SynthSpec, index: usize) -> (UserTrajectory, GeoCoord) {
    let user_id = format!("user{index:03}");
    let mut rng = SplitMix64::new(spec.seed ^ index as u64);
    let home = GeoCoord {
        lat: LAT_RANGE.0 + rng.next_f64() * (LAT_RANGE.1 - LAT_RANGE.0),
        lon: LON_RANGE.0 + rng.next_f64() * (LON_RANGE.1 - LON_RANGE.0),
    };
    let bias_sigma = BIAS_FRACTION * spec.sigma_m;
    let scatter_sigma = (1.0 - BIAS_FRACTION * BIAS_FRACTION).sqrt() * spec.sigma_m;
    let bias = (
        rng.next_gaussian() * bias_sigma,
        rng.next_gaussian() * bias_sigma,
    );
    let projection = LocalProjection::new(home.lat, home.lon);
    let base =
        NaiveDate::from_ymd_opt(BASE_DATE.0, BASE_DATE.1, BASE_DATE.2).expect("base date is valid");
    let utc = FixedOffset::east_opt(0).expect("zero offset is valid");

    let mut points = Vec::new();
    for day in 0..spec.days {
        let date = base
            .checked_add_days(Days::new(day as u64))
            .expect("period stays in range");
        let weekend = day % 7 >= 5; // day 0 is a Monday
        for hour in 0..24u8 {
            let at_night = NIGHT.contains(hour);
            let rate = if at_night {
                spec.night_rate_per_h
            } else {
                spec.day_rate_per_h
            };
            let anchor_x = if at_night || weekend {
                0.0
            } else {
                spec.work_offset_m
            };
            for _ in 0..rate.round() as u64 {
                if rng.next_f64() < spec.dropout {
                    continue;
                }
                let minute = (rng.next_u64() % 60) as u32;
                let second = (rng.next_u64() % 60) as u32;
                let x = anchor_x + bias.0 + rng.next_gaussian() * scatter_sigma;
                let y = bias.1 + rng.next_gaussian() * scatter_sigma;
                let coord = projection.inverse(x, y);
                let naive = date
                    .and_hms_opt(hour as u32, minute, second)
                    .expect("hour/minute/second in range");
                let timestamp = Timestamp::from(
                    utc.from_local_datetime(&naive)
                        .single()
                        .expect("fixed-offset local time is unambiguous"),
                );
                points.push(GpsPoint {
                    user_id: user_id.clone(),
                    timestamp,
                    lat: coord.lat,
                    lon: coord.lon,
                });
            }
        }
    }
    (UserTrajectory::new(user_id, points), home)
}

/// Generate the full dataset and its ground-truth map.
pub fn generate(spec: &SynthSpec) -> (Vec<UserTrajectory>, BTreeMap<String, GeoCoord>) {
    let mut trajectories = Vec::with_capacity(spec.n_users);
    let mut truth = BTreeMap::new();
    for index in 0..spec.n_users {
        let (trajectory, home) = generate_user(spec, index);
        truth.insert(trajectory.user_id.clone(), home);
        trajectories.push(trajectory);
    }
    (trajectories, truth)
}
