//! Accuracy scoring against ground-truth home coordinates.
//!
//! Estimates are compared to known homes with the haversine distance; the
//! aggregates are MAE (mean error), RMSE (root-mean-square error), the
//! per-user median, and hit rates at configurable distance thresholds.
//! Users whose detector returned nothing, or who have no truth row, are
//! counted in `n_missing` and excluded from the averages — an undetected
//! home is reported, not penalized with an invented error.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::geo::haversine_m;
use crate::ingest::header_cell;
use crate::model::{GeoCoord, HomeEstimate, InferenceSource, ValidationRecord};

/// Default hit-rate thresholds in meters.
pub const DEFAULT_THRESHOLDS_M: [f64; 3] = [50.0, 100.0, 250.0];

/// Scoring failures.
#[derive(Debug, Error)]
pub enum ValidateError {
    #[error("no user could be evaluated (every estimate was missing or lacked truth)")]
    NoEvaluableUsers,
    #[error("ground truth file: {0}")]
    Io(#[from] std::io::Error),
    #[error("ground truth row {row}: {message}")]
    MalformedTruth { row: u64, message: String },
    #[error("ground truth lists user '{0}' more than once")]
    DuplicateUser(String),
    #[error("ground truth is missing required header column '{0}'")]
    MissingHeader(&'static str),
}

/// Aggregate accuracy over a batch of estimates.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// Per-user outcomes, in the order the estimates were submitted.
    pub records: Vec<ValidationRecord>,
    pub mae_m: f64,
    pub rmse_m: f64,
    pub median_m: f64,
    /// threshold (m) → fraction of evaluated users within it.
    pub hit_rates: BTreeMap<u64, f64>,
    pub n_evaluated: usize,
    /// Users with no estimate or no matching truth row.
    pub n_missing: usize,
}

/// Median of an unsorted error list (mean of the middle pair when even).
fn median(errors: &mut [f64]) -> f64 {
    errors.sort_by(f64::total_cmp);
    let n = errors.len();
    if n % 2 == 1 {
        errors[n / 2]
    } else {
        (errors[n / 2 - 1] + errors[n / 2]) / 2.0
    }
}

/// Aggregate a non-empty raw error list into (MAE, RMSE, median).
///
/// Sorts `errors` ascending as a side effect: float sums depend on term
/// order, and the canonical order makes the result invariant under
/// permutation of the input.
pub fn error_stats(errors: &mut [f64]) -> (f64, f64, f64) {
    let median_m = median(errors);
    let n = errors.len() as f64;
    let mae_m = errors.iter().sum::<f64>() / n;
    let rmse_m = (errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
    (mae_m, rmse_m, median_m)
}

/// Score estimates against a truth map.
///
/// Thresholds are rounded to whole meters for use as report keys.
pub fn score(
    estimates: &[HomeEstimate],
    truth: &BTreeMap<String, GeoCoord>,
    thresholds_m: &[f64],
) -> Result<ValidationReport, ValidateError> {
    let mut records = Vec::with_capacity(estimates.len());
    let mut errors = Vec::new();
    let mut n_missing = 0;
    for est in estimates {
        let Some(t) = truth.get(&est.user_id) else {
            n_missing += 1;
            continue;
        };
        let (estimate, error_m) = match est.home {
            Some(h) => {
                let e = haversine_m(h.lat, h.lon, t.lat, t.lon);
                errors.push(e);
                (Some(h), Some(e))
            }
            None => {
                n_missing += 1;
                (None, None)
            }
        };
        records.push(ValidationRecord {
            user_id: est.user_id.clone(),
            truth: *t,
            estimate,
            error_m,
            source: est.source,
        });
    }
    if errors.is_empty() {
        return Err(ValidateError::NoEvaluableUsers);
    }
    let (mae_m, rmse_m, median_m) = error_stats(&mut errors);
    let n = errors.len() as f64;
    let hit_rates = thresholds_m
        .iter()
        .map(|&t| {
            let hits = errors.iter().filter(|&&e| e <= t).count();
            (t.round() as u64, hits as f64 / n)
        })
        .collect();
    Ok(ValidationReport {
        records,
        mae_m,
        rmse_m,
        median_m,
        hit_rates,
        n_evaluated: errors.len(),
        n_missing,
    })
}

/// Fraction of evaluated users whose source matches `source`.
pub fn source_fraction(records: &[ValidationRecord], source: InferenceSource) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    let hits = records.iter().filter(|r| r.source == source).count();
    hits as f64 / records.len() as f64
}

/// Load a `user_id,latitude,longitude` CSV into a truth map.
pub fn load_ground_truth(path: &Path) -> Result<BTreeMap<String, GeoCoord>, ValidateError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => {
                ValidateError::Io(std::io::Error::new(std::io::ErrorKind::NotFound, e))
            }
            _ => ValidateError::MalformedTruth {
                row: 0,
                message: e.to_string(),
            },
        })?;
    let headers = reader
        .headers()
        .map_err(|e| ValidateError::MalformedTruth {
            row: 0,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &'static str| -> Result<usize, ValidateError> {
        headers
            .iter()
            .position(|h| header_cell(h) == name)
            .ok_or(ValidateError::MissingHeader(name))
    };
    let (user_col, lat_col, lon_col) = (col("user_id")?, col("latitude")?, col("longitude")?);
    let mut truth = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i as u64 + 2; // 1-based, after the header line
        let row = row.map_err(|e| ValidateError::MalformedTruth {
            row: row_no,
            message: e.to_string(),
        })?;
        let cell = |c: usize| row.get(c).unwrap_or("").trim();
        let user = cell(user_col).to_string();
        if user.is_empty() {
            return Err(ValidateError::MalformedTruth {
                row: row_no,
                message: "empty user_id".into(),
            });
        }
        let parse = |raw: &str, lo: f64, hi: f64, what: &str| -> Result<f64, ValidateError> {
            raw.parse::<f64>()
                .ok()
                .filter(|v| *v >= lo && *v <= hi)
                .ok_or_else(|| ValidateError::MalformedTruth {
                    row: row_no,
                    message: format!("{what} '{raw}' is not a coordinate in [{lo}, {hi}]"),
                })
        };
        let lat = parse(cell(lat_col), -90.0, 90.0, "latitude")?;
        let lon = parse(cell(lon_col), -180.0, 180.0, "longitude")?;
        if truth.insert(user.clone(), GeoCoord { lat, lon }).is_some() {
            return Err(ValidateError::DuplicateUser(user));
        }
    }
    Ok(truth)
}
