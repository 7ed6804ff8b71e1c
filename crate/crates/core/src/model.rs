//! Shared domain types: points, trajectories, grid cells, estimates, and the
//! parameter block threaded through every detector.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, FixedOffset, NaiveDate, NaiveDateTime, SecondsFormat, Timelike};
use thiserror::Error;

use crate::temporal::HourWindow;

/// A point in time with an explicit UTC offset.
///
/// Two textual forms are accepted: RFC 3339 (`2025-06-19T23:14:05+02:00`,
/// `Z` suffixes and fractional seconds included) and the bare local form
/// `YYYY-MM-DD HH:MM:SS`, which is interpreted as UTC. Hour-of-day, calendar
/// date, and weekday are always evaluated in the timestamp's own offset: a
/// record stamped `23:14:05+02:00` is a 23h point even though it is 21:14 UTC.
/// Durations between points are measured on the absolute (UTC) axis.
#[derive(Debug, Clone, Copy)]
pub struct Timestamp(DateTime<FixedOffset>);

impl Timestamp {
    pub fn parse(text: &str) -> Result<Self, RecordRejection> {
        if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
            return Ok(Timestamp(dt));
        }
        if let Ok(naive) = NaiveDateTime::parse_from_str(text, "%Y-%m-%d %H:%M:%S") {
            let utc = FixedOffset::east_opt(0).expect("zero offset is valid");
            return Ok(Timestamp(naive.and_local_timezone(utc).unwrap()));
        }
        Err(RecordRejection::UnparseableTimestamp(text.to_owned()))
    }

    /// Wall-clock hour (0..=23) in the timestamp's own offset.
    pub fn hour(&self) -> u8 {
        self.0.naive_local().hour() as u8
    }

    /// Calendar date in the timestamp's own offset.
    pub fn date(&self) -> NaiveDate {
        self.0.naive_local().date()
    }

    /// Weekday index with Monday = 0 .. Sunday = 6, in the local offset.
    pub fn weekday_index(&self) -> u8 {
        self.0.naive_local().weekday().num_days_from_monday() as u8
    }

    /// Seconds since the Unix epoch (absolute time axis).
    pub fn epoch_seconds(&self) -> i64 {
        self.0.timestamp()
    }

    /// Seconds since the epoch on the *wall-clock* axis (epoch + offset).
    /// Used when intersecting dwell intervals with hour-of-day windows.
    pub fn wall_seconds(&self) -> i64 {
        self.0.naive_local().and_utc().timestamp()
    }
}

impl From<DateTime<FixedOffset>> for Timestamp {
    fn from(dt: DateTime<FixedOffset>) -> Self {
        Timestamp(dt)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_rfc3339_opts(SecondsFormat::AutoSi, true))
    }
}

impl PartialEq for Timestamp {
    fn eq(&self, other: &Self) -> bool {
        // Identity, not mere simultaneity: the offset is part of the value,
        // so serialization round-trips compare strictly.
        self.0 == other.0 && self.0.offset() == other.0.offset()
    }
}

impl Eq for Timestamp {}

impl PartialOrd for Timestamp {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Timestamp {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.cmp(&other.0).then_with(|| {
            self.0
                .offset()
                .local_minus_utc()
                .cmp(&other.0.offset().local_minus_utc())
        })
    }
}

/// A WGS84 coordinate pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoCoord {
    pub lat: f64,
    pub lon: f64,
}

/// One validated GPS fix.
#[derive(Debug, Clone, PartialEq)]
pub struct GpsPoint {
    pub user_id: String,
    pub timestamp: Timestamp,
    pub lat: f64,
    pub lon: f64,
}

/// An unvalidated record as it came off disk; any field may be absent.
#[derive(Debug, Clone, Default)]
pub struct RawRecord {
    pub user_id: Option<String>,
    pub timestamp: Option<String>,
    pub latitude: Option<String>,
    pub longitude: Option<String>,
}

/// Why a raw record was rejected during ingestion.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordRejection {
    #[error("missing or empty field `{0}`")]
    MissingField(&'static str),
    #[error("unparseable timestamp `{0}`")]
    UnparseableTimestamp(String),
    #[error("coordinate out of range: {field} = `{value}`")]
    CoordinateOutOfRange { field: &'static str, value: String },
}

/// Coarse rejection category, used for ingest summaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RejectionKind {
    MissingField,
    UnparseableTimestamp,
    CoordinateOutOfRange,
}

impl RejectionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RejectionKind::MissingField => "missing_field",
            RejectionKind::UnparseableTimestamp => "unparseable_timestamp",
            RejectionKind::CoordinateOutOfRange => "coordinate_out_of_range",
        }
    }
}

impl RecordRejection {
    pub fn kind(&self) -> RejectionKind {
        match self {
            RecordRejection::MissingField(_) => RejectionKind::MissingField,
            RecordRejection::UnparseableTimestamp(_) => RejectionKind::UnparseableTimestamp,
            RecordRejection::CoordinateOutOfRange { .. } => RejectionKind::CoordinateOutOfRange,
        }
    }
}

fn check_coord(
    field: &'static str,
    raw: Option<&String>,
    lo: f64,
    hi: f64,
) -> Result<f64, RecordRejection> {
    let text = raw
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .ok_or(RecordRejection::MissingField(field))?;
    let value: f64 = text
        .parse()
        .map_err(|_| RecordRejection::CoordinateOutOfRange {
            field,
            value: text.to_owned(),
        })?;
    // NaN fails both comparisons and is rejected here.
    if value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(RecordRejection::CoordinateOutOfRange {
            field,
            value: text.to_owned(),
        })
    }
}

/// Validate one raw record into a [`GpsPoint`].
///
/// Fields are checked in a fixed order (user, timestamp, latitude,
/// longitude), so a record that is broken in several ways reports the first
/// failure deterministically.
pub fn validate_point(raw: &RawRecord) -> Result<GpsPoint, RecordRejection> {
    let user_id = raw
        .user_id
        .as_deref()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or(RecordRejection::MissingField("user_id"))?
        .to_owned();
    let ts_text = raw
        .timestamp
        .as_deref()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or(RecordRejection::MissingField("timestamp"))?;
    let timestamp = Timestamp::parse(ts_text)?;
    let lat = check_coord("latitude", raw.latitude.as_ref(), -90.0, 90.0)?;
    let lon = check_coord("longitude", raw.longitude.as_ref(), -180.0, 180.0)?;
    Ok(GpsPoint {
        user_id,
        timestamp,
        lat,
        lon,
    })
}

/// All points of one user, sorted by timestamp.
///
/// Invariants: every point carries the trajectory's `user_id`, and `points`
/// is sorted ascending by timestamp. The sort is stable, so records that
/// share a timestamp keep their ingestion order; duplicates are retained.
#[derive(Debug, Clone, PartialEq)]
pub struct UserTrajectory {
    pub user_id: String,
    pub points: Vec<GpsPoint>,
}

impl UserTrajectory {
    pub fn new(user_id: String, mut points: Vec<GpsPoint>) -> Self {
        points.sort_by(|a, b| a.timestamp.cmp(&b.timestamp));
        UserTrajectory { user_id, points }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A point mapped into the local metric plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedPoint {
    pub x: f64,
    pub y: f64,
    pub timestamp: Timestamp,
    /// Index of the originating fix in its trajectory's `points`.
    pub source_index: usize,
}

/// Identity of one square grid cell, stored as integer multiples of the grid
/// size. Deriving `Ord` on `(iy, ix)` gives the tie-break order used when two
/// cells have identical statistics: smallest `cell_y`, then smallest `cell_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridKey {
    pub iy: i64,
    pub ix: i64,
}

impl GridKey {
    /// Cell containing `(x, y)` for grid size `g`: each coordinate is rounded
    /// to the nearest multiple of `g`, halves away from zero, so a cell with
    /// center `c` covers `[c - g/2, c + g/2)` on each axis.
    pub fn for_xy(x: f64, y: f64, g: f64) -> Self {
        GridKey {
            iy: (y / g).round() as i64,
            ix: (x / g).round() as i64,
        }
    }

    pub fn cell_x(&self, g: f64) -> f64 {
        self.ix as f64 * g
    }

    pub fn cell_y(&self, g: f64) -> f64 {
        self.iy as f64 * g
    }
}

/// Dwell statistics of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStats {
    /// Cell center, meters in the local plane.
    pub cell_x: f64,
    pub cell_y: f64,
    /// Whole seconds between the cell's earliest and latest fix.
    pub stay_time_s: i64,
    /// Number of distinct calendar dates among the cell's fixes.
    pub unique_nights: usize,
    pub total_points: usize,
}

/// Which temporal slice of the trajectory produced the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InferenceSource {
    Night,
    Weekend,
    None,
}

impl InferenceSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            InferenceSource::Night => "night",
            InferenceSource::Weekend => "weekend",
            InferenceSource::None => "none",
        }
    }
}

impl fmt::Display for InferenceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the final coordinate was derived from the winning cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefinementMethod {
    DensestBinCentroid,
    MeanCellPoints,
    GridCentroid,
    NotApplicable,
}

impl RefinementMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            RefinementMethod::DensestBinCentroid => "densest_bin_centroid",
            RefinementMethod::MeanCellPoints => "mean_cell_points",
            RefinementMethod::GridCentroid => "grid_centroid",
            RefinementMethod::NotApplicable => "not_applicable",
        }
    }
}

impl fmt::Display for RefinementMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Detector selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algorithm {
    Ghost,
    A1,
    A2,
    Dbscan,
    KmeansPp,
    Frequency,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Ghost,
        Algorithm::A1,
        Algorithm::A2,
        Algorithm::Dbscan,
        Algorithm::KmeansPp,
        Algorithm::Frequency,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Ghost => "ghost",
            Algorithm::A1 => "a1",
            Algorithm::A2 => "a2",
            Algorithm::Dbscan => "dbscan",
            Algorithm::KmeansPp => "kmeanspp",
            Algorithm::Frequency => "frequency",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown algorithm `{0}` (expected ghost, a1, a2, dbscan, kmeanspp, or frequency)")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ghost" => Ok(Algorithm::Ghost),
            "a1" => Ok(Algorithm::A1),
            "a2" => Ok(Algorithm::A2),
            "dbscan" => Ok(Algorithm::Dbscan),
            "kmeanspp" => Ok(Algorithm::KmeansPp),
            "frequency" => Ok(Algorithm::Frequency),
            _ => Err(UnknownAlgorithm(s.to_owned())),
        }
    }
}

/// One user's detection outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct HomeEstimate {
    pub user_id: String,
    /// `None` when no usable points survived filtering.
    pub home: Option<GeoCoord>,
    pub source: InferenceSource,
    pub refinement: RefinementMethod,
    /// Statistics of the winning cell (grid detector only).
    pub cell: Option<CellStats>,
    pub algorithm: Algorithm,
}

impl HomeEstimate {
    /// The canonical "nothing detected" outcome.
    pub fn undetected(user_id: String, algorithm: Algorithm) -> Self {
        HomeEstimate {
            user_id,
            home: None,
            source: InferenceSource::None,
            refinement: RefinementMethod::NotApplicable,
            cell: None,
            algorithm,
        }
    }
}

/// Mean-shift baseline parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A1Params {
    pub bandwidth_m: f64,
}

/// Stay-point baseline parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A2Params {
    pub stay_dist_m: f64,
    pub stay_time_min: f64,
    pub region_radius_m: f64,
}

/// DBSCAN baseline parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbscanParams {
    pub eps_m: f64,
    pub min_pts: usize,
}

/// K-Means++ baseline parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmeansParams {
    pub k: usize,
    pub n_init: usize,
    pub random_state: u64,
}

/// Every knob a detector run depends on. A value of this type fully
/// determines the behavior of all six detectors on a given trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionParams {
    pub grid_size_m: f64,
    pub night: HourWindow,
    pub weekend_daytime: HourWindow,
    /// Weekday indices (Monday = 0) treated as weekend for the fallback.
    pub weekend_days: BTreeSet<u8>,
    pub a1: A1Params,
    pub a2: A2Params,
    pub dbscan: DbscanParams,
    pub kmeans: KmeansParams,
}

impl Default for DetectionParams {
    fn default() -> Self {
        DetectionParams {
            grid_size_m: 50.0,
            night: HourWindow::new(22, 6),
            weekend_daytime: HourWindow::new(8, 20),
            weekend_days: BTreeSet::from([5, 6]),
            a1: A1Params { bandwidth_m: 20.0 },
            a2: A2Params {
                stay_dist_m: 50.0,
                stay_time_min: 10.0,
                region_radius_m: 50.0,
            },
            dbscan: DbscanParams {
                eps_m: 20.0,
                min_pts: 4,
            },
            kmeans: KmeansParams {
                k: 1,
                n_init: 10,
                random_state: 42,
            },
        }
    }
}

/// A parameter value that can never produce a meaningful run.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("grid_size must be a positive finite number of meters, got {0}")]
    NonPositiveGridSize(f64),
    #[error("{name} must be in 0..=23, got {value}")]
    HourOutOfRange { name: &'static str, value: u8 },
    #[error("weekend_days entries must be in 0..=6 (Monday = 0), got {0}")]
    WeekendDayOutOfRange(u8),
    #[error("{name} must be positive and finite, got {value}")]
    NonPositiveValue { name: &'static str, value: f64 },
    #[error("{name} must be at least 1")]
    ZeroCount { name: &'static str },
}

impl DetectionParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.grid_size_m.is_finite() && self.grid_size_m > 0.0) {
            return Err(ParamError::NonPositiveGridSize(self.grid_size_m));
        }
        for (name, value) in [
            ("night_start_hour", self.night.start_hour),
            ("night_end_hour", self.night.end_hour),
            ("weekend_start_hour", self.weekend_daytime.start_hour),
            ("weekend_end_hour", self.weekend_daytime.end_hour),
        ] {
            if value > 23 {
                return Err(ParamError::HourOutOfRange { name, value });
            }
        }
        if let Some(&d) = self.weekend_days.iter().find(|&&d| d > 6) {
            return Err(ParamError::WeekendDayOutOfRange(d));
        }
        for (name, value) in [
            ("a1.bandwidth", self.a1.bandwidth_m),
            ("a2.stay_dist", self.a2.stay_dist_m),
            ("a2.stay_time_min", self.a2.stay_time_min),
            ("a2.region_radius", self.a2.region_radius_m),
            ("dbscan.eps", self.dbscan.eps_m),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ParamError::NonPositiveValue { name, value });
            }
        }
        if self.dbscan.min_pts == 0 {
            return Err(ParamError::ZeroCount {
                name: "dbscan.min_pts",
            });
        }
        if self.kmeans.k == 0 {
            return Err(ParamError::ZeroCount { name: "kmeans.k" });
        }
        if self.kmeans.n_init == 0 {
            return Err(ParamError::ZeroCount {
                name: "kmeans.n_init",
            });
        }
        Ok(())
    }
}

/// One scored user in a validation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRecord {
    pub user_id: String,
    pub truth: GeoCoord,
    pub estimate: Option<GeoCoord>,
    /// Haversine distance between estimate and truth; `None` when undetected.
    pub error_m: Option<f64>,
    pub source: InferenceSource,
}
