//! Reading and writing the per-user results CSV.
//!
//! Columns: `user_id, home_lat, home_lon, inference_source,
//! refinement_method, stay_time_s, unique_nights, total_points, algorithm`.
//! Rows are sorted by user id. Coordinates print with 7 decimals ('.'
//! separator, no grouping) so reruns diff byte-for-byte; users with no
//! detectable home keep their row with empty coordinate and cell columns.

use std::path::{Path, PathBuf};

use thiserror::Error;

use ghost_core::model::{GeoCoord, HomeEstimate};

pub const RESULT_COLUMNS: [&str; 9] = [
    "user_id",
    "home_lat",
    "home_lon",
    "inference_source",
    "refinement_method",
    "stay_time_s",
    "unique_nights",
    "total_points",
    "algorithm",
];

#[derive(Debug, Error)]
pub enum ResultsError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("results file `{path}`: row {row}: {message}")]
    Malformed {
        path: PathBuf,
        row: usize,
        message: String,
    },
}

/// One row of a results file, as read back for export.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub user_id: String,
    pub home: Option<GeoCoord>,
    pub source: String,
    pub refinement: String,
    pub stay_time_s: Option<i64>,
    pub unique_nights: Option<u64>,
    pub total_points: Option<u64>,
    pub algorithm: String,
}

/// Write estimates as the results CSV, sorted by user id.
pub fn write_results(path: &Path, estimates: &[HomeEstimate]) -> Result<(), ResultsError> {
    let mut ordered: Vec<&HomeEstimate> = estimates.iter().collect();
    ordered.sort_by(|a, b| a.user_id.cmp(&b.user_id));

    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(RESULT_COLUMNS)?;
    for estimate in ordered {
        let (lat, lon) = match &estimate.home {
            Some(coord) => (format!("{:.7}", coord.lat), format!("{:.7}", coord.lon)),
            None => (String::new(), String::new()),
        };
        let (stay, nights, points) = match &estimate.cell {
            Some(cell) => (
                cell.stay_time_s.to_string(),
                cell.unique_nights.to_string(),
                cell.total_points.to_string(),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        writer.write_record([
            estimate.user_id.as_str(),
            &lat,
            &lon,
            estimate.source.as_str(),
            estimate.refinement.as_str(),
            &stay,
            &nights,
            &points,
            estimate.algorithm.as_str(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

fn parse_optional<T: std::str::FromStr>(
    raw: &str,
    field: &str,
    path: &Path,
    row: usize,
) -> Result<Option<T>, ResultsError> {
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse::<T>()
        .map(Some)
        .map_err(|_| ResultsError::Malformed {
            path: path.to_owned(),
            row,
            message: format!("unparseable {field} `{raw}`"),
        })
}

/// Read a results CSV back, verifying the header and per-row shape.
pub fn read_results(path: &Path) -> Result<Vec<ResultRow>, ResultsError> {
    let malformed = |row: usize, message: String| ResultsError::Malformed {
        path: path.to_owned(),
        row,
        message,
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => malformed(0, format!("cannot open: {e}")),
            _ => ResultsError::Csv(e),
        })?;
    let headers = reader.headers()?.clone();
    let actual: Vec<&str> = headers.iter().collect();
    if actual != RESULT_COLUMNS {
        return Err(malformed(
            0,
            format!("unexpected header {actual:?}, expected {RESULT_COLUMNS:?}"),
        ));
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2; // 1-based, after the header line
        let record = record?;
        if record.len() != RESULT_COLUMNS.len() {
            return Err(malformed(
                row,
                format!("expected 9 fields, got {}", record.len()),
            ));
        }
        let lat: Option<f64> = parse_optional(&record[1], "home_lat", path, row)?;
        let lon: Option<f64> = parse_optional(&record[2], "home_lon", path, row)?;
        let home = match (lat, lon) {
            (Some(lat), Some(lon)) => Some(GeoCoord { lat, lon }),
            (None, None) => None,
            _ => {
                return Err(malformed(
                    row,
                    "home_lat and home_lon must both be present or both empty".to_owned(),
                ))
            }
        };
        rows.push(ResultRow {
            user_id: record[0].to_owned(),
            home,
            source: record[3].to_owned(),
            refinement: record[4].to_owned(),
            stay_time_s: parse_optional(&record[5], "stay_time_s", path, row)?,
            unique_nights: parse_optional(&record[6], "unique_nights", path, row)?,
            total_points: parse_optional(&record[7], "total_points", path, row)?,
            algorithm: record[8].to_owned(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ghost_core::model::{
        Algorithm, CellStats, HomeEstimate, InferenceSource, RefinementMethod,
    };

    fn sample_estimates() -> Vec<HomeEstimate> {
        vec![
            HomeEstimate {
                user_id: "user_b".into(),
                home: Some(GeoCoord {
                    lat: 29.651234567,
                    lon: -82.324987654,
                }),
                source: InferenceSource::Night,
                refinement: RefinementMethod::DensestBinCentroid,
                cell: Some(CellStats {
                    cell_x: 0.0,
                    cell_y: 0.0,
                    stay_time_s: 3600,
                    unique_nights: 4,
                    total_points: 120,
                }),
                algorithm: Algorithm::Ghost,
            },
            HomeEstimate::undetected("user_a".into(), Algorithm::Ghost),
        ]
    }

    #[test]
    fn rows_come_back_sorted_with_seven_decimal_coordinates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        write_results(&path, &sample_estimates()).unwrap();

        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), RESULT_COLUMNS.join(","));
        let first = lines.next().unwrap();
        assert!(first.starts_with("user_a,,,none,not_applicable,,,,ghost"));
        let second = lines.next().unwrap();
        assert!(second.contains("29.6512346,-82.3249877"));
    }

    #[test]
    fn round_trip_preserves_every_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        write_results(&path, &sample_estimates()).unwrap();

        let rows = read_results(&path).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].user_id, "user_a");
        assert_eq!(rows[0].home, None);
        assert_eq!(rows[0].source, "none");
        assert_eq!(rows[1].user_id, "user_b");
        let home = rows[1].home.unwrap();
        assert!((home.lat - 29.6512346).abs() < 1e-9);
        assert_eq!(rows[1].stay_time_s, Some(3600));
        assert_eq!(rows[1].unique_nights, Some(4));
        assert_eq!(rows[1].total_points, Some(120));
        assert_eq!(rows[1].algorithm, "ghost");
    }

    #[test]
    fn wrong_header_is_malformed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        std::fs::write(&path, "user,lat,lon\nu1,1.0,2.0\n").unwrap();
        assert!(matches!(
            read_results(&path),
            Err(ResultsError::Malformed { row: 0, .. })
        ));
    }

    #[test]
    fn garbled_coordinate_is_malformed_with_row_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        let mut text = RESULT_COLUMNS.join(",");
        text.push('\n');
        text.push_str("u1,abc,-82.3,night,grid_centroid,10,1,5,ghost\n");
        std::fs::write(&path, text).unwrap();
        assert!(matches!(
            read_results(&path),
            Err(ResultsError::Malformed { row: 2, .. })
        ));
    }

    #[test]
    fn half_empty_coordinate_pair_is_malformed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        let mut text = RESULT_COLUMNS.join(",");
        text.push('\n');
        text.push_str("u1,29.65,,night,grid_centroid,10,1,5,ghost\n");
        std::fs::write(&path, text).unwrap();
        assert!(matches!(
            read_results(&path),
            Err(ResultsError::Malformed { row: 2, .. })
        ));
    }
}
