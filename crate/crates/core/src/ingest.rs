//! Reading trajectories from disk: CSV files, GPX 1.1 tracks, and mixed
//! directories of both.
//!
//! Ingestion is tolerant at the record level and strict at the file level.
//! A row with a bad coordinate or timestamp is counted and skipped — field
//! studies always contain some garbage and a batch run must not die on row
//! 80 000 of a 100 000-row export. A structurally broken file (missing
//! header column, malformed XML, unreadable path) aborts the load with an
//! error naming the file, because silently dropping a whole input is worse
//! than failing.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use quick_xml::events::Event;
use thiserror::Error;

use crate::model::{validate_point, GpsPoint, RawRecord, RejectionKind, UserTrajectory};

/// Column-name overrides for CSV inputs whose headers differ from the
/// defaults (`user_id`, `timestamp`, `latitude`, `longitude`).
#[derive(Debug, Clone, Default)]
pub struct ColumnMap {
    pub user_id: Option<String>,
    pub timestamp: Option<String>,
    pub latitude: Option<String>,
    pub longitude: Option<String>,
}

/// Bookkeeping for one ingestion pass.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestSummary {
    pub files_scanned: usize,
    pub records_scanned: usize,
    pub records_accepted: usize,
    pub rejections: BTreeMap<RejectionKind, usize>,
}

impl IngestSummary {
    pub fn records_rejected(&self) -> usize {
        self.rejections.values().sum()
    }

    fn tally(&mut self, kind: RejectionKind) {
        *self.rejections.entry(kind).or_insert(0) += 1;
    }

    fn merge(&mut self, other: &IngestSummary) {
        self.files_scanned += other.files_scanned;
        self.records_scanned += other.records_scanned;
        self.records_accepted += other.records_accepted;
        for (&k, &n) in &other.rejections {
            *self.rejections.entry(k).or_insert(0) += n;
        }
    }
}

/// Points and bookkeeping from a single file.
#[derive(Debug, Clone)]
pub struct FileParse {
    pub points: Vec<GpsPoint>,
    pub summary: IngestSummary,
}

/// A fully loaded dataset: one trajectory per user, users sorted by id.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub trajectories: Vec<UserTrajectory>,
    pub summary: IngestSummary,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("`{path}`: required column `{column}` not found in CSV header")]
    MissingHeader { path: PathBuf, column: String },
    #[error("`{path}`: CSV error: {detail}")]
    MalformedCsv { path: PathBuf, detail: String },
    #[error("`{path}`: malformed XML: {detail}")]
    MalformedXml { path: PathBuf, detail: String },
    #[error("`{path}` is not a directory")]
    NotADirectory { path: PathBuf },
    #[error("`{path}`: unsupported file type (expected .csv or .gpx)")]
    UnsupportedExtension { path: PathBuf },
    #[error("no valid records found under `{path}`")]
    NoValidRecords { path: PathBuf },
}

pub(crate) fn header_cell(cell: &str) -> &str {
    // Strip a UTF-8 BOM that some exporters prepend to the first header.
    cell.trim().trim_start_matches('\u{feff}')
}

/// Parse one CSV file. The header row is required; extra columns are ignored;
/// short rows reject the affected records rather than aborting.
pub fn parse_csv(path: &Path, columns: Option<&ColumnMap>) -> Result<FileParse, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(BufReader::new(file));

    let headers = reader
        .headers()
        .map_err(|e| IngestError::MalformedCsv {
            path: path.to_owned(),
            detail: e.to_string(),
        })?
        .clone();
    let find = |wanted: &str| -> Result<usize, IngestError> {
        headers
            .iter()
            .position(|h| header_cell(h) == wanted)
            .ok_or_else(|| IngestError::MissingHeader {
                path: path.to_owned(),
                column: wanted.to_owned(),
            })
    };
    let default_map = ColumnMap::default();
    let map = columns.unwrap_or(&default_map);
    let idx_user = find(map.user_id.as_deref().unwrap_or("user_id"))?;
    let idx_ts = find(map.timestamp.as_deref().unwrap_or("timestamp"))?;
    let idx_lat = find(map.latitude.as_deref().unwrap_or("latitude"))?;
    let idx_lon = find(map.longitude.as_deref().unwrap_or("longitude"))?;

    let mut points = Vec::new();
    let mut summary = IngestSummary {
        files_scanned: 1,
        ..IngestSummary::default()
    };
    for row in reader.records() {
        let row = row.map_err(|e| IngestError::MalformedCsv {
            path: path.to_owned(),
            detail: e.to_string(),
        })?;
        summary.records_scanned += 1;
        let cell = |i: usize| row.get(i).map(str::to_owned);
        let raw = RawRecord {
            user_id: cell(idx_user),
            timestamp: cell(idx_ts),
            latitude: cell(idx_lat),
            longitude: cell(idx_lon),
        };
        match validate_point(&raw) {
            Ok(p) => {
                points.push(p);
                summary.records_accepted += 1;
            }
            Err(rej) => summary.tally(rej.kind()),
        }
    }
    Ok(FileParse { points, summary })
}

/// Parse one GPX 1.1 file, reading `<trkpt>` elements. The user id is the
/// file stem unless `user_id_override` is given. Track points without a
/// `<time>` child are rejected (counted), since an untimed fix is useless to
/// every detector here.
pub fn parse_gpx(path: &Path, user_id_override: Option<&str>) -> Result<FileParse, IngestError> {
    let user_id: String = match user_id_override {
        Some(u) => u.to_owned(),
        None => path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
    };

    let mut reader = quick_xml::Reader::from_file(path).map_err(|e| match e {
        quick_xml::Error::Io(io) => IngestError::Io {
            path: path.to_owned(),
            source: std::io::Error::new(io.kind(), io.to_string()),
        },
        other => IngestError::MalformedXml {
            path: path.to_owned(),
            detail: other.to_string(),
        },
    })?;
    reader.config_mut().trim_text(true);

    let malformed = |detail: String| IngestError::MalformedXml {
        path: path.to_owned(),
        detail,
    };

    let mut points = Vec::new();
    let mut summary = IngestSummary {
        files_scanned: 1,
        ..IngestSummary::default()
    };
    let mut buf = Vec::new();
    // State for the trkpt currently being read.
    let mut in_trkpt = false;
    let mut lat: Option<String> = None;
    let mut lon: Option<String> = None;
    let mut time: Option<String> = None;
    let mut in_time = false;

    loop {
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| malformed(e.to_string()))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let name = e.local_name();
                let self_closing = matches!(event, Event::Empty(_));
                if name.as_ref() == b"trkpt" {
                    lat = None;
                    lon = None;
                    time = None;
                    for attr in e.attributes() {
                        let attr = attr.map_err(|e| malformed(e.to_string()))?;
                        let value = attr
                            .unescape_value()
                            .map_err(|e| malformed(e.to_string()))?
                            .into_owned();
                        match attr.key.local_name().as_ref() {
                            b"lat" => lat = Some(value),
                            b"lon" => lon = Some(value),
                            _ => {}
                        }
                    }
                    if self_closing {
                        // A point with no children can never carry a time.
                        summary.records_scanned += 1;
                        summary.tally(RejectionKind::MissingField);
                    } else {
                        in_trkpt = true;
                    }
                } else if in_trkpt && name.as_ref() == b"time" && !self_closing {
                    in_time = true;
                }
            }
            Event::Text(ref t) => {
                if in_time && time.is_none() {
                    time = Some(
                        t.unescape()
                            .map_err(|e| malformed(e.to_string()))?
                            .into_owned(),
                    );
                }
            }
            Event::End(ref e) => match e.local_name().as_ref() {
                b"time" => in_time = false,
                b"trkpt" if in_trkpt => {
                    in_trkpt = false;
                    summary.records_scanned += 1;
                    let raw = RawRecord {
                        user_id: Some(user_id.clone()),
                        timestamp: time.take(),
                        latitude: lat.take(),
                        longitude: lon.take(),
                    };
                    match validate_point(&raw) {
                        Ok(p) => {
                            points.push(p);
                            summary.records_accepted += 1;
                        }
                        Err(rej) => summary.tally(rej.kind()),
                    }
                }
                _ => {}
            },
            Event::Eof => {
                if in_trkpt {
                    return Err(malformed("unexpected end of file inside <trkpt>".into()));
                }
                break;
            }
            _ => {}
        }
        buf.clear();
    }
    Ok(FileParse { points, summary })
}

fn group_into_trajectories(points: Vec<GpsPoint>) -> Vec<UserTrajectory> {
    let mut by_user: BTreeMap<String, Vec<GpsPoint>> = BTreeMap::new();
    for p in points {
        by_user.entry(p.user_id.clone()).or_default().push(p);
    }
    by_user
        .into_iter()
        .map(|(user_id, pts)| UserTrajectory::new(user_id, pts))
        .collect()
}

fn parse_one(path: &Path, columns: Option<&ColumnMap>) -> Result<FileParse, IngestError> {
    let ext = path
        .extension()
        .map(|e| e.to_string_lossy().to_ascii_lowercase());
    match ext.as_deref() {
        Some("csv") => parse_csv(path, columns),
        Some("gpx") => parse_gpx(path, None),
        _ => Err(IngestError::UnsupportedExtension {
            path: path.to_owned(),
        }),
    }
}

/// Load every `.csv` and `.gpx` file directly inside `path` (other files are
/// ignored) and merge them into one dataset. Files are processed in sorted
/// path order, so the result does not depend on directory enumeration order;
/// points for the same user coming from several files are merged into a
/// single trajectory.
pub fn load_directory(path: &Path, columns: Option<&ColumnMap>) -> Result<Dataset, IngestError> {
    if !path.is_dir() {
        return Err(IngestError::NotADirectory {
            path: path.to_owned(),
        });
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|source| IngestError::Io {
            path: path.to_owned(),
            source,
        })?
        .collect::<Result<Vec<_>, _>>()
        .map_err(|source| IngestError::Io {
            path: path.to_owned(),
            source,
        })?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|p| {
            p.is_file()
                && matches!(
                    p.extension()
                        .map(|e| e.to_string_lossy().to_ascii_lowercase())
                        .as_deref(),
                    Some("csv") | Some("gpx")
                )
        })
        .collect();
    files.sort();

    let mut all_points = Vec::new();
    let mut summary = IngestSummary::default();
    for file in &files {
        let parsed = parse_one(file, columns)?;
        summary.merge(&parsed.summary);
        all_points.extend(parsed.points);
    }
    if summary.records_accepted == 0 {
        return Err(IngestError::NoValidRecords {
            path: path.to_owned(),
        });
    }
    Ok(Dataset {
        trajectories: group_into_trajectories(all_points),
        summary,
    })
}

/// Load a single file or a directory, whichever `path` is.
pub fn load_input(path: &Path, columns: Option<&ColumnMap>) -> Result<Dataset, IngestError> {
    if path.is_dir() {
        return load_directory(path, columns);
    }
    let parsed = parse_one(path, columns)?;
    if parsed.summary.records_accepted == 0 {
        return Err(IngestError::NoValidRecords {
            path: path.to_owned(),
        });
    }
    Ok(Dataset {
        trajectories: group_into_trajectories(parsed.points),
        summary: parsed.summary,
    })
}
