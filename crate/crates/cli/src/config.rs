//! Layered configuration: built-in defaults, then an optional YAML file,
//! then command-line flags, later layers overriding earlier ones.
//!
//! The file is a flat key tree mirroring the detection parameter names, so a
//! profile written by `ghost sweep` loads back unchanged. Unknown keys are
//! hard errors — a typo like `grid_sz` should fail loudly, not fall back to
//! a default — and so are type mismatches.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use ghost_core::ingest::ColumnMap;
use ghost_core::model::{Algorithm, DetectionParams, ParamError};
use ghost_core::sweep::{ParamGrid, DEFAULT_SPLIT_SEED, DEFAULT_TRAIN_FRACTION};
use ghost_core::temporal::HourWindow;
use ghost_core::validate::DEFAULT_THRESHOLDS_M;

/// Environment variable naming a default config file, consulted when
/// `--config` is absent.
pub const CONFIG_ENV_VAR: &str = "GHOST_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file `{0}` not found")]
    FileNotFound(PathBuf),
    #[error("config file `{path}`: unknown key: {detail}")]
    UnknownKey { path: PathBuf, detail: String },
    #[error("config file `{path}`: type mismatch: {detail}")]
    TypeMismatch { path: PathBuf, detail: String },
    #[error("config file `{path}`: {detail}")]
    Malformed { path: PathBuf, detail: String },
    #[error("unknown algorithm `{0}` (expected ghost, a1, a2, dbscan, kmeanspp, or frequency)")]
    BadAlgorithm(String),
    #[error(transparent)]
    BadParams(#[from] ParamError),
    #[error("train_fraction {0} must lie strictly between 0 and 1")]
    BadTrainFraction(f64),
}

/// Every key a config file may set. All fields optional: absent means
/// "inherit from the layer below". Serialized form doubles as the frozen
/// profile format written by the sweep command.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds_m: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_size_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub night_start: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub night_end: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weekend_start: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weekend_end: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weekend_days: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stay_dist_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stay_time_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region_radius_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_pts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_init: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_state: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub user_column: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_column: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub latitude_column: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub longitude_column: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_night_starts: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_night_ends: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_ghost_grid_sizes_m: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_a1_bandwidths_m: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_a2_stay_dists_m: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_a2_stay_times_min: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_a2_region_radii_m: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_dbscan_eps_m: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_dbscan_min_pts: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_kmeans_ks: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_kmeans_random_states: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_kmeans_n_inits: Option<Vec<usize>>,
}

impl FileConfig {
    /// Parse a YAML config file, classifying failures so the caller can
    /// report actionable errors.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|_| ConfigError::FileNotFound(path.to_owned()))?;
        serde_yaml::from_str(&text).map_err(|e| {
            let detail = e.to_string();
            if detail.contains("unknown field") {
                ConfigError::UnknownKey {
                    path: path.to_owned(),
                    detail,
                }
            } else if detail.contains("invalid type") {
                ConfigError::TypeMismatch {
                    path: path.to_owned(),
                    detail,
                }
            } else {
                ConfigError::Malformed {
                    path: path.to_owned(),
                    detail,
                }
            }
        })
    }

    /// Overlay `other` on top of `self`: any key set in `other` wins.
    pub fn overlay(mut self, other: FileConfig) -> FileConfig {
        macro_rules! take {
            ($($field:ident),* $(,)?) => {
                $(if other.$field.is_some() { self.$field = other.$field; })*
            };
        }
        take!(
            input,
            output_dir,
            algorithm,
            truth,
            thresholds_m,
            seed,
            train_fraction,
            grid_size_m,
            night_start,
            night_end,
            weekend_start,
            weekend_end,
            weekend_days,
            bandwidth_m,
            stay_dist_m,
            stay_time_min,
            region_radius_m,
            eps_m,
            min_pts,
            k,
            n_init,
            random_state,
            user_column,
            timestamp_column,
            latitude_column,
            longitude_column,
            sweep_night_starts,
            sweep_night_ends,
            sweep_ghost_grid_sizes_m,
            sweep_a1_bandwidths_m,
            sweep_a2_stay_dists_m,
            sweep_a2_stay_times_min,
            sweep_a2_region_radii_m,
            sweep_dbscan_eps_m,
            sweep_dbscan_min_pts,
            sweep_kmeans_ks,
            sweep_kmeans_random_states,
            sweep_kmeans_n_inits,
        );
        self
    }

    /// Capture every detection parameter of a resolved profile, for writing
    /// frozen-profile files.
    pub fn from_params(algorithm: Algorithm, params: &DetectionParams) -> FileConfig {
        FileConfig {
            algorithm: Some(algorithm.as_str().to_owned()),
            grid_size_m: Some(params.grid_size_m),
            night_start: Some(params.night.start_hour),
            night_end: Some(params.night.end_hour),
            weekend_start: Some(params.weekend_daytime.start_hour),
            weekend_end: Some(params.weekend_daytime.end_hour),
            weekend_days: Some(params.weekend_days.iter().copied().collect()),
            bandwidth_m: Some(params.a1.bandwidth_m),
            stay_dist_m: Some(params.a2.stay_dist_m),
            stay_time_min: Some(params.a2.stay_time_min),
            region_radius_m: Some(params.a2.region_radius_m),
            eps_m: Some(params.dbscan.eps_m),
            min_pts: Some(params.dbscan.min_pts),
            k: Some(params.kmeans.k),
            n_init: Some(params.kmeans.n_init),
            random_state: Some(params.kmeans.random_state),
            ..FileConfig::default()
        }
    }
}

/// A fully resolved configuration: every field concrete.
#[derive(Debug, Clone)]
pub struct AppConfig {
    pub input: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub algorithm: Algorithm,
    pub truth: Option<PathBuf>,
    pub thresholds_m: Vec<f64>,
    pub seed: u64,
    pub train_fraction: f64,
    pub params: DetectionParams,
    pub columns: ColumnMap,
    pub grid: ParamGrid,
}

/// Merge defaults, an optional file (explicit path or `GHOST_CONFIG`), and
/// flag overrides into a concrete configuration.
pub fn resolve_config(file: Option<&Path>, flags: FileConfig) -> Result<AppConfig, ConfigError> {
    let env_path = std::env::var_os(CONFIG_ENV_VAR).map(PathBuf::from);
    let file_layer = match file.or(env_path.as_deref()) {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let merged = file_layer.overlay(flags);

    let algorithm = match &merged.algorithm {
        Some(name) => name
            .parse::<Algorithm>()
            .map_err(|_| ConfigError::BadAlgorithm(name.clone()))?,
        None => Algorithm::Ghost,
    };
    let mut params = DetectionParams::default();
    if let Some(g) = merged.grid_size_m {
        params.grid_size_m = g;
    }
    if let Some(h) = merged.night_start {
        params.night = HourWindow::new(h, params.night.end_hour);
    }
    if let Some(h) = merged.night_end {
        params.night = HourWindow::new(params.night.start_hour, h);
    }
    if let Some(h) = merged.weekend_start {
        params.weekend_daytime = HourWindow::new(h, params.weekend_daytime.end_hour);
    }
    if let Some(h) = merged.weekend_end {
        params.weekend_daytime = HourWindow::new(params.weekend_daytime.start_hour, h);
    }
    if let Some(days) = &merged.weekend_days {
        params.weekend_days = days.iter().copied().collect::<BTreeSet<u8>>();
    }
    if let Some(v) = merged.bandwidth_m {
        params.a1.bandwidth_m = v;
    }
    if let Some(v) = merged.stay_dist_m {
        params.a2.stay_dist_m = v;
    }
    if let Some(v) = merged.stay_time_min {
        params.a2.stay_time_min = v;
    }
    if let Some(v) = merged.region_radius_m {
        params.a2.region_radius_m = v;
    }
    if let Some(v) = merged.eps_m {
        params.dbscan.eps_m = v;
    }
    if let Some(v) = merged.min_pts {
        params.dbscan.min_pts = v;
    }
    if let Some(v) = merged.k {
        params.kmeans.k = v;
    }
    if let Some(v) = merged.n_init {
        params.kmeans.n_init = v;
    }
    if let Some(v) = merged.random_state {
        params.kmeans.random_state = v;
    }
    params.validate()?;

    let train_fraction = merged.train_fraction.unwrap_or(DEFAULT_TRAIN_FRACTION);
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(ConfigError::BadTrainFraction(train_fraction));
    }

    let mut grid = ParamGrid::default();
    macro_rules! grid_take {
        ($($key:ident => $field:ident),* $(,)?) => {
            $(if let Some(v) = merged.$key.clone() { grid.$field = v; })*
        };
    }
    grid_take!(
        sweep_night_starts => night_starts,
        sweep_night_ends => night_ends,
        sweep_ghost_grid_sizes_m => ghost_grid_sizes_m,
        sweep_a1_bandwidths_m => a1_bandwidths_m,
        sweep_a2_stay_dists_m => a2_stay_dists_m,
        sweep_a2_stay_times_min => a2_stay_times_min,
        sweep_a2_region_radii_m => a2_region_radii_m,
        sweep_dbscan_eps_m => dbscan_eps_m,
        sweep_dbscan_min_pts => dbscan_min_pts,
        sweep_kmeans_ks => kmeans_ks,
        sweep_kmeans_random_states => kmeans_random_states,
        sweep_kmeans_n_inits => kmeans_n_inits,
    );

    Ok(AppConfig {
        input: merged.input,
        output_dir: merged.output_dir.unwrap_or_else(|| PathBuf::from(".")),
        algorithm,
        truth: merged.truth,
        thresholds_m: merged
            .thresholds_m
            .unwrap_or_else(|| DEFAULT_THRESHOLDS_M.to_vec()),
        seed: merged.seed.unwrap_or(DEFAULT_SPLIT_SEED),
        train_fraction,
        params,
        columns: ColumnMap {
            user_id: merged.user_column,
            timestamp: merged.timestamp_column,
            latitude: merged.latitude_column,
            longitude: merged.longitude_column,
        },
        grid,
    })
}
