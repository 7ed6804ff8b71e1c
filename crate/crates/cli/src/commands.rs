//! The five subcommand implementations and the exit-code policy.
//!
//! Every command is deterministic for fixed inputs: ingestion sorts users,
//! the batch layer preserves that order regardless of thread count, and all
//! serialization uses sorted maps and fixed float formatting.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use ghost_core::batch::detect_batch;
use ghost_core::ingest::{load_input, Dataset, IngestError, IngestSummary};
use ghost_core::model::{Algorithm, ParamError, UserTrajectory};
use ghost_core::sweep::{run_sweep, split_users, SweepError, SweepRow};
use ghost_core::synth::{generate, SynthError, SynthSpec};
use ghost_core::validate::{load_ground_truth, score, ValidateError, ValidationReport};

use crate::config::{AppConfig, ConfigError, FileConfig};
use crate::export::{feature_collection, html_page, omitted_users};
use crate::results::{read_results, write_results, ResultsError};

/// Failures bucketed by exit code: 1 for usage/config problems, 2 for data
/// problems (unreadable, malformed, or unscorable inputs).
#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Data(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Data(_) => 2,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Usage(m) | AppError::Data(m) => f.write_str(m),
        }
    }
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Usage(e.to_string())
    }
}

impl From<ParamError> for AppError {
    fn from(e: ParamError) -> Self {
        AppError::Usage(e.to_string())
    }
}

impl From<SynthError> for AppError {
    fn from(e: SynthError) -> Self {
        AppError::Usage(e.to_string())
    }
}

impl From<IngestError> for AppError {
    fn from(e: IngestError) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<ValidateError> for AppError {
    fn from(e: ValidateError) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<SweepError> for AppError {
    fn from(e: SweepError) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<ResultsError> for AppError {
    fn from(e: ResultsError) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<csv::Error> for AppError {
    fn from(e: csv::Error) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for AppError {
    fn from(e: serde_json::Error) -> Self {
        AppError::Data(e.to_string())
    }
}

impl From<serde_yaml::Error> for AppError {
    fn from(e: serde_yaml::Error) -> Self {
        AppError::Data(e.to_string())
    }
}

fn require_input(config: &AppConfig) -> Result<&Path, AppError> {
    config.input.as_deref().ok_or_else(|| {
        AppError::Usage("an input path is required (--input or config key `input`)".into())
    })
}

fn require_truth(config: &AppConfig) -> Result<&Path, AppError> {
    config.truth.as_deref().ok_or_else(|| {
        AppError::Usage("a ground-truth path is required (--truth or config key `truth`)".into())
    })
}

fn load_dataset(config: &AppConfig, input: &Path) -> Result<Dataset, AppError> {
    let dataset = load_input(input, Some(&config.columns))?;
    log_ingest(&dataset.summary);
    Ok(dataset)
}

fn log_ingest(summary: &IngestSummary) {
    eprintln!(
        "ingested {} record(s) from {} file(s); accepted {}, rejected {}",
        summary.records_scanned,
        summary.files_scanned,
        summary.records_accepted,
        summary.records_rejected()
    );
    for (kind, count) in &summary.rejections {
        eprintln!("  rejected ({}): {}", kind.as_str(), count);
    }
}

fn ensure_output_dir(config: &AppConfig) -> Result<(), AppError> {
    fs::create_dir_all(&config.output_dir)?;
    Ok(())
}

/// Format a distance for CSV output: 3 decimals, empty for absent.
fn fmt_distance(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.3}")).unwrap_or_default()
}

/// Format a coordinate for CSV output: 7 decimals, empty for absent.
fn fmt_coord(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.7}")).unwrap_or_default()
}

/// Detect homes for every user in the input and write `results.csv`.
pub fn cmd_detect(config: &AppConfig) -> Result<(), AppError> {
    let input = require_input(config)?;
    let dataset = load_dataset(config, input)?;
    let outcome = detect_batch(&dataset.trajectories, config.algorithm, &config.params)?;
    for warning in &outcome.warnings {
        eprintln!("warning: user {}: {}", warning.user_id, warning.message);
    }
    ensure_output_dir(config)?;
    let path = config.output_dir.join("results.csv");
    write_results(&path, &outcome.estimates)?;
    let detected = outcome
        .estimates
        .iter()
        .filter(|e| e.home.is_some())
        .count();
    eprintln!(
        "detected homes for {detected} of {} user(s)",
        outcome.estimates.len()
    );
    println!("{}", path.display());
    Ok(())
}

/// Detect, compare against ground truth, and write `validation.csv` plus
/// `summary.json`.
pub fn cmd_validate(config: &AppConfig) -> Result<(), AppError> {
    let input = require_input(config)?;
    let truth_path = require_truth(config)?;
    let dataset = load_dataset(config, input)?;
    let outcome = detect_batch(&dataset.trajectories, config.algorithm, &config.params)?;
    for warning in &outcome.warnings {
        eprintln!("warning: user {}: {}", warning.user_id, warning.message);
    }
    let truth = load_ground_truth(truth_path)?;
    let report = score(&outcome.estimates, &truth, &config.thresholds_m)?;

    ensure_output_dir(config)?;
    let csv_path = config.output_dir.join("validation.csv");
    write_validation_csv(&csv_path, &report)?;
    let json_path = config.output_dir.join("summary.json");
    let summary = summary_json(config.algorithm, &report);
    fs::write(
        &json_path,
        format!("{}\n", serde_json::to_string_pretty(&summary)?),
    )?;
    println!("{}", csv_path.display());
    println!("{}", json_path.display());
    Ok(())
}

fn write_validation_csv(path: &Path, report: &ValidationReport) -> Result<(), AppError> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record([
        "user_id",
        "truth_lat",
        "truth_lon",
        "est_lat",
        "est_lon",
        "error_m",
        "inference_source",
    ])?;
    for record in &report.records {
        writer.write_record([
            record.user_id.as_str(),
            &fmt_coord(Some(record.truth.lat)),
            &fmt_coord(Some(record.truth.lon)),
            &fmt_coord(record.estimate.map(|e| e.lat)),
            &fmt_coord(record.estimate.map(|e| e.lon)),
            &fmt_distance(record.error_m),
            record.source.as_str(),
        ])?;
    }
    writer.flush().map_err(|e| AppError::Data(e.to_string()))?;
    Ok(())
}

fn summary_json(algorithm: Algorithm, report: &ValidationReport) -> serde_json::Value {
    let hit_rates: Vec<serde_json::Value> = report
        .hit_rates
        .iter()
        .map(|(threshold, fraction)| {
            serde_json::json!({ "threshold_m": threshold, "fraction": fraction })
        })
        .collect();
    serde_json::json!({
        "algorithm": algorithm.as_str(),
        "n_evaluated": report.n_evaluated,
        "n_missing": report.n_missing,
        "mae_m": report.mae_m,
        "rmse_m": report.rmse_m,
        "median_m": report.median_m,
        "hit_rates": hit_rates,
    })
}

/// Grid-search parameters on a seeded train split; write `sweep.csv`, a
/// `split.json` record of the partition, and one frozen profile per
/// algorithm that produced a scoreable best row.
pub fn cmd_sweep(config: &AppConfig) -> Result<(), AppError> {
    let input = require_input(config)?;
    let truth_path = require_truth(config)?;
    let dataset = load_dataset(config, input)?;
    let truth = load_ground_truth(truth_path)?;

    let ids: Vec<String> = dataset
        .trajectories
        .iter()
        .map(|t| t.user_id.clone())
        .collect();
    let (train_ids, test_ids) = split_users(&ids, config.train_fraction, config.seed)?;
    let train: Vec<UserTrajectory> = dataset
        .trajectories
        .iter()
        .filter(|t| train_ids.binary_search(&t.user_id).is_ok())
        .cloned()
        .collect();
    eprintln!(
        "split {} user(s) into {} train / {} test (seed {})",
        ids.len(),
        train_ids.len(),
        test_ids.len(),
        config.seed
    );

    let mut algorithms = Vec::new();
    for algorithm in Algorithm::ALL {
        if config.grid.combinations(algorithm).is_empty() {
            eprintln!("notice: sweep grid for {algorithm} is empty; skipping");
        } else {
            algorithms.push(algorithm);
        }
    }

    let result = run_sweep(&train, &truth, &config.grid, &algorithms);

    ensure_output_dir(config)?;
    let sweep_path = config.output_dir.join("sweep.csv");
    write_sweep_csv(&sweep_path, &result.rows)?;
    println!("{}", sweep_path.display());

    let split_path = config.output_dir.join("split.json");
    let split = serde_json::json!({
        "seed": config.seed,
        "train_fraction": config.train_fraction,
        "train_users": train_ids,
        "test_users": test_ids,
    });
    fs::write(
        &split_path,
        format!("{}\n", serde_json::to_string_pretty(&split)?),
    )?;
    println!("{}", split_path.display());

    for algorithm in &algorithms {
        match result.best_row(*algorithm) {
            Some(row) => {
                let profile = FileConfig::from_params(*algorithm, &row.params);
                let path = config
                    .output_dir
                    .join(format!("best_{}.yaml", algorithm.as_str()));
                fs::write(&path, serde_yaml::to_string(&profile)?)?;
                println!("{}", path.display());
            }
            None => eprintln!("notice: no scoreable combination for {algorithm}"),
        }
    }
    Ok(())
}

fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), AppError> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record([
        "algorithm",
        "night_start",
        "night_end",
        "grid_size_m",
        "bandwidth_m",
        "stay_dist_m",
        "stay_time_min",
        "region_radius_m",
        "eps_m",
        "min_pts",
        "k",
        "n_init",
        "random_state",
        "train_mae_m",
        "train_rmse_m",
        "n_evaluated",
    ])?;
    for row in rows {
        let p = &row.params;
        writer.write_record([
            row.algorithm.as_str().to_owned(),
            p.night.start_hour.to_string(),
            p.night.end_hour.to_string(),
            p.grid_size_m.to_string(),
            p.a1.bandwidth_m.to_string(),
            p.a2.stay_dist_m.to_string(),
            p.a2.stay_time_min.to_string(),
            p.a2.region_radius_m.to_string(),
            p.dbscan.eps_m.to_string(),
            p.dbscan.min_pts.to_string(),
            p.kmeans.k.to_string(),
            p.kmeans.n_init.to_string(),
            p.kmeans.random_state.to_string(),
            fmt_distance(row.train_mae_m),
            fmt_distance(row.train_rmse_m),
            row.n_evaluated.to_string(),
        ])?;
    }
    writer.flush().map_err(|e| AppError::Data(e.to_string()))?;
    Ok(())
}

/// Render a results file as `map.geojson` plus a self-contained `map.html`.
pub fn cmd_export_map(
    config: &AppConfig,
    results_path: &Path,
    points: Option<&Path>,
) -> Result<(), AppError> {
    let rows = read_results(results_path)?;
    let traces = match points {
        Some(path) => load_dataset(config, path)?.trajectories,
        None => Vec::new(),
    };
    let collection = feature_collection(&rows, &traces);
    let omitted = omitted_users(&rows);
    if !omitted.is_empty() {
        eprintln!(
            "{} user(s) without a detected home omitted from the map",
            omitted.len()
        );
    }

    ensure_output_dir(config)?;
    let geojson_path = config.output_dir.join("map.geojson");
    fs::write(
        &geojson_path,
        format!("{}\n", serde_json::to_string_pretty(&collection)?),
    )?;
    let html_path = config.output_dir.join("map.html");
    fs::write(&html_path, html_page(&collection, &omitted))?;
    println!("{}", geojson_path.display());
    println!("{}", html_path.display());
    Ok(())
}

/// Generate a synthetic dataset with known homes: `synthetic.csv` (loadable
/// by `detect`) and `truth.csv` (loadable as ground truth).
pub fn cmd_gen_synthetic(spec: &SynthSpec, output_dir: &PathBuf) -> Result<(), AppError> {
    spec.validate()?;
    let (trajectories, truth) = generate(spec);

    fs::create_dir_all(output_dir)?;
    let data_path = output_dir.join("synthetic.csv");
    let mut writer = csv::Writer::from_path(&data_path)?;
    writer.write_record(["user_id", "timestamp", "latitude", "longitude"])?;
    for trajectory in &trajectories {
        for point in &trajectory.points {
            writer.write_record([
                point.user_id.as_str(),
                &point.timestamp.to_string(),
                &point.lat.to_string(),
                &point.lon.to_string(),
            ])?;
        }
    }
    writer.flush().map_err(|e| AppError::Data(e.to_string()))?;

    let truth_path = output_dir.join("truth.csv");
    let mut writer = csv::Writer::from_path(&truth_path)?;
    writer.write_record(["user_id", "latitude", "longitude"])?;
    for (user_id, home) in &truth {
        writer.write_record([
            user_id.as_str(),
            &home.lat.to_string(),
            &home.lon.to_string(),
        ])?;
    }
    writer.flush().map_err(|e| AppError::Data(e.to_string()))?;

    let n_points: usize = trajectories.iter().map(|t| t.points.len()).sum();
    eprintln!(
        "generated {} user(s), {} point(s)",
        trajectories.len(),
        n_points
    );
    println!("{}", data_path.display());
    println!("{}", truth_path.display());
    Ok(())
}
