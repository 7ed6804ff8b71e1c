//! `ghost` — grid-based home location detection from GPS trajectories.
//!
//! Subcommands: `detect`, `validate`, `sweep`, `export-map`,
//! `gen-synthetic`. Configuration resolves in three layers (built-in
//! defaults, then a YAML file, then flags); see `config` for the key list.
//! Exit codes: 0 on success (including `--help`/`--version`), 1 for usage
//! or configuration errors, 2 for data errors.

mod commands;
mod config;
mod export;
mod results;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use ghost_core::synth::SynthSpec;

use crate::commands::AppError;
use crate::config::{resolve_config, AppConfig, FileConfig};

#[derive(Parser)]
#[command(
    name = "ghost",
    version,
    about = "Grid-based home location detection from GPS trajectories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect each user's home location and write results.csv
    Detect(RunArgs),
    /// Detect, score against ground truth, and write validation.csv + summary.json
    Validate(RunArgs),
    /// Grid-search detector parameters on a seeded train split
    Sweep(SweepArgs),
    /// Render a results file as map.geojson + a self-contained map.html
    ExportMap(ExportMapArgs),
    /// Generate a synthetic GPS dataset with known home locations
    GenSynthetic(GenSyntheticArgs),
}

/// Flags shared by the detection-driven subcommands. Every flag mirrors a
/// config-file key; a flag set here overrides the file.
#[derive(Args)]
struct RunArgs {
    /// CSV/GPX file or a directory of them
    #[arg(long)]
    input: Option<PathBuf>,
    /// YAML config file ($GHOST_CONFIG is used when omitted)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Detector: ghost, a1, a2, dbscan, kmeanspp, or frequency
    #[arg(long)]
    algorithm: Option<String>,
    /// Ground-truth CSV (user_id, latitude, longitude)
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Directory for output files
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Hit-rate thresholds in meters, comma-separated
    #[arg(long, value_delimiter = ',')]
    thresholds_m: Option<Vec<f64>>,
    /// Train/test split seed
    #[arg(long)]
    seed: Option<u64>,
    /// Fraction of users assigned to the train split
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Grid cell side in meters
    #[arg(long)]
    grid_size_m: Option<f64>,
    /// Night window start hour (0-23)
    #[arg(long)]
    night_start: Option<u8>,
    /// Night window end hour (0-23)
    #[arg(long)]
    night_end: Option<u8>,
    /// Weekend daytime window start hour
    #[arg(long)]
    weekend_start: Option<u8>,
    /// Weekend daytime window end hour
    #[arg(long)]
    weekend_end: Option<u8>,
    /// Weekday indices (Monday = 0) treated as weekend, comma-separated
    #[arg(long, value_delimiter = ',')]
    weekend_days: Option<Vec<u8>>,
    /// Mean-shift bandwidth in meters
    #[arg(long)]
    bandwidth_m: Option<f64>,
    /// Stay-point distance threshold in meters
    #[arg(long)]
    stay_dist_m: Option<f64>,
    /// Stay-point minimum duration in minutes
    #[arg(long)]
    stay_time_min: Option<f64>,
    /// Stay-point region merge radius in meters
    #[arg(long)]
    region_radius_m: Option<f64>,
    /// DBSCAN neighborhood radius in meters
    #[arg(long)]
    eps_m: Option<f64>,
    /// DBSCAN core-point threshold (neighbors including self)
    #[arg(long)]
    min_pts: Option<usize>,
    /// K-Means cluster count
    #[arg(long)]
    k: Option<usize>,
    /// K-Means restart count
    #[arg(long)]
    n_init: Option<usize>,
    /// K-Means seeding RNG state
    #[arg(long)]
    random_state: Option<u64>,
    /// CSV column holding the user id
    #[arg(long)]
    user_column: Option<String>,
    /// CSV column holding the timestamp
    #[arg(long)]
    timestamp_column: Option<String>,
    /// CSV column holding the latitude
    #[arg(long)]
    latitude_column: Option<String>,
    /// CSV column holding the longitude
    #[arg(long)]
    longitude_column: Option<String>,
}

impl RunArgs {
    fn file_config(&self) -> FileConfig {
        FileConfig {
            input: self.input.clone(),
            output_dir: self.output_dir.clone(),
            algorithm: self.algorithm.clone(),
            truth: self.truth.clone(),
            thresholds_m: self.thresholds_m.clone(),
            seed: self.seed,
            train_fraction: self.train_fraction,
            grid_size_m: self.grid_size_m,
            night_start: self.night_start,
            night_end: self.night_end,
            weekend_start: self.weekend_start,
            weekend_end: self.weekend_end,
            weekend_days: self.weekend_days.clone(),
            bandwidth_m: self.bandwidth_m,
            stay_dist_m: self.stay_dist_m,
            stay_time_min: self.stay_time_min,
            region_radius_m: self.region_radius_m,
            eps_m: self.eps_m,
            min_pts: self.min_pts,
            k: self.k,
            n_init: self.n_init,
            random_state: self.random_state,
            user_column: self.user_column.clone(),
            timestamp_column: self.timestamp_column.clone(),
            latitude_column: self.latitude_column.clone(),
            longitude_column: self.longitude_column.clone(),
            ..FileConfig::default()
        }
    }

    fn resolve(&self) -> Result<AppConfig, AppError> {
        Ok(resolve_config(self.config.as_deref(), self.file_config())?)
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Night start hours to sweep, comma-separated
    #[arg(long, value_delimiter = ',')]
    sweep_night_starts: Option<Vec<u8>>,
    /// Night end hours to sweep
    #[arg(long, value_delimiter = ',')]
    sweep_night_ends: Option<Vec<u8>>,
    /// Grid sizes to sweep (meters)
    #[arg(long, value_delimiter = ',')]
    sweep_ghost_grid_sizes_m: Option<Vec<f64>>,
    /// Mean-shift bandwidths to sweep (meters)
    #[arg(long, value_delimiter = ',')]
    sweep_a1_bandwidths_m: Option<Vec<f64>>,
    /// Stay-point distance thresholds to sweep (meters)
    #[arg(long, value_delimiter = ',')]
    sweep_a2_stay_dists_m: Option<Vec<f64>>,
    /// Stay-point durations to sweep (minutes)
    #[arg(long, value_delimiter = ',')]
    sweep_a2_stay_times_min: Option<Vec<f64>>,
    /// Stay-point region radii to sweep (meters)
    #[arg(long, value_delimiter = ',')]
    sweep_a2_region_radii_m: Option<Vec<f64>>,
    /// DBSCAN radii to sweep (meters)
    #[arg(long, value_delimiter = ',')]
    sweep_dbscan_eps_m: Option<Vec<f64>>,
    /// DBSCAN core-point thresholds to sweep
    #[arg(long, value_delimiter = ',')]
    sweep_dbscan_min_pts: Option<Vec<usize>>,
    /// K-Means cluster counts to sweep
    #[arg(long, value_delimiter = ',')]
    sweep_kmeans_ks: Option<Vec<usize>>,
    /// K-Means RNG states to sweep
    #[arg(long, value_delimiter = ',')]
    sweep_kmeans_random_states: Option<Vec<u64>>,
    /// K-Means restart counts to sweep
    #[arg(long, value_delimiter = ',')]
    sweep_kmeans_n_inits: Option<Vec<usize>>,
}

impl SweepArgs {
    fn resolve(&self) -> Result<AppConfig, AppError> {
        let flags = FileConfig {
            sweep_night_starts: self.sweep_night_starts.clone(),
            sweep_night_ends: self.sweep_night_ends.clone(),
            sweep_ghost_grid_sizes_m: self.sweep_ghost_grid_sizes_m.clone(),
            sweep_a1_bandwidths_m: self.sweep_a1_bandwidths_m.clone(),
            sweep_a2_stay_dists_m: self.sweep_a2_stay_dists_m.clone(),
            sweep_a2_stay_times_min: self.sweep_a2_stay_times_min.clone(),
            sweep_a2_region_radii_m: self.sweep_a2_region_radii_m.clone(),
            sweep_dbscan_eps_m: self.sweep_dbscan_eps_m.clone(),
            sweep_dbscan_min_pts: self.sweep_dbscan_min_pts.clone(),
            sweep_kmeans_ks: self.sweep_kmeans_ks.clone(),
            sweep_kmeans_random_states: self.sweep_kmeans_random_states.clone(),
            sweep_kmeans_n_inits: self.sweep_kmeans_n_inits.clone(),
            ..self.run.file_config()
        };
        Ok(resolve_config(self.run.config.as_deref(), flags)?)
    }
}

#[derive(Args)]
struct ExportMapArgs {
    /// Results CSV written by `detect`
    #[arg(long)]
    results: PathBuf,
    /// Optional raw input whose trajectories become trace lines
    #[arg(long)]
    points: Option<PathBuf>,
    /// YAML config file (column overrides apply when loading --points)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for output files
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct GenSyntheticArgs {
    /// Number of users
    #[arg(long, default_value_t = SynthSpec::default().n_users)]
    n_users: usize,
    /// Days of observation per user
    #[arg(long, default_value_t = SynthSpec::default().days)]
    days: u32,
    /// Per-axis GPS noise standard deviation (meters)
    #[arg(long, default_value_t = SynthSpec::default().sigma_m)]
    sigma_m: f64,
    /// Eastward offset of the weekday workplace (meters)
    #[arg(long, default_value_t = SynthSpec::default().work_offset_m)]
    work_offset_m: f64,
    /// Candidate pings per hour inside the night window
    #[arg(long, default_value_t = SynthSpec::default().night_rate_per_h)]
    night_rate_per_h: f64,
    /// Candidate pings per hour outside the night window
    #[arg(long, default_value_t = SynthSpec::default().day_rate_per_h)]
    day_rate_per_h: f64,
    /// Probability that any candidate ping is discarded
    #[arg(long, default_value_t = SynthSpec::default().dropout)]
    dropout: f64,
    /// Generator seed
    #[arg(long, default_value_t = SynthSpec::default().seed)]
    seed: u64,
    /// Directory for output files
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Detect(args) => commands::cmd_detect(&args.resolve()?),
        Command::Validate(args) => commands::cmd_validate(&args.resolve()?),
        Command::Sweep(args) => commands::cmd_sweep(&args.resolve()?),
        Command::ExportMap(args) => {
            let flags = FileConfig {
                output_dir: args.output_dir.clone(),
                ..FileConfig::default()
            };
            let config = resolve_config(args.config.as_deref(), flags)?;
            commands::cmd_export_map(&config, &args.results, args.points.as_deref())
        }
        Command::GenSynthetic(args) => {
            let spec = SynthSpec {
                n_users: args.n_users,
                days: args.days,
                sigma_m: args.sigma_m,
                work_offset_m: args.work_offset_m,
                night_rate_per_h: args.night_rate_per_h,
                day_rate_per_h: args.day_rate_per_h,
                dropout: args.dropout,
                seed: args.seed,
            };
            commands::cmd_gen_synthetic(&spec, &args.output_dir)
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
