//! Sensitivity-sweep harness: seeded train/test split, Cartesian parameter
//! grids, best-configuration selection, and frozen-profile evaluation.
//!
//! The protocol is the usual leakage-safe one: users are split 80/20 with a
//! fixed seed, every parameter combination is scored on the training users,
//! the best combination per algorithm is frozen, and the frozen profiles are
//! applied unchanged to the test users. Everything is a pure function of its
//! inputs — combinations are enumerated in a fixed order and scoring
//! aggregates in a canonical order — so re-running a sweep reproduces its
//! output byte for byte regardless of thread count.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::batch::detect_batch;
use crate::model::{Algorithm, DetectionParams, GeoCoord, ParamError, UserTrajectory};
use crate::rng::SplitMix64;
use crate::temporal::HourWindow;
use crate::validate::{score, ValidateError, ValidationReport, DEFAULT_THRESHOLDS_M};

/// Seed of the canonical train/test split.
pub const DEFAULT_SPLIT_SEED: u64 = 42;
/// Fraction of users assigned to the training side.
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;

/// Split or evaluation failures.
#[derive(Debug, Error)]
pub enum SweepError {
    #[error("cannot split {n} users at fraction {fraction}: both sides must be non-empty")]
    TooFewUsers { n: usize, fraction: f64 },
    #[error("frozen profile for {algorithm} is invalid: {source}")]
    BadProfile {
        algorithm: Algorithm,
        source: ParamError,
    },
    #[error("frozen profile for {algorithm} scored no users: {source}")]
    Unscorable {
        algorithm: Algorithm,
        source: ValidateError,
    },
}

/// Deterministic seeded split of user ids into train and test sets.
///
/// Ids are deduplicated and sorted lexicographically before the shuffle, so
/// the partition depends only on the *set* of ids, the fraction, and the
/// seed — never on input order. The first `⌈fraction·n⌉` shuffled ids form
/// the training side; both sides are returned sorted.
pub fn split_users(
    user_ids: &[String],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<String>, Vec<String>), SweepError> {
    let mut ids: Vec<String> = user_ids
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = ids.len();
    // Snap the product to a 1e-9 grid before the ceiling: 0.8 × 50 lands a
    // hair above 40 in floating point, and a raw ceil would steal a user
    // from the test side.
    let target = train_fraction * n as f64;
    let n_train = ((target * 1e9).round() / 1e9).ceil() as usize;
    if n_train == 0 || n_train >= n {
        return Err(SweepError::TooFewUsers {
            n,
            fraction: train_fraction,
        });
    }
    SplitMix64::new(seed).shuffle(&mut ids);
    let mut test = ids.split_off(n_train);
    let mut train = ids;
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Candidate values for every tunable parameter, one Cartesian grid per
/// algorithm. The default mirrors the published sensitivity ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    pub night_starts: Vec<u8>,
    pub night_ends: Vec<u8>,
    pub ghost_grid_sizes_m: Vec<f64>,
    pub a1_bandwidths_m: Vec<f64>,
    pub a2_stay_dists_m: Vec<f64>,
    pub a2_stay_times_min: Vec<f64>,
    pub a2_region_radii_m: Vec<f64>,
    pub dbscan_eps_m: Vec<f64>,
    pub dbscan_min_pts: Vec<usize>,
    pub kmeans_ks: Vec<usize>,
    pub kmeans_random_states: Vec<u64>,
    pub kmeans_n_inits: Vec<usize>,
}

impl Default for ParamGrid {
    fn default() -> Self {
        ParamGrid {
            night_starts: vec![20, 21, 22],
            night_ends: vec![5, 6, 7],
            ghost_grid_sizes_m: vec![20.0, 50.0, 150.0, 250.0],
            a1_bandwidths_m: vec![20.0, 50.0, 150.0, 250.0],
            a2_stay_dists_m: vec![20.0, 50.0, 150.0, 250.0],
            a2_stay_times_min: vec![10.0, 25.0, 50.0],
            a2_region_radii_m: vec![20.0, 50.0, 150.0, 250.0],
            dbscan_eps_m: vec![20.0, 50.0, 150.0, 250.0],
            dbscan_min_pts: vec![2, 4, 6],
            kmeans_ks: vec![2, 4, 6],
            kmeans_random_states: vec![42, 100, 2048],
            kmeans_n_inits: vec![20],
        }
    }
}

impl ParamGrid {
    /// All parameter combinations for one algorithm, ordered by the
    /// parameter tuple (night_start, night_end, algorithm-specific values
    /// in declaration order). Ties in sweep scoring resolve to the earliest
    /// row, i.e. the lexicographically smallest tuple.
    pub fn combinations(&self, algorithm: Algorithm) -> Vec<DetectionParams> {
        let mut out = Vec::new();
        for &start in &self.night_starts {
            for &end in &self.night_ends {
                let mut base = DetectionParams::default();
                base.night = HourWindow::new(start, end);
                match algorithm {
                    Algorithm::Ghost => {
                        for &g in &self.ghost_grid_sizes_m {
                            let mut p = base.clone();
                            p.grid_size_m = g;
                            out.push(p);
                        }
                    }
                    Algorithm::A1 => {
                        for &bw in &self.a1_bandwidths_m {
                            let mut p = base.clone();
                            p.a1.bandwidth_m = bw;
                            out.push(p);
                        }
                    }
                    Algorithm::A2 => {
                        for &sd in &self.a2_stay_dists_m {
                            for &st in &self.a2_stay_times_min {
                                for &rr in &self.a2_region_radii_m {
                                    let mut p = base.clone();
                                    p.a2.stay_dist_m = sd;
                                    p.a2.stay_time_min = st;
                                    p.a2.region_radius_m = rr;
                                    out.push(p);
                                }
                            }
                        }
                    }
                    Algorithm::Dbscan => {
                        for &eps in &self.dbscan_eps_m {
                            for &mp in &self.dbscan_min_pts {
                                let mut p = base.clone();
                                p.dbscan.eps_m = eps;
                                p.dbscan.min_pts = mp;
                                out.push(p);
                            }
                        }
                    }
                    Algorithm::KmeansPp => {
                        for &k in &self.kmeans_ks {
                            for &rs in &self.kmeans_random_states {
                                for &ni in &self.kmeans_n_inits {
                                    let mut p = base.clone();
                                    p.kmeans.k = k;
                                    p.kmeans.random_state = rs;
                                    p.kmeans.n_init = ni;
                                    out.push(p);
                                }
                            }
                        }
                    }
                    Algorithm::Frequency => out.push(base),
                }
            }
        }
        out
    }
}

/// One scored parameter combination.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub algorithm: Algorithm,
    pub params: DetectionParams,
    /// `None` when no training user could be evaluated under these params.
    pub train_mae_m: Option<f64>,
    pub train_rmse_m: Option<f64>,
    pub n_evaluated: usize,
}

/// All sweep rows plus the winning row index per algorithm.
#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Rows in (algorithm, parameter tuple) order.
    pub rows: Vec<SweepRow>,
    /// (algorithm, index into `rows` of its best combination); `None` when
    /// no combination scored any user.
    pub best: Vec<(Algorithm, Option<usize>)>,
}

impl SweepResult {
    pub fn best_row(&self, algorithm: Algorithm) -> Option<&SweepRow> {
        self.best
            .iter()
            .find(|(a, _)| *a == algorithm)
            .and_then(|(_, idx)| idx.map(|i| &self.rows[i]))
    }
}

fn score_combination(
    train: &[UserTrajectory],
    truth: &BTreeMap<String, GeoCoord>,
    algorithm: Algorithm,
    params: &DetectionParams,
) -> SweepRow {
    let scored = detect_batch(train, algorithm, params)
        .ok()
        .and_then(|outcome| score(&outcome.estimates, truth, &DEFAULT_THRESHOLDS_M).ok());
    match scored {
        Some(report) => SweepRow {
            algorithm,
            params: params.clone(),
            train_mae_m: Some(report.mae_m),
            train_rmse_m: Some(report.rmse_m),
            n_evaluated: report.n_evaluated,
        },
        None => SweepRow {
            algorithm,
            params: params.clone(),
            train_mae_m: None,
            train_rmse_m: None,
            n_evaluated: 0,
        },
    }
}

/// Score every combination of `grid` on the training trajectories.
///
/// The caller passes the training side of the split; nothing here ever sees
/// test users. Per-user detector failures surface as unevaluated users, not
/// aborts. The best row per algorithm minimizes training MAE, ties resolving
/// to the earliest (lexicographically smallest) parameter tuple.
pub fn run_sweep(
    train: &[UserTrajectory],
    truth: &BTreeMap<String, GeoCoord>,
    grid: &ParamGrid,
    algorithms: &[Algorithm],
) -> SweepResult {
    let tasks: Vec<(Algorithm, DetectionParams)> = algorithms
        .iter()
        .flat_map(|&a| grid.combinations(a).into_iter().map(move |p| (a, p)))
        .collect();
    let rows: Vec<SweepRow> = tasks
        .par_iter()
        .map(|(a, p)| score_combination(train, truth, *a, p))
        .collect();
    let best = algorithms
        .iter()
        .map(|&algorithm| {
            let mut winner: Option<usize> = None;
            for (i, row) in rows.iter().enumerate() {
                if row.algorithm != algorithm {
                    continue;
                }
                let Some(mae) = row.train_mae_m else { continue };
                let beats = match winner {
                    None => true,
                    Some(w) => mae < rows[w].train_mae_m.expect("winner was scored"),
                };
                if beats {
                    winner = Some(i);
                }
            }
            (algorithm, winner)
        })
        .collect();
    SweepResult { rows, best }
}

/// The tuned configuration shipped for each algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenProfiles {
    pub ghost: DetectionParams,
    pub a1: DetectionParams,
    pub a2: DetectionParams,
    pub dbscan: DetectionParams,
    pub kmeans: DetectionParams,
    pub frequency: DetectionParams,
}

impl Default for FrozenProfiles {
    fn default() -> Self {
        // The grid detector's frozen profile *is* DetectionParams::default;
        // baseline profiles differ only in their night window and their own
        // parameter block.
        let base = DetectionParams::default();
        let with_night = |start: u8, end: u8| {
            let mut p = base.clone();
            p.night = HourWindow::new(start, end);
            p
        };
        let mut a1 = with_night(22, 5);
        a1.a1.bandwidth_m = 20.0;
        let mut a2 = with_night(20, 5);
        a2.a2.stay_dist_m = 50.0;
        a2.a2.stay_time_min = 10.0;
        a2.a2.region_radius_m = 50.0;
        let mut dbscan = with_night(21, 5);
        dbscan.dbscan.eps_m = 20.0;
        dbscan.dbscan.min_pts = 4;
        let mut kmeans = with_night(22, 5);
        kmeans.kmeans.k = 1;
        kmeans.kmeans.n_init = 10;
        kmeans.kmeans.random_state = 42;
        let frequency = with_night(20, 5);
        FrozenProfiles {
            ghost: base,
            a1,
            a2,
            dbscan,
            kmeans,
            frequency,
        }
    }
}

impl FrozenProfiles {
    pub fn profile(&self, algorithm: Algorithm) -> &DetectionParams {
        match algorithm {
            Algorithm::Ghost => &self.ghost,
            Algorithm::A1 => &self.a1,
            Algorithm::A2 => &self.a2,
            Algorithm::Dbscan => &self.dbscan,
            Algorithm::KmeansPp => &self.kmeans,
            Algorithm::Frequency => &self.frequency,
        }
    }
}

/// Apply each frozen profile to the test trajectories and score it.
pub fn evaluate_frozen(
    test: &[UserTrajectory],
    truth: &BTreeMap<String, GeoCoord>,
    profiles: &FrozenProfiles,
    algorithms: &[Algorithm],
) -> Result<Vec<(Algorithm, ValidationReport)>, SweepError> {
    algorithms
        .iter()
        .map(|&algorithm| {
            let params = profiles.profile(algorithm);
            let outcome = detect_batch(test, algorithm, params)
                .map_err(|source| SweepError::BadProfile { algorithm, source })?;
            let report = score(&outcome.estimates, truth, &DEFAULT_THRESHOLDS_M)
                .map_err(|source| SweepError::Unscorable { algorithm, source })?;
            Ok((algorithm, report))
        })
        .collect()
}
