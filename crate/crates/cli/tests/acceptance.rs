//! Acceptance gate: eight criteria that must hold before a release ships.
//!
//! Each criterion is one test, so the harness prints one pass/fail line per
//! criterion. Tolerances are pinned in the assertions; run with
//! `--nocapture` to see the measured values behind each verdict.
//!
//! 1. Frozen-profile recovery accuracy on the reference synthetic dataset.
//! 2. Accuracy stability across grid sizes spanning 1–250 m.
//! 3. Weekend fallback engages exactly when night data disappears.
//! 4. Ordering sanity: the grid detector beats DBSCAN, and a one-cluster
//!    K-Means fed the full day collapses.
//! 5. Oracle equivalence of grid assignment/stats/selection and DBSCAN
//!    labeling against brute-force reimplementations.
//! 6. Analytic identities (centroid, haversine, MAE/RMSE arithmetic).
//! 7. Byte-identical command outputs across reruns and thread counts.
//! 8. Sweep protocol: combination counts, split invariance, shipped
//!    frozen profiles.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ghost_core::baselines::dbscan::dbscan_labels;
use ghost_core::baselines::kmeans::kmeanspp_fit;
use ghost_core::batch::detect_batch;
use ghost_core::geo::haversine_m;
use ghost_core::ghost::{assign_cells, cell_stats, select_home_cell};
use ghost_core::model::{
    Algorithm, DetectionParams, GridKey, InferenceSource, ProjectedPoint, Timestamp, UserTrajectory,
};
use ghost_core::rng::SplitMix64;
use ghost_core::sweep::{split_users, FrozenProfiles, ParamGrid};
use ghost_core::synth::{generate, SynthSpec};
use ghost_core::temporal::HourWindow;
use ghost_core::validate::{error_stats, score, DEFAULT_THRESHOLDS_M};

/// The reference dataset: 50 users, 14 days, 10 m noise, 52% dropout.
fn reference_spec() -> SynthSpec {
    let spec = SynthSpec::default();
    assert_eq!(
        (
            spec.n_users,
            spec.days,
            spec.sigma_m,
            spec.dropout,
            spec.seed
        ),
        (50, 14, 10.0, 0.52, 7),
        "the shipped defaults are the reference dataset"
    );
    spec
}

fn mae_for(
    trajectories: &[UserTrajectory],
    truth: &BTreeMap<String, ghost_core::model::GeoCoord>,
    algorithm: Algorithm,
    params: &DetectionParams,
) -> f64 {
    let outcome = detect_batch(trajectories, algorithm, params).expect("valid params");
    score(&outcome.estimates, truth, &DEFAULT_THRESHOLDS_M)
        .expect("scoreable")
        .mae_m
}

#[test]
fn criterion_1_frozen_profile_recovers_synthetic_homes() {
    let (trajectories, truth) = generate(&reference_spec());
    let profile = FrozenProfiles::default().ghost;

    let started = Instant::now();
    let outcome = detect_batch(&trajectories, Algorithm::Ghost, &profile).unwrap();
    let elapsed = started.elapsed();
    let report = score(&outcome.estimates, &truth, &DEFAULT_THRESHOLDS_M).unwrap();

    assert_eq!(report.n_evaluated, 50, "every user must be detected");
    assert!(
        report.mae_m <= 25.0,
        "MAE {:.3} m exceeds the 25 m budget",
        report.mae_m
    );
    assert!(
        report.rmse_m <= 40.0,
        "RMSE {:.3} m exceeds the 40 m budget",
        report.rmse_m
    );
    assert!(
        elapsed < Duration::from_secs(10),
        "detection took {elapsed:?}, budget is 10 s"
    );
    println!(
        "criterion 1 — frozen-profile recovery: pass \
         (MAE {:.3} m ≤ 25, RMSE {:.3} m ≤ 40, detection {elapsed:?} < 10 s)",
        report.mae_m, report.rmse_m
    );
}

#[test]
fn criterion_2_accuracy_is_stable_across_grid_sizes() {
    let (trajectories, truth) = generate(&reference_spec());
    let mut maes = Vec::new();
    for grid_size_m in [1.0, 5.0, 10.0, 20.0, 50.0, 150.0, 250.0] {
        let mut params = FrozenProfiles::default().ghost;
        params.grid_size_m = grid_size_m;
        maes.push((
            grid_size_m,
            mae_for(&trajectories, &truth, Algorithm::Ghost, &params),
        ));
    }
    let min = maes.iter().map(|(_, m)| *m).fold(f64::INFINITY, f64::min);
    let max = maes.iter().map(|(_, m)| *m).fold(0.0, f64::max);
    assert!(
        max - min <= 5.0,
        "MAE spread {:.3} m across grids exceeds 5 m: {maes:?}",
        max - min
    );
    println!(
        "criterion 2 — grid-size stability: pass \
         (MAE range {:.3} m − {:.3} m = {:.3} m ≤ 5 m over 7 grid sizes)",
        max,
        min,
        max - min
    );
}

#[test]
fn criterion_3_weekend_fallback_engages_without_night_data() {
    let profile = FrozenProfiles::default().ghost;

    // No night pings at all: every estimate must come from the weekend path.
    let mut spec = reference_spec();
    spec.night_rate_per_h = 0.0;
    let (trajectories, truth) = generate(&spec);
    let outcome = detect_batch(&trajectories, Algorithm::Ghost, &profile).unwrap();
    assert!(
        outcome
            .estimates
            .iter()
            .all(|e| e.source == InferenceSource::Weekend),
        "all estimates must fall back to weekend data"
    );
    let report = score(&outcome.estimates, &truth, &DEFAULT_THRESHOLDS_M).unwrap();
    assert!(
        report.mae_m <= 30.0,
        "weekend-only MAE {:.3} m exceeds the 30 m budget",
        report.mae_m
    );

    // Night data restored: the fallback must disengage everywhere.
    let (trajectories, _) = generate(&reference_spec());
    let outcome = detect_batch(&trajectories, Algorithm::Ghost, &profile).unwrap();
    assert!(
        outcome
            .estimates
            .iter()
            .all(|e| e.source == InferenceSource::Night),
        "with night data present every estimate must use it"
    );
    println!(
        "criterion 3 — weekend fallback: pass \
         (50/50 weekend sources at MAE {:.3} m ≤ 30 m; 50/50 night sources when restored)",
        report.mae_m
    );
}

#[test]
fn criterion_4_detector_ordering_on_clean_data() {
    let (trajectories, truth) = generate(&reference_spec());
    let profiles = FrozenProfiles::default();

    let ghost_mae = mae_for(&trajectories, &truth, Algorithm::Ghost, &profiles.ghost);
    let dbscan_mae = mae_for(&trajectories, &truth, Algorithm::Dbscan, &profiles.dbscan);
    assert!(
        ghost_mae <= dbscan_mae,
        "grid detector MAE {ghost_mae:.3} m must not exceed DBSCAN MAE {dbscan_mae:.3} m"
    );

    // A one-cluster K-Means given the whole day averages home with work.
    // Guard the precondition first: day fixes outnumber night fixes ≥ 3:1.
    let night = HourWindow::new(22, 6);
    let (mut night_points, mut day_points) = (0usize, 0usize);
    for trajectory in &trajectories {
        for point in &trajectory.points {
            if night.contains(point.timestamp.hour()) {
                night_points += 1;
            } else {
                day_points += 1;
            }
        }
    }
    let ratio = day_points as f64 / night_points as f64;
    assert!(
        ratio >= 3.0,
        "day/night point ratio {ratio:.2} is below the 3:1 precondition"
    );

    let mut full_day_kmeans = profiles.kmeans.clone();
    assert_eq!(full_day_kmeans.kmeans.k, 1);
    full_day_kmeans.night = HourWindow::new(0, 0); // spans the whole day
    let kmeans_mae = mae_for(&trajectories, &truth, Algorithm::KmeansPp, &full_day_kmeans);
    assert!(
        kmeans_mae >= 10.0 * ghost_mae,
        "full-day k=1 K-Means MAE {kmeans_mae:.3} m is not ≥ 10× grid MAE {ghost_mae:.3} m"
    );
    println!(
        "criterion 4 — ordering sanity: pass \
         (grid {ghost_mae:.3} m ≤ DBSCAN {dbscan_mae:.3} m; \
         full-day k=1 K-Means {kmeans_mae:.3} m ≥ 10× at day/night ratio {ratio:.1})"
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: oracle equivalence.
// ---------------------------------------------------------------------------

fn random_timestamp(rng: &mut SplitMix64) -> Timestamp {
    let text = format!(
        "2025-06-{:02} {:02}:{:02}:{:02}",
        1 + rng.next_u64() % 28,
        rng.next_u64() % 24,
        rng.next_u64() % 60,
        rng.next_u64() % 60
    );
    Timestamp::parse(&text).unwrap()
}

/// Brute-force cell key: nearest multiple of `g` on each axis, halves away
/// from zero (f64::round), written out independently of the library.
fn brute_key(x: f64, y: f64, g: f64) -> (i64, i64) {
    ((y / g).round() as i64, (x / g).round() as i64)
}

/// Brute-force per-cell stats by scanning the whole point list per cell.
fn brute_stats(points: &[ProjectedPoint], g: f64) -> BTreeMap<(i64, i64), (i64, usize, usize)> {
    let keys: BTreeSet<(i64, i64)> = points.iter().map(|p| brute_key(p.x, p.y, g)).collect();
    let mut out = BTreeMap::new();
    for key in keys {
        let members: Vec<&ProjectedPoint> = points
            .iter()
            .filter(|p| brute_key(p.x, p.y, g) == key)
            .collect();
        let min_t = members
            .iter()
            .map(|p| p.timestamp.epoch_seconds())
            .min()
            .unwrap();
        let max_t = members
            .iter()
            .map(|p| p.timestamp.epoch_seconds())
            .max()
            .unwrap();
        let dates: BTreeSet<_> = members.iter().map(|p| p.timestamp.date()).collect();
        out.insert(key, (max_t - min_t, dates.len(), members.len()));
    }
    out
}

/// Brute-force winner: maximize (stay, nights, points), ties to the smallest
/// (row, column) key.
fn brute_winner(stats: &BTreeMap<(i64, i64), (i64, usize, usize)>) -> Option<(i64, i64)> {
    let mut best: Option<((i64, i64), (i64, usize, usize))> = None;
    for (&key, &score) in stats {
        let better = match best {
            None => true,
            Some((bkey, bscore)) => score > bscore || (score == bscore && key < bkey),
        };
        if better {
            best = Some((key, score));
        }
    }
    best.map(|(key, _)| key)
}

/// Textbook O(n²) DBSCAN with index-ordered seeding and FIFO expansion.
fn dbscan_reference(points: &[(f64, f64)], eps_m: f64, min_pts: usize) -> Vec<Option<usize>> {
    let n = points.len();
    let eps2 = eps_m * eps_m;
    let neighbors = |i: usize| -> Vec<usize> {
        (0..n)
            .filter(|&j| {
                let dx = points[i].0 - points[j].0;
                let dy = points[i].1 - points[j].1;
                dx * dx + dy * dy <= eps2
            })
            .collect()
    };
    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut next_cluster = 0;
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        visited[seed] = true;
        let seed_neighbors = neighbors(seed);
        if seed_neighbors.len() < min_pts {
            continue; // noise unless a later cluster claims it as a border
        }
        let cluster = next_cluster;
        next_cluster += 1;
        labels[seed] = Some(cluster);
        let mut frontier: std::collections::VecDeque<usize> = seed_neighbors.into();
        while let Some(point) = frontier.pop_front() {
            if labels[point].is_none() {
                labels[point] = Some(cluster);
            }
            if visited[point] {
                continue;
            }
            visited[point] = true;
            let nb = neighbors(point);
            if nb.len() >= min_pts {
                frontier.extend(nb);
            }
        }
    }
    labels
}

/// Renumber cluster ids in first-appearance order so two labelings compare
/// up to permutation.
fn canonical_labels(labels: &[Option<usize>]) -> Vec<Option<usize>> {
    let mut seen: HashMap<usize, usize> = HashMap::new();
    labels
        .iter()
        .map(|l| {
            l.map(|c| {
                let next = seen.len();
                *seen.entry(c).or_insert(next)
            })
        })
        .collect()
}

#[test]
fn criterion_5_grid_and_dbscan_match_brute_force_oracles() {
    // 200 grid instances: assignment, stats, and selection.
    let mut rng = SplitMix64::new(0x0acce55);
    let grid_choices = [1.0, 3.0, 7.5, 20.0, 50.0, 250.0];
    for instance in 0..200 {
        let n = 1 + (rng.next_u64() % 200) as usize;
        let g = grid_choices[(rng.next_u64() % grid_choices.len() as u64) as usize];
        let points: Vec<ProjectedPoint> = (0..n)
            .map(|i| ProjectedPoint {
                x: (rng.next_f64() - 0.5) * 2_000.0,
                y: (rng.next_f64() - 0.5) * 2_000.0,
                timestamp: random_timestamp(&mut rng),
                source_index: i,
            })
            .collect();

        let cells = assign_cells(&points, g).unwrap();
        assert_eq!(
            cells.values().map(Vec::len).sum::<usize>(),
            n,
            "instance {instance}: every point lands in exactly one cell"
        );
        for (i, p) in points.iter().enumerate() {
            let (iy, ix) = brute_key(p.x, p.y, g);
            let key = GridKey { iy, ix };
            assert!(
                cells.get(&key).is_some_and(|members| members.contains(&i)),
                "instance {instance}: point {i} assigned to the wrong cell"
            );
        }

        let stats = cell_stats(&cells, &points, g);
        let expected = brute_stats(&points, g);
        assert_eq!(stats.len(), expected.len(), "instance {instance}");
        for (key, s) in &stats {
            let &(stay, nights, count) = expected.get(&(key.iy, key.ix)).unwrap();
            assert_eq!(
                (s.stay_time_s, s.unique_nights, s.total_points),
                (stay, nights, count),
                "instance {instance}: stats mismatch in cell {key:?}"
            );
        }

        let winner = select_home_cell(&stats).map(|k| (k.iy, k.ix));
        assert_eq!(
            winner,
            brute_winner(&expected),
            "instance {instance}: home-cell selection diverged"
        );
    }

    // 100 DBSCAN instances against the O(n²) reference.
    let eps_choices = [8.0, 15.0, 30.0, 60.0];
    for instance in 0..100 {
        let n = 1 + (rng.next_u64() % 500) as usize;
        let eps = eps_choices[(rng.next_u64() % eps_choices.len() as u64) as usize];
        let min_pts = 2 + (rng.next_u64() % 5) as usize;
        let n_blobs = 1 + (rng.next_u64() % 4) as usize;
        let centers: Vec<(f64, f64)> = (0..n_blobs)
            .map(|_| {
                (
                    (rng.next_f64() - 0.5) * 500.0,
                    (rng.next_f64() - 0.5) * 500.0,
                )
            })
            .collect();
        let points: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                if rng.next_f64() < 0.2 {
                    // scattered noise
                    (
                        (rng.next_f64() - 0.5) * 800.0,
                        (rng.next_f64() - 0.5) * 800.0,
                    )
                } else {
                    let (cx, cy) = centers[(rng.next_u64() % n_blobs as u64) as usize];
                    (
                        cx + (rng.next_f64() - 0.5) * eps * 3.0,
                        cy + (rng.next_f64() - 0.5) * eps * 3.0,
                    )
                }
            })
            .collect();

        let got = canonical_labels(&dbscan_labels(&points, eps, min_pts));
        let want = canonical_labels(&dbscan_reference(&points, eps, min_pts));
        assert_eq!(
            got, want,
            "instance {instance}: DBSCAN labeling diverged (n={n}, eps={eps}, min_pts={min_pts})"
        );
    }
    println!(
        "criterion 5 — oracle equivalence: pass \
         (200 grid instances and 100 DBSCAN instances match brute force)"
    );
}

#[test]
fn criterion_6_analytic_identities_hold() {
    // k=1 K-Means center is the exact mean.
    let mut rng = SplitMix64::new(61);
    let points: Vec<(f64, f64)> = (0..257)
        .map(|_| {
            (
                (rng.next_f64() - 0.5) * 300.0,
                (rng.next_f64() - 0.5) * 300.0,
            )
        })
        .collect();
    let (centers, _) = kmeanspp_fit(&points, 1, 10, 42).unwrap();
    let n = points.len() as f64;
    let mean = (
        points.iter().map(|p| p.0).sum::<f64>() / n,
        points.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let scale = mean.0.abs().max(mean.1.abs()).max(1.0);
    let rel = ((centers[0].0 - mean.0)
        .abs()
        .max((centers[0].1 - mean.1).abs()))
        / scale;
    assert!(rel <= 1e-9, "k=1 center off the mean by {rel:.3e} relative");

    // One degree of longitude on the equator.
    let one_degree = haversine_m(0.0, 0.0, 0.0, 1.0);
    assert!(
        (one_degree - 111_194.927).abs() <= 1e-3,
        "haversine(0,0 → 0,1) = {one_degree:.6}, expected 111194.927 ± 1e-3"
    );

    // MAE/RMSE/median of the error pair {3, 4}.
    let (mae, rmse, median) = error_stats(&mut [3.0, 4.0]);
    assert!((mae - 3.5).abs() <= 1e-12, "MAE {mae}");
    assert!((rmse - 12.5f64.sqrt()).abs() <= 1e-12, "RMSE {rmse}");
    assert!((median - 3.5).abs() <= 1e-12, "median {median}");

    // RMSE dominates MAE on random error vectors.
    for round in 0..1000 {
        let len = 1 + (rng.next_u64() % 40) as usize;
        let mut errors: Vec<f64> = (0..len).map(|_| rng.next_f64() * 500.0).collect();
        let (mae, rmse, _) = error_stats(&mut errors);
        assert!(
            rmse >= mae - 1e-12,
            "round {round}: RMSE {rmse} fell below MAE {mae}"
        );
    }
    println!(
        "criterion 6 — analytic identities: pass \
         (k=1 centroid ≤ 1e-9 rel; 1° equator haversine ± 1e-3; \
         {{3,4}} stats ± 1e-12; RMSE ≥ MAE on 1000 vectors)"
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: byte determinism of the shipped binary.
// ---------------------------------------------------------------------------

fn ghost_bin(threads: Option<&str>) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ghost"));
    cmd.env_remove("GHOST_CONFIG");
    match threads {
        Some(n) => {
            cmd.env("RAYON_NUM_THREADS", n);
        }
        None => {
            cmd.env_remove("RAYON_NUM_THREADS");
        }
    }
    cmd
}

fn run_ok(cmd: &mut Command) {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read_dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        out.insert(
            entry.file_name().to_string_lossy().into_owned(),
            std::fs::read(entry.path()).unwrap(),
        );
    }
    out
}

fn assert_same_outputs(label: &str, a: &Path, b: &Path) {
    let (left, right) = (read_dir_bytes(a), read_dir_bytes(b));
    assert_eq!(
        left.keys().collect::<Vec<_>>(),
        right.keys().collect::<Vec<_>>(),
        "{label}: file sets differ"
    );
    for (name, bytes) in &left {
        assert_eq!(
            bytes, &right[name],
            "{label}: file {name} differs between runs"
        );
    }
}

#[test]
fn criterion_7_commands_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path();

    // gen-synthetic: two identical runs, plus a single-thread run.
    let gen_dirs = [base.join("g1"), base.join("g2"), base.join("g3")];
    for (out_dir, threads) in gen_dirs.iter().zip([None, None, Some("1")]) {
        run_ok(
            ghost_bin(threads)
                .args([
                    "gen-synthetic",
                    "--n-users",
                    "8",
                    "--days",
                    "5",
                    "--seed",
                    "3",
                    "--output-dir",
                ])
                .arg(out_dir),
        );
    }
    assert_same_outputs("gen-synthetic rerun", &gen_dirs[0], &gen_dirs[1]);
    assert_same_outputs("gen-synthetic 1-thread", &gen_dirs[0], &gen_dirs[2]);
    let data = gen_dirs[0].join("synthetic.csv");
    let truth = gen_dirs[0].join("truth.csv");

    // detect: rerun and thread-count invariance.
    let detect_dirs = [base.join("d1"), base.join("d2"), base.join("d3")];
    for (out_dir, threads) in detect_dirs.iter().zip([None, None, Some("1")]) {
        run_ok(
            ghost_bin(threads)
                .args(["detect", "--input"])
                .arg(&data)
                .arg("--output-dir")
                .arg(out_dir),
        );
    }
    assert_same_outputs("detect rerun", &detect_dirs[0], &detect_dirs[1]);
    assert_same_outputs("detect 1-thread", &detect_dirs[0], &detect_dirs[2]);

    // sweep: a reduced grid keeps this quick while exercising every
    // algorithm and the parallel scorer.
    let sweep_flags = [
        "--sweep-night-starts=22",
        "--sweep-night-ends=6",
        "--sweep-ghost-grid-sizes-m=20,50",
        "--sweep-a1-bandwidths-m=50",
        "--sweep-a2-stay-dists-m=50",
        "--sweep-a2-stay-times-min=10",
        "--sweep-a2-region-radii-m=50",
        "--sweep-dbscan-eps-m=20",
        "--sweep-dbscan-min-pts=4",
        "--sweep-kmeans-ks=2",
        "--sweep-kmeans-n-inits=2",
        "--sweep-kmeans-random-states=42",
    ];
    let sweep_dirs = [base.join("s1"), base.join("s2"), base.join("s3")];
    for (out_dir, threads) in sweep_dirs.iter().zip([None, None, Some("1")]) {
        run_ok(
            ghost_bin(threads)
                .args(["sweep", "--input"])
                .arg(&data)
                .arg("--truth")
                .arg(&truth)
                .arg("--output-dir")
                .arg(out_dir)
                .args(sweep_flags),
        );
    }
    assert_same_outputs("sweep rerun", &sweep_dirs[0], &sweep_dirs[1]);
    assert_same_outputs("sweep 1-thread", &sweep_dirs[0], &sweep_dirs[2]);

    println!(
        "criterion 7 — byte determinism: pass \
         (gen-synthetic, detect, and sweep identical across reruns and 1 vs N threads)"
    );
}

#[test]
fn criterion_8_sweep_protocol_is_pinned() {
    // The default grid yields exactly 36 grid-detector combinations:
    // 3 night starts × 3 night ends × 4 grid sizes.
    let grid = ParamGrid::default();
    let combos = grid.combinations(Algorithm::Ghost);
    assert_eq!(combos.len(), 36, "grid-detector combination count");

    // Seeded splitting ignores input order and partitions cleanly.
    let ids: Vec<String> = (0..50).map(|i| format!("user{i:03}")).collect();
    let mut shuffled = ids.clone();
    shuffled.reverse();
    shuffled.swap(3, 41);
    let (train_a, test_a) = split_users(&ids, 0.8, 42).unwrap();
    let (train_b, test_b) = split_users(&shuffled, 0.8, 42).unwrap();
    assert_eq!(train_a, train_b, "split must ignore input permutation");
    assert_eq!(test_a, test_b);
    assert_eq!((train_a.len(), test_a.len()), (40, 10));
    let train_set: BTreeSet<_> = train_a.iter().collect();
    let test_set: BTreeSet<_> = test_a.iter().collect();
    assert!(train_set.is_disjoint(&test_set), "splits must not overlap");
    assert_eq!(train_set.len() + test_set.len(), ids.len());

    // Shipped frozen profiles, field for field.
    let p = FrozenProfiles::default();
    assert_eq!(p.ghost.grid_size_m, 50.0);
    assert_eq!(p.ghost.night, HourWindow::new(22, 6));
    assert_eq!(p.a1.a1.bandwidth_m, 20.0);
    assert_eq!(p.a1.night, HourWindow::new(22, 5));
    assert_eq!(p.a2.a2.stay_dist_m, 50.0);
    assert_eq!(p.a2.a2.stay_time_min, 10.0);
    assert_eq!(p.a2.a2.region_radius_m, 50.0);
    assert_eq!(p.a2.night, HourWindow::new(20, 5));
    assert_eq!(p.dbscan.dbscan.eps_m, 20.0);
    assert_eq!(p.dbscan.dbscan.min_pts, 4);
    assert_eq!(p.dbscan.night, HourWindow::new(21, 5));
    assert_eq!(p.kmeans.kmeans.k, 1);
    assert_eq!(p.kmeans.kmeans.n_init, 10);
    assert_eq!(p.kmeans.kmeans.random_state, 42);
    assert_eq!(p.kmeans.night, HourWindow::new(22, 5));
    assert_eq!(p.frequency.night, HourWindow::new(20, 5));

    println!(
        "criterion 8 — sweep protocol: pass \
         (36 grid combinations; seed-42 split is order-invariant, disjoint, 40/10; \
         frozen profiles match the published tuning)"
    );
}
