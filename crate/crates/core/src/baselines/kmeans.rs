//! K-Means++ baseline.
//!
//! Standard Lloyd iteration with the k-means++ seeding rule, run `n_init`
//! times from one seeded [`SplitMix64`](crate::rng::SplitMix64) stream; the
//! restart with the strictly smallest inertia wins, so ties keep the earlier
//! run. The largest cluster's centroid is reported as home.
//!
//! Determinism contract: the first center is `next_u64() % n`; each further
//! center is drawn by walking the cumulative squared-distance mass with
//! `r = next_f64() * total`. When every remaining point coincides with an
//! existing center (`total == 0`), the draw falls back to a uniform index so
//! seeding still consumes exactly one variate per center.

use crate::model::{Algorithm, DetectionParams, HomeEstimate, UserTrajectory};
use crate::rng::SplitMix64;

use super::{estimate_at, projected_view, DetectError};

const MAX_LLOYD_ITERS: usize = 300;

fn sq_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy
}

fn seed_centers(points: &[(f64, f64)], k: usize, rng: &mut SplitMix64) -> Vec<(f64, f64)> {
    let n = points.len();
    let mut centers = Vec::with_capacity(k);
    centers.push(points[(rng.next_u64() % n as u64) as usize]);
    let mut d2: Vec<f64> = points.iter().map(|&p| sq_dist(p, centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let r = rng.next_f64() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if acc >= r {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            (rng.next_u64() % n as u64) as usize
        };
        let center = points[next];
        centers.push(center);
        for (i, &p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, center));
        }
    }
    centers
}

struct Fit {
    centers: Vec<(f64, f64)>,
    assignment: Vec<usize>,
    inertia: f64,
}

fn lloyd(points: &[(f64, f64)], mut centers: Vec<(f64, f64)>) -> Fit {
    let n = points.len();
    let k = centers.len();
    // Sentinel start so the first pass always registers as a change and the
    // centers get at least one update (k = 1 would otherwise "converge"
    // immediately on the seed point).
    let mut assignment = vec![usize::MAX; n];
    for _ in 0..MAX_LLOYD_ITERS {
        let mut changed = false;
        for (i, &p) in points.iter().enumerate() {
            let mut best = 0;
            let mut best_d = sq_dist(p, centers[0]);
            for (c, &center) in centers.iter().enumerate().skip(1) {
                let d = sq_dist(p, center);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![(0.0f64, 0.0f64); k];
        let mut counts = vec![0usize; k];
        for (i, &p) in points.iter().enumerate() {
            let c = assignment[i];
            sums[c].0 += p.0;
            sums[c].1 += p.1;
            counts[c] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = (sums[c].0 / counts[c] as f64, sums[c].1 / counts[c] as f64);
            }
            // An emptied cluster keeps its previous centroid.
        }
    }
    let inertia = points
        .iter()
        .enumerate()
        .map(|(i, &p)| sq_dist(p, centers[assignment[i]]))
        .sum();
    Fit {
        centers,
        assignment,
        inertia,
    }
}

/// Fit k clusters to planar points; the best of `n_init` seeded restarts.
pub fn kmeanspp_fit(
    points: &[(f64, f64)],
    k: usize,
    n_init: usize,
    random_state: u64,
) -> Result<(Vec<(f64, f64)>, Vec<usize>), DetectError> {
    if k == 0 || k > points.len() {
        return Err(DetectError::KExceedsPoints {
            k,
            available: points.len(),
        });
    }
    let mut rng = SplitMix64::new(random_state);
    let mut best: Option<Fit> = None;
    for _ in 0..n_init.max(1) {
        let fit = lloyd(points, seed_centers(points, k, &mut rng));
        if best.as_ref().map_or(true, |b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    let fit = best.expect("n_init >= 1 guarantees a fit");
    Ok((fit.centers, fit.assignment))
}

/// K-Means++ home detection over night points.
pub fn kmeanspp_detect(
    trajectory: &UserTrajectory,
    params: &DetectionParams,
) -> Result<HomeEstimate, DetectError> {
    let undetected = || HomeEstimate::undetected(trajectory.user_id.clone(), Algorithm::KmeansPp);
    let Some(view) = projected_view(trajectory, params) else {
        return Ok(undetected());
    };
    if view.night.is_empty() {
        return Ok(undetected());
    }
    let pts: Vec<(f64, f64)> = view.night.iter().map(|p| (p.x, p.y)).collect();
    let kp = &params.kmeans;
    let (centers, assignment) = kmeanspp_fit(&pts, kp.k, kp.n_init, kp.random_state)?;
    let mut counts = vec![0usize; centers.len()];
    for &c in &assignment {
        counts[c] += 1;
    }
    let mut winner = 0;
    for c in 1..centers.len() {
        let better = counts[c] > counts[winner]
            || (counts[c] == counts[winner]
                && (centers[c].1, centers[c].0) < (centers[winner].1, centers[winner].0));
        if better {
            winner = c;
        }
    }
    let (hx, hy) = centers[winner];
    Ok(estimate_at(
        trajectory,
        Algorithm::KmeansPp,
        &view.projection,
        hx,
        hy,
    ))
}
