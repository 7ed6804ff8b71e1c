//! Mean-shift baseline (flat kernel).
//!
//! Every night point seeds a mode search: the seed repeatedly moves to the
//! mean of all points within `bandwidth_m` of its current position until the
//! step shrinks below a millimeter (or 300 iterations pass). Converged seeds
//! closer together than the bandwidth are merged, points are assigned to
//! their nearest surviving mode, and the mode with the largest membership is
//! reported as home.

use crate::model::{Algorithm, DetectionParams, HomeEstimate, UserTrajectory};

use super::{estimate_at, projected_view};

const MAX_ITERS: usize = 300;
const CONVERGENCE_M: f64 = 1e-3;

fn sq_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy
}

/// Run flat-kernel mean shift. Returns the surviving modes and, for each
/// input point, the index of the mode it belongs to.
pub fn mean_shift_modes(points: &[(f64, f64)], bandwidth_m: f64) -> (Vec<(f64, f64)>, Vec<usize>) {
    if points.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let bw_sq = bandwidth_m * bandwidth_m;

    // Climb from every point; remember where each seed lands and how many
    // points sat in its final window (its basin weight for merging).
    let mut candidates: Vec<((f64, f64), usize)> = Vec::with_capacity(points.len());
    for &seed in points {
        let mut pos = seed;
        let mut window = 1;
        for _ in 0..MAX_ITERS {
            let mut sx = 0.0;
            let mut sy = 0.0;
            let mut n = 0usize;
            for &q in points {
                if sq_dist(pos, q) <= bw_sq {
                    sx += q.0;
                    sy += q.1;
                    n += 1;
                }
            }
            if n == 0 {
                break;
            }
            let next = (sx / n as f64, sy / n as f64);
            window = n;
            let moved = sq_dist(pos, next).sqrt();
            pos = next;
            if moved < CONVERGENCE_M {
                break;
            }
        }
        candidates.push((pos, window));
    }

    // Merge candidates closer than the bandwidth, strongest basin first so
    // the surviving coordinate is the best-supported one.
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, na) = candidates[a];
        let (pb, nb) = candidates[b];
        nb.cmp(&na)
            .then_with(|| pa.1.total_cmp(&pb.1))
            .then_with(|| pa.0.total_cmp(&pb.0))
    });
    let mut modes: Vec<(f64, f64)> = Vec::new();
    for &i in &order {
        let (pos, _) = candidates[i];
        if !modes.iter().any(|&m| sq_dist(m, pos) < bw_sq) {
            modes.push(pos);
        }
    }

    // Every point joins its nearest mode (ties: the earlier mode, which by
    // construction has the larger basin).
    let labels: Vec<usize> = points
        .iter()
        .map(|&p| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (m, &mode) in modes.iter().enumerate() {
                let d = sq_dist(p, mode);
                if d < best_d {
                    best_d = d;
                    best = m;
                }
            }
            best
        })
        .collect();

    (modes, labels)
}

/// Mean-shift home detection over night points.
pub fn a1_detect(trajectory: &UserTrajectory, params: &DetectionParams) -> HomeEstimate {
    let undetected = || HomeEstimate::undetected(trajectory.user_id.clone(), Algorithm::A1);
    let Some(view) = projected_view(trajectory, params) else {
        return undetected();
    };
    if view.night.is_empty() {
        return undetected();
    }
    let pts: Vec<(f64, f64)> = view.night.iter().map(|p| (p.x, p.y)).collect();
    let (modes, labels) = mean_shift_modes(&pts, params.a1.bandwidth_m);
    if modes.is_empty() {
        return undetected();
    }
    let mut counts = vec![0usize; modes.len()];
    for &l in &labels {
        counts[l] += 1;
    }
    // Largest cluster; ties go to the mode with the smaller (y, x).
    let mut winner = 0;
    for m in 1..modes.len() {
        let better = counts[m] > counts[winner]
            || (counts[m] == counts[winner]
                && (modes[m].1, modes[m].0) < (modes[winner].1, modes[winner].0));
        if better {
            winner = m;
        }
    }
    estimate_at(
        trajectory,
        Algorithm::A1,
        &view.projection,
        modes[winner].0,
        modes[winner].1,
    )
}
