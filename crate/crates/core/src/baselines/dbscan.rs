//! DBSCAN baseline.
//!
//! Classic density clustering over the night points: a point with at least
//! `min_pts` neighbors within `eps_m` (the point itself counts) is a core
//! point; clusters grow from core points through their neighborhoods; the
//! largest cluster's centroid is reported as home.
//!
//! Neighbor queries go through a uniform grid of `eps`-sized buckets, so a
//! query touches only the 3×3 surrounding buckets instead of every point.
//! Expansion order is fixed (points in index order, FIFO frontier), which
//! pins down the labels of border points reachable from two clusters.

use std::collections::{HashMap, VecDeque};

use crate::model::{Algorithm, DetectionParams, HomeEstimate, UserTrajectory};

use super::{estimate_at, projected_view};

struct BucketGrid {
    eps: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl BucketGrid {
    fn build(points: &[(f64, f64)], eps: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, &(x, y)) in points.iter().enumerate() {
            buckets
                .entry(((x / eps).floor() as i64, (y / eps).floor() as i64))
                .or_default()
                .push(i);
        }
        BucketGrid { eps, buckets }
    }

    /// Indices (ascending) of all points within `eps` of `points[i]`,
    /// including `i` itself.
    fn neighbors(&self, points: &[(f64, f64)], i: usize) -> Vec<usize> {
        let (x, y) = points[i];
        let (bx, by) = ((x / self.eps).floor() as i64, (y / self.eps).floor() as i64);
        let eps_sq = self.eps * self.eps;
        let mut out = Vec::new();
        for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(bucket) = self.buckets.get(&(bx + dx, by + dy)) {
                    for &j in bucket {
                        let (qx, qy) = points[j];
                        if (qx - x).powi(2) + (qy - y).powi(2) <= eps_sq {
                            out.push(j);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Cluster labels for each point: `Some(cluster)` or `None` for noise.
/// Cluster ids are assigned in order of discovery, scanning points by index.
pub fn dbscan_labels(points: &[(f64, f64)], eps_m: f64, min_pts: usize) -> Vec<Option<usize>> {
    let n = points.len();
    let mut labels: Vec<Option<usize>> = vec![None; n];
    if n == 0 {
        return labels;
    }
    let grid = BucketGrid::build(points, eps_m);
    let mut visited = vec![false; n];
    let mut next_cluster = 0;

    for i in 0..n {
        if visited[i] {
            continue;
        }
        visited[i] = true;
        let neighborhood = grid.neighbors(points, i);
        if neighborhood.len() < min_pts {
            continue; // noise unless a later cluster claims it
        }
        let cluster = next_cluster;
        next_cluster += 1;
        labels[i] = Some(cluster);
        let mut frontier: VecDeque<usize> = neighborhood.into();
        while let Some(j) = frontier.pop_front() {
            if labels[j].is_none() {
                labels[j] = Some(cluster);
            }
            if visited[j] {
                continue;
            }
            visited[j] = true;
            let reach = grid.neighbors(points, j);
            if reach.len() >= min_pts {
                frontier.extend(reach);
            }
        }
    }
    labels
}

/// DBSCAN home detection over night points.
pub fn dbscan_detect(trajectory: &UserTrajectory, params: &DetectionParams) -> HomeEstimate {
    let undetected = || HomeEstimate::undetected(trajectory.user_id.clone(), Algorithm::Dbscan);
    let Some(view) = projected_view(trajectory, params) else {
        return undetected();
    };
    if view.night.is_empty() {
        return undetected();
    }
    let pts: Vec<(f64, f64)> = view.night.iter().map(|p| (p.x, p.y)).collect();
    let labels = dbscan_labels(&pts, params.dbscan.eps_m, params.dbscan.min_pts);
    let n_clusters = labels.iter().flatten().max().map_or(0, |&m| m + 1);
    if n_clusters == 0 {
        return undetected();
    }
    let mut count = vec![0usize; n_clusters];
    let mut sum = vec![(0.0f64, 0.0f64); n_clusters];
    for (i, label) in labels.iter().enumerate() {
        if let Some(c) = label {
            count[*c] += 1;
            sum[*c].0 += pts[i].0;
            sum[*c].1 += pts[i].1;
        }
    }
    let centroid = |c: usize| (sum[c].0 / count[c] as f64, sum[c].1 / count[c] as f64);
    let mut winner = 0;
    for c in 1..n_clusters {
        let better = count[c] > count[winner] || {
            count[c] == count[winner] && {
                let (wx, wy) = centroid(winner);
                let (cx, cy) = centroid(c);
                (cy, cx) < (wy, wx)
            }
        };
        if better {
            winner = c;
        }
    }
    let (hx, hy) = centroid(winner);
    estimate_at(trajectory, Algorithm::Dbscan, &view.projection, hx, hy)
}
