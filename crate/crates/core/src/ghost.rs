//! The grid detector: square cells, dwell statistics, lexicographic winner
//! selection, and sub-cell refinement.
//!
//! The pipeline for one user:
//!
//! 1. Project all points into the local metric plane (origin at the mean
//!    coordinate of the *whole* trajectory, so both temporal passes share one
//!    frame).
//! 2. Keep night-window points; if there are none, fall back to
//!    weekend-daytime points; if those are empty too, report nothing.
//! 3. Snap each point to the nearest multiple of the grid size on both axes.
//!    A cell with center `c` therefore covers `[c - g/2, c + g/2)` per axis.
//! 4. Score each cell by `(stay_time, unique_nights, total_points)`, compared
//!    lexicographically: a cell the user returns to across many hours beats a
//!    cell that merely collects many fixes in one sitting. Residual ties go
//!    to the smallest `(cell_y, cell_x)`.
//! 5. Refine inside the winning cell: split it into square bins of side
//!    `max(3 m, g/10)`, take the centroid of the densest bin (ties: smallest
//!    row, then column). Cells with fewer than three points just use their
//!    mean; a non-finite centroid falls back to the cell center.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::geo::LocalProjection;
use crate::model::{
    Algorithm, CellStats, DetectionParams, GridKey, HomeEstimate, InferenceSource, ProjectedPoint,
    RefinementMethod, UserTrajectory,
};
use crate::temporal::{weekend_indices, window_indices};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid size must be positive and finite, got {0}")]
    NonPositiveGridSize(f64),
    #[error("cannot refine a cell with no points")]
    EmptyCell,
}

/// Map every point to its grid cell. Values are indices into `points`, in
/// input order; the `BTreeMap` iterates cells in `(iy, ix)` order.
pub fn assign_cells(
    points: &[ProjectedPoint],
    grid_size_m: f64,
) -> Result<BTreeMap<GridKey, Vec<usize>>, GridError> {
    if !(grid_size_m.is_finite() && grid_size_m > 0.0) {
        return Err(GridError::NonPositiveGridSize(grid_size_m));
    }
    let mut cells: BTreeMap<GridKey, Vec<usize>> = BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        cells
            .entry(GridKey::for_xy(p.x, p.y, grid_size_m))
            .or_default()
            .push(i);
    }
    Ok(cells)
}

/// Dwell statistics per cell.
///
/// `stay_time_s` is the whole-second span between a cell's earliest and
/// latest fix (0 for a single fix) — a cheap proxy for recurring presence
/// that rewards returning to the same place night after night.
/// `unique_nights` counts distinct local calendar dates.
pub fn cell_stats(
    cells: &BTreeMap<GridKey, Vec<usize>>,
    points: &[ProjectedPoint],
    grid_size_m: f64,
) -> BTreeMap<GridKey, CellStats> {
    cells
        .iter()
        .map(|(&key, indices)| {
            let mut min_t = i64::MAX;
            let mut max_t = i64::MIN;
            let mut dates = BTreeSet::new();
            for &i in indices {
                let t = points[i].timestamp.epoch_seconds();
                min_t = min_t.min(t);
                max_t = max_t.max(t);
                dates.insert(points[i].timestamp.date());
            }
            let stats = CellStats {
                cell_x: key.cell_x(grid_size_m),
                cell_y: key.cell_y(grid_size_m),
                stay_time_s: if indices.is_empty() { 0 } else { max_t - min_t },
                unique_nights: dates.len(),
                total_points: indices.len(),
            };
            (key, stats)
        })
        .collect()
}

/// Pick the winning cell: lexicographic max of
/// `(stay_time_s, unique_nights, total_points)`, ties to the smallest
/// `(cell_y, cell_x)`. Returns `None` only for an empty map.
pub fn select_home_cell(stats: &BTreeMap<GridKey, CellStats>) -> Option<GridKey> {
    let mut best: Option<(GridKey, (i64, usize, usize))> = None;
    for (&key, s) in stats {
        let score = (s.stay_time_s, s.unique_nights, s.total_points);
        // Strict comparison + ascending key order = smallest key wins ties.
        if best.map_or(true, |(_, b)| score > b) {
            best = Some((key, score));
        }
    }
    best.map(|(key, _)| key)
}

/// Side length of refinement bins: a tenth of the cell, but never below 3 m
/// so bins stay above GPS noise.
pub fn bin_side_m(grid_size_m: f64) -> f64 {
    (grid_size_m / 10.0).max(3.0)
}

/// Where refinement landed and how.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub x: f64,
    pub y: f64,
    pub method: RefinementMethod,
}

fn centroid(indices: &[usize], points: &[ProjectedPoint]) -> (f64, f64) {
    let n = indices.len() as f64;
    let sx: f64 = indices.iter().map(|&i| points[i].x).sum();
    let sy: f64 = indices.iter().map(|&i| points[i].y).sum();
    (sx / n, sy / n)
}

/// Refine the home coordinate inside one cell.
pub fn refine_in_cell(
    cell: GridKey,
    indices: &[usize],
    points: &[ProjectedPoint],
    grid_size_m: f64,
) -> Result<Refinement, GridError> {
    if indices.is_empty() {
        return Err(GridError::EmptyCell);
    }
    let center_x = cell.cell_x(grid_size_m);
    let center_y = cell.cell_y(grid_size_m);

    let (x, y, method) = if indices.len() < 3 {
        let (x, y) = centroid(indices, points);
        (x, y, RefinementMethod::MeanCellPoints)
    } else {
        let side = bin_side_m(grid_size_m);
        let bins_per_axis = (grid_size_m / side).ceil().max(1.0) as i64;
        let lo_x = center_x - grid_size_m / 2.0;
        let lo_y = center_y - grid_size_m / 2.0;
        let clamp = |b: i64| b.clamp(0, bins_per_axis - 1) as usize;
        // Keyed (row, col) so ties resolve to the smallest row, then column.
        let mut bins: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for &i in indices {
            let col = clamp(((points[i].x - lo_x) / side).floor() as i64);
            let row = clamp(((points[i].y - lo_y) / side).floor() as i64);
            bins.entry((row, col)).or_default().push(i);
        }
        let mut densest: Option<(&Vec<usize>, usize)> = None;
        for members in bins.values() {
            if densest.map_or(true, |(_, n)| members.len() > n) {
                densest = Some((members, members.len()));
            }
        }
        let (members, _) = densest.expect("at least one bin exists");
        let (x, y) = centroid(members, points);
        (x, y, RefinementMethod::DensestBinCentroid)
    };

    if x.is_finite() && y.is_finite() {
        Ok(Refinement { x, y, method })
    } else {
        Ok(Refinement {
            x: center_x,
            y: center_y,
            method: RefinementMethod::GridCentroid,
        })
    }
}

/// Run the full grid pipeline for one user.
///
/// Never fails: degenerate inputs (no points, nothing in either temporal
/// window, invalid grid size) yield an estimate with `source == None`.
/// Callers that want parameter errors surfaced should validate
/// [`DetectionParams`] up front.
pub fn detect_home(trajectory: &UserTrajectory, params: &DetectionParams) -> HomeEstimate {
    let undetected = || HomeEstimate::undetected(trajectory.user_id.clone(), Algorithm::Ghost);

    let Ok(projection) = LocalProjection::from_points(&trajectory.points) else {
        return undetected();
    };

    let night = window_indices(trajectory, params.night);
    let (indices, source) = if !night.is_empty() {
        (night, InferenceSource::Night)
    } else {
        let weekend = weekend_indices(trajectory, params);
        if weekend.is_empty() {
            return undetected();
        }
        (weekend, InferenceSource::Weekend)
    };

    let projected: Vec<ProjectedPoint> = indices
        .iter()
        .map(|&i| projection.project(&trajectory.points[i], i))
        .collect();

    let Ok(cells) = assign_cells(&projected, params.grid_size_m) else {
        return undetected();
    };
    let stats = cell_stats(&cells, &projected, params.grid_size_m);
    let Some(winner) = select_home_cell(&stats) else {
        return undetected();
    };
    let Ok(refined) = refine_in_cell(winner, &cells[&winner], &projected, params.grid_size_m)
    else {
        return undetected();
    };

    HomeEstimate {
        user_id: trajectory.user_id.clone(),
        home: Some(projection.inverse(refined.x, refined.y)),
        source,
        refinement: refined.method,
        cell: Some(stats[&winner]),
        algorithm: Algorithm::Ghost,
    }
}
