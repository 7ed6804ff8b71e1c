//! Stay-point baseline.
//!
//! The full trajectory (all hours — this detector does its own temporal
//! reasoning) is compressed into stay points: maximal runs of consecutive
//! fixes that remain within `stay_dist_m` of the run's first fix for at least
//! `stay_time_min` minutes. Stay points are merged into regions by single
//! linkage, each region is scored by how much of its dwell falls inside the
//! night window, and the winner must look like a home: at least three hours
//! of cumulative night dwell, or a 24-hour total dwell for users whose
//! devices never report at night.

use chrono::Days;

use crate::geo::planar_distance_m;
use crate::model::{
    Algorithm, DetectionParams, HomeEstimate, ProjectedPoint, Timestamp, UserTrajectory,
};
use crate::temporal::HourWindow;

use super::{estimate_at, projected_view};

/// Cumulative night dwell that qualifies a region as a home candidate.
const NIGHT_DWELL_FLOOR_S: i64 = 3 * 3600;
/// Total dwell that qualifies a region even without night coverage.
const TOTAL_DWELL_FLOOR_S: i64 = 24 * 3600;

/// One contiguous dwell episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StayPoint {
    pub x: f64,
    pub y: f64,
    pub arrival: Timestamp,
    pub departure: Timestamp,
}

impl StayPoint {
    pub fn dwell_seconds(&self) -> i64 {
        self.departure.epoch_seconds() - self.arrival.epoch_seconds()
    }
}

/// Extract stay points from a time-sorted projected trajectory.
///
/// Anchored scan: starting at point `i`, the run grows while points stay
/// within `stay_dist_m` of point `i`. If the run spans at least
/// `stay_time_min` minutes it is emitted (centroid of the run, arrival and
/// departure stamps) and the scan resumes after it; otherwise the anchor
/// advances by one.
pub fn extract_stay_points(
    points: &[ProjectedPoint],
    stay_dist_m: f64,
    stay_time_min: f64,
) -> Vec<StayPoint> {
    let min_span_s = stay_time_min * 60.0;
    let mut stays = Vec::new();
    let n = points.len();
    let mut i = 0;
    while i < n {
        let anchor = &points[i];
        let mut j = i + 1;
        while j < n
            && planar_distance_m(points[j].x, points[j].y, anchor.x, anchor.y) <= stay_dist_m
        {
            j += 1;
        }
        let last = &points[j - 1];
        let span = (last.timestamp.epoch_seconds() - anchor.timestamp.epoch_seconds()) as f64;
        if span >= min_span_s {
            let run = &points[i..j];
            let inv_n = 1.0 / run.len() as f64;
            stays.push(StayPoint {
                x: run.iter().map(|p| p.x).sum::<f64>() * inv_n,
                y: run.iter().map(|p| p.y).sum::<f64>() * inv_n,
                arrival: anchor.timestamp,
                departure: last.timestamp,
            });
            i = j;
        } else {
            i += 1;
        }
    }
    stays
}

/// Seconds of `[arrival, departure]` that fall inside the window, measured on
/// the wall-clock axis so hour boundaries line up with what the user's watch
/// said.
fn window_overlap_s(stay: &StayPoint, window: HourWindow) -> i64 {
    let a = stay.arrival.wall_seconds();
    let d = stay.departure.wall_seconds();
    if window.is_full_day() {
        return d - a;
    }
    let mut total = 0;
    // Walk the window's daily occurrences from the eve of arrival through the
    // departure date; occurrences are disjoint, so plain summing is safe.
    let mut date = stay
        .arrival
        .date()
        .checked_sub_days(Days::new(1))
        .expect("date arithmetic in range");
    let end_date = stay.departure.date();
    while date <= end_date {
        let day_start = date.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp();
        let w_start = day_start + window.start_hour as i64 * 3600;
        let w_end = if window.wraps() {
            day_start + (24 + window.end_hour as i64) * 3600
        } else {
            day_start + window.end_hour as i64 * 3600
        };
        total += (d.min(w_end) - a.max(w_start)).max(0);
        date = date.succ_opt().expect("date arithmetic in range");
    }
    total
}

#[derive(Debug)]
struct Region {
    stay_indices: Vec<usize>,
    centroid: (f64, f64),
    night_dwell_s: i64,
    total_dwell_s: i64,
}

/// Single-linkage grouping: stay points whose centroids are within
/// `region_radius_m` of each other (directly or through a chain) share a
/// region.
fn build_regions(stays: &[StayPoint], region_radius_m: f64, night: HourWindow) -> Vec<Region> {
    let n = stays.len();
    let mut component = vec![usize::MAX; n];
    let mut next_id = 0;
    for i in 0..n {
        if component[i] != usize::MAX {
            continue;
        }
        let id = next_id;
        next_id += 1;
        let mut queue = vec![i];
        component[i] = id;
        while let Some(a) = queue.pop() {
            for b in 0..n {
                if component[b] == usize::MAX
                    && planar_distance_m(stays[a].x, stays[a].y, stays[b].x, stays[b].y)
                        <= region_radius_m
                {
                    component[b] = id;
                    queue.push(b);
                }
            }
        }
    }

    let mut regions: Vec<Region> = (0..next_id)
        .map(|_| Region {
            stay_indices: Vec::new(),
            centroid: (0.0, 0.0),
            night_dwell_s: 0,
            total_dwell_s: 0,
        })
        .collect();
    for (idx, stay) in stays.iter().enumerate() {
        let r = &mut regions[component[idx]];
        r.stay_indices.push(idx);
        r.night_dwell_s += window_overlap_s(stay, night);
        r.total_dwell_s += stay.dwell_seconds();
    }
    for r in &mut regions {
        let k = r.stay_indices.len() as f64;
        r.centroid = (
            r.stay_indices.iter().map(|&i| stays[i].x).sum::<f64>() / k,
            r.stay_indices.iter().map(|&i| stays[i].y).sum::<f64>() / k,
        );
    }
    regions
}

/// Stay-point home detection.
pub fn a2_detect(trajectory: &UserTrajectory, params: &DetectionParams) -> HomeEstimate {
    let undetected = || HomeEstimate::undetected(trajectory.user_id.clone(), Algorithm::A2);
    let Some(view) = projected_view(trajectory, params) else {
        return undetected();
    };
    let stays = extract_stay_points(&view.all, params.a2.stay_dist_m, params.a2.stay_time_min);
    if stays.is_empty() {
        return undetected();
    }
    let regions = build_regions(&stays, params.a2.region_radius_m, params.night);

    let mut best: Option<&Region> = None;
    for region in &regions {
        if region.night_dwell_s < NIGHT_DWELL_FLOOR_S && region.total_dwell_s < TOTAL_DWELL_FLOOR_S
        {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => {
                (region.night_dwell_s, region.total_dwell_s) > (b.night_dwell_s, b.total_dwell_s)
                    || ((region.night_dwell_s, region.total_dwell_s)
                        == (b.night_dwell_s, b.total_dwell_s)
                        && (region.centroid.1, region.centroid.0) < (b.centroid.1, b.centroid.0))
            }
        };
        if better {
            best = Some(region);
        }
    }
    match best {
        Some(region) => estimate_at(
            trajectory,
            Algorithm::A2,
            &view.projection,
            region.centroid.0,
            region.centroid.1,
        ),
        None => undetected(),
    }
}
