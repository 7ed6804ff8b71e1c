//! Reference detectors that share the grid detector's interface.
//!
//! Each baseline consumes the night-window slice of a trajectory (projected
//! into the same local plane the grid detector uses) and produces a
//! [`HomeEstimate`]. None of them implements the weekend fallback — that
//! heuristic belongs to the grid pipeline alone, so comparisons against the
//! baselines measure exactly the published algorithms.

use thiserror::Error;

use crate::geo::LocalProjection;
use crate::model::{
    Algorithm, DetectionParams, GeoCoord, HomeEstimate, InferenceSource, ProjectedPoint,
    RefinementMethod, UserTrajectory,
};
use crate::temporal::window_indices;

pub mod dbscan;
pub mod frequency;
pub mod kmeans;
pub mod mean_shift;
pub mod stay_point;

pub use dbscan::dbscan_detect;
pub use frequency::frequency_detect;
pub use kmeans::kmeanspp_detect;
pub use mean_shift::a1_detect;
pub use stay_point::a2_detect;

/// A detector-level failure (as opposed to "nothing found", which is a valid
/// estimate with `source == none`).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetectError {
    #[error("k = {k} exceeds the {available} points available after filtering")]
    KExceedsPoints { k: usize, available: usize },
}

/// A trajectory projected into its local plane, with the night-window subset
/// picked out. `None` when the trajectory is empty.
pub(crate) struct ProjectedView {
    pub projection: LocalProjection,
    /// Night-window points (all points if the window covers the full day).
    pub night: Vec<ProjectedPoint>,
    /// The complete projected trajectory, for detectors that scan all hours.
    pub all: Vec<ProjectedPoint>,
}

pub(crate) fn projected_view(
    trajectory: &UserTrajectory,
    params: &DetectionParams,
) -> Option<ProjectedView> {
    let projection = LocalProjection::from_points(&trajectory.points).ok()?;
    let all: Vec<ProjectedPoint> = trajectory
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| projection.project(p, i))
        .collect();
    let night = window_indices(trajectory, params.night)
        .into_iter()
        .map(|i| all[i])
        .collect();
    Some(ProjectedView {
        projection,
        night,
        all,
    })
}

/// Wrap a planar location into a night-sourced estimate.
pub(crate) fn estimate_at(
    trajectory: &UserTrajectory,
    algorithm: Algorithm,
    projection: &LocalProjection,
    x: f64,
    y: f64,
) -> HomeEstimate {
    HomeEstimate {
        user_id: trajectory.user_id.clone(),
        home: Some(projection.inverse(x, y)),
        source: InferenceSource::Night,
        refinement: RefinementMethod::NotApplicable,
        cell: None,
        algorithm,
    }
}

/// Wrap a raw coordinate (no projection involved) into an estimate.
pub(crate) fn estimate_at_coord(
    trajectory: &UserTrajectory,
    algorithm: Algorithm,
    coord: GeoCoord,
) -> HomeEstimate {
    HomeEstimate {
        user_id: trajectory.user_id.clone(),
        home: Some(coord),
        source: InferenceSource::Night,
        refinement: RefinementMethod::NotApplicable,
        cell: None,
        algorithm,
    }
}
