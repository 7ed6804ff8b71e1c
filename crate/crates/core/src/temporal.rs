//! Hour-of-day windows and the night/weekend trajectory filters.
//!
//! Home detection keys on when people are usually at home: night hours first,
//! weekend daytime as a fallback for users with no nocturnal coverage (night
//! shift workers, devices powered off overnight). Membership is decided by
//! wall-clock hour alone — minutes never shift a point across a boundary.

use crate::model::{DetectionParams, GpsPoint, UserTrajectory};

/// A half-open range of wall-clock hours `[start, end)`.
///
/// When `start > end` the window wraps midnight: 22→6 covers hours
/// 22, 23, 0, 1, 2, 3, 4, 5. `start == end` denotes the full 24-hour window
/// (never the empty one), giving configs an explicit way to disable temporal
/// filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HourWindow {
    pub start_hour: u8,
    pub end_hour: u8,
}

impl HourWindow {
    pub fn new(start_hour: u8, end_hour: u8) -> Self {
        HourWindow {
            start_hour,
            end_hour,
        }
    }

    /// Does the window cross midnight?
    pub fn wraps(&self) -> bool {
        self.start_hour > self.end_hour
    }

    /// Is the full 24-hour day covered?
    pub fn is_full_day(&self) -> bool {
        self.start_hour == self.end_hour
    }

    pub fn contains(&self, hour: u8) -> bool {
        if self.is_full_day() {
            true
        } else if self.wraps() {
            hour >= self.start_hour || hour < self.end_hour
        } else {
            hour >= self.start_hour && hour < self.end_hour
        }
    }

    /// The window covering exactly the hours this one does not.
    ///
    /// Swapping the bounds complements a proper window; the full-day window
    /// has no expressible complement in this representation and is returned
    /// unchanged (both orientations of equal bounds mean "all hours").
    pub fn complement(&self) -> HourWindow {
        HourWindow {
            start_hour: self.end_hour,
            end_hour: self.start_hour,
        }
    }
}

/// Indices of the trajectory's points whose hour falls in `window`.
pub fn window_indices(trajectory: &UserTrajectory, window: HourWindow) -> Vec<usize> {
    trajectory
        .points
        .iter()
        .enumerate()
        .filter(|(_, p)| window.contains(p.timestamp.hour()))
        .map(|(i, _)| i)
        .collect()
}

/// Indices of weekend-daytime points: weekday in `params.weekend_days` *and*
/// hour inside `params.weekend_daytime`.
pub fn weekend_indices(trajectory: &UserTrajectory, params: &DetectionParams) -> Vec<usize> {
    trajectory
        .points
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            params.weekend_days.contains(&p.timestamp.weekday_index())
                && params.weekend_daytime.contains(p.timestamp.hour())
        })
        .map(|(i, _)| i)
        .collect()
}

/// Order-preserving subset of points inside the night window.
pub fn filter_night<'a>(trajectory: &'a UserTrajectory, window: HourWindow) -> Vec<&'a GpsPoint> {
    window_indices(trajectory, window)
        .into_iter()
        .map(|i| &trajectory.points[i])
        .collect()
}

/// Order-preserving subset of weekend-daytime points.
pub fn filter_weekend<'a>(
    trajectory: &'a UserTrajectory,
    params: &DetectionParams,
) -> Vec<&'a GpsPoint> {
    weekend_indices(trajectory, params)
        .into_iter()
        .map(|i| &trajectory.points[i])
        .collect()
}
