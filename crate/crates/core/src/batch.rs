//! Batch orchestration: run one detector across many users in parallel.
//!
//! Detection is pure and independent per user, so the batch layer fans out
//! with rayon and gathers results back in user-id order. A per-user detector
//! error (for example k exceeding the user's point count) is demoted to a
//! warning plus an undetected estimate — one pathological user never aborts
//! the batch — while invalid parameters are rejected up front.

use rayon::prelude::*;

use crate::baselines::{a1_detect, a2_detect, dbscan_detect, frequency_detect, kmeanspp_detect};
use crate::ghost::detect_home;
use crate::model::{Algorithm, DetectionParams, HomeEstimate, ParamError, UserTrajectory};

/// One detector failure, tied to the user it affected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchWarning {
    pub user_id: String,
    pub message: String,
}

/// Results of a batch run: one estimate per user (user-id order) plus any
/// per-user warnings (same order).
#[derive(Debug, Clone)]
pub struct BatchOutcome {
    pub estimates: Vec<HomeEstimate>,
    pub warnings: Vec<BatchWarning>,
}

/// Run the chosen detector on one trajectory.
///
/// Only K-Means++ can fail; every other algorithm reports "nothing found"
/// through the estimate itself.
pub fn run_detector(
    trajectory: &UserTrajectory,
    algorithm: Algorithm,
    params: &DetectionParams,
) -> Result<HomeEstimate, crate::baselines::DetectError> {
    match algorithm {
        Algorithm::Ghost => Ok(detect_home(trajectory, params)),
        Algorithm::A1 => Ok(a1_detect(trajectory, params)),
        Algorithm::A2 => Ok(a2_detect(trajectory, params)),
        Algorithm::Dbscan => Ok(dbscan_detect(trajectory, params)),
        Algorithm::KmeansPp => kmeanspp_detect(trajectory, params),
        Algorithm::Frequency => Ok(frequency_detect(trajectory, params)),
    }
}

/// Run a detector across all users.
///
/// Trajectories are processed in user-id order regardless of input order or
/// thread count, so the output is deterministic byte for byte.
pub fn detect_batch(
    trajectories: &[UserTrajectory],
    algorithm: Algorithm,
    params: &DetectionParams,
) -> Result<BatchOutcome, ParamError> {
    params.validate()?;
    let mut ordered: Vec<&UserTrajectory> = trajectories.iter().collect();
    ordered.sort_by(|a, b| a.user_id.cmp(&b.user_id));
    let per_user: Vec<(HomeEstimate, Option<BatchWarning>)> = ordered
        .par_iter()
        .map(|t| match run_detector(t, algorithm, params) {
            Ok(estimate) => (estimate, None),
            Err(e) => (
                HomeEstimate::undetected(t.user_id.clone(), algorithm),
                Some(BatchWarning {
                    user_id: t.user_id.clone(),
                    message: e.to_string(),
                }),
            ),
        })
        .collect();
    let mut estimates = Vec::with_capacity(per_user.len());
    let mut warnings = Vec::new();
    for (estimate, warning) in per_user {
        estimates.push(estimate);
        warnings.extend(warning);
    }
    Ok(BatchOutcome {
        estimates,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GpsPoint, Timestamp};
    use crate::rng::SplitMix64;
    use crate::synth::{generate, SynthSpec};

    fn small_dataset() -> Vec<UserTrajectory> {
        let spec = SynthSpec {
            n_users: 6,
            days: 7,
            ..SynthSpec::default()
        };
        generate(&spec).0
    }

    #[test]
    fn every_algorithm_dispatches() {
        let trajectories = small_dataset();
        let params = DetectionParams::default();
        for algorithm in Algorithm::ALL {
            let outcome = detect_batch(&trajectories, algorithm, &params).unwrap();
            assert_eq!(outcome.estimates.len(), trajectories.len());
            assert!(outcome.estimates.iter().all(|e| e.algorithm == algorithm));
        }
    }

    #[test]
    fn output_order_ignores_input_order() {
        let mut trajectories = small_dataset();
        let params = DetectionParams::default();
        let a = detect_batch(&trajectories, Algorithm::Ghost, &params).unwrap();
        SplitMix64::new(3).shuffle(&mut trajectories);
        let b = detect_batch(&trajectories, Algorithm::Ghost, &params).unwrap();
        let ids: Vec<&str> = a.estimates.iter().map(|e| e.user_id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        assert_eq!(ids, sorted);
        assert_eq!(a.estimates.len(), b.estimates.len());
        for (ea, eb) in a.estimates.iter().zip(&b.estimates) {
            assert_eq!(ea.user_id, eb.user_id);
            assert_eq!(ea.home, eb.home);
        }
    }

    #[test]
    fn invalid_params_are_rejected_up_front() {
        let mut params = DetectionParams::default();
        params.grid_size_m = 0.0;
        assert!(detect_batch(&small_dataset(), Algorithm::Ghost, &params).is_err());
    }

    #[test]
    fn kmeans_failure_becomes_a_warning_not_an_abort() {
        // One user with a single night fix cannot support k = 2; the batch
        // still completes and the user comes back undetected.
        let lone = UserTrajectory::new(
            "lonely".into(),
            vec![GpsPoint {
                user_id: "lonely".into(),
                timestamp: Timestamp::parse("2025-06-02T23:00:00Z").unwrap(),
                lat: 29.65,
                lon: -82.32,
            }],
        );
        let mut trajectories = small_dataset();
        trajectories.push(lone);
        let mut params = DetectionParams::default();
        params.kmeans.k = 2;
        let outcome = detect_batch(&trajectories, Algorithm::KmeansPp, &params).unwrap();
        assert_eq!(outcome.warnings.len(), 1);
        assert_eq!(outcome.warnings[0].user_id, "lonely");
        let lonely = outcome
            .estimates
            .iter()
            .find(|e| e.user_id == "lonely")
            .unwrap();
        assert_eq!(lonely.home, None);
        assert_eq!(outcome.estimates.len(), trajectories.len());
    }
}
