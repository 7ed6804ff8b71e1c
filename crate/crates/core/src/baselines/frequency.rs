//! Most-frequent-location baseline.
//!
//! Night fixes are keyed by their coordinates rounded to the sixth decimal
//! place (about 0.1 m of latitude), and the key seen most often wins. Ties
//! go to the key observed earliest in trajectory order, and the reported
//! home is the rounded coordinate itself — no averaging, no projection.

use std::collections::HashMap;

use crate::model::{Algorithm, DetectionParams, GeoCoord, HomeEstimate, UserTrajectory};
use crate::temporal::filter_night;

use super::estimate_at_coord;

const KEY_SCALE: f64 = 1e6;

fn micro_key(lat: f64, lon: f64) -> (i64, i64) {
    (
        (lat * KEY_SCALE).round() as i64,
        (lon * KEY_SCALE).round() as i64,
    )
}

/// Most-frequent night location.
pub fn frequency_detect(trajectory: &UserTrajectory, params: &DetectionParams) -> HomeEstimate {
    let night = filter_night(trajectory, params.night);
    let mut counts: HashMap<(i64, i64), (usize, usize)> = HashMap::new();
    for (order, p) in night.iter().enumerate() {
        let entry = counts.entry(micro_key(p.lat, p.lon)).or_insert((0, order));
        entry.0 += 1;
    }
    let winner = counts.iter().max_by(|a, b| {
        (a.1 .0, std::cmp::Reverse(a.1 .1)).cmp(&(b.1 .0, std::cmp::Reverse(b.1 .1)))
    });
    let Some((&(klat, klon), _)) = winner else {
        return HomeEstimate::undetected(trajectory.user_id.clone(), Algorithm::Frequency);
    };
    let coord = GeoCoord {
        lat: klat as f64 / KEY_SCALE,
        lon: klon as f64 / KEY_SCALE,
    };
    estimate_at_coord(trajectory, Algorithm::Frequency, coord)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GpsPoint, RefinementMethod, Timestamp};

    fn fix(day: u8, hour: u8, minute: u8, lat: f64, lon: f64) -> GpsPoint {
        GpsPoint {
            user_id: "u1".into(),
            timestamp: Timestamp::parse(&format!("2025-06-{day:02}T{hour:02}:{minute:02}:00Z"))
                .unwrap(),
            lat,
            lon,
        }
    }

    #[test]
    fn repeated_coordinate_dominates() {
        let mut points = vec![fix(2, 12, 0, 29.70, -82.40)]; // daytime, ignored
        for day in 2..8 {
            points.push(fix(day, 23, 0, 29.6516, -82.3248));
        }
        points.push(fix(2, 23, 30, 29.6600, -82.3300));
        let est = frequency_detect(
            &UserTrajectory::new("u1".into(), points),
            &DetectionParams::default(),
        );
        assert_eq!(
            est.home,
            Some(GeoCoord {
                lat: 29.6516,
                lon: -82.3248
            })
        );
        assert_eq!(est.refinement, RefinementMethod::NotApplicable);
    }

    #[test]
    fn sixth_decimal_separates_keys() {
        // 29.651600 vs 29.651601 are distinct keys; the former appears twice.
        let points = vec![
            fix(2, 23, 0, 29.651601, -82.3248),
            fix(3, 23, 0, 29.651600, -82.3248),
            fix(4, 23, 0, 29.651600, -82.3248),
        ];
        let est = frequency_detect(
            &UserTrajectory::new("u1".into(), points),
            &DetectionParams::default(),
        );
        assert_eq!(est.home.unwrap().lat, 29.6516);
    }

    #[test]
    fn tie_goes_to_the_earliest_key() {
        let points = vec![
            fix(2, 23, 0, 29.66, -82.33),
            fix(3, 23, 0, 29.65, -82.32),
            fix(4, 23, 0, 29.66, -82.33),
            fix(5, 23, 0, 29.65, -82.32),
        ];
        let est = frequency_detect(
            &UserTrajectory::new("u1".into(), points),
            &DetectionParams::default(),
        );
        assert_eq!(
            est.home,
            Some(GeoCoord {
                lat: 29.66,
                lon: -82.33
            })
        );
    }

    #[test]
    fn no_night_points_yields_none() {
        let points = vec![fix(2, 12, 0, 29.65, -82.32), fix(3, 14, 0, 29.65, -82.32)];
        let est = frequency_detect(
            &UserTrajectory::new("u1".into(), points),
            &DetectionParams::default(),
        );
        assert_eq!(est.home, None);
    }

    #[test]
    fn rounding_halves_away_from_zero_in_the_key() {
        // -82.3247995 rounds to -82.324800 at the sixth decimal.
        let points = vec![fix(2, 23, 0, 29.65, -82.3247995); 3];
        let est = frequency_detect(
            &UserTrajectory::new("u1".into(), points),
            &DetectionParams::default(),
        );
        assert_eq!(est.home.unwrap().lon, -82.3248);
    }
}
