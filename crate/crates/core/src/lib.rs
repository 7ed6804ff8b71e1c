//! Home-location detection from raw GPS trajectories.
//!
//! The crate is organised as a pipeline:
//!
//! 1. [`ingest`] reads CSV/GPX files (or directories of them) into per-user
//!    [`model::UserTrajectory`] values, tallying rejected records instead of
//!    aborting.
//! 2. [`geo`] maps WGS84 coordinates into a local metric plane so that all
//!    distance reasoning happens in meters.
//! 3. [`temporal`] selects the points that plausibly belong to time spent at
//!    home (night hours, with a weekend-daytime fallback).
//! 4. [`ghost`] runs the grid detector: square cells, per-cell dwell
//!    statistics, lexicographic winner selection, and sub-cell refinement.
//! 5. [`baselines`] hosts five reference detectors (mean shift, stay points,
//!    DBSCAN, K-Means++, coordinate frequency) behind the same interface.
//! 6. [`validate`] scores estimates against ground truth, [`sweep`] explores
//!    parameter grids on a train split and re-scores frozen profiles, and
//!    [`synth`] plants homes with known coordinates for self-verification.
//!
//! Everything is deterministic: all randomness flows through the seeded
//! [`rng::SplitMix64`] generator, parallel batch runs preserve input order,
//! and repeated runs produce byte-identical artifacts.

pub mod baselines;
pub mod batch;
pub mod geo;
pub mod ghost;
pub mod ingest;
pub mod model;
pub mod rng;
pub mod sweep;
pub mod synth;
pub mod temporal;
pub mod validate;
