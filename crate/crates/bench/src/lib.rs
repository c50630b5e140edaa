//! Shared fixtures for the pipeline benchmarks.

use actspace_core::{three_anchor_model, AnalysisParams, PointSet};

/// The benchmark workload: a seeded draw from the built-in model.
pub fn fixture_points(n: usize, seed: u64) -> PointSet {
    three_anchor_model().sample(n, seed).expect("n >= 1")
}

/// The parameters the simulation study runs at.
pub fn fixture_params() -> AnalysisParams {
    AnalysisParams::new(0.5).with_cell_size(0.05)
}
