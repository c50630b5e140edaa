//! Measuring activity spaces from planar point data.
//!
//! The pipeline estimates a quartic-kernel density over a raster grid,
//! converts it to a density ranking (the fraction of observed points whose
//! estimated density falls at or below the density at a location), and
//! summarizes the ranking's superlevel sets with three curves: mass-volume,
//! Betti number, and persistence. A mixture model of anchors, roads, and
//! walk areas provides seeded sampling with exact measures and rankings for
//! benchmarking the estimators.

pub mod error;
pub mod grid;
pub mod ingest;
pub mod kde;
pub mod mixture;
pub mod pipeline;
pub mod ranking;
pub mod topology;

pub use error::{Error, Result};
pub use grid::{make_grid, BoundingBox, CellIndex, CellSet, Point, RasterGrid, ScalarField};
pub use ingest::{
    clip_bbox, parse_gps_csv, project, GpsFix, ParseWarning, ProjectionReference, Trajectory,
};
pub use kde::{
    evaluate_kde, kde_at_samples, kde_field, quartic_kernel, Bandwidth, KernelDensity, PointSet,
    SpatialBuckets,
};
pub use mixture::{
    three_anchor_model, Atom, MixtureModel, RectRegion, Seed, Segment, SupportTarget,
};
pub use pipeline::{
    analyze_points, grid_for_points, rank_pipeline, run_error_benchmark, run_single_rep,
    ActivityAnalysis, AnalysisParams, BenchConfig, BenchResult, ErrorStats, RepErrors,
};
pub use ranking::{
    build_ranking_index, level_set, rank_field, rankings_to_csv, RankField, RankingIndex,
};
pub use topology::{
    betti_curve, connected_components, default_levels, mass_volume_curve, pairs_to_csv,
    parse_curve_csv, parse_pairs_csv, persistence_curve, persistence_pairs, ComponentLabels,
    Connectivity, CurveKind, PersistencePair, SummaryCurve,
};
