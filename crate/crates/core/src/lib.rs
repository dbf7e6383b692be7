//! Eco-routing engine for diesel trucks on elevation-annotated road networks.
//!
//! The crate computes fuel- and CO₂-minimal paths and per-arc speed policies
//! using a modal emission model whose load/speed term is clamped at zero so
//! that downhill arcs can never yield negative fuel. It ships with:
//!
//! * [`physics`] — truck parameter sets, derived coefficients, the standard
//!   and improved emission models, and terminal velocity on downhill slopes;
//! * [`speed`] — static and slope-dependent (dynamic) optimal speed policies
//!   and the payload threshold beyond which downhill speeds saturate;
//! * [`network`] — the road-network data model, JSON ingestion with grade
//!   derivation and clipping, and a deterministic synthetic-city generator;
//! * [`routing`] — shortest, fastest, greenest, and asymptotic-greenest path
//!   solvers sharing one deterministic tie-break rule;
//! * [`analysis`] — comparison ratios, origin–destination features, factorial
//!   sweeps, and CSV report emission.

pub mod analysis;
pub mod network;
pub mod physics;
pub mod routing;
pub mod speed;

pub use analysis::{
    compare_cell, default_ratio_pairs, emission_reduction_ratio, od_features,
    path_distinction_ratio, report_to_csv, resolve_policy, run_sweep, summarize, summary_to_csv,
    time_increase_ratio, traffic_ratio_pairs, AnalysisError, CellError, ComparisonRatios,
    ComparisonReport, OdFeatures, PathKind, PolicySpec, PolicyTriple, RatioPair, ReportMetadata,
    ReportRow, SummaryRow,
};
pub use network::{
    augmented_ascent, generate_synthetic_city, load_network, save_network, validate_network, Arc,
    ArcRecord, GridSpec, NetworkError, NetworkFile, Node, NodeRecord, RoadNetwork, Violation,
    DEFAULT_ROLLING_RESISTANCE, DEFAULT_V_MAX, DEFAULT_V_MIN, GRADE_CLIP_PCT,
};
pub use physics::{
    arc_emissions, derive_coefficients, fuel_improved, fuel_standard, terminal_velocity, ArcCost,
    Coefficients, PhysicsError, TruckClass, VehicleParams,
};
pub use routing::{
    asymptotic_greenest_path, fastest_path, greenest_path, path_metrics, shortest_path, Path,
    PathMetrics, PerArcMetrics, PolicyContext, Query, RoutingError,
};
pub use speed::{
    asymptotic_load_threshold, dynamic_speed, static_speed, SpeedDecision, SpeedError,
    SpeedPolicyKind, SpeedRegime,
};
