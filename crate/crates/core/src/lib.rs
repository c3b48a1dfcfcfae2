//! Linear building-pattern recognition over a spatial knowledge graph.
//!
//! The crate turns polygon footprints into a property graph of proximity,
//! similarity and alignment relations, then recognizes rows of buildings
//! either by executing declarative rule scripts on an embedded graph engine
//! or by direct predicate evaluation. A deliberately index-free traversal
//! implementation serves as correctness oracle and timing baseline.

pub mod evaluation;
pub mod geometry;
pub mod pipeline;
pub mod property_graph;
pub mod proximity;
pub mod relations;
pub mod rule_engine;

pub use evaluation::{
    bench_csv_row, benchmark, dataset_stats, generate_synthetic, precision_recall,
    precision_recall_sets, pr_from_counts, BenchReport, DatasetStats, EvalError, GenSpec,
    MatchCriterion, Method, PRReport, BENCH_CSV_HEADER,
};
pub use geometry::{OrientedRect, Point, Polygon, Polyline};
pub use pipeline::baseline::{baseline_recognize, BaselineGraph};
pub use pipeline::{
    build_kg, recognize_linear_patterns, recognize_on_graph, AlignRule, CompiledRules,
    LinearPattern, PipelineError, RecognizeMode, RecognizeOptions, Schema, TriplePattern,
};
pub use property_graph::{Graph, Value};
pub use proximity::{BuildingRecord, ProximityEdge};
pub use relations::Thresholds;
