//! Genetic-programming search for zero-cost NAS proxies.
//!
//! Expressions are trees over per-architecture metric columns; fitness is
//! the normalized Kendall tau against ground-truth accuracy summed over a
//! set of benchmark problems.

pub mod cli;
pub mod dataset;
pub mod expr;
pub mod fitness;
pub mod gp;
pub mod matrix;
pub mod nas_search;
pub mod synthetic;
pub mod zoo;

pub use dataset::{load_manifest, split_train_test, BenchmarkDataset, DatasetView, ViewLabel};
pub use expr::{evaluate, parse, print_canonical, ExpressionTree, Node, OperatorKind};
pub use fitness::{kendall_tau, normalized_score, Score, ScoreBounds, TauVector};
pub use gp::{evolve, GpConfig, SearchResult};
pub use matrix::FeatureMatrix;
pub use nas_search::{aging_evolution, exhaustive_argmax, AgingParams, ArchEncoding, ToySearchSpace};
pub use zoo::{builtin_proxy, resolve_proxy, NamedProxy};
