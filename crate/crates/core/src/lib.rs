//! Commit-size-aware process metrics and hyper co-change vector centralities
//! for file-level defect prediction.
//!
//! The pipeline reads a JSONL commit log into a [`commitlog::CommitStore`],
//! computes per-release features for every changed source file, and joins them
//! with an external product-metric corpus into CSV feature matrices.

pub mod cochange;
pub mod commitlog;
pub mod error;
pub mod featureset;
pub mod hypergraph;
pub mod metric;
pub mod process;
pub mod vector;
pub mod worked_example;

pub use error::{Error, Result};
pub use metric::MetricId;
