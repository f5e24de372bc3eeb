//! Instance space analysis for the Maximum Clique Problem.
//!
//! The crate covers the whole pipeline: graph ingestion ([`graph`]), the
//! 35-feature description of an instance ([`features`]), a built-in solver
//! portfolio with ILP export and an external-solver adapter ([`solvers`]),
//! benchmarking under the time/quality composite measure ([`bench`]), the
//! 2-D instance space with feature selection, projection and footprints
//! ([`isa`]), per-instance algorithm selection ([`selector`]) and the
//! file-driven orchestration used by the command-line tool ([`pipeline`]).

pub mod bench;
pub mod features;
pub mod graph;
pub mod isa;
pub mod par;
pub mod pipeline;
pub mod selector;
pub mod solvers;
pub mod stats;

pub use graph::Graph;
pub use par::Parallelism;
