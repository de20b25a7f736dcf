//! Call-graph indexing of Java projects and caller/callee recommendations
//! for the method under the cursor.
//!
//! The pipeline is [`ingest`] (scan, parse, resolve) → [`graph::ProjectIndex`]
//! → [`rank`] → [`engine::Engine`], with [`protocol::Session`] exposing an
//! engine session as newline-delimited JSON.

pub mod config;
pub mod dot;
pub mod engine;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod model;
pub mod protocol;
pub mod rank;
pub mod report;
pub mod span;

use std::path::Path;

pub use config::{EngineConfig, IngestConfig, Relevance};
pub use engine::{Engine, NavigationTarget, RecommendationSet, SessionState};
pub use error::{Error, Result};
pub use graph::{Diagnostics, ProjectIndex};
pub use model::{CallEdge, MethodDecl, MethodId, RawCallSite};
pub use rank::RankedRecommendation;
pub use span::Span;

/// Indexes the project rooted at `root`.
pub fn index_project(root: &Path, config: &IngestConfig) -> Result<ProjectIndex> {
    ProjectIndex::from_ingested(ingest::ingest_project(root, config)?)
}

/// Indexes in-memory `(path, content)` sources with the default ingest config.
pub fn index_sources<'a>(files: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<ProjectIndex> {
    let config = IngestConfig::default();
    let units = ingest::units_from(files);
    ProjectIndex::from_ingested(ingest::ingest_sources(units, Vec::new(), &config))
}
