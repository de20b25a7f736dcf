//! Configuration surfaces for indexing and recommendation.
//!
//! Ingest settings are read from a JSON file; engine settings select the
//! relevance signal and the per-side display caps.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Which files of a project are indexed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestConfig {
    /// File name suffixes to index, including the leading dot.
    pub extensions: Vec<String>,
    /// Glob patterns matched against project-relative paths.
    pub exclude: Vec<String>,
    /// Subdirectories of the project root to scan. Empty means the root itself.
    pub roots: Vec<String>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            extensions: vec![".java".to_string()],
            exclude: Vec::new(),
            roots: Vec::new(),
        }
    }
}

impl IngestConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Relevance signal used to order candidates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relevance {
    /// Project-wide reference count of the candidate.
    #[default]
    Global,
    /// Number of call sites on the specific edge between focus and candidate.
    EdgeLocal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase")]
pub struct EngineConfig {
    pub relevance: Relevance,
    /// Per-side cap while the graph is collapsed.
    pub collapsed_cap: usize,
    /// Per-side cap while the graph is expanded.
    pub expanded_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            relevance: Relevance::Global,
            collapsed_cap: 3,
            expanded_cap: 5,
        }
    }
}

impl EngineConfig {
    pub fn cap(&self, expanded: bool) -> usize {
        if expanded {
            self.expanded_cap
        } else {
            self.collapsed_cap
        }
    }
}

/// One interaction-design dimension and the choice this engine makes for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DesignChoice {
    pub dimension: &'static str,
    pub choice: &'static str,
    /// Name of the knob controlling it, if it is configurable.
    pub knob: Option<&'static str>,
}

/// The fixed and configurable design decisions, reported in the `hello` handshake.
pub fn design_dimensions() -> Vec<DesignChoice> {
    let d = |dimension, choice, knob| DesignChoice {
        dimension,
        choice,
        knob,
    };
    vec![
        d("container", "overlay anchored to the editor's right edge", None),
        d("layout", "graph: callers left, focus center, callees right", Some("listMode")),
        d("modality", "modeless", None),
        d("contextual information", "method name and class name", None),
        d("relationship information", "call edges between focus and each side", None),
        d("rationale", "none shown; relevance carried in payload only", None),
        d("quantity", "3 per side, 5 per side when expanded", Some("collapsedCap/expandedCap")),
        d("visual appearance", "uniform nodes", None),
        d("sorting and filtering", "reference frequency, ties by class, method, file", Some("relevance")),
        d("showing and hiding", "shown while the cursor is inside a method", None),
        d("updating", "continuous, user may pin", Some("pin")),
        d("selecting", "open the location in a new tab", None),
    ]
}
