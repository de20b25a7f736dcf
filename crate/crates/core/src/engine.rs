//! The mixed-initiative recommendation state machine.
//!
//! Recommendations follow the text cursor: the method containing the cursor
//! becomes the focus and its top callers and callees are published. Pinning
//! freezes the published set against cursor movement; expanding raises the
//! per-side cap for the same focus.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::{EngineConfig, Relevance};
use crate::error::{Error, Result};
use crate::graph::ProjectIndex;
use crate::model::MethodId;
use crate::rank::{rank_by, top_k, RankedRecommendation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FocusMethod {
    pub id: MethodId,
    pub method_name: String,
    pub class_name: String,
    pub file: String,
    pub span_start: usize,
    pub relevance: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RecommendationSet {
    pub focus: FocusMethod,
    pub callers: Vec<RankedRecommendation>,
    pub callees: Vec<RankedRecommendation>,
    pub expanded: bool,
}

impl RecommendationSet {
    pub fn contains(&self, id: &str) -> bool {
        self.focus.id.as_str() == id
            || self.callers.iter().any(|r| r.id.as_str() == id)
            || self.callees.iter().any(|r| r.id.as_str() == id)
    }

    /// Side nodes shown, the focus excluded.
    pub fn displayed(&self) -> usize {
        self.callers.len() + self.callees.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cursor {
    pub file: String,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NavigationTarget {
    pub file: String,
    pub span_start: usize,
    pub id: MethodId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionState {
    pub index_version: String,
    pub pinned: bool,
    pub expanded: bool,
    pub current: Option<RecommendationSet>,
    pub focus_source: Option<Cursor>,
}

/// Shared, read-only recommendation backend. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Engine {
    index: Arc<ProjectIndex>,
    config: EngineConfig,
}

impl Engine {
    pub fn new(index: Arc<ProjectIndex>, config: EngineConfig) -> Self {
        Self { index, config }
    }

    pub fn index(&self) -> &ProjectIndex {
        &self.index
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn new_session(&self) -> SessionState {
        SessionState {
            index_version: self.index.version().to_string(),
            pinned: false,
            expanded: false,
            current: None,
            focus_source: None,
        }
    }

    pub fn focus_from_cursor(&self, file: &str, offset: usize) -> Result<Option<MethodId>> {
        Ok(self.index.focus_from_cursor(file, offset)?.cloned())
    }

    /// Capped, ranked callers and callees of `focus`.
    pub fn recommend(&self, focus: &str, expanded: bool) -> Result<RecommendationSet> {
        let index = &*self.index;
        let decl = index
            .decl(focus)
            .ok_or_else(|| Error::UnknownMethod(focus.to_string()))?;
        let cap = self.config.cap(expanded);
        let (callers, callees) = match self.config.relevance {
            Relevance::Global => {
                let global = |id: &MethodId| index.ref_count(id.as_str());
                (
                    rank_by(index, index.callers(focus)?, global),
                    rank_by(index, index.callees(focus)?, global),
                )
            }
            Relevance::EdgeLocal => (
                rank_by(index, index.callers(focus)?, |c| index.site_count(c, &decl.id)),
                rank_by(index, index.callees(focus)?, |c| index.site_count(&decl.id, c)),
            ),
        };
        Ok(RecommendationSet {
            focus: FocusMethod {
                id: decl.id.clone(),
                method_name: decl.method_name.clone(),
                class_name: decl.class_name.clone(),
                file: decl.file.clone(),
                span_start: decl.span.start,
                relevance: index.ref_count(focus),
            },
            callers: top_k(callers, cap),
            callees: top_k(callees, cap),
            expanded,
        })
    }

    fn replace(state: &mut SessionState, next: Option<RecommendationSet>) -> bool {
        if state.current == next {
            return false;
        }
        state.current = next;
        true
    }

    fn refocus(&self, state: &mut SessionState, file: &str, offset: usize) -> Result<bool> {
        let next = match self.focus_from_cursor(file, offset)? {
            Some(focus) => Some(self.recommend(focus.as_str(), state.expanded)?),
            None => None,
        };
        Ok(Self::replace(state, next))
    }

    /// Returns whether the published set changed.
    pub fn on_cursor_moved(&self, state: &mut SessionState, file: &str, offset: usize) -> Result<bool> {
        if !self.index.has_file(file) {
            return Err(Error::UnknownFile(file.to_string()));
        }
        state.focus_source = Some(Cursor {
            file: file.to_string(),
            offset,
        });
        if state.pinned {
            return Ok(false);
        }
        self.refocus(state, file, offset)
    }

    /// Returns whether the published set changed. Unpinning recomputes from
    /// the latest cursor position.
    pub fn set_pinned(&self, state: &mut SessionState, pinned: bool) -> Result<bool> {
        let was = state.pinned;
        state.pinned = pinned;
        if was && !pinned {
            if let Some(Cursor { file, offset }) = state.focus_source.clone() {
                return self.refocus(state, &file, offset);
            }
        }
        Ok(false)
    }

    /// Returns whether the published set changed. The lists are re-derived
    /// for the current focus, pinned or not.
    pub fn set_expanded(&self, state: &mut SessionState, expanded: bool) -> Result<bool> {
        state.expanded = expanded;
        let next = match &state.current {
            Some(set) => Some(self.recommend(set.focus.id.as_str(), expanded)?),
            None => None,
        };
        Ok(Self::replace(state, next))
    }

    pub fn on_select(&self, state: &SessionState, id: &str) -> Result<NavigationTarget> {
        match &state.current {
            Some(set) if set.contains(id) => {
                let decl = self
                    .index
                    .decl(id)
                    .ok_or_else(|| Error::UnknownMethod(id.to_string()))?;
                Ok(NavigationTarget {
                    file: decl.file.clone(),
                    span_start: decl.span.start,
                    id: decl.id.clone(),
                })
            }
            _ => Err(Error::NotRecommended(id.to_string())),
        }
    }
}
