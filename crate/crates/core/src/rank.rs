//! Relevance ordering of candidate methods.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::graph::ProjectIndex;
use crate::model::{MethodDecl, MethodId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RankedRecommendation {
    pub id: MethodId,
    pub method_name: String,
    pub class_name: String,
    pub file: String,
    pub span_start: usize,
    pub relevance: usize,
    /// 1-based.
    pub rank: usize,
}

impl RankedRecommendation {
    fn from_decl(decl: &MethodDecl, relevance: usize) -> Self {
        Self {
            id: decl.id.clone(),
            method_name: decl.method_name.clone(),
            class_name: decl.class_name.clone(),
            file: decl.file.clone(),
            span_start: decl.span.start,
            relevance,
            rank: 0,
        }
    }
}

/// Higher relevance first, then class name, method name, file and id.
pub fn ranking_order(a: &RankedRecommendation, b: &RankedRecommendation) -> Ordering {
    b.relevance
        .cmp(&a.relevance)
        .then_with(|| a.class_name.cmp(&b.class_name))
        .then_with(|| a.method_name.cmp(&b.method_name))
        .then_with(|| a.file.cmp(&b.file))
        .then_with(|| a.id.cmp(&b.id))
}

/// Assigns consecutive ranks from 1 in the list's current order.
pub fn renumber(list: &mut [RankedRecommendation]) {
    for (i, r) in list.iter_mut().enumerate() {
        r.rank = i + 1;
    }
}

/// Ranks candidates by a caller-supplied relevance.
///
/// Ids not present in the index are skipped.
pub fn rank_by<'a, I, F>(index: &ProjectIndex, candidates: I, relevance: F) -> Vec<RankedRecommendation>
where
    I: IntoIterator<Item = &'a MethodId>,
    F: Fn(&MethodId) -> usize,
{
    let mut out: Vec<RankedRecommendation> = candidates
        .into_iter()
        .filter_map(|id| index.decl(id.as_str()))
        .map(|d| RankedRecommendation::from_decl(d, relevance(&d.id)))
        .collect();
    out.sort_by(ranking_order);
    out.dedup_by(|a, b| a.id == b.id);
    renumber(&mut out);
    out
}

/// Ranks candidates by project-wide reference count.
pub fn rank_candidates<'a, I>(index: &ProjectIndex, candidates: I) -> Vec<RankedRecommendation>
where
    I: IntoIterator<Item = &'a MethodId>,
{
    rank_by(index, candidates, |id| index.ref_count(id.as_str()))
}

pub fn top_k(mut ranked: Vec<RankedRecommendation>, k: usize) -> Vec<RankedRecommendation> {
    debug_assert!(k >= 1, "cap must be positive");
    ranked.truncate(k);
    ranked
}
