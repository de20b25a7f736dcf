//! Candidate-set sizes and the reference-count spectrum across a project.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use crate::graph::ProjectIndex;
use crate::model::MethodId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodDegree {
    pub id: MethodId,
    pub callers: usize,
    pub callees: usize,
    /// `callers + callees`: how many recommendations this method could show.
    pub candidates: usize,
    pub ref_count: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Percentiles {
    pub p50: usize,
    pub p75: usize,
    pub p90: usize,
    pub p99: usize,
    pub max: usize,
}

impl Percentiles {
    /// Nearest-rank percentiles; all zero for an empty sample.
    pub fn of(values: &[usize]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        let at = |p: f64| -> usize {
            if sorted.is_empty() {
                return 0;
            }
            let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
            sorted[rank.clamp(1, sorted.len()) - 1]
        };
        Self {
            p50: at(50.0),
            p75: at(75.0),
            p90: at(90.0),
            p99: at(99.0),
            max: sorted.last().copied().unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeReport {
    pub methods: Vec<MethodDegree>,
    /// candidate-set size -> number of methods
    pub candidate_histogram: BTreeMap<usize, usize>,
    /// reference count -> number of methods
    pub ref_count_histogram: BTreeMap<usize, usize>,
    pub candidate_percentiles: Percentiles,
    pub ref_count_percentiles: Percentiles,
    /// Mean share of a candidate list's total reference count held by its
    /// top three entries, over methods with at least one referenced candidate.
    pub mean_top3_share: f64,
    /// Methods whose candidate set exceeds the collapsed cap of 3 per side.
    pub methods_over_cap: usize,
}

pub fn degree_report(index: &ProjectIndex) -> DegreeReport {
    let mut report = DegreeReport::default();
    let mut shares = Vec::new();
    for decl in index.decls() {
        let id = decl.id.as_str();
        let callers = index.callers(id).expect("decl is indexed");
        let callees = index.callees(id).expect("decl is indexed");
        let degree = MethodDegree {
            id: decl.id.clone(),
            callers: callers.len(),
            callees: callees.len(),
            candidates: callers.len() + callees.len(),
            ref_count: index.ref_count(id),
        };
        if callers.len() > 3 || callees.len() > 3 {
            report.methods_over_cap += 1;
        }
        let mut rel: Vec<usize> = callers
            .iter()
            .chain(callees.iter())
            .map(|c| index.ref_count(c.as_str()))
            .collect();
        let total: usize = rel.iter().sum();
        if total > 0 {
            rel.sort_unstable_by(|a, b| b.cmp(a));
            let top: usize = rel.iter().take(3).sum();
            shares.push(top as f64 / total as f64);
        }
        *report.candidate_histogram.entry(degree.candidates).or_insert(0) += 1;
        *report.ref_count_histogram.entry(degree.ref_count).or_insert(0) += 1;
        report.methods.push(degree);
    }
    let sizes: Vec<usize> = report.methods.iter().map(|m| m.candidates).collect();
    let refs: Vec<usize> = report.methods.iter().map(|m| m.ref_count).collect();
    report.candidate_percentiles = Percentiles::of(&sizes);
    report.ref_count_percentiles = Percentiles::of(&refs);
    if !shares.is_empty() {
        report.mean_top3_share = shares.iter().sum::<f64>() / shares.len() as f64;
    }
    report
}

impl DegreeReport {
    pub fn is_empty(&self) -> bool {
        self.methods.is_empty()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let p = |p: &Percentiles| format!("p50={} p75={} p90={} p99={} max={}", p.p50, p.p75, p.p90, p.p99, p.max);
        let _ = writeln!(out, "methods: {}", self.methods.len());
        let _ = writeln!(out, "candidate set size: {}", p(&self.candidate_percentiles));
        let _ = writeln!(out, "reference count: {}", p(&self.ref_count_percentiles));
        let _ = writeln!(out, "methods over 3 per side: {}", self.methods_over_cap);
        let _ = writeln!(out, "mean top-3 share of candidate relevance: {:.3}", self.mean_top3_share);
        let _ = writeln!(out, "candidate histogram (size: methods):");
        for (size, n) in &self.candidate_histogram {
            let _ = writeln!(out, "  {size:>5}: {n}");
        }
        let _ = writeln!(out, "reference count histogram (refs: methods):");
        for (refs, n) in &self.ref_count_histogram {
            let _ = writeln!(out, "  {refs:>5}: {n}");
        }
        out
    }
}
