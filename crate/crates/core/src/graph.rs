//! The immutable project call graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::{AmbiguousCall, Ingested, SourceUnit, Warning};
use crate::model::{CallEdge, MethodDecl, MethodId};
use crate::span::Span;

/// Counts and problems recorded while indexing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Diagnostics {
    pub files: usize,
    pub methods: usize,
    pub edges: usize,
    pub raw_sites: usize,
    pub resolved_sites: usize,
    pub external_sites: usize,
    pub ambiguous_sites: usize,
    pub warnings: Vec<Warning>,
    pub ambiguous: Vec<AmbiguousCall>,
}

#[derive(Debug, Clone, Default)]
struct FileEntry {
    content: Option<String>,
    /// Every declaration body in the file, sorted by start.
    regions: Vec<(Span, MethodId)>,
}

#[derive(Debug, Clone, Default)]
pub struct ProjectIndex {
    version: String,
    decls: BTreeMap<MethodId, MethodDecl>,
    edges: Vec<CallEdge>,
    edge_sites: HashMap<(MethodId, MethodId), usize>,
    callers_of: BTreeMap<MethodId, BTreeSet<MethodId>>,
    callees_of: BTreeMap<MethodId, BTreeSet<MethodId>>,
    ref_count: BTreeMap<MethodId, usize>,
    files: BTreeMap<String, FileEntry>,
    diagnostics: Diagnostics,
}

fn content_hash(decls: &[&MethodDecl], edges: &[CallEdge]) -> String {
    let mut h = Sha256::new();
    for d in decls {
        h.update(serde_json::to_vec(d).expect("decl serializes"));
        h.update(b"\n");
    }
    h.update(b"--\n");
    for e in edges {
        h.update(serde_json::to_vec(e).expect("edge serializes"));
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

impl ProjectIndex {
    pub fn build(decls: Vec<MethodDecl>, mut edges: Vec<CallEdge>) -> Result<Self> {
        let decls: BTreeMap<MethodId, MethodDecl> =
            decls.into_iter().map(|d| (d.id.clone(), d)).collect();
        edges.sort_by(|a, b| (&a.caller, &a.callee).cmp(&(&b.caller, &b.callee)));

        let mut callers_of: BTreeMap<MethodId, BTreeSet<MethodId>> = BTreeMap::new();
        let mut callees_of: BTreeMap<MethodId, BTreeSet<MethodId>> = BTreeMap::new();
        let mut ref_count: BTreeMap<MethodId, usize> = BTreeMap::new();
        for id in decls.keys() {
            callers_of.insert(id.clone(), BTreeSet::new());
            callees_of.insert(id.clone(), BTreeSet::new());
            ref_count.insert(id.clone(), 0);
        }
        let mut edge_sites = HashMap::new();
        for e in &edges {
            if !decls.contains_key(&e.caller) || !decls.contains_key(&e.callee) {
                return Err(Error::DanglingEdge {
                    caller: e.caller.to_string(),
                    callee: e.callee.to_string(),
                });
            }
            callers_of.get_mut(&e.callee).unwrap().insert(e.caller.clone());
            callees_of.get_mut(&e.caller).unwrap().insert(e.callee.clone());
            *ref_count.get_mut(&e.callee).unwrap() += e.site_count;
            *edge_sites.entry((e.caller.clone(), e.callee.clone())).or_insert(0) += e.site_count;
        }

        let mut files: BTreeMap<String, FileEntry> = BTreeMap::new();
        for d in decls.values() {
            let entry = files.entry(d.file.clone()).or_default();
            for span in d.spans() {
                entry.regions.push((*span, d.id.clone()));
            }
        }
        for f in files.values_mut() {
            f.regions.sort();
        }

        let sorted: Vec<&MethodDecl> = decls.values().collect();
        let version = content_hash(&sorted, &edges);
        let diagnostics = Diagnostics {
            methods: decls.len(),
            edges: edges.len(),
            resolved_sites: edges.iter().map(|e| e.site_count).sum(),
            ..Diagnostics::default()
        };
        Ok(Self {
            version,
            decls,
            edges,
            edge_sites,
            callers_of,
            callees_of,
            ref_count,
            files,
            diagnostics,
        })
    }

    /// Builds the index for an ingested project, keeping its sources.
    pub fn from_ingested(ingested: Ingested) -> Result<Self> {
        let Ingested {
            units,
            decls,
            resolution,
            warnings,
            raw_sites,
        } = ingested;
        let index = Self::build(decls, resolution.edges.clone())?.with_sources(units);
        let diagnostics = Diagnostics {
            files: index.files.len(),
            raw_sites,
            external_sites: resolution.external_sites,
            ambiguous_sites: resolution.ambiguous_sites(),
            warnings,
            ambiguous: resolution.ambiguous,
            ..index.diagnostics.clone()
        };
        Ok(Self {
            diagnostics,
            ..index
        })
    }

    /// Attaches file contents so they can be served and cursor lookups on
    /// files without methods succeed.
    pub fn with_sources(mut self, units: impl IntoIterator<Item = SourceUnit>) -> Self {
        for unit in units {
            self.files.entry(unit.path).or_default().content = Some(unit.content);
        }
        self.diagnostics.files = self.files.len();
        self
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    pub fn decls(&self) -> impl Iterator<Item = &MethodDecl> {
        self.decls.values()
    }

    pub fn decl(&self, id: &str) -> Option<&MethodDecl> {
        self.decls.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.decls.contains_key(id)
    }

    pub fn edges(&self) -> &[CallEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn callers(&self, id: &str) -> Result<&BTreeSet<MethodId>> {
        self.callers_of
            .get(id)
            .ok_or_else(|| Error::UnknownMethod(id.to_string()))
    }

    pub fn callees(&self, id: &str) -> Result<&BTreeSet<MethodId>> {
        self.callees_of
            .get(id)
            .ok_or_else(|| Error::UnknownMethod(id.to_string()))
    }

    /// Number of resolved call sites targeting `id`; zero for unknown ids.
    pub fn ref_count(&self, id: &str) -> usize {
        self.ref_count.get(id).copied().unwrap_or(0)
    }

    pub fn ref_counts(&self) -> &BTreeMap<MethodId, usize> {
        &self.ref_count
    }

    /// Call sites on the edge `caller -> callee`.
    pub fn site_count(&self, caller: &MethodId, callee: &MethodId) -> usize {
        self.edge_sites
            .get(&(caller.clone(), callee.clone()))
            .copied()
            .unwrap_or(0)
    }

    pub fn files(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    pub fn has_file(&self, file: &str) -> bool {
        self.files.contains_key(file)
    }

    pub fn file_content(&self, file: &str) -> Result<Option<&str>> {
        self.files
            .get(file)
            .map(|f| f.content.as_deref())
            .ok_or_else(|| Error::UnknownFile(file.to_string()))
    }

    /// The innermost method whose span contains `offset` (start inclusive,
    /// end exclusive).
    pub fn focus_from_cursor(&self, file: &str, offset: usize) -> Result<Option<&MethodId>> {
        let entry = self
            .files
            .get(file)
            .ok_or_else(|| Error::UnknownFile(file.to_string()))?;
        Ok(entry
            .regions
            .iter()
            .filter(|(span, _)| span.contains(offset))
            .min_by_key(|(span, _)| (span.len(), std::cmp::Reverse(span.start)))
            .map(|(_, id)| id))
    }

    /// Ids ordered by how closely they resemble `query`, for "did you mean" hints.
    pub fn near_misses(&self, query: &str, limit: usize) -> Vec<&MethodId> {
        let q = query.to_lowercase();
        let tail = q.rsplit('.').next().unwrap_or(&q).split('/').next().unwrap_or("");
        let class = q.rsplit_once('.').map(|(c, _)| c).unwrap_or("");
        let mut hits: Vec<(usize, &MethodId)> = self
            .decls
            .values()
            .filter_map(|d| {
                let id = d.id.as_str().to_lowercase();
                let method = d.method_name.to_lowercase();
                let score = if id.starts_with(&q) {
                    0
                } else if method == tail {
                    1
                } else if id.contains(&q) || (!tail.is_empty() && method.contains(tail)) {
                    2
                } else if !class.is_empty() && d.class_name.to_lowercase() == class {
                    3
                } else {
                    return None;
                };
                Some((score, &d.id))
            })
            .collect();
        hits.sort();
        hits.into_iter().take(limit).map(|(_, id)| id).collect()
    }

    /// Resolves a user-written method name: an exact id, or `Class.method`
    /// when exactly one arity/disambiguation exists.
    pub fn lookup(&self, query: &str) -> Result<&MethodId> {
        if let Some((id, _)) = self.decls.get_key_value(query) {
            return Ok(id);
        }
        let mut matches = self.decls.keys().filter(|id| id.qualified_name() == query);
        match (matches.next(), matches.next()) {
            (Some(id), None) => Ok(id),
            _ => Err(Error::UnknownMethod(query.to_string())),
        }
    }
}

/// On-disk form of an index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexFile {
    pub version: String,
    pub decls: Vec<MethodDecl>,
    pub edges: Vec<CallEdge>,
    #[serde(default)]
    pub files: Vec<FileRecord>,
    #[serde(default)]
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub content: String,
}

impl ProjectIndex {
    pub fn to_file(&self) -> IndexFile {
        IndexFile {
            version: self.version.clone(),
            decls: self.decls.values().cloned().collect(),
            edges: self.edges.clone(),
            files: self
                .files
                .iter()
                .filter_map(|(path, f)| {
                    f.content.as_ref().map(|c| FileRecord {
                        path: path.clone(),
                        content: c.clone(),
                    })
                })
                .collect(),
            diagnostics: self.diagnostics.clone(),
        }
    }

    pub fn from_file(file: IndexFile) -> Result<Self> {
        let IndexFile {
            version,
            decls,
            edges,
            files,
            diagnostics,
        } = file;
        let index = Self::build(decls, edges)?;
        if index.version != version {
            return Err(Error::BadIndex(format!(
                "version {version} does not match content hash {}",
                index.version
            )));
        }
        let mut index = index.with_sources(files.into_iter().map(|f| SourceUnit {
            path: f.path,
            content: f.content,
            class_names: Vec::new(),
        }));
        index.diagnostics = diagnostics;
        Ok(index)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("index serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: IndexFile =
            serde_json::from_str(text).map_err(|e| Error::BadIndex(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::BadIndex(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decl(id: &str, file: &str, start: usize, end: usize) -> MethodDecl {
        let (class, rest) = id.split_once('.').unwrap();
        let (method, arity) = rest.split_once('/').unwrap();
        MethodDecl {
            id: id.into(),
            class_name: class.into(),
            method_name: method.into(),
            arity: arity.parse().unwrap(),
            varargs: false,
            file: file.into(),
            span: Span::new(start, end),
            overloads: vec![],
        }
    }

    fn edge(a: &str, b: &str, sites: &[usize]) -> CallEdge {
        CallEdge {
            caller: a.into(),
            callee: b.into(),
            site_count: sites.len(),
            sites: sites.to_vec(),
        }
    }

    #[test]
    fn empty_index() {
        let idx = ProjectIndex::build(vec![], vec![]).unwrap();
        assert!(idx.is_empty());
        assert!(idx.ref_counts().is_empty());
        assert!(idx.edges().is_empty());
        assert_eq!(idx.files().count(), 0);
    }

    #[test]
    fn single_method_has_zero_refs() {
        let idx = ProjectIndex::build(vec![decl("A.f/0", "A.java", 0, 5)], vec![]).unwrap();
        assert_eq!(idx.ref_count("A.f/0"), 0);
        assert!(idx.callers("A.f/0").unwrap().is_empty());
    }

    #[test]
    fn dangling_edge_is_fatal() {
        let err = ProjectIndex::build(vec![decl("A.f/0", "A.java", 0, 5)], vec![edge("A.f/0", "B.g/0", &[1])]);
        assert!(matches!(err, Err(Error::DanglingEdge { .. })));
    }

    #[test]
    fn unknown_ids_and_files() {
        let idx = ProjectIndex::build(vec![decl("A.f/0", "A.java", 0, 5)], vec![]).unwrap();
        assert!(matches!(idx.callers("Nope.x/0"), Err(Error::UnknownMethod(_))));
        assert!(matches!(idx.callees("Nope.x/0"), Err(Error::UnknownMethod(_))));
        assert!(matches!(idx.focus_from_cursor("Z.java", 0), Err(Error::UnknownFile(_))));
    }

    #[test]
    fn cursor_boundaries_and_nesting() {
        let idx = ProjectIndex::build(
            vec![decl("A.outer/0", "A.java", 10, 100), decl("A.inner/0", "A.java", 40, 60)],
            vec![],
        )
        .unwrap();
        let at = |o| idx.focus_from_cursor("A.java", o).unwrap().map(|m| m.to_string());
        assert_eq!(at(9), None);
        assert_eq!(at(10).as_deref(), Some("A.outer/0"));
        assert_eq!(at(40).as_deref(), Some("A.inner/0"));
        assert_eq!(at(59).as_deref(), Some("A.inner/0"));
        assert_eq!(at(60).as_deref(), Some("A.outer/0"));
        assert_eq!(at(100), None);
    }

    #[test]
    fn lookup_by_qualified_name() {
        let idx = ProjectIndex::build(
            vec![
                decl("A.f/0", "A.java", 0, 5),
                decl("A.g/0", "A.java", 6, 9),
                decl("A.g/1", "A.java", 10, 15),
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(idx.lookup("A.f").unwrap().as_str(), "A.f/0");
        assert_eq!(idx.lookup("A.g/1").unwrap().as_str(), "A.g/1");
        assert!(idx.lookup("A.g").is_err());
        let near: Vec<_> = idx.near_misses("A.g", 5).into_iter().map(|m| m.as_str()).collect();
        assert_eq!(near, vec!["A.g/0", "A.g/1", "A.f/0"]);
    }

    #[test]
    fn version_mismatch_is_rejected() {
        let idx = ProjectIndex::build(vec![decl("A.f/0", "A.java", 0, 5)], vec![]).unwrap();
        let mut file = idx.to_file();
        file.version = "0000".into();
        assert!(matches!(ProjectIndex::from_file(file), Err(Error::BadIndex(_))));
        assert!(matches!(ProjectIndex::from_json("{not json"), Err(Error::BadIndex(_))));
    }

    #[test]
    fn json_roundtrip_preserves_bytes() {
        let idx = ProjectIndex::build(
            vec![decl("A.f/0", "A.java", 0, 5), decl("B.g/0", "B.java", 0, 5)],
            vec![edge("A.f/0", "B.g/0", &[2, 3])],
        )
        .unwrap()
        .with_sources([SourceUnit {
            path: "A.java".into(),
            content: "x".into(),
            class_names: vec![],
        }]);
        let again = ProjectIndex::from_json(&idx.to_json()).unwrap();
        assert_eq!(again.to_json(), idx.to_json());
        assert_eq!(again.file_content("A.java").unwrap(), Some("x"));
        assert_eq!(again.file_content("B.java").unwrap(), None);
    }
}
