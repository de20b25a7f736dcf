use std::collections::BTreeMap;
use std::path::PathBuf;

use wandercode_core::dot::{count_dot, neighborhood_dot};
use wandercode_core::ingest::{parse_unit, scan_project};
use wandercode_core::report::degree_report;
use wandercode_core::{index_project, IngestConfig, ProjectIndex};

fn demo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/demo")
}

fn demo() -> ProjectIndex {
    index_project(&demo_root(), &IngestConfig::default()).unwrap()
}

fn set(ids: &[&str]) -> Vec<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

fn strings<'a>(it: impl IntoIterator<Item = &'a wandercode_core::MethodId>) -> Vec<String> {
    it.into_iter().map(|m| m.to_string()).collect()
}

#[test]
fn fixture_text_is_exact() {
    let read = |f: &str| std::fs::read_to_string(demo_root().join(f)).unwrap();
    assert_eq!(read("A.java"), "class A { void m1() { b.m2(); b.m2(); c.m3(); } void m4() { m1(); } }\n");
    assert_eq!(read("B.java"), "class B { void m2() { c.m3(); } }\n");
    assert_eq!(read("C.java"), "class C { void m3() { } }\n");
}

#[test]
fn parse_a_java() {
    let scan = scan_project(&demo_root(), &IngestConfig::default()).unwrap();
    assert_eq!(scan.units.len(), 3);
    let a = parse_unit(&scan.units[0]);
    let ids: Vec<_> = a.decls.iter().map(|d| d.id.as_str()).collect();
    assert_eq!(ids, vec!["A.m1/0", "A.m4/0"]);
    let sites: Vec<_> = a
        .sites
        .iter()
        .map(|s| (s.caller.as_str(), s.callee_name.as_str()))
        .collect();
    assert_eq!(
        sites,
        vec![("A.m1/0", "m2"), ("A.m1/0", "m2"), ("A.m1/0", "m3"), ("A.m4/0", "m1")]
    );
}

#[test]
fn edges_and_ref_counts() {
    let idx = demo();
    let edges: Vec<_> = idx
        .edges()
        .iter()
        .map(|e| (e.caller.as_str(), e.callee.as_str(), e.site_count))
        .collect();
    assert_eq!(
        edges,
        vec![
            ("A.m1/0", "B.m2/0", 2),
            ("A.m1/0", "C.m3/0", 1),
            ("A.m4/0", "A.m1/0", 1),
            ("B.m2/0", "C.m3/0", 1),
        ]
    );
    let refs: BTreeMap<_, _> = idx.ref_counts().iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let expected: BTreeMap<String, usize> = [("A.m1/0", 1), ("A.m4/0", 0), ("B.m2/0", 2), ("C.m3/0", 2)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    assert_eq!(refs, expected);
    let d = idx.diagnostics();
    assert_eq!((d.files, d.methods, d.edges, d.resolved_sites), (3, 4, 4, 5));
    assert_eq!((d.external_sites, d.ambiguous_sites), (0, 0));
}

#[test]
fn callers_and_callees() {
    let idx = demo();
    assert_eq!(strings(idx.callers("C.m3/0").unwrap()), set(&["A.m1/0", "B.m2/0"]));
    assert!(idx.callers("A.m4/0").unwrap().is_empty());
    assert_eq!(strings(idx.callees("A.m1/0").unwrap()), set(&["B.m2/0", "C.m3/0"]));
    assert!(idx.callees("C.m3/0").unwrap().is_empty());
    assert_eq!(strings(idx.callees("A.m4/0").unwrap()), set(&["A.m1/0"]));
}

#[test]
fn spans_match_fixture_text() {
    let idx = demo();
    let span = |id: &str| idx.decl(id).unwrap().span;
    assert_eq!((span("A.m1/0").start, span("A.m1/0").end), (10, 47));
    assert_eq!((span("A.m4/0").start, span("A.m4/0").end), (48, 67));
    assert_eq!((span("B.m2/0").start, span("B.m2/0").end), (10, 31));
    assert_eq!((span("C.m3/0").start, span("C.m3/0").end), (10, 23));
}

#[test]
fn degree_sizes() {
    let report = degree_report(&demo());
    let sizes: Vec<_> = report.methods.iter().map(|m| (m.id.as_str(), m.candidates)).collect();
    assert_eq!(sizes, vec![("A.m1/0", 3), ("A.m4/0", 1), ("B.m2/0", 2), ("C.m3/0", 2)]);
    assert_eq!(report.candidate_histogram, BTreeMap::from([(1, 1), (2, 2), (3, 1)]));
    assert!(report.render_text().contains("methods: 4"));
}

#[test]
fn dot_neighborhoods() {
    let idx = demo();
    let dot = neighborhood_dot(&idx, "A.m1/0", 1).unwrap();
    assert_eq!(count_dot(&dot), (4, 4));
    assert!(dot.contains("\"A.m4/0\" -> \"A.m1/0\""));
    assert_eq!(count_dot(&neighborhood_dot(&idx, "A.m1", 0).unwrap()), (1, 0));
    assert_eq!(count_dot(&neighborhood_dot(&idx, "A.m4", 1).unwrap()), (2, 1));
}

#[test]
fn indexing_twice_is_byte_identical() {
    assert_eq!(demo().to_json(), demo().to_json());
    let reloaded = ProjectIndex::from_json(&demo().to_json()).unwrap();
    assert_eq!(reloaded.to_json(), demo().to_json());
    assert_eq!(reloaded.version(), demo().version());
}
