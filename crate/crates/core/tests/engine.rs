use std::sync::Arc;

use wandercode_core::config::Relevance;
use wandercode_core::{index_sources, Engine, EngineConfig, Error, ProjectIndex};

const A: &str = "class A { void m1() { b.m2(); b.m2(); c.m3(); } void m4() { m1(); } }\n";
const B: &str = "class B { void m2() { c.m3(); } }\n";
const C: &str = "class C { void m3() { } }\n";

fn demo() -> Engine {
    let idx = index_sources([("A.java", A), ("B.java", B), ("C.java", C)]).unwrap();
    Engine::new(Arc::new(idx), EngineConfig::default())
}

/// `Hub.target()` with seven callers `Ki.ci()`; `Extra.x()` calls each `Ki.ci()`
/// `i` times, so caller `Ki.ci` has relevance `i`.
fn hub() -> Engine {
    let mut files = vec![("Hub.java".to_string(), "class Hub { void target() { } }".to_string())];
    let mut extra = String::from("class Extra { void x() {");
    for i in 0..7 {
        files.push((format!("K{i}.java"), format!("class K{i} {{ void c{i}() {{ hub.target(); }} }}")));
        for _ in 0..i {
            extra.push_str(&format!(" k.c{i}();"));
        }
    }
    extra.push_str(" } }");
    files.push(("Extra.java".to_string(), extra));
    let idx = index_sources(files.iter().map(|(a, b)| (a.as_str(), b.as_str()))).unwrap();
    Engine::new(Arc::new(idx), EngineConfig::default())
}

fn ids(list: &[wandercode_core::RankedRecommendation]) -> Vec<&str> {
    list.iter().map(|r| r.id.as_str()).collect()
}

#[test]
fn focus_from_demo_cursor() {
    let e = demo();
    assert_eq!(e.focus_from_cursor("A.java", 20).unwrap().unwrap().as_str(), "A.m1/0");
    assert_eq!(e.focus_from_cursor("A.java", 10).unwrap().unwrap().as_str(), "A.m1/0");
    assert_eq!(e.focus_from_cursor("A.java", 47).unwrap(), None);
    assert_eq!(e.focus_from_cursor("A.java", 3).unwrap(), None);
    assert!(matches!(e.focus_from_cursor("Z.java", 3), Err(Error::UnknownFile(_))));
}

#[test]
fn cursor_into_m3() {
    let e = demo();
    let mut s = e.new_session();
    assert!(e.on_cursor_moved(&mut s, "C.java", 15).unwrap());
    let cur = s.current.as_ref().unwrap();
    assert_eq!(cur.focus.id.as_str(), "C.m3/0");
    assert_eq!(ids(&cur.callers), vec!["B.m2/0", "A.m1/0"]);
    assert_eq!(cur.callers[0].relevance, 2);
    assert_eq!(cur.callers[1].relevance, 1);
    assert!(cur.callees.is_empty());
    // same set again: nothing to publish
    assert!(!e.on_cursor_moved(&mut s, "C.java", 16).unwrap());
}

#[test]
fn cursor_outside_methods_hides() {
    let e = demo();
    let mut s = e.new_session();
    e.on_cursor_moved(&mut s, "A.java", 20).unwrap();
    assert!(e.on_cursor_moved(&mut s, "A.java", 2).unwrap());
    assert!(s.current.is_none());
    assert!(!e.on_cursor_moved(&mut s, "A.java", 1).unwrap());
}

#[test]
fn unknown_file_leaves_state() {
    let e = demo();
    let mut s = e.new_session();
    e.on_cursor_moved(&mut s, "A.java", 20).unwrap();
    let before = s.clone();
    assert!(e.on_cursor_moved(&mut s, "Nope.java", 1).is_err());
    assert_eq!(s, before);
}

#[test]
fn pin_freezes_and_unpin_catches_up() {
    let e = demo();
    let mut s = e.new_session();
    e.on_cursor_moved(&mut s, "A.java", 20).unwrap();
    let frozen = s.current.clone();
    e.set_pinned(&mut s, true).unwrap();
    assert!(!e.set_pinned(&mut s, true).unwrap());
    assert!(!e.on_cursor_moved(&mut s, "C.java", 15).unwrap());
    assert!(!e.on_cursor_moved(&mut s, "A.java", 2).unwrap());
    assert!(!e.on_cursor_moved(&mut s, "B.java", 12).unwrap());
    assert_eq!(s.current, frozen);
    assert!(e.set_pinned(&mut s, false).unwrap());
    assert_eq!(s.current.as_ref().unwrap().focus.id.as_str(), "B.m2/0");
}

#[test]
fn pin_with_nothing_shown() {
    let e = demo();
    let mut s = e.new_session();
    e.set_pinned(&mut s, true).unwrap();
    e.on_cursor_moved(&mut s, "A.java", 20).unwrap();
    assert!(s.current.is_none());
    assert!(e.set_pinned(&mut s, false).unwrap());
    assert_eq!(s.current.as_ref().unwrap().focus.id.as_str(), "A.m1/0");
}

#[test]
fn expand_raises_cap() {
    let e = hub();
    let mut s = e.new_session();
    // cursor in Hub.target
    e.on_cursor_moved(&mut s, "Hub.java", 14).unwrap();
    let collapsed = s.current.clone().unwrap();
    assert_eq!(collapsed.callers.len(), 3);
    assert_eq!(ids(&collapsed.callers), vec!["K6.c6/0", "K5.c5/0", "K4.c4/0"]);
    assert!(e.set_expanded(&mut s, true).unwrap());
    let expanded = s.current.clone().unwrap();
    assert_eq!(expanded.callers.len(), 5);
    assert_eq!(&expanded.callers[..3], &collapsed.callers[..]);
    e.set_expanded(&mut s, false).unwrap();
    assert_eq!(s.current.as_ref().unwrap(), &collapsed);
}

#[test]
fn expand_short_list_keeps_items() {
    let e = demo();
    let mut s = e.new_session();
    e.on_cursor_moved(&mut s, "C.java", 15).unwrap();
    e.set_expanded(&mut s, true).unwrap();
    assert_eq!(s.current.as_ref().unwrap().callers.len(), 2);
}

#[test]
fn expand_while_pinned_uses_frozen_focus() {
    let e = hub();
    let mut s = e.new_session();
    e.on_cursor_moved(&mut s, "Hub.java", 14).unwrap();
    e.set_pinned(&mut s, true).unwrap();
    e.on_cursor_moved(&mut s, "K1.java", 15).unwrap();
    e.set_expanded(&mut s, true).unwrap();
    let cur = s.current.as_ref().unwrap();
    assert_eq!(cur.focus.id.as_str(), "Hub.target/0");
    assert_eq!(cur.callers.len(), 5);
}

#[test]
fn expansion_persists_across_focus_changes() {
    let e = hub();
    let mut s = e.new_session();
    e.set_expanded(&mut s, true).unwrap();
    e.on_cursor_moved(&mut s, "Hub.java", 14).unwrap();
    assert_eq!(s.current.as_ref().unwrap().callers.len(), 5);
}

#[test]
fn select_targets() {
    let e = demo();
    let mut s = e.new_session();
    e.on_cursor_moved(&mut s, "A.java", 20).unwrap();
    let t = e.on_select(&s, "B.m2/0").unwrap();
    assert_eq!((t.file.as_str(), t.span_start), ("B.java", 10));
    let own = e.on_select(&s, "A.m1/0").unwrap();
    assert_eq!((own.file.as_str(), own.span_start), ("A.java", 10));
    assert!(!s.pinned);
}

#[test]
fn stale_select_is_rejected() {
    let e = demo();
    let mut s = e.new_session();
    e.on_cursor_moved(&mut s, "A.java", 20).unwrap();
    e.on_cursor_moved(&mut s, "C.java", 15).unwrap();
    assert!(matches!(e.on_select(&s, "A.m4/0"), Err(Error::NotRecommended(_))));
    let empty = e.new_session();
    assert!(e.on_select(&empty, "A.m1/0").is_err());
}

#[test]
fn edge_local_relevance() {
    let idx: ProjectIndex = index_sources([("A.java", A), ("B.java", B), ("C.java", C)]).unwrap();
    let e = Engine::new(
        Arc::new(idx),
        EngineConfig {
            relevance: Relevance::EdgeLocal,
            ..EngineConfig::default()
        },
    );
    let set = e.recommend("A.m1/0", false).unwrap();
    // m1 calls m2 twice and m3 once
    let rel: Vec<_> = set.callees.iter().map(|r| (r.id.as_str(), r.relevance)).collect();
    assert_eq!(rel, vec![("B.m2/0", 2), ("C.m3/0", 1)]);
    let set = e.recommend("C.m3/0", false).unwrap();
    let rel: Vec<_> = set.callers.iter().map(|r| (r.id.as_str(), r.relevance)).collect();
    assert_eq!(rel, vec![("A.m1/0", 1), ("B.m2/0", 1)]);
}
