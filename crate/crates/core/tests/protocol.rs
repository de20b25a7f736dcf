use std::sync::Arc;

use serde_json::{json, Value};
use wandercode_core::protocol::{merged_list, Kind, Message, Session};
use wandercode_core::{index_sources, Engine, EngineConfig};

const A: &str = "class A { void m1() { b.m2(); b.m2(); c.m3(); } void m4() { m1(); } }\n";
const B: &str = "class B { void m2() { c.m3(); } }\n";
const C: &str = "class C { void m3() { } }\n";

fn engine() -> Engine {
    let idx = index_sources([("A.java", A), ("B.java", B), ("C.java", C)]).unwrap();
    Engine::new(Arc::new(idx), EngineConfig::default())
}

fn send(s: &mut Session, v: Value) -> Vec<Message> {
    s.handle_line(&v.to_string())
}

fn ids(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|e| e["id"].as_str().unwrap().to_string())
        .collect()
}

#[test]
fn cursor_into_m3_publishes() {
    let mut s = Session::new(engine());
    let out = send(&mut s, json!({"kind":"cursorMoved","seq":1,"payload":{"file":"C.java","offset":15}}));
    assert_eq!(out.len(), 2);
    assert_eq!((out[0].kind, out[0].seq), (Kind::Recommendations, 0));
    assert_eq!(out[0].payload["mode"], "graph");
    assert_eq!(ids(&out[0].payload["callers"]), vec!["B.m2/0", "A.m1/0"]);
    assert!(out[0].payload["callees"].as_array().unwrap().is_empty());
    let first = &out[0].payload["callers"][0];
    let keys: Vec<&str> = first.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, vec!["id", "methodName", "className", "file", "spanStart", "relevance", "rank"]);
    assert_eq!((out[1].kind, out[1].seq), (Kind::CursorMoved, 1));
    assert_eq!(out[1].payload["focus"], "C.m3/0");
}

#[test]
fn pin_suppresses_events() {
    let mut s = Session::new(engine());
    send(&mut s, json!({"kind":"cursorMoved","seq":1,"payload":{"file":"C.java","offset":15}}));
    let pin = send(&mut s, json!({"kind":"pin","seq":2,"payload":{"pinned":true}}));
    assert_eq!(pin.len(), 1);
    assert_eq!(pin[0].payload["pinned"], true);
    let out = send(&mut s, json!({"kind":"cursorMoved","seq":3,"payload":{"file":"A.java","offset":20}}));
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].kind, Kind::CursorMoved);
    assert_eq!(out[0].payload["focus"], "C.m3/0");
    let unpin = send(&mut s, json!({"kind":"pin","seq":4,"payload":{"pinned":false}}));
    assert_eq!(unpin[0].kind, Kind::Recommendations);
    assert_eq!(unpin[0].payload["focus"]["id"], "A.m1/0");
}

#[test]
fn get_file_returns_exact_bytes() {
    let mut s = Session::new(engine());
    let out = send(&mut s, json!({"kind":"getFile","seq":1,"payload":{"file":"A.java"}}));
    assert_eq!(out[0].kind, Kind::FileContent);
    assert_eq!(out[0].payload["content"], A);
    let err = send(&mut s, json!({"kind":"getFile","seq":2,"payload":{"file":"Z.java"}}));
    assert_eq!(err[0].kind, Kind::Error);
    assert_eq!(err[0].payload["code"], "unknownFile");
}

#[test]
fn malformed_and_unknown_messages() {
    let mut s = Session::new(engine());
    let out = s.handle_line("{not json");
    assert_eq!((out[0].kind, out[0].seq), (Kind::Error, 0));
    assert_eq!(out[0].payload["code"], "malformed");
    let out = send(&mut s, json!({"kind":"teleport","seq":5}));
    assert_eq!((out[0].kind, out[0].seq), (Kind::Error, 5));
    assert_eq!(out[0].payload["code"], "unknownKind");
    let out = send(&mut s, json!({"kind":"cursorMoved","seq":6,"payload":{"file":"A.java"}}));
    assert_eq!(out[0].payload["code"], "badPayload");
    let out = send(&mut s, json!({"kind":"recommendations","seq":7}));
    assert_eq!(out[0].payload["code"], "unknownKind");
    // session continues
    let out = send(&mut s, json!({"kind":"hello","seq":8}));
    assert_eq!(out[0].kind, Kind::Hello);
    assert_eq!(out[0].payload["methods"], 4);
    assert_eq!(out[0].payload["config"]["collapsedCap"], 3);
}

#[test]
fn seq_must_increase() {
    let mut s = Session::new(engine());
    send(&mut s, json!({"kind":"hello","seq":3}));
    let out = send(&mut s, json!({"kind":"hello","seq":3}));
    assert_eq!(out[0].payload["code"], "badSeq");
    let out = send(&mut s, json!({"kind":"hello","seq":0}));
    assert_eq!(out[0].payload["code"], "badSeq");
    assert_eq!(send(&mut s, json!({"kind":"hello","seq":4}))[0].kind, Kind::Hello);
}

#[test]
fn list_mode_merges() {
    let mut s = Session::new(engine());
    send(&mut s, json!({"kind":"cursorMoved","seq":1,"payload":{"file":"A.java","offset":20}}));
    let out = send(&mut s, json!({"kind":"listMode","seq":2,"payload":{"enabled":true}}));
    assert_eq!(out[0].kind, Kind::Recommendations);
    assert_eq!(out[0].payload["mode"], "list");
    let items = &out[0].payload["items"];
    assert_eq!(ids(items), vec!["B.m2/0", "C.m3/0", "A.m4/0"]);
    let keys: Vec<&str> = items[0].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, vec!["id", "methodName", "className", "relevance", "rank"]);
    assert_eq!(out[1].payload["listMode"], true);
    // toggling again re-renders the same state as a graph
    let back = send(&mut s, json!({"kind":"listMode","seq":3,"payload":{"enabled":false}}));
    assert_eq!(back[0].payload["mode"], "graph");
    assert_eq!(back[0].payload["focus"]["id"], "A.m1/0");
    assert_eq!(back[1].payload["pinned"], false);
    assert_eq!(back[1].payload["expanded"], false);
}

#[test]
fn list_mode_keeps_engine_state() {
    let mut s = Session::new(engine());
    send(&mut s, json!({"kind":"cursorMoved","seq":1,"payload":{"file":"A.java","offset":20}}));
    send(&mut s, json!({"kind":"pin","seq":2}));
    send(&mut s, json!({"kind":"expand","seq":3}));
    let before = s.state().clone();
    send(&mut s, json!({"kind":"listMode","seq":4,"payload":{"enabled":true}}));
    assert_eq!(s.state(), &before);
}

#[test]
fn merged_list_cases() {
    let e = engine();
    let m1 = e.recommend("A.m1/0", false).unwrap();
    let merged: Vec<_> = merged_list(&m1, 3).into_iter().map(|x| (x.id.to_string(), x.rank)).collect();
    assert_eq!(
        merged,
        vec![("B.m2/0".into(), 1), ("C.m3/0".into(), 2), ("A.m4/0".into(), 3)]
    );
    let m3 = e.recommend("C.m3/0", false).unwrap();
    let only_callers: Vec<_> = merged_list(&m3, 3).into_iter().map(|x| x.id).collect();
    let callers: Vec<_> = m3.callers.iter().map(|r| r.id.clone()).collect();
    assert_eq!(only_callers, callers);
    let mut empty = m3.clone();
    empty.callers.clear();
    assert!(merged_list(&empty, 3).is_empty());
}

#[test]
fn select_and_stale_select() {
    let mut s = Session::new(engine());
    send(&mut s, json!({"kind":"cursorMoved","seq":1,"payload":{"file":"A.java","offset":20}}));
    let nav = send(&mut s, json!({"kind":"select","seq":2,"payload":{"id":"B.m2/0"}}));
    assert_eq!(nav[0].kind, Kind::Navigation);
    assert_eq!(nav[0].payload, json!({"file":"B.java","spanStart":10,"id":"B.m2/0"}));
    send(&mut s, json!({"kind":"cursorMoved","seq":3,"payload":{"file":"B.java","offset":12}}));
    let stale = send(&mut s, json!({"kind":"select","seq":4,"payload":{"id":"A.m4/0"}}));
    assert_eq!(stale[0].kind, Kind::Error);
    assert_eq!(stale[0].payload["code"], "notRecommended");
}

#[test]
fn expand_events() {
    let mut s = Session::new(engine());
    // nothing shown yet: flag flips, nothing published
    let out = send(&mut s, json!({"kind":"expand","seq":1,"payload":{"expanded":true}}));
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].payload["expanded"], true);
    let out = send(&mut s, json!({"kind":"cursorMoved","seq":2,"payload":{"file":"A.java","offset":20}}));
    assert_eq!(out[0].payload["expanded"], true);
    let out = send(&mut s, json!({"kind":"expand","seq":3,"payload":{"expanded":false}}));
    assert_eq!(out[0].kind, Kind::Recommendations);
    assert_eq!(out[0].payload["expanded"], false);
}

#[test]
fn diagnostics_request() {
    let mut s = Session::new(engine());
    let out = send(&mut s, json!({"kind":"diagnostics","seq":1}));
    assert_eq!(out[0].kind, Kind::Diagnostics);
    assert_eq!(out[0].payload["resolvedSites"], 5);
}
