//! Graphviz export of the call graph or a focus method's neighborhood.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write;

use crate::error::Result;
use crate::graph::ProjectIndex;
use crate::model::MethodId;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Methods within `depth` call edges of `focus`, following edges in either
/// direction.
pub fn neighborhood(index: &ProjectIndex, focus: &str, depth: usize) -> Result<BTreeSet<MethodId>> {
    let start = index.lookup(focus)?.clone();
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((id, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        let next = index.callers(id.as_str())?.iter().chain(index.callees(id.as_str())?);
        for n in next {
            if seen.insert(n.clone()) {
                queue.push_back((n.clone(), d + 1));
            }
        }
    }
    Ok(seen)
}

fn render(index: &ProjectIndex, name: &str, nodes: &BTreeSet<MethodId>, focus: Option<&MethodId>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(name));
    let _ = writeln!(out, "    rankdir=LR;");
    let _ = writeln!(out, "    node [shape=box];");
    for id in nodes {
        let Some(decl) = index.decl(id.as_str()) else { continue };
        let label = format!("{}\\n{}", decl.method_name, decl.class_name);
        let bold = if Some(id) == focus { ", style=bold" } else { "" };
        let _ = writeln!(out, "    {} [label=\"{}\"{}];", quote(id.as_str()), label, bold);
    }
    for e in index.edges() {
        if nodes.contains(&e.caller) && nodes.contains(&e.callee) {
            let _ = writeln!(
                out,
                "    {} -> {} [label=\"{}\"];",
                quote(e.caller.as_str()),
                quote(e.callee.as_str()),
                e.site_count
            );
        }
    }
    out.push_str("}\n");
    out
}

/// DOT digraph of the subgraph induced by `focus`'s neighborhood.
pub fn neighborhood_dot(index: &ProjectIndex, focus: &str, depth: usize) -> Result<String> {
    let nodes = neighborhood(index, focus, depth)?;
    let id = index.lookup(focus)?;
    Ok(render(index, id.as_str(), &nodes, Some(id)))
}

pub fn full_dot(index: &ProjectIndex) -> String {
    let nodes: BTreeSet<MethodId> = index.decls().map(|d| d.id.clone()).collect();
    render(index, "callgraph", &nodes, None)
}

/// Node and edge counts of a DOT text produced by this module.
pub fn count_dot(dot: &str) -> (usize, usize) {
    let edges = dot.lines().filter(|l| l.contains(" -> ")).count();
    let nodes = dot
        .lines()
        .filter(|l| l.trim_start().starts_with('"') && !l.contains(" -> "))
        .count();
    (nodes, edges)
}
