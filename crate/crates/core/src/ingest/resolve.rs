//! Name-based call resolution.
//!
//! A raw site `name(args)` is matched against declarations named `name`
//! whose arity accepts the argument count. The candidates are narrowed by a
//! class-name qualifier when one is written (`Foo.name()`), then resolved by
//! the first tier that yields a single id: the caller's own class, classes
//! declared in the caller's file, classes referenced anywhere in the caller's
//! file, and finally a project-wide unique match. Sites with no candidates
//! are external calls; sites left with several are ambiguous. Both are
//! dropped.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::config::IngestConfig;
use crate::model::{CallEdge, MethodDecl, MethodId, RawCallSite};

/// Identifiers referenced per file, keyed by project-relative path.
pub type FileRefs = BTreeMap<String, BTreeSet<String>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AmbiguousCall {
    pub caller: MethodId,
    pub callee_name: String,
    pub site: usize,
    pub candidates: Vec<MethodId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Resolution {
    pub edges: Vec<CallEdge>,
    pub resolved_sites: usize,
    pub external_sites: usize,
    pub ambiguous: Vec<AmbiguousCall>,
}

impl Resolution {
    pub fn ambiguous_sites(&self) -> usize {
        self.ambiguous.len()
    }
}

enum Outcome<'d> {
    Resolved(&'d MethodDecl),
    External,
    Ambiguous(Vec<&'d MethodDecl>),
}

struct Resolver<'d> {
    by_name: HashMap<&'d str, Vec<&'d MethodDecl>>,
    by_id: HashMap<&'d str, &'d MethodDecl>,
    refs: &'d FileRefs,
}

fn accepts(decl: &MethodDecl, args: usize) -> bool {
    decl.arity == args || (decl.varargs && args + 1 >= decl.arity)
}

fn class_key(d: &MethodDecl) -> (&str, Option<&str>) {
    (&d.class_name, d.id.as_str().split_once('@').map(|(_, stem)| stem))
}

fn same_class(a: &MethodDecl, b: &MethodDecl) -> bool {
    class_key(a) == class_key(b)
}

fn single<'d>(cands: &[&'d MethodDecl]) -> Option<&'d MethodDecl> {
    let first = cands.first()?;
    cands.iter().all(|c| c.id == first.id).then_some(*first)
}

impl<'d> Resolver<'d> {
    fn resolve(&self, site: &RawCallSite) -> Outcome<'d> {
        let Some(named) = self.by_name.get(site.callee_name.as_str()) else {
            return Outcome::External;
        };
        let mut cands: Vec<&MethodDecl> = match site.arg_count {
            Some(n) => {
                let exact: Vec<_> = named.iter().copied().filter(|d| d.arity == n).collect();
                if exact.is_empty() {
                    named.iter().copied().filter(|d| accepts(d, n)).collect()
                } else {
                    exact
                }
            }
            None => named.clone(),
        };
        if cands.is_empty() {
            return Outcome::External;
        }
        let caller = self.by_id.get(site.caller.as_str()).copied();

        match site.qualifier.as_deref() {
            Some("this") => {
                if let Some(caller) = caller {
                    cands.retain(|d| same_class(d, caller));
                    if cands.is_empty() {
                        return Outcome::External;
                    }
                }
            }
            Some(q) if cands.iter().any(|d| d.class_name == q) => {
                cands.retain(|d| d.class_name == q);
            }
            _ => {}
        }

        if let Some(caller) = caller {
            let tiers: [&dyn Fn(&MethodDecl) -> bool; 3] = [
                &|d| same_class(d, caller),
                &|d| d.file == caller.file,
                &|d| {
                    self.refs
                        .get(&caller.file)
                        .is_some_and(|r| r.contains(&d.class_name))
                },
            ];
            for tier in tiers {
                let hits: Vec<_> = cands.iter().copied().filter(|d| tier(d)).collect();
                if let Some(d) = single(&hits) {
                    return Outcome::Resolved(d);
                }
                if hits.len() > 1 {
                    break;
                }
            }
        }
        match single(&cands) {
            Some(d) => Outcome::Resolved(d),
            None => Outcome::Ambiguous(cands),
        }
    }
}

pub fn resolve_calls(
    decls: &[MethodDecl],
    sites: &[RawCallSite],
    refs: &FileRefs,
    _config: &IngestConfig,
) -> Resolution {
    let mut by_name: HashMap<&str, Vec<&MethodDecl>> = HashMap::new();
    for d in decls {
        by_name.entry(d.method_name.as_str()).or_default().push(d);
    }
    for v in by_name.values_mut() {
        v.sort_by(|a, b| a.id.cmp(&b.id));
    }
    let resolver = Resolver {
        by_name,
        by_id: decls.iter().map(|d| (d.id.as_str(), d)).collect(),
        refs,
    };

    let mut grouped: BTreeMap<(MethodId, MethodId), Vec<usize>> = BTreeMap::new();
    let mut out = Resolution::default();
    for site in sites {
        match resolver.resolve(site) {
            Outcome::Resolved(callee) => {
                out.resolved_sites += 1;
                grouped
                    .entry((site.caller.clone(), callee.id.clone()))
                    .or_default()
                    .push(site.site);
            }
            Outcome::External => out.external_sites += 1,
            Outcome::Ambiguous(cands) => {
                let mut candidates: Vec<MethodId> = cands.iter().map(|d| d.id.clone()).collect();
                candidates.dedup();
                out.ambiguous.push(AmbiguousCall {
                    caller: site.caller.clone(),
                    callee_name: site.callee_name.clone(),
                    site: site.site,
                    candidates,
                });
            }
        }
    }
    out.edges = grouped
        .into_iter()
        .map(|((caller, callee), mut offsets)| {
            offsets.sort_unstable();
            CallEdge {
                caller,
                callee,
                site_count: offsets.len(),
                sites: offsets,
            }
        })
        .collect();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{assign_ids, parse_unit, SourceUnit};

    fn run(files: &[(&str, &str)]) -> Resolution {
        let units: Vec<_> = files
            .iter()
            .map(|(p, c)| SourceUnit {
                path: p.to_string(),
                content: c.to_string(),
                class_names: vec![],
            })
            .collect();
        let parsed: Vec<_> = units.iter().map(parse_unit).collect();
        let refs: FileRefs = parsed.iter().map(|p| (p.path.clone(), p.referenced.clone())).collect();
        let (decls, sites) = assign_ids(parsed);
        resolve_calls(&decls, &sites, &refs, &IngestConfig::default())
    }

    fn pairs(r: &Resolution) -> Vec<(String, String, usize)> {
        r.edges
            .iter()
            .map(|e| (e.caller.to_string(), e.callee.to_string(), e.site_count))
            .collect()
    }

    #[test]
    fn demo_corpus() {
        let r = run(&[
            ("A.java", "class A { void m1() { b.m2(); b.m2(); c.m3(); } void m4() { m1(); } }\n"),
            ("B.java", "class B { void m2() { c.m3(); } }\n"),
            ("C.java", "class C { void m3() { } }\n"),
        ]);
        assert_eq!(
            pairs(&r),
            vec![
                ("A.m1/0".into(), "B.m2/0".into(), 2),
                ("A.m1/0".into(), "C.m3/0".into(), 1),
                ("A.m4/0".into(), "A.m1/0".into(), 1),
                ("B.m2/0".into(), "C.m3/0".into(), 1),
            ]
        );
        assert_eq!(r.resolved_sites, 5);
        assert_eq!(r.external_sites, 0);
        assert!(r.ambiguous.is_empty());
    }

    #[test]
    fn external_calls_are_discounted() {
        let r = run(&[("P.java", "class P { void f() { System.out.println(1); g(); } void g() {} }")]);
        assert_eq!(pairs(&r), vec![("P.f/0".into(), "P.g/0".into(), 1)]);
        assert_eq!(r.external_sites, 1);
    }

    #[test]
    fn unrelated_same_name_is_ambiguous() {
        let r = run(&[
            ("X.java", "class X { void init() {} }"),
            ("Y.java", "class Y { void init() {} }"),
            ("Z.java", "class Z { void go() { thing.init(); } }"),
        ]);
        assert!(r.edges.is_empty());
        assert_eq!(r.ambiguous_sites(), 1);
        assert_eq!(
            r.ambiguous[0].candidates,
            vec![MethodId::from("X.init/0"), MethodId::from("Y.init/0")]
        );
    }

    #[test]
    fn tiers_break_ties() {
        let r = run(&[
            ("X.java", "class X { void init() {} void self() { init(); } }"),
            ("Y.java", "class Y { void init() {} }"),
            ("Z.java", "class Z { Y y; void go() { y.init(); } }"),
            ("Q.java", "class Q { void go() { X.init(); } }"),
        ]);
        assert_eq!(
            pairs(&r),
            vec![
                ("Q.go/0".into(), "X.init/0".into(), 1),
                ("X.self/0".into(), "X.init/0".into(), 1),
                ("Z.go/0".into(), "Y.init/0".into(), 1),
            ]
        );
    }

    #[test]
    fn arity_filters_candidates() {
        let r = run(&[
            ("X.java", "class X { void put(int a) {} }"),
            ("Y.java", "class Y { void put(int a, int b) {} }"),
            ("Z.java", "class Z { void go() { m.put(1, 2); m.put(1, 2, 3); } }"),
        ]);
        assert_eq!(pairs(&r), vec![("Z.go/0".into(), "Y.put/2".into(), 1)]);
        assert_eq!(r.external_sites, 1);
    }

    #[test]
    fn varargs_accept_extra_arguments() {
        let r = run(&[("V.java", "class V { void log(String f, Object... a) {} void go() { log(\"x\"); log(\"x\", 1, 2); } }")]);
        assert_eq!(pairs(&r), vec![("V.go/0".into(), "V.log/2".into(), 2)]);
    }

    #[test]
    fn constructor_calls() {
        let r = run(&[
            ("W.java", "class W { W(int x) {} }"),
            ("U.java", "class U { void go() { new W(1); new java.util.ArrayList<String>(); } }"),
        ]);
        assert_eq!(pairs(&r), vec![("U.go/0".into(), "W.W/1".into(), 1)]);
    }

    #[test]
    fn recursion_keeps_self_edges() {
        let r = run(&[("R.java", "class R { int f(int n) { return n == 0 ? 0 : f(n - 1); } }")]);
        assert_eq!(pairs(&r), vec![("R.f/1".into(), "R.f/1".into(), 1)]);
    }
}
