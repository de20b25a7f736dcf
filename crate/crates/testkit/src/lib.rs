//! Random Java corpora restricted to a small grammar, and a text-scanning
//! oracle for their call graphs.
//!
//! Method names are unique project-wide and every call passes exactly the
//! callee's parameter count, so the true call graph is recoverable by
//! searching each method body for `name(`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VERBS: &[&str] = &[
    "load", "save", "parse", "render", "check", "update", "find", "apply", "reset", "build", "open",
    "close", "scan", "merge", "emit", "visit",
];

#[derive(Debug, Clone)]
pub struct GenMethod {
    pub class: String,
    pub name: String,
    pub arity: usize,
    /// Text between the braces of the method body.
    pub body: String,
}

impl GenMethod {
    /// Id the indexer is expected to assign.
    pub fn id(&self) -> String {
        format!("{}.{}/{}", self.class, self.name, self.arity)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    /// (project-relative path, content), sorted by path.
    pub files: Vec<(String, String)>,
    pub methods: Vec<GenMethod>,
}

impl Corpus {
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        for (path, content) in &self.files {
            let p = dir.join(path);
            if let Some(parent) = p.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(p, content)?;
        }
        Ok(())
    }
}

fn args(rng: &mut ChaCha8Rng, n: usize) -> String {
    let pool = ["1", "x", "\"s\"", "null", "a + 2", "flag"];
    (0..n)
        .map(|_| pool.choose(rng).unwrap().to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Generates a corpus of at most `max_methods` methods (at least one).
pub fn generate(seed: u64, max_methods: usize) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_methods = rng.random_range(1..=max_methods.max(1));
    let n_classes = rng.random_range(1..=n_methods.min(6));
    let classes: Vec<String> = (0..n_classes).map(|c| format!("Cls{c}")).collect();

    let mut methods: Vec<GenMethod> = (0..n_methods)
        .map(|k| GenMethod {
            class: classes[rng.random_range(0..n_classes)].clone(),
            name: format!("{}{k}", VERBS.choose(&mut rng).unwrap()),
            arity: rng.random_range(0..=2),
            body: String::new(),
        })
        .collect();

    let targets: Vec<(String, String, usize)> = methods
        .iter()
        .map(|m| (m.class.clone(), m.name.clone(), m.arity))
        .collect();
    for m in methods.iter_mut() {
        let mut body = String::new();
        for _ in 0..rng.random_range(0..6) {
            let (class, name, arity) = targets.choose(&mut rng).unwrap();
            let call = format!("{name}({})", args(&mut rng, *arity));
            let stmt = match rng.random_range(0..7) {
                0 => format!("{call};"),
                1 => format!("obj.{call};"),
                2 if *class == m.class => format!("this.{call};"),
                2 => format!("{class}.{call};"),
                3 => format!("int v = {call};"),
                4 => format!("if (flag) {{ {call}; }}"),
                5 => {
                    // nested call in an argument position
                    let (_, inner, inner_arity) = targets.choose(&mut rng).unwrap();
                    let inner_call = format!("{inner}({})", args(&mut rng, *inner_arity));
                    if *arity == 0 {
                        format!("{call}; {inner_call};")
                    } else {
                        let rest = args(&mut rng, arity - 1);
                        let all = if rest.is_empty() { inner_call } else { format!("{inner_call}, {rest}") };
                        format!("{name}({all});")
                    }
                }
                _ => "System.out.println(\"noise\");".to_string(),
            };
            let _ = write!(body, "\n        {stmt}");
        }
        if rng.random_bool(0.3) {
            body.push_str("\n        helper.zzExternal(1, 2);");
        }
        m.body = body;
    }

    let mut files = Vec::new();
    for class in &classes {
        let mut text = String::new();
        let _ = writeln!(text, "package gen;\n\nclass {class} {{");
        if rng.random_bool(0.5) {
            let _ = writeln!(text, "    static int counter = 0;");
        }
        for m in methods.iter().filter(|m| &m.class == class) {
            let params = (0..m.arity).map(|p| format!("int p{p}")).collect::<Vec<_>>().join(", ");
            let _ = writeln!(text, "\n    int {}({params}) {{{}\n        return 0;\n    }}", m.name, m.body);
        }
        text.push_str("}\n");
        files.push((format!("gen/{class}.java"), text));
    }
    files.sort();
    Corpus { files, methods }
}

/// Call graph recovered by scanning method bodies for `name(`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleGraph {
    pub callers: BTreeMap<String, BTreeSet<String>>,
    pub callees: BTreeMap<String, BTreeSet<String>>,
    pub ref_count: BTreeMap<String, usize>,
}

fn occurrences(haystack: &str, name: &str) -> usize {
    let needle = format!("{name}(");
    let bytes = haystack.as_bytes();
    haystack
        .match_indices(&needle)
        .filter(|(i, _)| {
            *i == 0 || {
                let b = bytes[i - 1];
                !(b.is_ascii_alphanumeric() || b == b'_' || b == b'$')
            }
        })
        .count()
}

pub fn brute_force(corpus: &Corpus) -> OracleGraph {
    let mut g = OracleGraph::default();
    for m in &corpus.methods {
        g.callers.insert(m.id(), BTreeSet::new());
        g.callees.insert(m.id(), BTreeSet::new());
        g.ref_count.insert(m.id(), 0);
    }
    for caller in &corpus.methods {
        for callee in &corpus.methods {
            let n = occurrences(&caller.body, &callee.name);
            if n > 0 {
                g.callees.get_mut(&caller.id()).unwrap().insert(callee.id());
                g.callers.get_mut(&callee.id()).unwrap().insert(caller.id());
                *g.ref_count.get_mut(&callee.id()).unwrap() += n;
            }
        }
    }
    g
}
