//! Project scanning and call-site extraction.
//!
//! `scan_project` collects source files, `parse_unit` extracts declarations
//! and raw call sites per file, `assign_ids` makes method ids unique across
//! the project and `resolve_calls` turns raw sites into call edges.

pub mod lexer;
pub mod parser;
mod resolve;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use globset::{Glob, GlobSet, GlobSetBuilder};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tracing::{debug, warn};
use walkdir::WalkDir;

pub use resolve::{resolve_calls, AmbiguousCall, FileRefs, Resolution};

use crate::config::IngestConfig;
use crate::error::{Error, Result};
use crate::model::{MethodDecl, MethodId, RawCallSite};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    /// Project-relative, `/`-separated.
    pub path: String,
    pub content: String,
    pub class_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Warning {
    pub file: String,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct Scan {
    pub units: Vec<SourceUnit>,
    pub warnings: Vec<Warning>,
}

fn exclude_set(patterns: &[String]) -> Result<GlobSet> {
    let mut builder = GlobSetBuilder::new();
    for p in patterns {
        let glob = Glob::new(p).map_err(|e| Error::BadPattern {
            pattern: p.clone(),
            message: e.to_string(),
        })?;
        builder.add(glob);
    }
    builder.build().map_err(|e| Error::BadPattern {
        pattern: patterns.join(","),
        message: e.to_string(),
    })
}

fn relative_path(root: &Path, path: &Path) -> Option<String> {
    let rel = path.strip_prefix(root).ok()?;
    let parts: Vec<String> = rel
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect();
    Some(parts.join("/"))
}

pub fn scan_project(root: &Path, config: &IngestConfig) -> Result<Scan> {
    std::fs::read_dir(root).map_err(|source| Error::UnreadableRoot {
        path: root.to_path_buf(),
        source,
    })?;
    let excludes = exclude_set(&config.exclude)?;
    let starts: Vec<_> = if config.roots.is_empty() {
        vec![root.to_path_buf()]
    } else {
        config.roots.iter().map(|r| root.join(r)).collect()
    };

    let mut found = BTreeMap::new();
    let mut warnings = Vec::new();
    for start in &starts {
        for entry in WalkDir::new(start).sort_by_file_name() {
            let entry = match entry {
                Ok(e) => e,
                Err(e) => {
                    let file = e
                        .path()
                        .and_then(|p| relative_path(root, p))
                        .unwrap_or_else(|| start.display().to_string());
                    warnings.push(Warning {
                        file,
                        message: e.to_string(),
                    });
                    continue;
                }
            };
            if !entry.file_type().is_file() {
                continue;
            }
            let name = entry.file_name().to_string_lossy();
            if !config.extensions.iter().any(|ext| name.ends_with(ext.as_str())) {
                continue;
            }
            let Some(rel) = relative_path(root, entry.path()) else {
                continue;
            };
            if excludes.is_match(&rel) {
                continue;
            }
            found.entry(rel).or_insert_with(|| entry.path().to_path_buf());
        }
    }

    let mut units = Vec::with_capacity(found.len());
    for (path, abs) in found {
        match std::fs::read(&abs) {
            Ok(bytes) => {
                let content = String::from_utf8_lossy(&bytes).into_owned();
                let class_names = parser::declared_class_names(&content);
                units.push(SourceUnit {
                    path,
                    content,
                    class_names,
                });
            }
            Err(e) => {
                warn!(file = %path, error = %e, "skipping unreadable file");
                warnings.push(Warning {
                    file: path,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(Scan { units, warnings })
}

/// Declarations and raw call sites of one file, with file-local ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedUnit {
    pub path: String,
    pub decls: Vec<MethodDecl>,
    pub sites: Vec<RawCallSite>,
    pub referenced: BTreeSet<String>,
    pub warning: Option<Warning>,
}

pub fn parse_unit(unit: &SourceUnit) -> ParsedUnit {
    let parsed = match parser::parse_source(&unit.content) {
        Ok(p) => p,
        Err(e) => {
            debug!(file = %unit.path, error = %e, "parse failed");
            return ParsedUnit {
                path: unit.path.clone(),
                warning: Some(Warning {
                    file: unit.path.clone(),
                    message: e.to_string(),
                }),
                ..ParsedUnit::default()
            };
        }
    };
    let decls: Vec<MethodDecl> = parsed
        .decls
        .iter()
        .map(|d| MethodDecl {
            id: MethodId::new(&d.class_name, &d.method_name, d.arity, None),
            class_name: d.class_name.clone(),
            method_name: d.method_name.clone(),
            arity: d.arity,
            varargs: d.varargs,
            file: unit.path.clone(),
            span: d.span,
            overloads: Vec::new(),
        })
        .collect();
    let sites = parsed
        .calls
        .iter()
        .map(|c| RawCallSite {
            caller: decls[c.caller].id.clone(),
            callee_name: c.callee_name.clone(),
            arg_count: c.arg_count,
            qualifier: c.qualifier.clone(),
            file: unit.path.clone(),
            site: c.site,
        })
        .collect();
    ParsedUnit {
        path: unit.path.clone(),
        decls,
        sites,
        referenced: parsed.referenced,
        warning: None,
    }
}

pub fn parse_units(units: &[SourceUnit]) -> Vec<ParsedUnit> {
    // collect() on an indexed parallel iterator preserves input order
    units.par_iter().map(parse_unit).collect()
}

fn path_stem(path: &str) -> &str {
    match path.rfind('.') {
        Some(dot) if dot > path.rfind('/').map_or(0, |s| s + 1) => &path[..dot],
        _ => path,
    }
}

/// Makes ids project-unique and merges same-id declarations.
///
/// Classes whose simple name is declared in more than one file get the
/// file's path stem appended to their ids. Declarations that still share an
/// id afterwards (same-arity overloads) collapse into the first one, the
/// others' bodies kept as `overloads`. Raw sites are rewritten to the final
/// caller ids.
pub fn assign_ids(units: Vec<ParsedUnit>) -> (Vec<MethodDecl>, Vec<RawCallSite>) {
    let mut files_per_class: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    for u in &units {
        for d in &u.decls {
            files_per_class.entry(&d.class_name).or_default().insert(&u.path);
        }
    }
    let duplicated: BTreeSet<String> = files_per_class
        .into_iter()
        .filter(|(_, files)| files.len() > 1)
        .map(|(class, _)| class.to_string())
        .collect();

    let mut merged: BTreeMap<MethodId, MethodDecl> = BTreeMap::new();
    let mut sites = Vec::new();
    for unit in units {
        let stem = path_stem(&unit.path).to_string();
        let rename = |decl: &MethodDecl| {
            if duplicated.contains(&decl.class_name) {
                MethodId::new(&decl.class_name, &decl.method_name, decl.arity, Some(&stem))
            } else {
                decl.id.clone()
            }
        };
        let mut local: HashMap<MethodId, MethodId> = HashMap::new();
        for mut decl in unit.decls {
            let id = rename(&decl);
            local.insert(decl.id.clone(), id.clone());
            decl.id = id.clone();
            match merged.get_mut(&id) {
                Some(first) => {
                    first.overloads.push(decl.span);
                    first.varargs |= decl.varargs;
                }
                None => {
                    merged.insert(id, decl);
                }
            }
        }
        for mut site in unit.sites {
            site.caller = local[&site.caller].clone();
            sites.push(site);
        }
    }
    (merged.into_values().collect(), sites)
}

/// Everything produced by indexing a project directory.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub units: Vec<SourceUnit>,
    pub decls: Vec<MethodDecl>,
    pub resolution: Resolution,
    pub warnings: Vec<Warning>,
    pub raw_sites: usize,
}

/// Scans, parses and resolves a project in one go.
pub fn ingest_project(root: &Path, config: &IngestConfig) -> Result<Ingested> {
    let Scan { units, warnings } = scan_project(root, config)?;
    Ok(ingest_sources(units, warnings, config))
}

/// Parses and resolves already-loaded source units.
pub fn ingest_sources(units: Vec<SourceUnit>, mut warnings: Vec<Warning>, config: &IngestConfig) -> Ingested {
    let parsed = parse_units(&units);
    warnings.extend(parsed.iter().filter_map(|p| p.warning.clone()));
    let refs: FileRefs = parsed
        .iter()
        .map(|p| (p.path.clone(), p.referenced.clone()))
        .collect();
    let (decls, sites) = assign_ids(parsed);
    let resolution = resolve_calls(&decls, &sites, &refs, config);
    warnings.sort();
    Ingested {
        units,
        decls,
        raw_sites: sites.len(),
        resolution,
        warnings,
    }
}

/// Convenience for in-memory sources: `(path, content)` pairs.
pub fn units_from<'a>(files: impl IntoIterator<Item = (&'a str, &'a str)>) -> Vec<SourceUnit> {
    let mut units: Vec<SourceUnit> = files
        .into_iter()
        .map(|(path, content)| SourceUnit {
            path: path.to_string(),
            content: content.to_string(),
            class_names: parser::declared_class_names(content),
        })
        .collect();
    units.sort_by(|a, b| a.path.cmp(&b.path));
    units
}
