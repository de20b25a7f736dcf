//! The `wandercode` command line.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 unusable input (missing root,
//! unreadable or invalid index, bad flags), 3 unknown method id.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use tokio::net::TcpListener;
use tracing::info;
use wandercode_client::{ClientError, HttpClient};
use wandercode_core::protocol::{self, RecommendationsPayload, Session};
use wandercode_core::rank::RankedRecommendation;
use wandercode_core::report::degree_report;
use wandercode_core::{dot, Engine, EngineConfig, Error, IngestConfig, MethodId, ProjectIndex, Relevance};

#[derive(Debug, Parser)]
#[command(name = "wandercode", version, about = "Index Java call graphs and recommend related methods")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RelevanceArg {
    Global,
    EdgeLocal,
}

impl From<RelevanceArg> for Relevance {
    fn from(r: RelevanceArg) -> Self {
        match r {
            RelevanceArg::Global => Relevance::Global,
            RelevanceArg::EdgeLocal => Relevance::EdgeLocal,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Index a project and write the index file.
    Index {
        root: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Ingest configuration (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print the recommendations for a method.
    Query {
        /// Index file, or the base URL of a running HTTP service.
        target: String,
        method: String,
        #[arg(long)]
        expanded: bool,
        /// Merged single list instead of callers/callees.
        #[arg(long)]
        list: bool,
        /// Print the recommendations payload as JSON.
        #[arg(long)]
        json: bool,
        /// Offline only; a service uses its own setting.
        #[arg(long, value_enum)]
        relevance: Option<RelevanceArg>,
    },
    /// Print the DOT neighborhood of a method, or the whole graph.
    ExportDot {
        index: PathBuf,
        method: Option<String>,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Print the candidate-size distribution of the index.
    Report {
        index: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Serve an index to editors and the browser UI.
    Serve {
        index: PathBuf,
        /// Speak the line protocol on stdin/stdout.
        #[arg(long, conflicts_with_all = ["tcp", "http"])]
        stdio: bool,
        /// Line protocol on a TCP port.
        #[arg(long)]
        tcp: Option<u16>,
        /// HTTP API on a port.
        #[arg(long)]
        http: Option<u16>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, value_enum)]
        relevance: Option<RelevanceArg>,
    },
    /// Feed a recorded request log through a fresh session and print every message.
    Replay { index: PathBuf, log: PathBuf },
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn unknown_method(query: &str, near: &[MethodId]) -> Self {
        let mut message = format!("unknown method {query}");
        if !near.is_empty() {
            let hints: Vec<&str> = near.iter().map(MethodId::as_str).collect();
            let _ = write!(message, "; did you mean: {}", hints.join(", "));
        }
        Self::new(3, message)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

fn io_err(e: std::io::Error) -> CliError {
    CliError::new(1, e.to_string())
}

fn load_index(path: &Path) -> CliResult<ProjectIndex> {
    ProjectIndex::load(path).map_err(|e| CliError::new(2, format!("cannot load index {}: {e}", path.display())))
}

fn engine_for(path: &Path, relevance: Option<RelevanceArg>) -> CliResult<Engine> {
    let index = load_index(path)?;
    let config = EngineConfig {
        relevance: relevance.map(Into::into).unwrap_or_default(),
        ..EngineConfig::default()
    };
    Ok(Engine::new(Arc::new(index), config))
}

fn resolve<'a>(index: &'a ProjectIndex, query: &str) -> CliResult<&'a MethodId> {
    index.lookup(query).map_err(|_| {
        let near: Vec<MethodId> = index.near_misses(query, 5).into_iter().cloned().collect();
        CliError::unknown_method(query, &near)
    })
}

pub async fn run(cli: Cli, out: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Index { root, out: dest, config } => cmd_index(&root, config.as_deref(), &dest, out),
        Command::Query {
            target,
            method,
            expanded,
            list,
            json,
            relevance,
        } => {
            let payload = if is_url(&target) {
                if relevance.is_some() {
                    return Err(CliError::new(2, "--relevance applies to index files only"));
                }
                query_remote(&target, &method, expanded, list).await?
            } else {
                query_offline(Path::new(&target), &method, expanded, list, relevance)?
            };
            let text = if json {
                let mut s = serde_json::to_string(&payload).expect("payload serializes");
                s.push('\n');
                s
            } else {
                render_text(&payload)
            };
            out.write_all(text.as_bytes()).map_err(io_err)
        }
        Command::ExportDot { index, method, depth } => {
            let index = load_index(&index)?;
            let text = match method {
                Some(m) => {
                    let id = resolve(&index, &m)?;
                    dot::neighborhood_dot(&index, id.as_str(), depth).map_err(|e| CliError::new(1, e.to_string()))?
                }
                None => dot::full_dot(&index),
            };
            out.write_all(text.as_bytes()).map_err(io_err)
        }
        Command::Report { index, json } => {
            let index = load_index(&index)?;
            let report = degree_report(&index);
            let text = if json {
                serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
            } else {
                report.render_text()
            };
            out.write_all(text.as_bytes()).map_err(io_err)
        }
        Command::Serve {
            index,
            stdio,
            tcp,
            http,
            host,
            relevance,
        } => cmd_serve(&index, stdio, tcp, http, &host, relevance).await,
        Command::Replay { index, log } => {
            let engine = engine_for(&index, None)?;
            let log = std::fs::File::open(&log)
                .map_err(|e| CliError::new(2, format!("cannot read log {}: {e}", log.display())))?;
            replay(engine, std::io::BufReader::new(log), out)
        }
    }
}

fn is_url(target: &str) -> bool {
    target.starts_with("http://") || target.starts_with("https://")
}

pub fn cmd_index(root: &Path, config: Option<&Path>, dest: &Path, out: &mut dyn Write) -> CliResult {
    if !root.is_dir() {
        return Err(CliError::new(2, format!("project root {} is not a readable directory", root.display())));
    }
    let config = match config {
        Some(p) => IngestConfig::load(p).map_err(|e| CliError::new(2, format!("bad config {}: {e}", p.display())))?,
        None => IngestConfig::default(),
    };
    let started = Instant::now();
    let index = wandercode_core::index_project(root, &config).map_err(|e| match e {
        Error::UnreadableRoot { .. } | Error::BadPattern { .. } => CliError::new(2, e.to_string()),
        e => CliError::new(1, e.to_string()),
    })?;
    index
        .save(dest)
        .map_err(|e| CliError::new(1, format!("cannot write {}: {e}", dest.display())))?;
    let elapsed = started.elapsed();
    info!(ms = elapsed.as_millis() as u64, "indexed");
    let d = index.diagnostics();
    let summary = format!(
        "files: {}\nmethods: {}\nedges: {} ({} call sites)\nexternal calls: {}\nambiguous calls dropped: {}\nwarnings: {}\n",
        d.files,
        d.methods,
        d.edges,
        d.resolved_sites,
        d.external_sites,
        d.ambiguous_sites,
        d.warnings.len()
    );
    out.write_all(summary.as_bytes()).map_err(io_err)?;
    for w in &d.warnings {
        eprintln!("warning: {}: {}", w.file, w.message);
    }
    eprintln!("indexed in {:.2}s", elapsed.as_secs_f64());
    Ok(())
}

pub fn query_offline(
    index: &Path,
    method: &str,
    expanded: bool,
    list: bool,
    relevance: Option<RelevanceArg>,
) -> CliResult<RecommendationsPayload> {
    let engine = engine_for(index, relevance)?;
    let id = resolve(engine.index(), method)?.clone();
    protocol::query(&engine, id.as_str(), expanded, list).map_err(|e| CliError::new(1, e.to_string()))
}

async fn query_remote(base: &str, method: &str, expanded: bool, list: bool) -> CliResult<RecommendationsPayload> {
    let client = HttpClient::new(base);
    client
        .recommendations(method, expanded, list)
        .await
        .map_err(|e| match e {
            ClientError::Api {
                code, near_misses, ..
            } if code == "unknownMethod" => CliError::unknown_method(method, &near_misses),
            e => CliError::new(1, format!("{base}: {e}")),
        })
}

fn entry(class: &str, method: &str, relevance: usize) -> String {
    format!("{class}.{method}({relevance})")
}

fn side(recs: &[RankedRecommendation]) -> String {
    if recs.is_empty() {
        return "(none)".to_string();
    }
    let parts: Vec<String> = recs
        .iter()
        .map(|r| entry(&r.class_name, &r.method_name, r.relevance))
        .collect();
    parts.join(", ")
}

/// Human-readable form of a payload, one line per side.
pub fn render_text(payload: &RecommendationsPayload) -> String {
    let mut s = String::new();
    if let Some(f) = payload.focus() {
        let _ = writeln!(s, "focus: {}", f.id);
    }
    match payload {
        RecommendationsPayload::Graph { callers, callees, .. } => {
            let _ = writeln!(s, "callers: {}", side(callers));
            let _ = writeln!(s, "callees: {}", side(callees));
        }
        RecommendationsPayload::List { items, .. } => {
            let parts: Vec<String> = items
                .iter()
                .map(|i| entry(&i.class_name, &i.method_name, i.relevance))
                .collect();
            let body = if parts.is_empty() { "(none)".to_string() } else { parts.join(", ") };
            let _ = writeln!(s, "list: {body}");
        }
    }
    s
}

/// Runs every line of `log` through one session; returns the output lines.
pub fn replay(engine: Engine, log: impl BufRead, out: &mut dyn Write) -> CliResult {
    let mut session = Session::new(engine);
    for line in log.lines() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        for msg in session.handle_line(&line) {
            writeln!(out, "{}", msg.to_line()).map_err(io_err)?;
        }
    }
    Ok(())
}

async fn cmd_serve(
    index: &Path,
    stdio: bool,
    tcp: Option<u16>,
    http: Option<u16>,
    host: &str,
    relevance: Option<RelevanceArg>,
) -> CliResult {
    let engine = engine_for(index, relevance)?;
    if stdio {
        return wandercode_service::serve_stdio(engine).await.map_err(io_err);
    }
    if tcp.is_none() && http.is_none() {
        return Err(CliError::new(2, "serve needs one of --stdio, --tcp PORT, --http PORT"));
    }
    let bind = |port: u16| async move {
        let listener = TcpListener::bind((host, port))
            .await
            .map_err(|e| CliError::new(2, format!("cannot bind {host}:{port}: {e}")))?;
        let addr = listener.local_addr().map_err(io_err)?;
        CliResult::Ok((listener, addr))
    };
    let mut tasks = tokio::task::JoinSet::new();
    if let Some(port) = tcp {
        let (listener, addr) = bind(port).await?;
        eprintln!("protocol listening on {addr}");
        tasks.spawn(wandercode_service::serve_tcp(engine.clone(), listener));
    }
    if let Some(port) = http {
        let (listener, addr) = bind(port).await?;
        eprintln!("http listening on http://{addr}");
        tasks.spawn(wandercode_service::serve_http(engine.clone(), listener));
    }
    tokio::select! {
        done = tasks.join_next() => match done {
            Some(Ok(Err(e))) => Err(io_err(e)),
            Some(Err(e)) => Err(CliError::new(1, e.to_string())),
            _ => Ok(()),
        },
        _ = tokio::signal::ctrl_c() => Ok(()),
    }
}
