//! Newline-delimited JSON session protocol.
//!
//! Every request line carries `kind`, a strictly increasing `seq` and a
//! kind-specific `payload`, and receives exactly one reply with the same
//! `seq`. Replies to `cursorMoved`, `pin`, `expand` and `listMode` may be
//! preceded by a `recommendations` event (seq 0) when the published set, or
//! its presentation, changed.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{design_dimensions, DesignChoice, EngineConfig};
use crate::engine::{Engine, FocusMethod, NavigationTarget, RecommendationSet, SessionState};
use crate::error::Error;
use crate::graph::Diagnostics;
use crate::model::MethodId;
use crate::rank::{ranking_order, renumber, RankedRecommendation};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Kind {
    Hello,
    CursorMoved,
    Pin,
    Expand,
    Select,
    GetFile,
    ListMode,
    Recommendations,
    Navigation,
    FileContent,
    Error,
    Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub kind: Kind,
    pub seq: u64,
    #[serde(default)]
    pub payload: Value,
}

impl Message {
    pub fn new(kind: Kind, seq: u64, payload: impl Serialize) -> Self {
        Self {
            kind,
            seq,
            payload: serde_json::to_value(payload).expect("payload serializes"),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("message serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ErrorCode {
    Malformed,
    UnknownKind,
    BadSeq,
    BadPayload,
    UnknownFile,
    UnknownMethod,
    NotRecommended,
    NoSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorPayload {
    pub code: ErrorCode,
    pub message: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CursorPayload {
    pub file: String,
    pub offset: usize,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
pub struct PinPayload {
    #[serde(default = "yes")]
    pub pinned: bool,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ExpandPayload {
    #[serde(default = "yes")]
    pub expanded: bool,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ListModePayload {
    #[serde(default = "yes")]
    pub enabled: bool,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SelectPayload {
    pub id: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct GetFilePayload {
    pub file: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HelloPayload {
    pub server: &'static str,
    pub protocol_version: u32,
    pub index_version: String,
    pub files: Vec<String>,
    pub methods: usize,
    pub edges: usize,
    pub config: EngineConfig,
    pub design: Vec<DesignChoice>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StatePayload {
    pub pinned: bool,
    pub expanded: bool,
    pub list_mode: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CursorReply {
    pub focus: Option<MethodId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileContentPayload {
    pub file: String,
    pub content: String,
}

/// One row of the single-list presentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ListEntry {
    pub id: MethodId,
    pub method_name: String,
    pub class_name: String,
    pub relevance: usize,
    pub rank: usize,
}

/// Callers and callees of a set merged into one relevance-ordered list, cut
/// to twice the per-side cap.
pub fn merged_list(set: &RecommendationSet, cap: usize) -> Vec<ListEntry> {
    let mut all: Vec<RankedRecommendation> = set.callers.iter().chain(set.callees.iter()).cloned().collect();
    all.sort_by(|a, b| a.id.cmp(&b.id).then(b.relevance.cmp(&a.relevance)));
    all.dedup_by(|later, first| later.id == first.id);
    all.sort_by(ranking_order);
    all.truncate(2 * cap);
    renumber(&mut all);
    all.into_iter()
        .map(|r| ListEntry {
            id: r.id,
            method_name: r.method_name,
            class_name: r.class_name,
            relevance: r.relevance,
            rank: r.rank,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "camelCase")]
pub enum RecommendationsPayload {
    #[serde(rename_all = "camelCase")]
    Graph {
        pinned: bool,
        expanded: bool,
        focus: Option<FocusMethod>,
        callers: Vec<RankedRecommendation>,
        callees: Vec<RankedRecommendation>,
    },
    #[serde(rename_all = "camelCase")]
    List {
        pinned: bool,
        expanded: bool,
        focus: Option<FocusMethod>,
        items: Vec<ListEntry>,
    },
}

impl RecommendationsPayload {
    pub fn focus(&self) -> Option<&FocusMethod> {
        match self {
            Self::Graph { focus, .. } | Self::List { focus, .. } => focus.as_ref(),
        }
    }
}

/// Shapes a recommendation set for the graph or the list presentation.
pub fn render(
    set: Option<&RecommendationSet>,
    pinned: bool,
    expanded: bool,
    list_mode: bool,
    cap: usize,
) -> RecommendationsPayload {
    let focus = set.map(|s| s.focus.clone());
    if list_mode {
        RecommendationsPayload::List {
            pinned,
            expanded,
            focus,
            items: set.map(|s| merged_list(s, cap)).unwrap_or_default(),
        }
    } else {
        RecommendationsPayload::Graph {
            pinned,
            expanded,
            focus,
            callers: set.map(|s| s.callers.clone()).unwrap_or_default(),
            callees: set.map(|s| s.callees.clone()).unwrap_or_default(),
        }
    }
}

/// Recommendations for a method named directly rather than by cursor.
pub fn query(engine: &Engine, method: &str, expanded: bool, list_mode: bool) -> crate::Result<RecommendationsPayload> {
    let id = engine.index().lookup(method)?.clone();
    let set = engine.recommend(id.as_str(), expanded)?;
    Ok(render(Some(&set), false, expanded, list_mode, engine.config().cap(expanded)))
}

/// Protocol state of one connection over a shared engine.
#[derive(Debug)]
pub struct Session {
    engine: Engine,
    state: SessionState,
    list_mode: bool,
    last_seq: u64,
}

fn error(seq: u64, code: ErrorCode, message: impl Into<String>) -> Message {
    Message::new(
        Kind::Error,
        seq,
        ErrorPayload {
            code,
            message: message.into(),
        },
    )
}

fn engine_error(seq: u64, e: Error) -> Message {
    let code = match &e {
        Error::UnknownFile(_) => ErrorCode::UnknownFile,
        Error::UnknownMethod(_) => ErrorCode::UnknownMethod,
        Error::NotRecommended(_) => ErrorCode::NotRecommended,
        _ => ErrorCode::BadPayload,
    };
    error(seq, code, e.to_string())
}

impl Session {
    pub fn new(engine: Engine) -> Self {
        let state = engine.new_session();
        Self {
            engine,
            state,
            list_mode: false,
            last_seq: 0,
        }
    }

    pub fn state(&self) -> &SessionState {
        &self.state
    }

    pub fn list_mode(&self) -> bool {
        self.list_mode
    }

    /// The current set as it would be published in the active mode.
    pub fn render(&self) -> RecommendationsPayload {
        let cap = self.engine.config().cap(self.state.expanded);
        render(
            self.state.current.as_ref(),
            self.state.pinned,
            self.state.expanded,
            self.list_mode,
            cap,
        )
    }

    fn event(&self) -> Message {
        Message::new(Kind::Recommendations, 0, self.render())
    }

    fn status(&self) -> StatePayload {
        StatePayload {
            pinned: self.state.pinned,
            expanded: self.state.expanded,
            list_mode: self.list_mode,
        }
    }

    /// Handles one raw protocol line.
    pub fn handle_line(&mut self, line: &str) -> Vec<Message> {
        let value: Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => return vec![error(0, ErrorCode::Malformed, e.to_string())],
        };
        let seq = value.get("seq").and_then(Value::as_u64);
        let Some(seq) = seq else {
            return vec![error(0, ErrorCode::Malformed, "missing or non-integer seq")];
        };
        let kind = match value.get("kind") {
            Some(k) => match serde_json::from_value::<Kind>(k.clone()) {
                Ok(kind) => kind,
                Err(_) => return vec![error(seq, ErrorCode::UnknownKind, format!("unknown kind {k}"))],
            },
            None => return vec![error(seq, ErrorCode::Malformed, "missing kind")],
        };
        let payload = value.get("payload").cloned().unwrap_or(Value::Null);
        self.handle(Message { kind, seq, payload })
    }

    pub fn handle(&mut self, msg: Message) -> Vec<Message> {
        let seq = msg.seq;
        if seq == 0 || seq <= self.last_seq {
            return vec![error(
                seq,
                ErrorCode::BadSeq,
                format!("seq must be positive and greater than {}", self.last_seq),
            )];
        }
        self.last_seq = seq;
        let payload = if msg.payload.is_null() {
            Value::Object(Default::default())
        } else {
            msg.payload
        };
        match self.dispatch(msg.kind, seq, payload) {
            Ok(out) => out,
            Err(reply) => vec![reply],
        }
    }

    fn dispatch(&mut self, kind: Kind, seq: u64, payload: Value) -> Result<Vec<Message>, Message> {
        fn parse<T: serde::de::DeserializeOwned>(seq: u64, payload: Value) -> Result<T, Message> {
            serde_json::from_value(payload).map_err(|e| error(seq, ErrorCode::BadPayload, e.to_string()))
        }
        let engine = self.engine.clone();
        let mut out = Vec::new();
        match kind {
            Kind::Hello => {
                let index = engine.index();
                out.push(Message::new(
                    Kind::Hello,
                    seq,
                    HelloPayload {
                        server: "wandercode",
                        protocol_version: PROTOCOL_VERSION,
                        index_version: index.version().to_string(),
                        files: index.files().map(str::to_string).collect(),
                        methods: index.len(),
                        edges: index.edges().len(),
                        config: *engine.config(),
                        design: design_dimensions(),
                    },
                ));
            }
            Kind::CursorMoved => {
                let p: CursorPayload = parse(seq, payload)?;
                let changed = engine
                    .on_cursor_moved(&mut self.state, &p.file, p.offset)
                    .map_err(|e| engine_error(seq, e))?;
                if changed {
                    out.push(self.event());
                }
                let focus = if self.state.pinned {
                    self.state.current.as_ref().map(|s| s.focus.id.clone())
                } else {
                    engine.focus_from_cursor(&p.file, p.offset).map_err(|e| engine_error(seq, e))?
                };
                out.push(Message::new(Kind::CursorMoved, seq, CursorReply { focus }));
            }
            Kind::Pin => {
                let p: PinPayload = parse(seq, payload)?;
                if engine.set_pinned(&mut self.state, p.pinned).map_err(|e| engine_error(seq, e))? {
                    out.push(self.event());
                }
                out.push(Message::new(Kind::Pin, seq, self.status()));
            }
            Kind::Expand => {
                let p: ExpandPayload = parse(seq, payload)?;
                if engine
                    .set_expanded(&mut self.state, p.expanded)
                    .map_err(|e| engine_error(seq, e))?
                {
                    out.push(self.event());
                }
                out.push(Message::new(Kind::Expand, seq, self.status()));
            }
            Kind::ListMode => {
                let p: ListModePayload = parse(seq, payload)?;
                let changed = self.list_mode != p.enabled;
                self.list_mode = p.enabled;
                if changed {
                    out.push(self.event());
                }
                out.push(Message::new(Kind::ListMode, seq, self.status()));
            }
            Kind::Select => {
                let p: SelectPayload = parse(seq, payload)?;
                let target: NavigationTarget =
                    engine.on_select(&self.state, &p.id).map_err(|e| engine_error(seq, e))?;
                out.push(Message::new(Kind::Navigation, seq, target));
            }
            Kind::GetFile => {
                let p: GetFilePayload = parse(seq, payload)?;
                let content = engine
                    .index()
                    .file_content(&p.file)
                    .map_err(|e| engine_error(seq, e))?
                    .ok_or_else(|| error(seq, ErrorCode::NoSource, format!("no source stored for {}", p.file)))?;
                out.push(Message::new(
                    Kind::FileContent,
                    seq,
                    FileContentPayload {
                        file: p.file,
                        content: content.to_string(),
                    },
                ));
            }
            Kind::Diagnostics => {
                let d: &Diagnostics = engine.index().diagnostics();
                out.push(Message::new(Kind::Diagnostics, seq, d));
            }
            Kind::Recommendations | Kind::Navigation | Kind::FileContent | Kind::Error => {
                return Err(error(
                    seq,
                    ErrorCode::UnknownKind,
                    format!("{kind:?} is a server message, not a request"),
                ));
            }
        }
        Ok(out)
    }
}
