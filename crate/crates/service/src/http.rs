//! HTTP/JSON front end.
//!
//! | route | |
//! |---|---|
//! | `GET  /api/hello` | index summary and engine config |
//! | `POST /api/sessions` | open a session, returns `{"sessionId"}` |
//! | `POST /api/sessions/{id}/messages` | one protocol request, returns the reply lines as an array |
//! | `DELETE /api/sessions/{id}` | close a session |
//! | `GET  /api/methods/{id}/recommendations?expanded&list` | offline query |
//! | `GET  /api/methods/{id}/callers`, `/callees` | raw adjacency |
//! | `GET  /api/methods/{id}/dot?depth` | DOT neighborhood |
//! | `GET  /api/lookup?q` | resolve a written method name |
//! | `GET  /api/files/{*path}` | source text |
//! | `GET  /api/report/degree` | degree report |

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tracing::info;
use wandercode_core::protocol::{query, Kind, Message, Session};
use wandercode_core::report::degree_report;
use wandercode_core::{dot, Engine, Error, MethodId};

#[derive(Clone)]
struct AppState {
    engine: Engine,
    sessions: Arc<Mutex<HashMap<u64, Arc<tokio::sync::Mutex<Session>>>>>,
    next_id: Arc<AtomicU64>,
}

#[derive(Debug, Serialize)]
struct ApiError {
    code: &'static str,
    message: String,
    #[serde(rename = "nearMisses", skip_serializing_if = "Vec::is_empty")]
    near_misses: Vec<MethodId>,
}

struct Failure(StatusCode, ApiError);

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

impl Failure {
    fn from_core(engine: &Engine, e: Error) -> Self {
        let (status, code, near_misses) = match &e {
            Error::UnknownMethod(q) => (
                StatusCode::NOT_FOUND,
                "unknownMethod",
                engine.index().near_misses(q, 5).into_iter().cloned().collect(),
            ),
            Error::UnknownFile(_) => (StatusCode::NOT_FOUND, "unknownFile", Vec::new()),
            _ => (StatusCode::BAD_REQUEST, "badRequest", Vec::new()),
        };
        Failure(
            status,
            ApiError {
                code,
                message: e.to_string(),
                near_misses,
            },
        )
    }

    fn no_session(id: u64) -> Self {
        Failure(
            StatusCode::NOT_FOUND,
            ApiError {
                code: "unknownSession",
                message: format!("no session {id}"),
                near_misses: Vec::new(),
            },
        )
    }
}

type ApiResult<T> = Result<T, Failure>;

pub fn router(engine: Engine) -> Router {
    let state = AppState {
        engine,
        sessions: Arc::default(),
        next_id: Arc::new(AtomicU64::new(1)),
    };
    Router::new()
        .route("/api/hello", get(hello))
        .route("/api/sessions", post(open_session))
        .route("/api/sessions/{id}", axum::routing::delete(close_session))
        .route("/api/sessions/{id}/messages", post(session_message))
        .route("/api/methods/{id}/recommendations", get(recommendations))
        .route("/api/methods/{id}/callers", get(callers))
        .route("/api/methods/{id}/callees", get(callees))
        .route("/api/methods/{id}/dot", get(neighborhood_dot))
        .route("/api/lookup", get(lookup))
        .route("/api/files/{*path}", get(file))
        .route("/api/report/degree", get(report))
        .with_state(state)
}

pub async fn serve_http(engine: Engine, listener: TcpListener) -> std::io::Result<()> {
    info!(addr = %listener.local_addr()?, "serving HTTP");
    axum::serve(listener, router(engine)).await
}

async fn hello(State(app): State<AppState>) -> Json<Value> {
    let mut session = Session::new(app.engine.clone());
    let reply = session.handle(Message::new(Kind::Hello, 1, json!({})));
    Json(reply.into_iter().next().map(|m| m.payload).unwrap_or(Value::Null))
}

async fn open_session(State(app): State<AppState>) -> Json<Value> {
    let id = app.next_id.fetch_add(1, Ordering::Relaxed);
    let session = Arc::new(tokio::sync::Mutex::new(Session::new(app.engine.clone())));
    app.sessions.lock().unwrap().insert(id, session);
    Json(json!({ "sessionId": id }))
}

async fn close_session(State(app): State<AppState>, Path(id): Path<u64>) -> ApiResult<StatusCode> {
    match app.sessions.lock().unwrap().remove(&id) {
        Some(_) => Ok(StatusCode::NO_CONTENT),
        None => Err(Failure::no_session(id)),
    }
}

async fn session_message(
    State(app): State<AppState>,
    Path(id): Path<u64>,
    body: String,
) -> ApiResult<Json<Vec<Message>>> {
    let session = app
        .sessions
        .lock()
        .unwrap()
        .get(&id)
        .cloned()
        .ok_or_else(|| Failure::no_session(id))?;
    let mut session = session.lock().await;
    Ok(Json(session.handle_line(&body)))
}

#[derive(Debug, Deserialize)]
struct QueryParams {
    #[serde(default)]
    expanded: bool,
    #[serde(default)]
    list: bool,
}

async fn recommendations(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<QueryParams>,
) -> ApiResult<Json<Value>> {
    let payload = query(&app.engine, &id, q.expanded, q.list).map_err(|e| Failure::from_core(&app.engine, e))?;
    Ok(Json(serde_json::to_value(payload).expect("payload serializes")))
}

fn adjacency(app: &AppState, id: &str, callers: bool) -> ApiResult<Json<Vec<MethodId>>> {
    let index = app.engine.index();
    let resolved = index.lookup(id).map_err(|e| Failure::from_core(&app.engine, e))?;
    let set = if callers {
        index.callers(resolved.as_str())
    } else {
        index.callees(resolved.as_str())
    }
    .map_err(|e| Failure::from_core(&app.engine, e))?;
    Ok(Json(set.iter().cloned().collect()))
}

async fn callers(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Vec<MethodId>>> {
    adjacency(&app, &id, true)
}

async fn callees(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Vec<MethodId>>> {
    adjacency(&app, &id, false)
}

#[derive(Debug, Deserialize)]
struct DepthParams {
    depth: Option<usize>,
}

async fn neighborhood_dot(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<DepthParams>,
) -> ApiResult<String> {
    dot::neighborhood_dot(app.engine.index(), &id, q.depth.unwrap_or(1)).map_err(|e| Failure::from_core(&app.engine, e))
}

#[derive(Debug, Deserialize)]
struct LookupParams {
    q: String,
}

async fn lookup(State(app): State<AppState>, Query(q): Query<LookupParams>) -> ApiResult<Json<Value>> {
    let id = app
        .engine
        .index()
        .lookup(&q.q)
        .map_err(|e| Failure::from_core(&app.engine, e))?;
    Ok(Json(json!({ "id": id })))
}

async fn file(State(app): State<AppState>, Path(path): Path<String>) -> ApiResult<String> {
    let index = app.engine.index();
    match index.file_content(&path) {
        Ok(Some(text)) => Ok(text.to_string()),
        Ok(None) => Err(Failure(
            StatusCode::NOT_FOUND,
            ApiError {
                code: "noSource",
                message: format!("no source stored for {path}"),
                near_misses: Vec::new(),
            },
        )),
        Err(e) => Err(Failure::from_core(&app.engine, e)),
    }
}

async fn report(State(app): State<AppState>) -> Json<Value> {
    Json(serde_json::to_value(degree_report(app.engine.index())).expect("report serializes"))
}
