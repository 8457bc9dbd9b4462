//! Local HTTP service backing the explorer UI.
//!
//! One session holds the current model and fold state. Readers clone an
//! `Arc` snapshot; recompiles and fold updates build a new snapshot and
//! publish it with a single swap.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::abstraction::{abstract_diagram, AbstractionDiagram};
use crate::context::{connectivity, entanglement_history, placement_context, provenance, suggest_placements};
use crate::dsl::{compile_with, NodeId, Params};
use crate::error::Error;
use crate::model::{CircuitModel, QubitId};
use crate::render::{
    render_abstraction, render_component, render_connectivity, render_placement, render_provenance, RenderTheme,
};
use crate::segment::{segment, ComponentDiagram, FoldState};

/// Fold depth applied to a freshly compiled program: root and circuit open.
pub const INITIAL_FOLD_DEPTH: usize = 2;

struct Diagrams {
    component: ComponentDiagram,
    abstraction: AbstractionDiagram,
}

type DiagramCache = Mutex<HashMap<BTreeSet<NodeId>, Arc<Diagrams>>>;

pub struct Session {
    pub model_id: String,
    pub model: Arc<CircuitModel>,
    pub fold: FoldState,
    cache: Arc<DiagramCache>,
}

impl Session {
    pub fn new(model_id: String, model: CircuitModel) -> Self {
        let fold = FoldState::to_depth(&model.tree, INITIAL_FOLD_DEPTH);
        Session {
            model_id,
            model: Arc::new(model),
            fold,
            cache: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    fn diagrams(&self) -> Arc<Diagrams> {
        let key = self.fold.unfolded.clone();
        if let Some(d) = self.cache.lock().expect("cache lock").get(&key) {
            return d.clone();
        }
        let component = segment(&self.model, &self.fold);
        let abstraction = abstract_diagram(&component, &self.model.tree);
        let d = Arc::new(Diagrams { component, abstraction });
        self.cache.lock().expect("cache lock").insert(key, d.clone());
        d
    }

    /// Same model and cache with another fold state.
    fn with_fold(&self, fold: FoldState) -> Self {
        Session {
            model_id: self.model_id.clone(),
            model: self.model.clone(),
            fold,
            cache: self.cache.clone(),
        }
    }
}

/// Stable id of a compiled `(source, params)` pair.
pub fn model_id(source: &str, params: &Params) -> String {
    let mut h = Sha256::new();
    h.update(source.as_bytes());
    for (k, v) in params {
        h.update([0]);
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.to_string().as_bytes());
    }
    let mut out = String::with_capacity(32);
    for b in &h.finalize()[..16] {
        let _ = write!(out, "{b:02x}");
    }
    out
}

pub struct AppState {
    session: RwLock<Option<Arc<Session>>>,
    /// Serializes writers so fold updates never race a recompile.
    writer: tokio::sync::Mutex<()>,
    pub theme: RenderTheme,
}

impl AppState {
    pub fn new(theme: RenderTheme) -> Self {
        AppState {
            session: RwLock::new(None),
            writer: tokio::sync::Mutex::new(()),
            theme,
        }
    }

    pub fn current(&self) -> Option<Arc<Session>> {
        self.session.read().expect("session lock").clone()
    }

    fn publish(&self, s: Session) -> Arc<Session> {
        let s = Arc::new(s);
        *self.session.write().expect("session lock") = Some(s.clone());
        s
    }

    /// Compiles and installs a program, returning its model id.
    pub fn load(&self, source: &str, params: &Params) -> crate::Result<String> {
        let model = compile_with(source, params)?;
        let id = model_id(source, params);
        self.publish(Session::new(id.clone(), model));
        Ok(id)
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: json!({ "error": message.into() }),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match &e {
            Error::Syntax { .. } | Error::Semantic { .. } | Error::Compile { .. } => {
                let loc = e.location().unwrap_or_default();
                ApiError {
                    status: StatusCode::UNPROCESSABLE_ENTITY,
                    body: json!({
                        "error": e.to_string(),
                        "diagnostics": [{ "line": loc.line, "col": loc.col, "message": e.message() }],
                    }),
                }
            }
            Error::UnknownNode(_) | Error::QubitOutOfRange { .. } => Self::not_found(e.to_string()),
            Error::Io(_) | Error::Theme(_) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
            Error::Domain(_) | Error::Json(_) => Self::bad_request(e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult = std::result::Result<Response, ApiError>;

fn json_body(v: impl serde::Serialize) -> Response {
    Json(v).into_response()
}

fn svg_body(svg: String) -> Response {
    ([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response()
}

fn session_for(state: &AppState, id: &str) -> std::result::Result<Arc<Session>, ApiError> {
    state
        .current()
        .filter(|s| s.model_id == id)
        .ok_or_else(|| ApiError::not_found(format!("unknown model {id}")))
}

fn parse_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> std::result::Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed request: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProgramRequest {
    source: String,
    #[serde(default)]
    params: Params,
}

async fn post_program(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let req: ProgramRequest = parse_body(&body)?;
    let _w = state.writer.lock().await;
    let model = compile_with(&req.source, &req.params)?;
    let id = model_id(&req.source, &req.params);
    let s = state.publish(Session::new(id.clone(), model));
    Ok(json_body(json!({
        "modelId": id,
        "qubits": s.model.qubit_count,
        "gates": s.model.gates.len(),
    })))
}

fn fold_json(s: &Session) -> Value {
    json!({ "unfolded": s.fold.unfolded.iter().map(|n| n.0).collect::<Vec<_>>() })
}

async fn get_structure(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let s = session_for(&state, &id)?;
    let mut v = serde_json::to_value(&s.model.tree).map_err(Error::from)?;
    v["unfolded"] = fold_json(&s)["unfolded"].clone();
    Ok(json_body(v))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FoldRequest {
    unfolded: Option<Vec<u32>>,
    depth: Option<usize>,
}

async fn post_fold(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let req: FoldRequest = parse_body(&body)?;
    let _w = state.writer.lock().await;
    let s = session_for(&state, &id)?;
    let fold = match (req.unfolded, req.depth) {
        (Some(ids), None) => FoldState::with_unfolded(ids.into_iter().map(NodeId)),
        (None, Some(depth)) => FoldState::to_depth(&s.model.tree, depth),
        _ => return Err(ApiError::bad_request("give exactly one of unfolded or depth")),
    };
    fold.check(&s.model.tree)?;
    let s = state.publish(s.with_fold(fold));
    Ok(json_body(fold_json(&s)))
}

#[derive(Deserialize, Default)]
struct ViewQuery {
    format: Option<String>,
    qubit: Option<u32>,
    threshold: Option<u32>,
    gate: Option<u32>,
    node: Option<u32>,
}

impl ViewQuery {
    fn svg(&self) -> std::result::Result<bool, ApiError> {
        match self.format.as_deref() {
            None | Some("json") => Ok(false),
            Some("svg") => Ok(true),
            Some(other) => Err(ApiError::bad_request(format!("unknown format {other}"))),
        }
    }
}

async fn get_component(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ViewQuery>,
) -> ApiResult {
    let s = session_for(&state, &id)?;
    let d = s.diagrams();
    Ok(if q.svg()? {
        svg_body(render_component(&d.component, &state.theme))
    } else {
        json_body(&d.component)
    })
}

async fn get_abstraction(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ViewQuery>,
) -> ApiResult {
    let s = session_for(&state, &id)?;
    let d = s.diagrams();
    Ok(if q.svg()? {
        svg_body(render_abstraction(&d.abstraction, &state.theme))
    } else {
        json_body(&d.abstraction)
    })
}

async fn get_provenance(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ViewQuery>,
) -> ApiResult {
    let s = session_for(&state, &id)?;
    let qubit = q.qubit.ok_or_else(|| ApiError::bad_request("missing qubit"))?;
    let tl = provenance(&s.model, &s.diagrams().component, QubitId(qubit))?;
    Ok(if q.svg()? {
        svg_body(render_provenance(&tl, &state.theme))
    } else {
        json_body(&tl)
    })
}

async fn get_placement(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ViewQuery>,
) -> ApiResult {
    let s = session_for(&state, &id)?;
    let d = s.diagrams();
    let ctx = placement_context(&s.model, &d.component, q.threshold.unwrap_or(1))?;
    Ok(if q.svg()? {
        svg_body(render_placement(&d.component, &ctx, &state.theme))
    } else {
        json_body(&ctx)
    })
}

async fn get_suggest(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ViewQuery>,
) -> ApiResult {
    let s = session_for(&state, &id)?;
    let gate = q.gate.ok_or_else(|| ApiError::bad_request("missing gate"))?;
    let d = s.diagrams();
    if d.component.gate(gate).is_none() {
        return Err(ApiError::not_found(format!("unknown super-gate {gate}")));
    }
    let out = suggest_placements(&s.model, &d.component, gate)?;
    Ok(json_body(json!({ "gate": gate, "candidates": out })))
}

async fn get_connectivity(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ViewQuery>,
) -> ApiResult {
    let s = session_for(&state, &id)?;
    let scope = q.node.map(NodeId);
    let m = connectivity(&s.model, scope)?;
    Ok(if q.svg()? {
        let full = connectivity(&s.model, None)?;
        let hist = entanglement_history(&s.model);
        let highlight = scope.map(|_| &m);
        svg_body(render_connectivity(&full, highlight, &hist, &state.theme))
    } else {
        json_body(m.to_json())
    })
}

async fn get_entanglement(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let s = session_for(&state, &id)?;
    Ok(json_body(entanglement_history(&s.model)))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/program", post(post_program))
        .route("/model/{id}/structure", get(get_structure))
        .route("/model/{id}/fold", post(post_fold))
        .route("/model/{id}/component", get(get_component))
        .route("/model/{id}/abstraction", get(get_abstraction))
        .route("/model/{id}/provenance", get(get_provenance))
        .route("/model/{id}/placement", get(get_placement))
        .route("/model/{id}/suggest", get(get_suggest))
        .route("/model/{id}/connectivity", get(get_connectivity))
        .route("/model/{id}/entanglement", get(get_entanglement))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, state: Arc<AppState>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}
