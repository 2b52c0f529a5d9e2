//! HTTP facade over the renderer: document storage per session, cached
//! renders, and latest-wins scheduling of render requests.

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use pvg_core::document::{parse_document, serialize_document, validate, Diagnostic, PvgDocument};
use pvg_core::render::{encode_png, solve_scene, BitDepth, RenderError, RenderOptions, SolvedScene, Viewport, ZoomRequest};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

/// Largest accepted document body.
pub const MAX_BODY_BYTES: usize = 10 * 1024 * 1024;
/// Largest accepted output side.
pub const MAX_RENDER_SIDE: usize = 8192;
const MAX_CACHED_IMAGES: usize = 32;
const MAX_CACHED_SCENES: usize = 4;

pub const FACTORIZATIONS_HEADER: &str = "x-pvg-factorizations";
pub const CONTENT_HASH_HEADER: &str = "x-content-hash";
pub const CACHE_HEADER: &str = "x-pvg-cache";

type RenderKey = (usize, usize, Option<[u64; 4]>);

#[derive(Clone)]
struct Rendered {
    png: Bytes,
    hash: String,
}

#[derive(Default)]
struct SessionData {
    doc: PvgDocument,
    blocking: Vec<Diagnostic>,
    /// bumped on every stored document
    version: u64,
    scenes: HashMap<(usize, usize), Arc<SolvedScene>>,
    images: HashMap<RenderKey, Rendered>,
}

impl SessionData {
    fn new(doc: PvgDocument) -> Self {
        let mut s = SessionData::default();
        s.replace(doc);
        s
    }

    fn replace(&mut self, doc: PvgDocument) -> Vec<Diagnostic> {
        let diags = validate(&doc);
        self.blocking = diags.iter().filter(|d| d.is_error()).cloned().collect();
        self.doc = doc;
        self.version += 1;
        self.scenes.clear();
        self.images.clear();
        diags
    }
}

struct Session {
    data: Mutex<SessionData>,
    /// one render at a time per session
    render_lock: tokio::sync::Mutex<()>,
    /// ticket of the newest render request
    latest: AtomicU64,
    factorizations: AtomicU64,
}

impl Session {
    fn new(doc: PvgDocument) -> Self {
        Session {
            data: Mutex::new(SessionData::new(doc)),
            render_lock: tokio::sync::Mutex::new(()),
            latest: AtomicU64::new(0),
            factorizations: AtomicU64::new(0),
        }
    }
}

/// Shared service state. Sessions live in memory and are persisted as
/// `<dir>/<id>.pvg.json`; unknown ids are looked up on disk.
#[derive(Clone)]
pub struct AppState {
    dir: PathBuf,
    sessions: Arc<Mutex<HashMap<String, Arc<Session>>>>,
}

impl AppState {
    pub fn new(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(AppState {
            dir,
            sessions: Arc::default(),
        })
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.pvg.json"))
    }

    async fn session(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        check_id(id)?;
        if let Some(s) = self.sessions.lock().unwrap().get(id) {
            return Ok(s.clone());
        }
        let bytes = match tokio::fs::read(self.path(id)).await {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(ApiError::NotFound),
            Err(e) => return Err(ApiError::Internal(e.to_string())),
        };
        let doc = parse_document(&bytes).map_err(|e| ApiError::Internal(format!("stored document {id}: {e}")))?;
        let mut map = self.sessions.lock().unwrap();
        Ok(map.entry(id.to_string()).or_insert_with(|| Arc::new(Session::new(doc))).clone())
    }

    async fn persist(&self, id: &str, doc: &PvgDocument) -> Result<(), ApiError> {
        let path = self.path(id);
        let tmp = path.with_extension("json.tmp");
        let io = |e: std::io::Error| ApiError::Internal(e.to_string());
        tokio::fs::write(&tmp, serialize_document(doc)).await.map_err(io)?;
        tokio::fs::rename(&tmp, &path).await.map_err(io)
    }
}

#[derive(Debug)]
enum ApiError {
    NotFound,
    BadRequest(String),
    Unprocessable(String),
    Conflict { reason: &'static str, diagnostics: Vec<Diagnostic> },
    Internal(String),
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<&'a [Diagnostic]>,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, msg, reason, diags) = match &self {
            ApiError::NotFound => (StatusCode::NOT_FOUND, "unknown session", None, None),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m.as_str(), None, None),
            ApiError::Unprocessable(m) => (StatusCode::UNPROCESSABLE_ENTITY, m.as_str(), None, None),
            ApiError::Conflict { reason, diagnostics } => {
                (StatusCode::CONFLICT, "cannot render", Some(*reason), Some(diagnostics.as_slice()))
            }
            ApiError::Internal(m) => {
                log::error!("{m}");
                (StatusCode::INTERNAL_SERVER_ERROR, m.as_str(), None, None)
            }
        };
        let body = ErrorBody { error: msg, reason, diagnostics: diags };
        (status, Json(body)).into_response()
    }
}

fn check_id(id: &str) -> Result<(), ApiError> {
    let ok = !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_');
    if ok {
        Ok(())
    } else {
        Err(ApiError::BadRequest(format!("bad session id {id:?}")))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/session", post(create_session))
        .route("/api/doc/{id}", get(get_document).put(put_document))
        .route("/api/render/{id}", get(render))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state)
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

#[derive(Serialize, Deserialize)]
pub struct SessionCreated {
    pub id: String,
}

/// New session holding the default empty document.
async fn create_session(State(state): State<AppState>) -> Result<(StatusCode, Json<SessionCreated>), ApiError> {
    let id = uuid::Uuid::new_v4().simple().to_string();
    let doc = PvgDocument::default();
    state.persist(&id, &doc).await?;
    state.sessions.lock().unwrap().insert(id.clone(), Arc::new(Session::new(doc)));
    Ok((StatusCode::CREATED, Json(SessionCreated { id })))
}

async fn get_document(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = state.session(&id).await?;
    let bytes = serialize_document(&session.data.lock().unwrap().doc);
    Ok(([(header::CONTENT_TYPE, "application/json")], bytes).into_response())
}

#[derive(Serialize, Deserialize)]
pub struct PutReport {
    pub diagnostics: Vec<Diagnostic>,
    pub renderable: bool,
}

/// Stores a document (creating the session if needed) and reports its diagnostics.
/// Documents with blocking errors are stored but refuse to render.
async fn put_document(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Json<PutReport>, ApiError> {
    check_id(&id)?;
    let doc = parse_document(&body).map_err(|e| ApiError::Unprocessable(e.to_string()))?;
    state.persist(&id, &doc).await?;
    let session = match state.session(&id).await {
        Ok(s) => s,
        Err(ApiError::NotFound) => {
            let mut map = state.sessions.lock().unwrap();
            map.entry(id.clone()).or_insert_with(|| Arc::new(Session::new(PvgDocument::default()))).clone()
        }
        Err(e) => return Err(e),
    };
    let mut data = session.data.lock().unwrap();
    let diagnostics = data.replace(doc);
    Ok(Json(PutReport {
        renderable: data.blocking.is_empty(),
        diagnostics,
    }))
}

#[derive(Deserialize)]
pub struct RenderParams {
    w: Option<String>,
    h: Option<String>,
    viewport: Option<String>,
}

fn parse_side(v: &Option<String>, default: u32, name: &str) -> Result<usize, ApiError> {
    let n = match v {
        None => default as usize,
        Some(s) => s.parse::<usize>().map_err(|_| ApiError::BadRequest(format!("{name}: not a positive integer")))?,
    };
    if n == 0 || n > MAX_RENDER_SIDE {
        return Err(ApiError::BadRequest(format!("{name} must be in 1..={MAX_RENDER_SIDE}")));
    }
    Ok(n)
}

fn parse_viewport(s: &str) -> Result<Viewport, ApiError> {
    let v: Vec<f64> = s.split(',').map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad_viewport())?;
    match v[..] {
        [x, y, width, height] if v.iter().all(|c| c.is_finite()) => Ok(Viewport { x, y, width, height }),
        _ => Err(bad_viewport()),
    }
}

fn bad_viewport() -> ApiError {
    ApiError::BadRequest("viewport must be x,y,w,h".into())
}

fn png_response(r: &Rendered, factorizations: u64, cache: &'static str, req: &HeaderMap) -> Response {
    let etag = format!("\"{}\"", r.hash);
    let mut headers = HeaderMap::new();
    headers.insert(header::ETAG, HeaderValue::from_str(&etag).unwrap());
    headers.insert(CONTENT_HASH_HEADER, HeaderValue::from_str(&r.hash).unwrap());
    headers.insert(FACTORIZATIONS_HEADER, HeaderValue::from(factorizations));
    headers.insert(CACHE_HEADER, HeaderValue::from_static(cache));
    let fresh = req
        .get(header::IF_NONE_MATCH)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.split(',').any(|t| t.trim() == etag || t.trim() == "*"));
    if fresh {
        return (StatusCode::NOT_MODIFIED, headers).into_response();
    }
    headers.insert(header::CONTENT_TYPE, HeaderValue::from_static("image/png"));
    (headers, r.png.clone()).into_response()
}

/// Renders the stored document. Without a viewport the scene is solved at
/// `w × h`; with one, the canvas-resolution solution is sampled over the
/// window, so panning and zooming never refactorize.
async fn render(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(params): Query<RenderParams>,
    req_headers: HeaderMap,
) -> Result<Response, ApiError> {
    let session = state.session(&id).await?;
    let (canvas_w, canvas_h) = {
        let data = session.data.lock().unwrap();
        (data.doc.canvas.width, data.doc.canvas.height)
    };
    let w = parse_side(&params.w, canvas_w, "w")?;
    let h = parse_side(&params.h, canvas_h, "h")?;
    let viewport = params.viewport.as_deref().map(parse_viewport).transpose()?;
    let key: RenderKey = (w, h, viewport.map(|v| [v.x, v.y, v.width, v.height].map(f64::to_bits)));

    let ticket = session.latest.fetch_add(1, Ordering::SeqCst) + 1;
    let _guard = session.render_lock.lock().await;
    if session.latest.load(Ordering::SeqCst) != ticket {
        return Err(ApiError::Conflict { reason: "superseded", diagnostics: Vec::new() });
    }

    let (doc, version, scene, base) = {
        let data = session.data.lock().unwrap();
        if !data.blocking.is_empty() {
            return Err(ApiError::Conflict { reason: "invalid-document", diagnostics: data.blocking.clone() });
        }
        if let Some(r) = data.images.get(&key) {
            let f = session.factorizations.load(Ordering::SeqCst);
            return Ok(png_response(r, f, "hit", &req_headers));
        }
        let base = match viewport {
            None => (w, h),
            Some(_) => (data.doc.canvas.width as usize, data.doc.canvas.height as usize),
        };
        (data.doc.clone(), data.version, data.scenes.get(&base).cloned(), base)
    };

    let worker = session.clone();
    let (scene, rendered) = tokio::task::spawn_blocking(move || -> Result<_, RenderError> {
        let scene = match scene {
            Some(s) => s,
            None => {
                let s = solve_scene(&doc, base.0, base.1)?;
                worker.factorizations.fetch_add(s.factorizations as u64, Ordering::SeqCst);
                Arc::new(s)
            }
        };
        let img = match viewport {
            None => scene.render(RenderOptions::default()),
            Some(viewport) => scene.render_zoom(&ZoomRequest { viewport, width: w, height: h })?,
        };
        let png = encode_png(&img, BitDepth::Eight);
        let hash = hex::encode(Sha256::digest(&png));
        Ok((scene, Rendered { png: Bytes::from(png), hash }))
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))?
    .map_err(|e| match e {
        RenderError::Invalid(d) => ApiError::Conflict { reason: "invalid-document", diagnostics: d },
        e => ApiError::BadRequest(e.to_string()),
    })?;

    let mut data = session.data.lock().unwrap();
    if data.version == version {
        if data.scenes.len() >= MAX_CACHED_SCENES {
            data.scenes.clear();
        }
        data.scenes.insert(base, scene);
        if data.images.len() >= MAX_CACHED_IMAGES {
            data.images.clear();
        }
        data.images.insert(key, rendered.clone());
    }
    let f = session.factorizations.load(Ordering::SeqCst);
    Ok(png_response(&rendered, f, "miss", &req_headers))
}
