//! HTTP/JSON service over datasets and exploration sessions.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::{Body, Bytes};
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::compression::CompressionLayer;
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::trace::TraceLayer;

use crate::amcs::{rasterize_amcs, AmcsOrdering, Palette};
use crate::csng::{build_csng, Csng, CsngConfig};
use crate::session::{node_color, Command, Session, SessionConfig, SessionTranscript};
use crate::streamline::{filter_short, load_streamlines, resample_uniform, InputFormat, StreamlineSet};
use crate::{Error, Level};

pub const DEFAULT_MAX_UPLOAD: usize = 512 * 1024 * 1024;
pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApiErrorCode {
    BadRequest,
    NotFound,
    Conflict,
    TooLarge,
    Internal,
}

impl ApiErrorCode {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiErrorCode::BadRequest => StatusCode::BAD_REQUEST,
            ApiErrorCode::NotFound => StatusCode::NOT_FOUND,
            ApiErrorCode::Conflict => StatusCode::CONFLICT,
            ApiErrorCode::TooLarge => StatusCode::PAYLOAD_TOO_LARGE,
            ApiErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: ApiErrorCode,
    pub message: String,
    #[serde(default)]
    pub detail: Value,
}

impl ApiError {
    pub fn new(code: ApiErrorCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            detail: Value::Null,
        }
    }

    fn not_found(what: &str, id: &str) -> Self {
        Self::new(ApiErrorCode::NotFound, format!("{what} '{id}' not found"))
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NotALeaf(_) | Error::NotInternal(_) | Error::NotSiblings | Error::InvalidOperation(_) => {
                ApiErrorCode::Conflict
            }
            Error::InvalidNode(_) => ApiErrorCode::NotFound,
            Error::Io(_) => ApiErrorCode::Internal,
            _ => ApiErrorCode::BadRequest,
        };
        Self::new(code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.code.status(), Json(self)).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub max_upload_bytes: usize,
    pub cors_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            max_upload_bytes: DEFAULT_MAX_UPLOAD,
            cors_origin: None,
        }
    }
}

/// An uploaded dataset with its graphs cached per level and configuration.
pub struct Dataset {
    pub set: Arc<StreamlineSet>,
    graphs: Mutex<HashMap<(Level, String), Arc<Csng>>>,
}

impl Dataset {
    pub fn new(set: StreamlineSet) -> Self {
        Self {
            set: Arc::new(set),
            graphs: Mutex::new(HashMap::new()),
        }
    }

    pub fn graph(&self, level: Level, cfg: &CsngConfig) -> crate::Result<Arc<Csng>> {
        let key = (level, serde_json::to_string(cfg).expect("config serializes"));
        if let Some(g) = self.graphs.lock().expect("graph cache lock").get(&key) {
            return Ok(Arc::clone(g));
        }
        let g = Arc::new(build_csng(&self.set, level, cfg)?);
        self.graphs
            .lock()
            .expect("graph cache lock")
            .entry(key)
            .or_insert_with(|| Arc::clone(&g));
        Ok(g)
    }
}

/// One session: a writer lock that orders commands and the last committed
/// snapshot that readers see.
struct SessionSlot {
    writer: tokio::sync::Mutex<()>,
    snapshot: RwLock<Arc<Session>>,
    dataset: Arc<Dataset>,
}

impl SessionSlot {
    fn current(&self) -> Arc<Session> {
        Arc::clone(&self.snapshot.read().expect("snapshot lock"))
    }
}

#[derive(Default)]
pub struct AppState {
    config: ServiceConfig,
    datasets: RwLock<HashMap<String, Arc<Dataset>>>,
    sessions: RwLock<HashMap<String, Arc<SessionSlot>>>,
    next_dataset: AtomicU64,
    next_session: AtomicU64,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Arc<Self> {
        Arc::new(Self {
            config,
            ..Default::default()
        })
    }

    fn dataset(&self, id: &str) -> ApiResult<Arc<Dataset>> {
        self.datasets
            .read()
            .expect("dataset map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("dataset", id))
    }

    fn session(&self, id: &str) -> ApiResult<Arc<SessionSlot>> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("session", id))
    }

    fn register_session(&self, dataset: Arc<Dataset>, build: impl FnOnce(String) -> crate::Result<Session>) -> ApiResult<Arc<Session>> {
        let id = format!("s{}", self.next_session.fetch_add(1, Ordering::Relaxed) + 1);
        let session = Arc::new(build(id.clone())?);
        let slot = Arc::new(SessionSlot {
            writer: tokio::sync::Mutex::new(()),
            snapshot: RwLock::new(Arc::clone(&session)),
            dataset,
        });
        self.sessions.write().expect("session map lock").insert(id, slot);
        Ok(session)
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let cors = match &state.config.cors_origin {
        Some(origin) => match HeaderValue::from_str(origin) {
            Ok(v) => CorsLayer::new().allow_origin(AllowOrigin::exact(v)),
            Err(_) => CorsLayer::new(),
        }
        .allow_methods(tower_http::cors::Any)
        .allow_headers(tower_http::cors::Any),
        None => CorsLayer::new(),
    };
    Router::new()
        .route("/health", get(health))
        .route("/datasets", post(upload_dataset))
        .route("/datasets/{id}/sessions", post(create_session))
        .route("/datasets/{id}/sessions/import", post(import_session))
        .route("/datasets/{id}/geometry", get(geometry))
        .route("/sessions/{id}/commands", post(command))
        .route("/sessions/{id}/summary_graph", get(summary_graph))
        .route("/sessions/{id}/colors", get(colors))
        .route("/sessions/{id}/amcs", get(amcs))
        .route("/sessions/{id}/metrics", get(metrics))
        .route("/sessions/{id}/export", get(export))
        .layer(DefaultBodyLimit::disable())
        .layer(CompressionLayer::new())
        .layer(cors)
        .layer(TraceLayer::new_for_http())
        .with_state(state)
}

/// Binds `listen` and serves until Ctrl-C.
pub async fn serve(listen: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let app = router(AppState::new(config));
    let listener = tokio::net::TcpListener::bind(listen).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn health() -> Json<Value> {
    Json(json!({"status": "ok"}))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(ApiErrorCode::Internal, e.to_string()))?
}

#[derive(Debug, Default, Deserialize)]
struct UploadParams {
    resample: Option<f64>,
    min_segments: Option<usize>,
}

async fn upload_dataset(
    State(state): State<Arc<AppState>>,
    Query(params): Query<UploadParams>,
    headers: HeaderMap,
    body: Body,
) -> ApiResult<Response> {
    let cap = state.config.max_upload_bytes;
    let bytes: Bytes = axum::body::to_bytes(body, cap).await.map_err(|_| {
        ApiError::new(ApiErrorCode::TooLarge, format!("upload exceeds the {cap}-byte limit"))
    })?;
    let format = match headers.get(header::CONTENT_TYPE).and_then(|v| v.to_str().ok()) {
        Some(ct) if ct.starts_with("text/plain") => InputFormat::Text,
        _ => InputFormat::Json,
    };
    let set = blocking(move || {
        let (mut set, _) = load_streamlines(&bytes[..], format)?;
        if let Some(spacing) = params.resample {
            set = resample_uniform(&set, spacing)?;
        }
        if let Some(min) = params.min_segments {
            set = filter_short(&set, min)?;
        }
        Ok(set)
    })
    .await?;
    let id = format!("d{}", state.next_dataset.fetch_add(1, Ordering::Relaxed) + 1);
    let (lo, hi) = set.bounding_box();
    let body = json!({
        "dataset_id": id,
        "n_streamlines": set.streamlines().len(),
        "n_segments": set.segments().len(),
        "bbox": [lo, hi],
    });
    state
        .datasets
        .write()
        .expect("dataset map lock")
        .insert(id, Arc::new(Dataset::new(set)));
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

fn session_body(s: &Session) -> Value {
    let p = s.root_partition();
    json!({
        "session_id": s.id,
        "level": p.level,
        "n_communities": p.n_communities,
        "modularity": p.modularity,
        "leaves": s.leaves().iter().map(|l| json!({"node_id": l.node_id, "size": l.members.len()})).collect::<Vec<_>>(),
    })
}

fn parse_json<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::new(ApiErrorCode::BadRequest, e.to_string()))
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    let dataset = state.dataset(&id)?;
    let config: SessionConfig = parse_json(&body)?;
    let session = blocking(move || {
        let ds = Arc::clone(&dataset);
        state.register_session(Arc::clone(&dataset), move |sid| {
            Session::create_with(sid, Arc::clone(&ds.set), config, &mut |level, cfg| ds.graph(level, cfg))
        })
    })
    .await?;
    Ok((StatusCode::CREATED, Json(session_body(&session))).into_response())
}

async fn import_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    let dataset = state.dataset(&id)?;
    let transcript: SessionTranscript = parse_json(&body)?;
    let session = blocking(move || {
        let set = Arc::clone(&dataset.set);
        state.register_session(dataset, move |sid| Session::replay(sid, set, &transcript))
    })
    .await?;
    Ok((StatusCode::CREATED, Json(session_body(&session))).into_response())
}

async fn command(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<Value>> {
    let slot = state.session(&id)?;
    let cmd: Command = parse_json(&body)?;
    let _guard = slot.writer.lock().await;
    let current = slot.current();
    let (next, outcome) = blocking(move || {
        let mut next = (*current).clone();
        let outcome = next.apply(cmd)?;
        Ok((next, outcome))
    })
    .await?;
    let summary = next.summary_graph();
    *slot.snapshot.write().expect("snapshot lock") = Arc::new(next);
    Ok(Json(json!({"outcome": outcome, "summary_graph": summary})))
}

async fn summary_graph(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = state.session(&id)?.current();
    let summary = blocking(move || Ok(s.summary_graph())).await?;
    Ok(Json(serde_json::to_value(summary).expect("summary serializes")))
}

async fn colors(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = state.session(&id)?.current();
    let colors = s.element_colors();
    let palette: HashMap<String, [u8; 3]> = s
        .leaves()
        .iter()
        .map(|l| (l.node_id.to_string(), node_color(l.node_id)))
        .collect();
    Ok(Json(json!({"colors": colors, "palette": palette})))
}

#[derive(Debug, Deserialize)]
struct AmcsParams {
    node: Option<u64>,
    #[serde(default)]
    full: bool,
    max_pixels: Option<usize>,
    #[serde(default)]
    ordering: AmcsOrdering,
    #[serde(default)]
    format: Option<String>,
    #[serde(default)]
    palette: Palette,
}

async fn amcs(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(p): Query<AmcsParams>,
) -> ApiResult<Response> {
    let s = state.session(&id)?.current();
    if p.node.is_none() && !p.full {
        return Err(ApiError::new(
            ApiErrorCode::BadRequest,
            "select a node or pass full=true for the whole dataset",
        ));
    }
    let max_pixels = p.max_pixels.unwrap_or(1024);
    let ppm = p.format.as_deref() == Some("ppm");
    blocking(move || {
        let m = s.amcs(p.node, p.ordering)?;
        if ppm {
            let img = rasterize_amcs(&m, max_pixels, p.palette)?;
            return Ok(([(header::CONTENT_TYPE, "image/x-portable-pixmap")], img.to_ppm()).into_response());
        }
        if p.node.is_none() && m.n > max_pixels {
            return Err(ApiError::new(
                ApiErrorCode::TooLarge,
                format!("matrix of {} rows exceeds max_pixels {max_pixels}; request format=ppm", m.n),
            ));
        }
        Ok(Json(serde_json::to_value(&m).expect("amcs serializes")).into_response())
    })
    .await
}

#[derive(Debug, Deserialize)]
struct GeometryParams {
    decimate: Option<usize>,
}

async fn geometry(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(p): Query<GeometryParams>,
) -> ApiResult<Json<Value>> {
    let ds = state.dataset(&id)?;
    let d = p.decimate.unwrap_or(1);
    if d == 0 {
        return Err(ApiError::new(ApiErrorCode::BadRequest, "decimate must be at least 1"));
    }
    let lines: Vec<Vec<crate::Point3>> = ds
        .set
        .streamlines()
        .iter()
        .map(|s| {
            let mut pts: Vec<_> = s.points.iter().step_by(d).copied().collect();
            if (s.points.len() - 1) % d != 0 {
                pts.push(*s.points.last().expect("non-empty streamline"));
            }
            pts
        })
        .collect();
    Ok(Json(json!({"streamlines": lines, "labels": ds.set.labels()})))
}

#[derive(Debug, Deserialize)]
struct MetricsParams {
    labels: Option<String>,
}

async fn metrics(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(p): Query<MetricsParams>,
) -> ApiResult<Json<Value>> {
    let slot = state.session(&id)?;
    let s = slot.current();
    let labels: Vec<i64> = match p.labels.as_deref() {
        None | Some("dataset") => slot
            .dataset
            .set
            .labels()
            .map(<[i64]>::to_vec)
            .ok_or_else(|| ApiError::new(ApiErrorCode::BadRequest, "dataset has no labels"))?,
        Some(list) => list
            .split(',')
            .map(|v| v.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| ApiError::new(ApiErrorCode::BadRequest, format!("labels: {e}")))?,
    };
    let m = blocking(move || Ok(s.metrics(&labels)?)).await?;
    Ok(Json(serde_json::to_value(m).expect("metrics serialize")))
}

async fn export(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SessionTranscript>> {
    Ok(Json(state.session(&id)?.current().transcript()))
}
