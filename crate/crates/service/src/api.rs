//! JSON API over the catalog engine, session store and analytics.
//!
//! The server holds no display state. Clients report committed events and
//! every batch is checked by replaying the whole session before it is stored.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;
use typespace_core::analytics::{AnalysisReport, AnalyticsConfig, TraceReport};
use typespace_core::catalog::{open_catalog, ring_step, OpeningSet, MAX_ZOOM};
use typespace_core::hex::project;
use typespace_core::render::{overlay_grid_svg, text_svg, OverlayGrid, OverlayPalette, TextLayout};
use typespace_core::session::{replay, InterfaceKind, ReplayOutcome, SessionHeader, TRACE_VERSION};
use typespace_core::space::{AxisMeta, SpaceDocument};
use typespace_core::store::{Ack, SessionStore};
use typespace_core::{Coords, Outline, Point, SessionEvent, SessionTrace, Space};

use crate::error::ApiError;
use crate::API_VERSION;

type ApiResult<T> = Result<T, ApiError>;

struct Inner {
    space: Space,
    store: SessionStore,
    /// Serializes event batches per session so replay checks see a stable prefix.
    batches: Mutex<HashMap<String, Arc<Mutex<()>>>>,
    analytics: AnalyticsConfig,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn new(space: Space, store: SessionStore) -> Self {
        Self(Arc::new(Inner {
            space,
            store,
            batches: Mutex::new(HashMap::new()),
            analytics: AnalyticsConfig::default(),
        }))
    }

    pub fn space(&self) -> &Space {
        &self.0.space
    }

    pub fn store(&self) -> &SessionStore {
        &self.0.store
    }

    fn batch_lock(&self, id: &str) -> Arc<Mutex<()>> {
        self.0
            .batches
            .lock()
            .expect("batch map lock")
            .entry(id.to_string())
            .or_default()
            .clone()
    }
}

pub fn router(state: AppState, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/space", get(get_space))
        .route("/api/instance", get(get_instance))
        .route("/api/text", get(get_text))
        .route("/api/neighbors", get(get_neighbors))
        .route("/api/session", post(create_session))
        .route("/api/session/{id}", get(get_session))
        .route("/api/session/{id}/events", post(append_events))
        .route("/api/session/{id}/close", post(close_session))
        .route("/api/analysis/session/{id}", get(session_analysis))
        .route("/api/analysis/cohort", get(cohort_analysis))
        .route("/api/download", get(download))
        .fallback(|| async { ApiError::not_found("request.no_route", "no such endpoint") })
        .with_state(state);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

fn query<T>(q: Result<Query<T>, QueryRejection>) -> ApiResult<T> {
    q.map(|Query(t)| t)
        .map_err(|e| ApiError::bad_request("request.bad_query", e.body_text()))
}

fn body<T>(b: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    b.map(|Json(t)| t)
        .map_err(|e| ApiError::bad_request("request.bad_body", e.body_text()))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

fn xyz(x: f64, y: f64, z: f64) -> ApiResult<Coords> {
    for v in [x, y, z] {
        if !(0.0..=1.0).contains(&v) {
            return Err(ApiError::bad_request("coords.out_of_range", format!("{v} outside [0, 1]")));
        }
    }
    Ok(Coords::new([x, y, z])?)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpaceInfo {
    pub v: u32,
    pub space_hash: String,
    pub axes: [AxisMeta; 3],
    pub glyphs: Vec<String>,
    pub opening: OpeningSet,
}

async fn get_space(State(s): State<AppState>) -> Json<SpaceInfo> {
    Json(SpaceInfo {
        v: API_VERSION,
        space_hash: s.space().space_hash().into(),
        axes: s.space().axes().clone(),
        glyphs: s.space().glyph_names().map(String::from).collect(),
        opening: open_catalog(s.space()),
    })
}

#[derive(Debug, Deserialize)]
struct InstanceQuery {
    glyph: String,
    x: f64,
    y: f64,
    z: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceResponse {
    pub v: u32,
    pub coords: Coords,
    pub descriptor: [String; 3],
    pub outline: Outline,
}

async fn get_instance(
    State(s): State<AppState>,
    q: Result<Query<InstanceQuery>, QueryRejection>,
) -> ApiResult<Json<InstanceResponse>> {
    let q = query(q)?;
    let coords = xyz(q.x, q.y, q.z)?;
    Ok(Json(InstanceResponse {
        v: API_VERSION,
        coords,
        descriptor: s.space().descriptor_words(&coords),
        outline: s.space().interpolate_glyph(&q.glyph, &coords)?,
    }))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
struct TextQuery {
    text: String,
    x: f64,
    y: f64,
    z: f64,
    size: Option<f64>,
    letter_spacing: Option<f64>,
    line_spacing: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TextResponse {
    pub v: u32,
    pub coords: Coords,
    pub descriptor: [String; 3],
    pub svg: String,
    pub line_widths: Vec<f64>,
    pub warnings: Vec<String>,
}

async fn get_text(
    State(s): State<AppState>,
    q: Result<Query<TextQuery>, QueryRejection>,
) -> ApiResult<Json<TextResponse>> {
    let q = query(q)?;
    let coords = xyz(q.x, q.y, q.z)?;
    let d = TextLayout::default();
    let layout = TextLayout {
        size_px: q.size.unwrap_or(d.size_px),
        letter_spacing: q.letter_spacing.unwrap_or(d.letter_spacing),
        line_spacing: q.line_spacing.unwrap_or(d.line_spacing),
    };
    if !(layout.size_px > 0.0 && layout.size_px.is_finite()) {
        return Err(ApiError::bad_request("request.bad_size", "size must be positive"));
    }
    let r = text_svg(s.space(), &coords, &q.text, layout);
    Ok(Json(TextResponse {
        v: API_VERSION,
        coords,
        descriptor: s.space().descriptor_words(&coords),
        svg: r.svg,
        line_widths: r.line_widths,
        warnings: r.warnings,
    }))
}

#[derive(Debug, Deserialize)]
struct NeighborQuery {
    x: f64,
    y: f64,
    z: f64,
    level: u8,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Neighbor {
    pub coords: Coords,
    pub pos: Point,
    pub midpoint: Coords,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NeighborsResponse {
    pub v: u32,
    pub center: Coords,
    pub level: u8,
    pub step: f64,
    pub neighbors: Vec<Neighbor>,
}

/// Lattice neighbors of a point in the six screen directions at the ring
/// step of `level`, independent of any display. Per direction the candidate
/// moving along one axis is preferred; its screen twin moving against the
/// other two axes is used when the first leaves the cube.
pub fn lattice_neighbors(center: &Coords, level: u8) -> Vec<Coords> {
    let s = ring_step(level);
    let c = center.as_array();
    let inside = |p: [f64; 3]| p.iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v));
    let mut out = Vec::new();
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            let mut primary = c;
            primary[axis] += sign * s;
            let mut twin = c;
            for (i, v) in twin.iter_mut().enumerate() {
                if i != axis {
                    *v -= sign * s;
                }
            }
            if let Some(p) = [primary, twin].into_iter().find(|p| inside(*p)) {
                out.push(Coords::new(p).expect("finite"));
            }
        }
    }
    out
}

async fn get_neighbors(q: Result<Query<NeighborQuery>, QueryRejection>) -> ApiResult<Json<NeighborsResponse>> {
    let q = query(q)?;
    if q.level > MAX_ZOOM {
        return Err(ApiError::bad_request(
            "request.bad_level",
            format!("level must be at most {MAX_ZOOM}"),
        ));
    }
    let center = xyz(q.x, q.y, q.z)?;
    let neighbors = lattice_neighbors(&center, q.level)
        .into_iter()
        .map(|n| Neighbor {
            coords: n,
            pos: project(&n),
            midpoint: center.midpoint(&n),
        })
        .collect();
    Ok(Json(NeighborsResponse {
        v: API_VERSION,
        center,
        level: q.level,
        step: ring_step(q.level),
        neighbors,
    }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NewSession {
    #[serde(default)]
    pub session_id: Option<String>,
    pub user_id: String,
    pub task_id: String,
    pub interface_kind: InterfaceKind,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionCreated {
    pub v: u32,
    pub session_id: String,
    pub space_hash: String,
}

async fn create_session(
    State(s): State<AppState>,
    b: Result<Json<NewSession>, JsonRejection>,
) -> ApiResult<Json<SessionCreated>> {
    let req = body(b)?;
    let header = SessionHeader {
        v: TRACE_VERSION,
        session_id: req.session_id.unwrap_or_else(|| uuid::Uuid::new_v4().to_string()),
        user_id: req.user_id,
        task_id: req.task_id,
        interface_kind: req.interface_kind,
        space_hash: s.space().space_hash().into(),
    };
    let id = header.session_id.clone();
    let st = s.clone();
    blocking(move || Ok(st.store().create_session(header)?)).await?;
    tracing::info!(session = %id, "session opened");
    Ok(Json(SessionCreated {
        v: API_VERSION,
        session_id: id,
        space_hash: s.space().space_hash().into(),
    }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EventBatch {
    pub events: Vec<SessionEvent>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BatchAck {
    pub v: u32,
    pub acks: Vec<Ack>,
    pub last_seq: u64,
    pub replay: ReplayOutcome,
}

async fn append_events(
    State(s): State<AppState>,
    Path(id): Path<String>,
    b: Result<Json<EventBatch>, JsonRejection>,
) -> ApiResult<Json<BatchAck>> {
    let batch = body(b)?;
    blocking(move || {
        let lock = s.batch_lock(&id);
        let _guard = lock.lock().expect("batch lock");
        let candidate = s.store().preview_append(&id, &batch.events)?;
        let outcome = replay(s.space(), &candidate)?;
        let acks = batch
            .events
            .into_iter()
            .map(|e| s.store().append_event(&id, e))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Json(BatchAck {
            v: API_VERSION,
            acks,
            last_seq: candidate.events.last().map_or(0, |e| e.seq),
            replay: outcome,
        }))
    })
    .await
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionClosed {
    pub v: u32,
    pub session_id: String,
    pub closed: bool,
}

async fn close_session(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SessionClosed>> {
    blocking(move || {
        let lock = s.batch_lock(&id);
        let _guard = lock.lock().expect("batch lock");
        s.store().close(&id)?;
        Ok(Json(SessionClosed {
            v: API_VERSION,
            session_id: id,
            closed: true,
        }))
    })
    .await
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionView {
    pub v: u32,
    pub trace: SessionTrace,
    pub closed: bool,
    pub replay: ReplayOutcome,
}

async fn get_session(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    blocking(move || {
        let trace = s.store().load_trace(&id)?;
        let closed = s.store().is_closed(&id)?;
        let replay = replay(s.space(), &trace)?;
        Ok(Json(SessionView {
            v: API_VERSION,
            trace,
            closed,
            replay,
        }))
    })
    .await
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionAnalysis {
    pub v: u32,
    pub report: TraceReport,
}

async fn session_analysis(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SessionAnalysis>> {
    blocking(move || {
        let trace = s.store().load_trace(&id)?;
        match trace.header.interface_kind {
            InterfaceKind::Catalog => {
                s.0.analytics.classify(&trace)?;
            }
            InterfaceKind::Control => {
                s.0.analytics.detect_extreme_sweeps(&trace)?;
            }
        }
        Ok(Json(SessionAnalysis {
            v: API_VERSION,
            report: s.0.analytics.trace_report(&trace),
        }))
    })
    .await
}

#[derive(Debug, Default, Deserialize)]
struct CohortQuery {
    task: Option<String>,
    user: Option<String>,
    format: Option<String>,
}

/// Cell radius of overlay grids served over the API.
const GRID_RADIUS: f64 = 30.0;

async fn cohort_analysis(
    State(s): State<AppState>,
    q: Result<Query<CohortQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let q = query(q)?;
    let svg = match q.format.as_deref() {
        None | Some("json") => false,
        Some("svg") => true,
        Some(other) => return Err(ApiError::bad_request("request.bad_format", format!("unknown format {other:?}"))),
    };
    let report: AnalysisReport = blocking(move || {
        let traces: Vec<SessionTrace> = s
            .store()
            .load_all()?
            .into_iter()
            .filter(|t| q.task.as_ref().is_none_or(|task| &t.header.task_id == task))
            .filter(|t| q.user.as_ref().is_none_or(|user| &t.header.user_id == user))
            .collect();
        Ok(s.0.analytics.analyze(&traces))
    })
    .await?;
    if svg {
        let grid = OverlayGrid::from_report(&report, GRID_RADIUS);
        let doc = overlay_grid_svg(&grid, GRID_RADIUS, &OverlayPalette::default());
        return Ok(([(header::CONTENT_TYPE, "image/svg+xml")], doc).into_response());
    }
    Ok(Json(report).into_response())
}

#[derive(Debug, Deserialize)]
struct DownloadQuery {
    x: f64,
    y: f64,
    z: f64,
    format: Option<String>,
    text: Option<String>,
}

async fn download(
    State(s): State<AppState>,
    q: Result<Query<DownloadQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let q = query(q)?;
    let coords = xyz(q.x, q.y, q.z)?;
    match q.format.as_deref() {
        None | Some("json") => {
            let doc: SpaceDocument = s.space().instance_document(&coords);
            Ok((
                StatusCode::OK,
                [(header::CONTENT_DISPOSITION, "attachment; filename=\"instance.json\"")],
                Json(doc),
            )
                .into_response())
        }
        Some("svg") => {
            let sample: String = q.text.unwrap_or_else(|| s.space().glyph_names().filter(|g| g.chars().count() == 1).collect());
            let r = text_svg(s.space(), &coords, &sample, TextLayout::default());
            Ok(([(header::CONTENT_TYPE, "image/svg+xml")], r.svg).into_response())
        }
        Some(other) => Err(ApiError::bad_request("request.bad_format", format!("unknown format {other:?}"))),
    }
}
