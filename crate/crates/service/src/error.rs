//! Wire errors. Each library error variant maps to one stable `code`.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use typespace_core::analytics::AnalyticsError;
use typespace_core::coords::CoordsError;
use typespace_core::render::RenderError;
use typespace_core::session::{ReplayError, TraceError};
use typespace_core::store::StoreError;
use typespace_core::{EngineError, SpaceError};

use crate::API_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl ToString) -> Self {
        Self {
            status: status.as_u16(),
            code: code.into(),
            message: message.to_string(),
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }

    pub fn bad_request(code: &str, message: impl ToString) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn not_found(code: &str, message: impl ToString) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    pub fn internal(message: impl ToString) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    v: u32,
    error: &'a ApiError,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(Envelope { v: API_VERSION, error: &self })).into_response()
    }
}

pub fn engine_code(e: &EngineError) -> &'static str {
    match e {
        EngineError::NotAStartCorner(_) => "engine.not_a_start_corner",
        EngineError::NotShown(_) => "engine.not_shown",
        EngineError::MaxZoom => "engine.max_zoom",
        EngineError::ShowAllActive => "engine.show_all_active",
        EngineError::NoFineTuneTarget => "engine.no_fine_tune_target",
        EngineError::TargetMismatch { .. } => "engine.target_mismatch",
        EngineError::ValueOutOfRange(_) => "engine.value_out_of_range",
        EngineError::BadAxis(_) => "engine.bad_axis",
    }
}

pub fn trace_code(e: &TraceError) -> &'static str {
    match e {
        TraceError::SequenceGap { .. } => "trace.sequence_gap",
        TraceError::SequenceRegression { .. } => "trace.sequence_regression",
        TraceError::TimeRegression { .. } => "trace.time_regression",
        TraceError::OrderViolation { .. } => "trace.order_violation",
        TraceError::WrongInterface { .. } => "trace.wrong_interface",
        TraceError::Payload { .. } => "trace.payload",
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        Self::bad_request(engine_code(&e), &e)
    }
}

impl From<CoordsError> for ApiError {
    fn from(e: CoordsError) -> Self {
        let code = match e {
            CoordsError::NaN { .. } => "coords.nan",
            CoordsError::BadCorner(_) => "coords.bad_corner",
            CoordsError::BadAxis(_) => "coords.bad_axis",
        };
        Self::bad_request(code, &e)
    }
}

impl From<TraceError> for ApiError {
    fn from(e: TraceError) -> Self {
        Self::bad_request(trace_code(&e), &e)
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match &e {
            StoreError::UnknownSession(_) => Self::not_found("store.unknown_session", &e),
            StoreError::SessionExists(_) => Self::new(StatusCode::CONFLICT, "store.session_exists", &e),
            StoreError::InvalidId(_) => Self::bad_request("store.invalid_id", &e),
            StoreError::Closed(_) => Self::new(StatusCode::CONFLICT, "store.closed", &e),
            StoreError::Trace(t) => Self::bad_request(trace_code(t), &e),
            StoreError::Conflict { seq } => {
                Self::new(StatusCode::CONFLICT, "store.conflict", &e).with_detail(serde_json::json!({ "seq": seq }))
            }
            StoreError::Corrupt { .. } => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "store.corrupt", &e),
            StoreError::Io(_) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "store.io", &e),
        }
    }
}

impl From<ReplayError> for ApiError {
    fn from(e: ReplayError) -> Self {
        match &e {
            ReplayError::HashMismatch { .. } => Self::new(StatusCode::CONFLICT, "replay.hash_mismatch", &e),
            ReplayError::Trace(t) => Self::bad_request(trace_code(t), &e),
            ReplayError::Illegal { seq, kind, .. } => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "replay.illegal", &e)
                .with_detail(serde_json::json!({ "seq": seq, "kind": kind })),
        }
    }
}

impl From<SpaceError> for ApiError {
    fn from(e: SpaceError) -> Self {
        match &e {
            SpaceError::UnknownGlyph(_) => Self::not_found("space.unknown_glyph", &e),
            _ => Self::bad_request("space.invalid", &e),
        }
    }
}

impl From<AnalyticsError> for ApiError {
    fn from(e: AnalyticsError) -> Self {
        let code = match e {
            AnalyticsError::ControlTrace(_) => "analytics.control_trace",
            AnalyticsError::CatalogTrace(_) => "analytics.catalog_trace",
            AnalyticsError::NoCategory(_) => "analytics.no_category",
            AnalyticsError::MissingDownload(_) => "analytics.missing_download",
            AnalyticsError::TooFewTraces(_) => "analytics.too_few_traces",
            AnalyticsError::MixedGroup(_) => "analytics.mixed_group",
        };
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, &e)
    }
}

impl From<RenderError> for ApiError {
    fn from(e: RenderError) -> Self {
        match &e {
            RenderError::Outline(_) => Self::bad_request("render.outline", &e),
            RenderError::UnknownGlyph(_) => Self::not_found("render.unknown_glyph", &e),
            RenderError::BadStep(_) => Self::bad_request("render.bad_step", &e),
        }
    }
}
