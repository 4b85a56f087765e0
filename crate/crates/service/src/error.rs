use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::{json, Value};

use sonowork_core::ingest::IngestError;
use sonowork_core::synth::{ConfigError, SynthError};
use sonowork_core::training::TrainingError;
use sonowork_core::workbench::WorkbenchError;

use crate::store::StoreError;

/// Error response with a `{code, message, detail}` JSON body.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub detail: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>, detail: Value) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            detail,
        }
    }

    pub fn bad_json(err: serde_json::Error) -> Self {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_json",
            err.to_string(),
            json!({"line": err.line(), "column": err.column()}),
        )
    }

    pub fn parse(err: &IngestError) -> Self {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "parse_error",
            err.to_string(),
            json!({"kind": err.kind(), "row": err.row(), "column": err.column()}),
        )
    }

    pub fn not_found(what: &'static str, err: StoreError) -> Self {
        match err {
            StoreError::NotFound(id) => ApiError::new(
                StatusCode::NOT_FOUND,
                what,
                format!("no such record: {id}"),
                json!({"id": id}),
            ),
            other => other.into(),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(err: StoreError) -> Self {
        tracing::error!("storage failure: {err}");
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "storage_error", err.to_string(), Value::Null)
    }
}

fn config_error(err: &ConfigError) -> ApiError {
    ApiError::new(
        StatusCode::UNPROCESSABLE_ENTITY,
        "invalid_config",
        err.to_string(),
        json!({"field": err.field()}),
    )
}

impl From<WorkbenchError> for ApiError {
    fn from(err: WorkbenchError) -> Self {
        match &err {
            WorkbenchError::Select(e) => ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "invalid_selection",
                err.to_string(),
                json!({"kind": e.kind(), "column": e.column(), "row": e.row()}),
            ),
            WorkbenchError::Transform(e) => ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "transform_failed",
                err.to_string(),
                json!({"step": e.step, "kind": e.source.kind()}),
            ),
            WorkbenchError::Config(e) => config_error(e),
            WorkbenchError::Synth(e) => match e {
                SynthError::Config(c) => config_error(c),
                other => ApiError::new(
                    StatusCode::UNPROCESSABLE_ENTITY,
                    "synthesis_failed",
                    err.to_string(),
                    json!({"kind": other.kind()}),
                ),
            },
        }
    }
}

impl From<TrainingError> for ApiError {
    fn from(err: TrainingError) -> Self {
        let (status, code, detail) = match &err {
            TrainingError::IllegalEvent { phase, event } => (
                StatusCode::CONFLICT,
                "illegal_event",
                json!({"phase": phase, "event": event}),
            ),
            TrainingError::SkipDisabled => (StatusCode::CONFLICT, "skip_disabled", Value::Null),
            TrainingError::ReplayDisabled => (StatusCode::CONFLICT, "replay_disabled", Value::Null),
            TrainingError::NotCompleted => (StatusCode::CONFLICT, "not_completed", Value::Null),
            TrainingError::EmptySession => (StatusCode::CONFLICT, "empty_session", Value::Null),
            TrainingError::BadBlock(b) => (StatusCode::UNPROCESSABLE_ENTITY, "bad_block", json!({"block": b})),
            TrainingError::BadCount => (StatusCode::UNPROCESSABLE_ENTITY, "bad_count", Value::Null),
            TrainingError::Config(c) => return config_error(c),
        };
        ApiError::new(status, code, err.to_string(), detail)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "code": self.code,
            "message": self.message,
            "detail": self.detail,
        });
        (self.status, Json(body)).into_response()
    }
}
