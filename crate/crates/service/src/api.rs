//! Route handlers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use sonowork_core::synth::{render_plot, write_wav, SonifyConfig};
use sonowork_core::training::{
    generate_block, score_session, Modality, Phase, SessionEvent, SessionOptions, SessionState, SessionReport,
};
use sonowork_core::workbench::{self, PLOT_HEIGHT, PLOT_WIDTH};
use sonowork_core::{parse_table, ParseOptions, TransformSpec};

use crate::error::ApiError;
use crate::store::{Store, StoredSession};

type SessionSlot = Arc<tokio::sync::Mutex<Option<StoredSession>>>;

/// Shared handler state: the store plus one lock (and cached state) per session.
pub struct AppState {
    store: Store,
    sessions: Mutex<HashMap<String, SessionSlot>>,
}

impl AppState {
    pub fn new(store: Store) -> Self {
        AppState {
            store,
            sessions: Mutex::new(HashMap::new()),
        }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    fn slot(&self, id: &str) -> SessionSlot {
        let mut map = self.sessions.lock().expect("session map poisoned");
        map.entry(id.to_string()).or_default().clone()
    }

    fn forget(&self, id: &str) {
        self.sessions.lock().expect("session map poisoned").remove(id);
    }

    /// Runs `f` on the session while holding its exclusive lock.
    async fn with_session<T>(
        &self,
        id: &str,
        f: impl FnOnce(&Store, &mut StoredSession) -> Result<T, ApiError>,
    ) -> Result<T, ApiError> {
        let slot = self.slot(id);
        let mut guard = slot.lock().await;
        if guard.is_none() {
            match self.store.session(id) {
                Ok(record) => *guard = Some(record),
                Err(e) => {
                    drop(guard);
                    self.forget(id);
                    return Err(ApiError::not_found("session_not_found", e));
                }
            }
        }
        f(&self.store, guard.as_mut().expect("loaded above"))
    }
}

pub type Shared = Arc<AppState>;

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(ApiError::bad_json)
}

fn bytes_response(content_type: &'static str, body: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, content_type)], body).into_response()
}

pub async fn health() -> Json<Value> {
    Json(json!({"status": "ok", "version": env!("CARGO_PKG_VERSION")}))
}

#[derive(Debug, Deserialize)]
pub struct UploadQuery {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    decimal_comma: bool,
}

#[derive(Debug, Serialize)]
struct DatasetSummary {
    id: String,
    name: String,
    columns: Vec<String>,
    row_count: usize,
}

pub async fn upload_dataset(
    State(app): State<Shared>,
    Query(query): Query<UploadQuery>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let options = ParseOptions {
        decimal_comma: query.decimal_comma,
        ..ParseOptions::default()
    };
    let table = parse_table(&body, &options).map_err(|e| ApiError::parse(&e))?;
    let name = query.name.unwrap_or_else(|| "dataset".to_string());
    let record = app.store.insert_dataset(name, table)?;
    let summary = DatasetSummary {
        id: record.id,
        name: record.name,
        columns: record.table.column_names().iter().map(|s| s.to_string()).collect(),
        row_count: record.table.row_count(),
    };
    Ok((StatusCode::CREATED, Json(summary)).into_response())
}

pub async fn get_dataset(State(app): State<Shared>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let record = app
        .store
        .dataset(&id)
        .map_err(|e| ApiError::not_found("dataset_not_found", e))?;
    Ok(Json(json!({
        "id": record.id,
        "name": record.name,
        "created_at": record.created_at,
        "columns": record.table.column_names(),
        "row_count": record.table.row_count(),
        "data": record.table,
    })))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderRequest {
    dataset_id: String,
    #[serde(default)]
    x_col: Option<String>,
    y_col: String,
    #[serde(default)]
    transform: TransformSpec,
    #[serde(default)]
    config: SonifyConfig,
}

pub async fn sonify(State(app): State<Shared>, body: Bytes) -> Result<Response, ApiError> {
    let req: RenderRequest = parse_body(&body)?;
    let record = app
        .store
        .dataset(&req.dataset_id)
        .map_err(|e| ApiError::not_found("dataset_not_found", e))?;
    let wav = workbench::render_wav(&record.table, req.x_col.as_deref(), &req.y_col, &req.transform, &req.config)?;
    Ok(bytes_response("audio/wav", wav))
}

pub async fn plot(State(app): State<Shared>, body: Bytes) -> Result<Response, ApiError> {
    let req: RenderRequest = parse_body(&body)?;
    let record = app
        .store
        .dataset(&req.dataset_id)
        .map_err(|e| ApiError::not_found("dataset_not_found", e))?;
    let svg = workbench::render_svg(&record.table, req.x_col.as_deref(), &req.y_col, &req.transform)?;
    Ok(bytes_response("image/svg+xml", svg))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    block: u32,
    per_class_count: usize,
    seed: u64,
    #[serde(default)]
    modality: Modality,
    #[serde(default = "yes")]
    allow_skip_intro: bool,
    #[serde(default = "yes")]
    allow_replay: bool,
    #[serde(default)]
    config: SonifyConfig,
    /// Keep only the first `trials` stimuli of the shuffled block.
    #[serde(default)]
    trials: Option<usize>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Serialize)]
struct SessionView<'a> {
    id: &'a str,
    state: &'a SessionState,
    /// "Correct" / "Incorrect" while the answer's feedback is showing.
    feedback: Option<&'static str>,
}

fn session_view(record: &StoredSession) -> Json<Value> {
    let feedback = match record.state.phase {
        Phase::Feedback => record.state.last_response().map(|r| r.feedback_text()),
        _ => None,
    };
    Json(
        serde_json::to_value(SessionView {
            id: &record.id,
            state: &record.state,
            feedback,
        })
        .expect("session state serializes"),
    )
}

pub async fn create_session(State(app): State<Shared>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateSession = parse_body(&body)?;
    let mut stimuli = generate_block(req.block, req.per_class_count, req.seed, &req.config)?;
    if let Some(trials) = req.trials {
        if trials == 0 || trials > stimuli.len() {
            return Err(ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "bad_trials",
                format!("trials must be between 1 and the block size {}", stimuli.len()),
                json!({"trials": trials, "block_size": stimuli.len()}),
            ));
        }
        stimuli.truncate(trials);
    }
    for s in &mut stimuli {
        s.set_modality(req.modality);
    }
    let state = SessionState::new(
        stimuli,
        SessionOptions {
            allow_skip_intro: req.allow_skip_intro,
            allow_replay: req.allow_replay,
        },
    )?;
    let record = app.store.insert_session(state)?;
    let view = session_view(&record);
    let slot = app.slot(&record.id);
    *slot.lock().await = Some(record);
    Ok((StatusCode::CREATED, view).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventRequest {
    event: SessionEvent,
}

/// Applies one event; the new state is on disk before the response is sent.
pub async fn post_event(
    State(app): State<Shared>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let req: EventRequest = parse_body(&body)?;
    app.with_session(&id, |store, record| {
        let next = record.state.advance(req.event)?;
        let updated = StoredSession {
            id: record.id.clone(),
            state: next,
            created_at: record.created_at,
        };
        store.save_session(&updated)?;
        *record = updated;
        Ok(session_view(record))
    })
    .await
}

pub async fn get_session(State(app): State<Shared>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    app.with_session(&id, |_, record| Ok(session_view(record))).await
}

#[derive(Debug, Deserialize)]
pub struct StimulusQuery {
    #[serde(default)]
    format: Option<String>,
}

/// Audio (default) or plot of the stimulus at the session cursor.
pub async fn get_stimulus(
    State(app): State<Shared>,
    Path(id): Path<String>,
    Query(query): Query<StimulusQuery>,
) -> Result<Response, ApiError> {
    app.with_session(&id, |_, record| {
        let state = &record.state;
        let stimulus = match state.phase {
            Phase::Completed => None,
            _ => state.stimuli.get(state.cursor),
        }
        .ok_or_else(|| {
            ApiError::new(
                StatusCode::CONFLICT,
                "no_current_stimulus",
                "the session has no stimulus to present",
                json!({"phase": state.phase}),
            )
        })?;
        match query.format.as_deref() {
            None | Some("wav") => Ok(bytes_response("audio/wav", write_wav(stimulus.audio()))),
            Some("svg") => {
                if stimulus.modality() == Modality::AudioOnly {
                    return Err(ApiError::new(
                        StatusCode::CONFLICT,
                        "audio_only",
                        "this session presents audio only",
                        Value::Null,
                    ));
                }
                let svg = render_plot(stimulus.series(), PLOT_WIDTH, PLOT_HEIGHT)
                    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "plot_failed", e.to_string(), Value::Null))?;
                Ok(bytes_response("image/svg+xml", svg))
            }
            Some(other) => Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                "bad_format",
                format!("unknown stimulus format {other:?}"),
                json!({"allowed": ["wav", "svg"]}),
            )),
        }
    })
    .await
}

pub async fn get_report(State(app): State<Shared>, Path(id): Path<String>) -> Result<Json<SessionReport>, ApiError> {
    app.with_session(&id, |_, record| Ok(Json(score_session(&record.state)?)))
        .await
}
