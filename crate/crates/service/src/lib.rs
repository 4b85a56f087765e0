//! HTTP front end of the sonowork workbench.
//!
//! Datasets and training sessions are persisted as JSON files under a data
//! directory; rendering endpoints are deterministic, so equal requests return
//! byte-identical WAV/SVG bodies.
//!
//! | Method | Path | Body | Response |
//! |--------|------|------|----------|
//! | GET  | `/api/health` | | status JSON |
//! | POST | `/api/datasets?name=&decimal_comma=` | raw text table | 201 `{id, name, columns, row_count}` |
//! | GET  | `/api/datasets/{id}` | | summary + column data |
//! | POST | `/api/sonify` | `{dataset_id, x_col?, y_col, transform?, config?}` | `audio/wav` |
//! | POST | `/api/plot` | same as sonify | `image/svg+xml` |
//! | POST | `/api/training/sessions` | `{block, per_class_count, seed, modality?, allow_skip_intro?, allow_replay?, config?, trials?}` | 201 `{id, state, feedback}` |
//! | GET  | `/api/training/sessions/{id}` | | `{id, state, feedback}` |
//! | POST | `/api/training/sessions/{id}/events` | `{event}` | `{id, state, feedback}` |
//! | GET  | `/api/training/sessions/{id}/stimulus?format=wav\|svg` | | current stimulus |
//! | GET  | `/api/training/sessions/{id}/report` | | `SessionReport` |
//!
//! Errors carry `{code, message, detail}`.

pub mod api;
pub mod error;
pub mod store;

use std::path::PathBuf;
use std::sync::Arc;

use axum::routing::{get, post};
use axum::Router;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

pub use api::AppState;
pub use error::ApiError;
pub use store::{Store, StoreError};

/// Builds the application router. When `web_dir` is given, its files are
/// served for every path outside `/api`.
pub fn router(state: AppState, web_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/health", get(api::health))
        .route("/api/datasets", post(api::upload_dataset))
        .route("/api/datasets/{id}", get(api::get_dataset))
        .route("/api/sonify", post(api::sonify))
        .route("/api/plot", post(api::plot))
        .route("/api/training/sessions", post(api::create_session))
        .route("/api/training/sessions/{id}", get(api::get_session))
        .route("/api/training/sessions/{id}/events", post(api::post_event))
        .route("/api/training/sessions/{id}/stimulus", get(api::get_stimulus))
        .route("/api/training/sessions/{id}/report", get(api::get_report))
        .with_state(Arc::new(state));
    let app = match web_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(CorsLayer::permissive())
}
