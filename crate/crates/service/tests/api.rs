use std::collections::BTreeMap;
use std::path::Path;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use sonowork_service::{router, AppState, Store};

const CSV: &str = "time,flux\n0,1.0\n1,3.0\n2,2.0\n3,5.0\n";

struct Harness {
    dir: tempfile::TempDir,
    app: Router,
}

impl Harness {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let app = router(AppState::new(Store::open(dir.path()).unwrap()), None);
        Harness { dir, app }
    }

    /// A fresh router over the same data directory, as after a restart.
    fn restart(&self) -> Router {
        router(AppState::new(Store::open(self.dir.path()).unwrap()), None)
    }

    async fn send(&self, method: &str, uri: &str, body: Body) -> (StatusCode, String, Vec<u8>) {
        send(&self.app, method, uri, body).await
    }

    async fn json(&self, method: &str, uri: &str, body: Value) -> (StatusCode, Value) {
        let (status, _, bytes) = self.send(method, uri, Body::from(body.to_string())).await;
        (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
    }

    async fn get(&self, uri: &str) -> (StatusCode, String, Vec<u8>) {
        self.send("GET", uri, Body::empty()).await
    }

    async fn upload(&self, text: &str) -> Value {
        let (status, _, bytes) = self.send("POST", "/api/datasets?name=lc", Body::from(text.to_string())).await;
        assert_eq!(status, StatusCode::CREATED);
        serde_json::from_slice(&bytes).unwrap()
    }

    async fn event(&self, id: &str, event: Value) -> (StatusCode, Value) {
        self.json("POST", &format!("/api/training/sessions/{id}/events"), json!({ "event": event }))
            .await
    }
}

async fn send(app: &Router, method: &str, uri: &str, body: Body) -> (StatusCode, String, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri).body(body).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let content_type = resp
        .headers()
        .get("content-type")
        .map(|v| v.to_str().unwrap().to_string())
        .unwrap_or_default();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, content_type, bytes)
}

fn assert_error_shape(body: &Value) {
    assert!(body["code"].is_string(), "{body}");
    assert!(body["message"].is_string(), "{body}");
    assert!(body.get("detail").is_some(), "{body}");
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    walk(dir)
        .into_iter()
        .map(|p| (p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap()))
        .collect()
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push(path);
        }
    }
    out
}

#[tokio::test]
async fn upload_valid_csv() {
    let h = Harness::new();
    let (status, _, bytes) = h.send("POST", "/api/datasets", Body::from("x,y\n0,1\n1,2\n")).await;
    assert_eq!(status, StatusCode::CREATED);
    let body: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(body["row_count"], 2);
    assert_eq!(body["columns"], json!(["x", "y"]));
}

#[tokio::test]
async fn upload_ragged_csv_is_400() {
    let h = Harness::new();
    let (status, _, bytes) = h.send("POST", "/api/datasets", Body::from("x,y\n0,1\n1\n")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let body: Value = serde_json::from_slice(&bytes).unwrap();
    assert_error_shape(&body);
    assert_eq!(body["detail"]["kind"], "RaggedRows");
    assert_eq!(body["detail"]["row"], 1);
}

#[tokio::test]
async fn duplicate_upload_gets_new_id() {
    let h = Harness::new();
    let a = h.upload(CSV).await;
    let b = h.upload(CSV).await;
    assert_ne!(a["id"], b["id"]);
}

#[tokio::test]
async fn get_dataset_returns_columns() {
    let h = Harness::new();
    let id = h.upload("t,f\n0,1\n1,\n").await["id"].as_str().unwrap().to_string();
    let (status, _, bytes) = h.get(&format!("/api/datasets/{id}")).await;
    assert_eq!(status, StatusCode::OK);
    let body: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(body["name"], "lc");
    assert_eq!(body["data"]["columns"][1]["values"], json!([1.0, null]));

    let (status, _, bytes) = h.get("/api/datasets/nope").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_error_shape(&serde_json::from_slice(&bytes).unwrap());
}

#[tokio::test]
async fn sonify_returns_wav() {
    let h = Harness::new();
    let id = h.upload(CSV).await["id"].clone();
    let req = json!({"dataset_id": id, "x_col": "time", "y_col": "flux"});
    let (status, ctype, bytes) = h.send("POST", "/api/sonify", Body::from(req.to_string())).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ctype, "audio/wav");
    assert_eq!(&bytes[..4], b"RIFF");
    assert_eq!(bytes.len(), 44 + 2 * 4 * 4410);
    let (_, _, again) = h.send("POST", "/api/sonify", Body::from(req.to_string())).await;
    assert_eq!(bytes, again);
}

#[tokio::test]
async fn sonify_unknown_dataset_is_404() {
    let h = Harness::new();
    let (status, body) = h
        .json("POST", "/api/sonify", json!({"dataset_id": "missing", "y_col": "flux"}))
        .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_error_shape(&body);
}

#[tokio::test]
async fn sonify_bad_cut_is_422_with_step() {
    let h = Harness::new();
    let id = h.upload(CSV).await["id"].clone();
    let req = json!({
        "dataset_id": id,
        "y_col": "flux",
        "transform": [{"op": "normalize"}, {"op": "cut", "lo": 0, "hi": 4}],
    });
    let (status, body) = h.json("POST", "/api/sonify", req).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "transform_failed");
    assert_eq!(body["detail"]["step"], 1);
    assert_eq!(body["detail"]["kind"], "BadRange");
}

#[tokio::test]
async fn sonify_bad_config_and_json() {
    let h = Harness::new();
    let id = h.upload(CSV).await["id"].clone();
    let (status, body) = h
        .json("POST", "/api/sonify", json!({"dataset_id": id, "y_col": "flux", "config": {"f_min": 5}}))
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["detail"]["field"], "f_min");

    let (status, _, bytes) = h.send("POST", "/api/sonify", Body::from("{not json")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_error_shape(&serde_json::from_slice(&bytes).unwrap());

    let (status, body) = h.json("POST", "/api/sonify", json!({"dataset_id": id, "y_col": "mag"})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["detail"]["column"], "mag");
}

#[tokio::test]
async fn plot_returns_one_polyline() {
    let h = Harness::new();
    let id = h.upload(CSV).await["id"].clone();
    let req = json!({"dataset_id": id, "x_col": "time", "y_col": "flux"}).to_string();
    let (status, ctype, bytes) = h.send("POST", "/api/plot", Body::from(req.clone())).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ctype, "image/svg+xml");
    let svg = String::from_utf8(bytes.clone()).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
    let (_, _, again) = h.send("POST", "/api/plot", Body::from(req)).await;
    assert_eq!(bytes, again);

    let (status, _) = h.json("POST", "/api/plot", json!({"dataset_id": "zzz", "y_col": "flux"})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

async fn create_session(h: &Harness, body: Value) -> (String, Value) {
    let (status, resp) = h.json("POST", "/api/training/sessions", body).await;
    assert_eq!(status, StatusCode::CREATED, "{resp}");
    (resp["id"].as_str().unwrap().to_string(), resp["state"].clone())
}

#[tokio::test]
async fn same_seed_gives_identical_stimulus_audio() {
    let h = Harness::new();
    let body = json!({"block": 1, "per_class_count": 1, "seed": 7, "modality": "audio_visual"});
    let (a, _) = create_session(&h, body.clone()).await;
    let (b, _) = create_session(&h, body).await;
    assert_ne!(a, b);
    let (_, ctype, wav_a) = h.get(&format!("/api/training/sessions/{a}/stimulus")).await;
    let (_, _, wav_b) = h.get(&format!("/api/training/sessions/{b}/stimulus")).await;
    assert_eq!(ctype, "audio/wav");
    assert_eq!(&wav_a[..4], b"RIFF");
    assert_eq!(wav_a, wav_b);
    let (status, ctype, _) = h.get(&format!("/api/training/sessions/{a}/stimulus?format=svg")).await;
    assert_eq!((status, ctype.as_str()), (StatusCode::OK, "image/svg+xml"));
}

#[tokio::test]
async fn audio_only_sessions_have_no_plot() {
    let h = Harness::new();
    let (id, _) = create_session(&h, json!({"block": 1, "per_class_count": 1, "seed": 1, "modality": "audio_only"})).await;
    let (status, _, _) = h.get(&format!("/api/training/sessions/{id}/stimulus?format=svg")).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn keypress_during_intro_is_409() {
    let h = Harness::new();
    let (id, _) = create_session(&h, json!({"block": 1, "per_class_count": 1, "seed": 7})).await;
    let (status, body) = h.event(&id, json!({"type": "key_press", "key": "up", "latency": 300})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "illegal_event");
    assert_eq!(body["detail"]["phase"], "intro");
}

#[tokio::test]
async fn bad_session_requests() {
    let h = Harness::new();
    let (status, body) = h
        .json("POST", "/api/training/sessions", json!({"block": 4, "per_class_count": 1, "seed": 0}))
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "bad_block");
    let (status, _) = h
        .json("POST", "/api/training/sessions", json!({"block": 1, "per_class_count": 1, "seed": 0, "trials": 5}))
        .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = h.event("missing", json!({"type": "begin"})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _, _) = h.get("/api/training/sessions/missing/report").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

/// Answers every trial; trial `i` is answered correctly when `correct(i)`.
async fn play(h: &Harness, id: &str, state: &Value, correct: impl Fn(usize) -> bool) -> Value {
    let keys = ["up", "down", "left", "right"];
    let expected = |class: &str| match class {
        "increasing" => "up",
        "decreasing" => "down",
        "sine" => "left",
        _ => "right",
    };
    let classes: Vec<String> = state["stimuli"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["class"].as_str().unwrap().to_string())
        .collect();
    let (status, _) = h.event(id, json!({"type": "begin"})).await;
    assert_eq!(status, StatusCode::OK);
    let mut last = Value::Null;
    for (i, class) in classes.iter().enumerate() {
        let (status, _) = h.event(id, json!({"type": "presentation_done"})).await;
        assert_eq!(status, StatusCode::OK);
        let want = expected(class);
        let key = if correct(i) {
            want
        } else {
            keys.iter().find(|&&k| k != want).unwrap()
        };
        let (status, body) = h.event(id, json!({"type": "key_press", "key": key, "latency": 500 + i})).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(body["feedback"], if correct(i) { "Correct" } else { "Incorrect" });
        let (status, body) = h.event(id, json!({"type": "feedback_done"})).await;
        assert_eq!(status, StatusCode::OK);
        last = body;
    }
    last
}

#[tokio::test]
async fn thirteen_trials_ten_correct_reports_77_percent() {
    let h = Harness::new();
    let (id, state) = create_session(&h, json!({"block": 1, "per_class_count": 4, "seed": 7, "trials": 13})).await;
    assert_eq!(state["stimuli"].as_array().unwrap().len(), 13);

    let (status, body) = h.json("GET", &format!("/api/training/sessions/{id}/report"), Value::Null).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "not_completed");

    let last = play(&h, &id, &state, |i| i < 10).await;
    assert_eq!(last["state"]["phase"], "completed");

    let (status, _, bytes) = h.get(&format!("/api/training/sessions/{id}/report")).await;
    assert_eq!(status, StatusCode::OK);
    let report: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(report["total"], 13);
    assert_eq!(report["correct"], 10);
    assert_eq!(report["overall_display"], "77%");
    assert!((report["overall_pct"].as_f64().unwrap() - 1000.0 / 13.0).abs() < 1e-9);

    let (status, _, _) = h.get(&format!("/api/training/sessions/{id}/stimulus")).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn sessions_survive_restart() {
    let h = Harness::new();
    let (id, _) = create_session(&h, json!({"block": 2, "per_class_count": 1, "seed": 3})).await;
    h.event(&id, json!({"type": "begin"})).await;
    h.event(&id, json!({"type": "presentation_done"})).await;
    let (_, _, before) = h.get(&format!("/api/training/sessions/{id}/stimulus")).await;

    let app = h.restart();
    let (status, _, bytes) = send(&app, "GET", &format!("/api/training/sessions/{id}"), Body::empty()).await;
    assert_eq!(status, StatusCode::OK);
    let body: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(body["state"]["phase"], "awaiting_response");
    let (_, _, after) = send(&app, "GET", &format!("/api/training/sessions/{id}/stimulus"), Body::empty()).await;
    assert_eq!(before, after);
}

#[tokio::test]
async fn reads_do_not_touch_storage() {
    let h = Harness::new();
    let dataset = h.upload(CSV).await["id"].as_str().unwrap().to_string();
    let (id, state) = create_session(&h, json!({"block": 1, "per_class_count": 1, "seed": 2})).await;
    play(&h, &id, &state, |_| true).await;

    let before = snapshot(h.dir.path());
    for uri in [
        format!("/api/datasets/{dataset}"),
        format!("/api/training/sessions/{id}"),
        format!("/api/training/sessions/{id}/stimulus"),
        format!("/api/training/sessions/{id}/report"),
        "/api/health".to_string(),
    ] {
        let (status, _, _) = h.get(&uri).await;
        assert!(status.is_success() || status == StatusCode::CONFLICT, "{uri}: {status}");
    }
    assert_eq!(before, snapshot(h.dir.path()));
}

#[tokio::test]
async fn concurrent_events_are_serialized() {
    let h = Harness::new();
    let (id, _) = create_session(&h, json!({"block": 1, "per_class_count": 1, "seed": 5})).await;
    let uri = format!("/api/training/sessions/{id}/events");
    let body = json!({"event": {"type": "begin"}}).to_string();
    let tasks: Vec<_> = (0..8)
        .map(|_| {
            let app = h.app.clone();
            let (uri, body) = (uri.clone(), body.clone());
            tokio::spawn(async move { send(&app, "POST", &uri, Body::from(body)).await.0 })
        })
        .collect();
    let mut ok = 0;
    for t in tasks {
        match t.await.unwrap() {
            StatusCode::OK => ok += 1,
            StatusCode::CONFLICT => {}
            other => panic!("unexpected status {other}"),
        }
    }
    assert_eq!(ok, 1);
    let stored: Value =
        serde_json::from_slice(&std::fs::read(h.dir.path().join(format!("sessions/{id}.json"))).unwrap()).unwrap();
    assert_eq!(stored["state"]["phase"], "presenting");
}

#[tokio::test]
async fn static_bundle_served_at_root() {
    let dir = tempfile::tempdir().unwrap();
    let web = tempfile::tempdir().unwrap();
    std::fs::write(web.path().join("index.html"), "<!doctype html><title>sonowork</title>").unwrap();
    let app = router(
        AppState::new(Store::open(dir.path()).unwrap()),
        Some(web.path().to_path_buf()),
    );
    let (status, _, bytes) = send(&app, "GET", "/", Body::empty()).await;
    assert_eq!(status, StatusCode::OK);
    assert!(String::from_utf8(bytes).unwrap().contains("sonowork"));
    let (status, _, _) = send(&app, "GET", "/api/health", Body::empty()).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn cors_preflight_allowed() {
    let h = Harness::new();
    let req = Request::builder()
        .method("OPTIONS")
        .uri("/api/sonify")
        .header("origin", "http://localhost:5173")
        .header("access-control-request-method", "POST")
        .body(Body::empty())
        .unwrap();
    let resp = h.app.clone().oneshot(req).await.unwrap();
    assert!(resp.headers().contains_key("access-control-allow-origin"));
}
