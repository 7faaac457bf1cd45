#![allow(dead_code)]

use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use sqmeter_core::{Engine, HashParams};
use sqmeter_service::{router, AppState, MemoryStore, ProfileStore};
use tower::ServiceExt;

pub const STRONG: [&str; 5] = ["CrickICC15@Aus.", "Blu^Reef09!", "MaxPup04&Syd", "Cbr@Home1990!", "Coach*Zed77"];
pub const CUSTOM: [&str; 2] = ["What was my first coach's nickname?", "Where did we go on our first trip?"];

/// Everything written by `tracing` in this test binary.
#[derive(Clone, Default)]
pub struct LogSink(Arc<Mutex<Vec<u8>>>);

impl LogSink {
    pub fn contents(&self) -> String {
        String::from_utf8_lossy(&self.0.lock().unwrap()).into_owned()
    }
}

impl Write for LogSink {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.lock().unwrap().extend_from_slice(buf);
        Ok(buf.len())
    }
    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

/// Installs a global TRACE-level subscriber writing into a shared buffer.
pub fn capture_logs() -> LogSink {
    static SINK: OnceLock<LogSink> = OnceLock::new();
    SINK.get_or_init(|| {
        let sink = LogSink::default();
        let writer = sink.clone();
        tracing_subscriber::fmt()
            .with_max_level(tracing::Level::TRACE)
            .with_ansi(false)
            .with_writer(move || writer.clone())
            .init();
        sink
    })
    .clone()
}

pub fn engine() -> Engine {
    Engine::builtin().with_hash_params(HashParams::minimal())
}

pub struct Client {
    pub app: Router,
    pub state: AppState,
}

impl Client {
    pub fn new() -> Self {
        Self::with_store(Arc::new(MemoryStore::new()))
    }

    pub fn with_store(store: Arc<dyn ProfileStore>) -> Self {
        let state = AppState::new(engine(), store, 3);
        Client {
            app: router(state.clone()),
            state,
        }
    }

    pub async fn raw(&self, method: Method, path: &str, token: Option<&str>, body: Option<Vec<u8>>) -> (StatusCode, Vec<u8>) {
        let mut req = Request::builder().method(method).uri(path);
        if let Some(t) = token {
            req = req.header(header::AUTHORIZATION, format!("Bearer {t}"));
        }
        let body = match body {
            Some(b) => {
                req = req.header(header::CONTENT_TYPE, "application/json");
                Body::from(b)
            }
            None => Body::empty(),
        };
        let resp = self.app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
        (status, bytes)
    }

    pub async fn call(&self, method: Method, path: &str, token: Option<&str>, body: Option<Value>) -> (StatusCode, Value) {
        let (status, bytes) = self
            .raw(method, path, token, body.map(|b| serde_json::to_vec(&b).unwrap()))
            .await;
        let value = if bytes.is_empty() {
            Value::Null
        } else {
            serde_json::from_slice(&bytes).unwrap_or_else(|_| panic!("non-JSON body: {}", String::from_utf8_lossy(&bytes)))
        };
        (status, value)
    }

    pub async fn new_session(&self) -> (String, String) {
        let (status, body) = self.call(Method::POST, "/sessions", None, None).await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
        (
            body["session_id"].as_str().unwrap().to_owned(),
            body["token"].as_str().unwrap().to_owned(),
        )
    }

    pub async fn set_questions(&self, id: &str, token: &str) {
        for (slot, q) in [(1, "q-sport"), (2, "q-color"), (3, "q-pet")] {
            let (s, b) = self
                .call(
                    Method::PUT,
                    &format!("/sessions/{id}/slots/{slot}/question"),
                    Some(token),
                    Some(json!({"question_id": q})),
                )
                .await;
            assert_eq!(s, StatusCode::OK, "{b}");
        }
        for (slot, text) in [(4, CUSTOM[0]), (5, CUSTOM[1])] {
            let (s, b) = self
                .call(
                    Method::PUT,
                    &format!("/sessions/{id}/slots/{slot}/question"),
                    Some(token),
                    Some(json!({"text": text})),
                )
                .await;
            assert_eq!(s, StatusCode::OK, "{b}");
        }
    }

    /// Submits each answer, confirming any that come back weak.
    pub async fn answer_all(&self, id: &str, token: &str, answers: &[String; 5]) {
        for (i, a) in answers.iter().enumerate() {
            let slot = i + 1;
            let (s, b) = self
                .call(
                    Method::POST,
                    &format!("/sessions/{id}/slots/{slot}/answer"),
                    Some(token),
                    Some(json!({"answer": a})),
                )
                .await;
            assert_eq!(s, StatusCode::OK, "{b}");
            if b["status"] == "weak_needs_confirmation" {
                let (s, b) = self
                    .call(
                        Method::POST,
                        &format!("/sessions/{id}/slots/{slot}/confirm-weak"),
                        Some(token),
                        Some(json!({"answer": a})),
                    )
                    .await;
                assert_eq!(s, StatusCode::OK, "{b}");
            }
        }
    }

    /// Runs the whole setup flow and returns (profile id, token).
    pub async fn enroll(&self, answers: &[String; 5], threshold: u8) -> (String, String) {
        let (id, token) = self.new_session().await;
        self.set_questions(&id, &token).await;
        self.answer_all(&id, &token, answers).await;
        let (s, b) = self
            .call(
                Method::POST,
                &format!("/sessions/{id}/finalize"),
                Some(&token),
                Some(json!({"threshold": threshold})),
            )
            .await;
        assert_eq!(s, StatusCode::CREATED, "{b}");
        (b["profile_id"].as_str().unwrap().to_owned(), token)
    }

    pub async fn recover(&self, profile: &str, token: &str, answers: &[Option<String>]) -> (StatusCode, Value) {
        self.call(
            Method::POST,
            &format!("/recover/{profile}"),
            Some(token),
            Some(json!({"answers": answers})),
        )
        .await
    }
}

pub fn strong_answers() -> [String; 5] {
    STRONG.map(String::from)
}
