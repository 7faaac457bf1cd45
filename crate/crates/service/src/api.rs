//! HTTP routes.
//!
//! `/score` and `/questions` are open. Everything under `/sessions` and
//! `/recover` needs the bearer token handed out by `POST /sessions`; a
//! missing or wrong token is answered exactly like an unknown id.
//! Answer text is never logged and never echoed back.

use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::JsonRejection;
use axum::extract::{FromRequest, Path, Request, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sqmeter_core::session::{SlotView, SLOT_COUNT};
use sqmeter_core::{
    score_answer, verify_recovery, Engine, Question, ScorePayload, Session, SessionId, SessionState, SessionView,
    SubmitOutcome,
};
use subtle::ConstantTimeEq;
use tokio::sync::Mutex;

use crate::error::ApiError;
use crate::store::{ProfileRecord, ProfileStore, StoreError};

struct SessionEntry {
    session: Session,
    token_sha256: [u8; 32],
}

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    engine: Engine,
    store: Arc<dyn ProfileStore>,
    default_threshold: u8,
    sessions: std::sync::Mutex<HashMap<SessionId, Arc<Mutex<SessionEntry>>>>,
}

impl AppState {
    pub fn new(engine: Engine, store: Arc<dyn ProfileStore>, default_threshold: u8) -> Self {
        AppState {
            inner: Arc::new(Inner {
                engine,
                store,
                default_threshold,
                sessions: Default::default(),
            }),
        }
    }

    pub fn engine(&self) -> &Engine {
        &self.inner.engine
    }

    pub fn session_count(&self) -> usize {
        self.inner.sessions.lock().expect("session map poisoned").len()
    }

    fn entry(&self, id: &str) -> Option<Arc<Mutex<SessionEntry>>> {
        self.inner
            .sessions
            .lock()
            .expect("session map poisoned")
            .get(&SessionId::from(id.to_owned()))
            .cloned()
    }

    /// Drops sessions that are finished or idle past the TTL. Returns how
    /// many were removed.
    pub async fn sweep(&self) -> usize {
        let now = chrono::Utc::now();
        let ttl = self.inner.engine.session_ttl();
        let entries: Vec<_> = {
            let map = self.inner.sessions.lock().expect("session map poisoned");
            map.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
        };
        let mut dead = Vec::new();
        for (id, entry) in entries {
            let mut guard = entry.lock().await;
            guard.session.expire_if_idle(now, ttl);
            let idle = now - guard.session.last_activity() > ttl;
            if guard.session.state() != SessionState::Open && idle {
                dead.push(id);
            }
        }
        let mut map = self.inner.sessions.lock().expect("session map poisoned");
        for id in &dead {
            map.remove(id);
        }
        dead.len()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/score", post(score))
        .route("/questions", get(questions))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/slots/{n}/question", put(set_question))
        .route("/sessions/{id}/slots/{n}/answer", post(submit_answer))
        .route("/sessions/{id}/slots/{n}/confirm-weak", post(confirm_weak))
        .route("/sessions/{id}/finalize", post(finalize))
        .route("/recover/{profile_id}", post(recover))
        .fallback(|| async { ApiError::not_found("no such route") })
        .with_state(state)
}

/// JSON body extractor that reports malformed input as a validation error.
pub struct ApiJson<T>(pub T);

impl<S, T> FromRequest<S> for ApiJson<T>
where
    T: DeserializeOwned,
    S: Send + Sync,
{
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        match Json::<T>::from_request(req, state).await {
            Ok(Json(v)) => Ok(ApiJson(v)),
            Err(rejection) => Err(ApiError::validation(rejection_message(&rejection))),
        }
    }
}

fn rejection_message(rejection: &JsonRejection) -> String {
    // The body text may contain an answer; report only the category.
    match rejection {
        JsonRejection::JsonDataError(_) => "request body has the wrong shape".into(),
        JsonRejection::JsonSyntaxError(_) => "request body is not valid JSON".into(),
        JsonRejection::MissingJsonContentType(_) => "expected Content-Type: application/json".into(),
        _ => "unreadable request body".into(),
    }
}

fn token_digest(token: &str) -> [u8; 32] {
    Sha256::digest(token.as_bytes()).into()
}

fn bearer(headers: &HeaderMap) -> Option<&str> {
    headers
        .get(header::AUTHORIZATION)?
        .to_str()
        .ok()?
        .strip_prefix("Bearer ")
        .map(str::trim)
}

fn token_matches(headers: &HeaderMap, expected: &[u8; 32]) -> bool {
    bearer(headers).is_some_and(|t| bool::from(token_digest(t).ct_eq(expected)))
}

fn parse_slot(raw: &str) -> Result<u8, ApiError> {
    raw.parse::<u8>()
        .ok()
        .filter(|n| (1..=SLOT_COUNT as u8).contains(n))
        .ok_or_else(|| ApiError::validation(format!("slot must be 1..={SLOT_COUNT}")).with_field("slot"))
}

/// Locks the session after checking the caller's token.
async fn authorized(
    state: &AppState,
    id: &str,
    headers: &HeaderMap,
) -> Result<tokio::sync::OwnedMutexGuard<SessionEntry>, ApiError> {
    let not_found = || ApiError::not_found("session not found");
    let entry = state.entry(id).ok_or_else(not_found)?;
    let guard = entry.lock_owned().await;
    if !token_matches(headers, &guard.token_sha256) {
        return Err(not_found());
    }
    Ok(guard)
}

#[derive(Debug, Deserialize)]
pub struct AnswerBody {
    pub answer: String,
}

async fn score(State(state): State<AppState>, ApiJson(body): ApiJson<AnswerBody>) -> Json<ScorePayload> {
    tracing::debug!("score request");
    Json(score_answer(&body.answer, state.engine().wordlists()))
}

async fn questions(State(state): State<AppState>) -> Json<Vec<Question>> {
    Json(state.engine().catalog().questions().to_vec())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CreatedSession {
    pub session_id: SessionId,
    pub token: String,
    pub state: SessionState,
    pub slots: Vec<SlotView>,
}

async fn create_session(State(state): State<AppState>) -> (StatusCode, Json<CreatedSession>) {
    let session = state.engine().create_session();
    let token = {
        let mut buf = [0u8; 32];
        rand::RngCore::fill_bytes(&mut rand::rng(), &mut buf);
        hex::encode(buf)
    };
    let view = session.view();
    let id = session.id().clone();
    state.inner.sessions.lock().expect("session map poisoned").insert(
        id.clone(),
        Arc::new(Mutex::new(SessionEntry {
            session,
            token_sha256: token_digest(&token),
        })),
    );
    tracing::info!(session = %id, "session created");
    (
        StatusCode::CREATED,
        Json(CreatedSession {
            session_id: view.session_id,
            token,
            state: view.state,
            slots: view.slots,
        }),
    )
}

async fn get_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
) -> Result<Json<SessionView>, ApiError> {
    let guard = authorized(&state, &id, &headers).await?;
    Ok(Json(guard.session.view()))
}

/// `question_id` for slots 1–3, `text` for slots 4–5.
#[derive(Debug, Deserialize)]
pub struct QuestionBody {
    pub question_id: Option<String>,
    pub text: Option<String>,
}

async fn set_question(
    State(state): State<AppState>,
    Path((id, n)): Path<(String, String)>,
    headers: HeaderMap,
    ApiJson(body): ApiJson<QuestionBody>,
) -> Result<Json<SessionView>, ApiError> {
    let slot = parse_slot(&n)?;
    let mut guard = authorized(&state, &id, &headers).await?;
    let engine = state.engine();
    match (body.question_id, body.text) {
        (Some(qid), None) => engine.select_predefined(&mut guard.session, slot, &qid)?,
        (None, Some(text)) => engine.set_custom_question(&mut guard.session, slot, &text)?,
        _ => {
            return Err(ApiError::validation("give exactly one of question_id or text").with_field("question_id"))
        }
    }
    tracing::info!(session = %id, slot, "question set");
    Ok(Json(guard.session.view()))
}

async fn submit_answer(
    State(state): State<AppState>,
    Path((id, n)): Path<(String, String)>,
    headers: HeaderMap,
    ApiJson(body): ApiJson<AnswerBody>,
) -> Result<Json<SubmitOutcome>, ApiError> {
    let slot = parse_slot(&n)?;
    let mut guard = authorized(&state, &id, &headers).await?;
    let outcome = state.engine().submit_answer(&mut guard.session, slot, &body.answer)?;
    tracing::info!(session = %id, slot, status = ?outcome.status, score = outcome.report.score, "answer submitted");
    Ok(Json(outcome))
}

async fn confirm_weak(
    State(state): State<AppState>,
    Path((id, n)): Path<(String, String)>,
    headers: HeaderMap,
    ApiJson(body): ApiJson<AnswerBody>,
) -> Result<Json<SessionView>, ApiError> {
    let slot = parse_slot(&n)?;
    let mut guard = authorized(&state, &id, &headers).await?;
    state.engine().confirm_weak(&mut guard.session, slot, &body.answer)?;
    tracing::info!(session = %id, slot, "weak answer kept");
    Ok(Json(guard.session.view()))
}

#[derive(Debug, Default, Deserialize)]
pub struct FinalizeBody {
    pub threshold: Option<u8>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FinalizedProfile {
    pub profile_id: String,
    pub recovery_threshold: u8,
}

async fn finalize(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<(StatusCode, Json<FinalizedProfile>), ApiError> {
    // The body is optional here.
    let body: FinalizeBody = if body.iter().all(u8::is_ascii_whitespace) {
        FinalizeBody::default()
    } else {
        serde_json::from_slice(&body).map_err(|_| ApiError::validation("request body has the wrong shape"))?
    };
    let threshold = body.threshold.unwrap_or(state.inner.default_threshold);
    let mut guard = authorized(&state, &id, &headers).await?;
    // Finalize a copy so a failed write leaves the session open for retry.
    let mut working = guard.session.clone();
    let profile = state.engine().finalize(&mut working, threshold)?;
    let record = ProfileRecord {
        profile,
        token_sha256: guard.token_sha256.to_vec(),
    };
    let store = state.inner.store.clone();
    let persisted = {
        let record = record.clone();
        tokio::task::spawn_blocking(move || store.persist(&record))
            .await
            .map_err(|e| ApiError::internal(e.to_string()))?
    };
    if let Err(e) = persisted {
        tracing::error!(session = %id, error = ?e, "profile write failed");
        return Err(ApiError::internal("could not store profile"));
    }
    guard.session = working;
    tracing::info!(session = %id, profile = %record.profile.profile_id, "session finalized");
    Ok((
        StatusCode::CREATED,
        Json(FinalizedProfile {
            profile_id: record.profile.profile_id,
            recovery_threshold: record.profile.recovery_threshold,
        }),
    ))
}

#[derive(Debug, Deserialize)]
pub struct RecoverBody {
    pub answers: Vec<Option<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RecoverResult {
    pub granted: bool,
}

async fn recover(
    State(state): State<AppState>,
    Path(profile_id): Path<String>,
    headers: HeaderMap,
    ApiJson(body): ApiJson<RecoverBody>,
) -> Result<Json<RecoverResult>, ApiError> {
    let attempts: [Option<String>; SLOT_COUNT] = body
        .answers
        .try_into()
        .map_err(|_| ApiError::validation(format!("expected {SLOT_COUNT} answers")).with_field("answers"))?;
    let store = state.inner.store.clone();
    let id = profile_id.clone();
    let loaded = tokio::task::spawn_blocking(move || store.load(&id))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?;
    let record = match loaded {
        Ok(r) => r,
        Err(StoreError::NotFound(_)) => return Err(ApiError::not_found("profile not found")),
        Err(e) => {
            tracing::error!(error = ?e, "profile read failed");
            return Err(ApiError::internal("could not read profile"));
        }
    };
    let expected: [u8; 32] = record.token_sha256.as_slice().try_into().unwrap_or([0; 32]);
    if !token_matches(&headers, &expected) {
        return Err(ApiError::not_found("profile not found"));
    }
    let outcome = tokio::task::spawn_blocking(move || verify_recovery(&record.profile, &attempts))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?;
    tracing::info!(profile = %profile_id, granted = outcome.granted, "recovery attempt");
    Ok(Json(RecoverResult {
        granted: outcome.granted,
    }))
}
