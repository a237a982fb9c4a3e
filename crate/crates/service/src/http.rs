//! HTTP+JSON front end.
//!
//! | method | path                          | body / query                          |
//! |--------|-------------------------------|---------------------------------------|
//! | POST   | `/api/submissions`            | `{team, prompt_id, text}`             |
//! | GET    | `/api/leaderboard`            |                                       |
//! | GET    | `/api/assignments/next`       | `?judge=ID`                           |
//! | POST   | `/api/ratings`                | `{assignment_id, relevance, ...}`     |
//! | GET    | `/api/submissions/{id}/human` |                                       |
//! | GET    | `/api/phase`                  |                                       |
//! | POST   | `/api/phase`                  | `{phase}`, `Authorization: Bearer ..` |
//!
//! Every 4xx/5xx body is `{error, message}` with `error` a stable code.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ltg_core::EmbeddingTable;
use serde::{Deserialize, Serialize};
use tokio::sync::{RwLock, Semaphore};

use crate::challenge::{score_text, Challenge};
use crate::error::ServiceError;
use crate::model::{ChallengePhase, RatingScores};

/// Request bodies above this size are refused before parsing.
pub const MAX_BODY_BYTES: usize = 64 * 1024 * 1024;

#[derive(Clone)]
pub struct AppState {
    challenge: Arc<RwLock<Challenge>>,
    table: Arc<EmbeddingTable>,
    scoring_slots: Arc<Semaphore>,
    admin_token: Option<Arc<str>>,
}

impl AppState {
    /// `scoring_workers` bounds concurrent metric computations; `admin_token`
    /// of `None` disables the phase-change endpoint.
    pub fn new(
        challenge: Challenge,
        table: Arc<EmbeddingTable>,
        scoring_workers: usize,
        admin_token: Option<String>,
    ) -> Self {
        AppState {
            challenge: Arc::new(RwLock::new(challenge)),
            table,
            scoring_slots: Arc::new(Semaphore::new(scoring_workers.max(1))),
            admin_token: admin_token.filter(|t| !t.is_empty()).map(Arc::from),
        }
    }

    pub fn challenge(&self) -> &Arc<RwLock<Challenge>> {
        &self.challenge
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/submissions", post(submit))
        .route("/api/submissions/{id}/human", get(human_scores))
        .route("/api/leaderboard", get(leaderboard))
        .route("/api/assignments/next", get(next_assignment))
        .route("/api/ratings", post(rate))
        .route("/api/phase", get(phase).post(set_phase))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state)).await
}

impl ServiceError {
    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::WrongPhase { .. }
            | ServiceError::DuplicateRating(_)
            | ServiceError::InvalidPhaseTransition { .. } => StatusCode::CONFLICT,
            ServiceError::UnknownPrompt(_)
            | ServiceError::UnknownAssignment(_)
            | ServiceError::UnknownSubmission(_)
            | ServiceError::NoWorkAvailable(_)
            | ServiceError::NoRatings(_) => StatusCode::NOT_FOUND,
            ServiceError::PromptPrefixMismatch(_)
            | ServiceError::TooShort { .. }
            | ServiceError::ScoreOutOfRange { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::TooLong { .. } => StatusCode::PAYLOAD_TOO_LARGE,
            ServiceError::Unauthorized => StatusCode::UNAUTHORIZED,
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        if let ServiceError::Storage(message) = &self {
            tracing::error!(%message, "storage failure");
        }
        (self.status(), Json(self.body())).into_response()
    }
}

impl From<JsonRejection> for ServiceError {
    fn from(rejection: JsonRejection) -> Self {
        ServiceError::BadRequest(rejection.body_text())
    }
}

impl From<QueryRejection> for ServiceError {
    fn from(rejection: QueryRejection) -> Self {
        ServiceError::BadRequest(rejection.body_text())
    }
}

#[derive(Debug, Deserialize)]
struct SubmitRequest {
    team: String,
    prompt_id: String,
    text: String,
}

async fn submit(
    State(app): State<AppState>,
    body: Result<Json<SubmitRequest>, JsonRejection>,
) -> Result<impl IntoResponse, ServiceError> {
    let Json(req) = body?;
    let valid = app
        .challenge
        .read()
        .await
        .validate_submission(&req.team, &req.prompt_id, &req.text)?;

    let analysis = app.challenge.read().await.config().analysis;
    let score = {
        let _slot = app
            .scoring_slots
            .acquire()
            .await
            .map_err(|e| ServiceError::Storage(e.to_string()))?;
        let table = Arc::clone(&app.table);
        let text = valid.text.clone();
        tokio::task::spawn_blocking(move || score_text(&text, &table, &analysis))
            .await
            .map_err(|e| ServiceError::Storage(format!("scoring task failed: {e}")))?
    };

    let record = app.challenge.write().await.commit_submission(valid, score)?;
    Ok((StatusCode::CREATED, Json(record)))
}

async fn leaderboard(State(app): State<AppState>) -> Result<impl IntoResponse, ServiceError> {
    let entries = app.challenge.read().await.leaderboard()?;
    Ok(Json(entries))
}

#[derive(Debug, Deserialize)]
struct JudgeQuery {
    judge: String,
}

async fn next_assignment(
    State(app): State<AppState>,
    query: Result<Query<JudgeQuery>, QueryRejection>,
) -> Result<impl IntoResponse, ServiceError> {
    let Query(q) = query?;
    let view = app.challenge.write().await.next_assignment(&q.judge)?;
    Ok(Json(view))
}

#[derive(Debug, Deserialize)]
struct RatingRequest {
    assignment_id: String,
    #[serde(flatten)]
    scores: RatingScores,
}

async fn rate(
    State(app): State<AppState>,
    body: Result<Json<RatingRequest>, JsonRejection>,
) -> Result<impl IntoResponse, ServiceError> {
    let Json(req) = body?;
    let record = app
        .challenge
        .write()
        .await
        .record_rating(&req.assignment_id, req.scores)?;
    Ok((StatusCode::CREATED, Json(record)))
}

async fn human_scores(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> Result<impl IntoResponse, ServiceError> {
    let score = app.challenge.read().await.aggregate_human_scores(&id)?;
    Ok(Json(score))
}

#[derive(Debug, Serialize, Deserialize)]
struct PhaseBody {
    phase: ChallengePhase,
}

async fn phase(State(app): State<AppState>) -> Json<PhaseBody> {
    Json(PhaseBody {
        phase: app.challenge.read().await.phase(),
    })
}

async fn set_phase(
    State(app): State<AppState>,
    headers: HeaderMap,
    body: Result<Json<PhaseBody>, JsonRejection>,
) -> Result<impl IntoResponse, ServiceError> {
    let expected = app.admin_token.as_deref().ok_or(ServiceError::Unauthorized)?;
    let presented = headers
        .get(axum::http::header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "));
    if presented != Some(expected) {
        return Err(ServiceError::Unauthorized);
    }
    let Json(req) = body?;
    let mut challenge = app.challenge.write().await;
    challenge.set_phase(req.phase)?;
    Ok(Json(PhaseBody {
        phase: challenge.phase(),
    }))
}
