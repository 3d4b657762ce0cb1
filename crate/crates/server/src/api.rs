use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Extension, Json, Router};
use serde::{Deserialize, Serialize};
use unfun_core::game::{sample_task, HeadlineRef, TaskAssignment};
use unfun_store::StoreError;

use crate::{AppState, Session};

pub(crate) fn routes() -> Router<Arc<AppState>> {
    Router::new()
        .route("/api/task", get(task))
        .route("/api/unfun", post(unfun))
        .route("/api/ratings", post(ratings))
        .route("/api/me", get(me))
        .route("/api/leaderboard", get(leaderboard))
        .route("/api/export", get(export))
}

#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let status = match &e {
            StoreError::UnknownHeadline(_) | StoreError::NotSatirical(_) => StatusCode::NOT_FOUND,
            StoreError::Duplicate => StatusCode::CONFLICT,
            StoreError::Invalid { .. } | StoreError::TaskNotIssued => StatusCode::UNPROCESSABLE_ENTITY,
            StoreError::Core(_) | StoreError::Sqlite(_) | StoreError::Json(_) | StoreError::Io(_) => {
                tracing::error!("store failure: {e}");
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        ApiError::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Runs store work off the async executor.
async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce() -> ApiResult<T> + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

fn now() -> i64 {
    chrono::Utc::now().timestamp()
}

/// Task payload. Rating tasks list both items in presentation order and
/// never say which one is the ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "lowercase")]
pub enum TaskBody {
    Unfun { headline: String, headline_id: String },
    Rate { items: Vec<HeadlineRef> },
}

async fn task(State(state): State<Arc<AppState>>, Extension(session): Extension<Session>) -> ApiResult<Json<TaskBody>> {
    let mut rng = state.next_rng();
    blocking(move || {
        let player = session.player_id;
        let pool = state.store.task_pool_for(&player)?;
        let task = sample_task(&pool, &player, &mut rng, &state.game).map_err(|e| match e {
            unfun_core::Error::NoTask(m) => ApiError::new(StatusCode::SERVICE_UNAVAILABLE, m),
            other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, other.to_string()),
        })?;
        state.store.issue_task(&player, &task, now())?;
        Ok(Json(match task {
            TaskAssignment::Unfun { headline } => TaskBody::Unfun {
                headline: headline.text,
                headline_id: headline.id,
            },
            TaskAssignment::Rate { items, .. } => TaskBody::Rate { items: items.to_vec() },
        }))
    })
    .await
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfunRequest {
    pub headline_id: String,
    pub modified_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfunResponse {
    pub submission_id: String,
    /// Id of the modified headline, i.e. of the new pair.
    pub modified_id: String,
    /// The reward depends on ratings that have not arrived yet.
    pub pending_reward: bool,
}

async fn unfun(
    State(state): State<Arc<AppState>>,
    Extension(session): Extension<Session>,
    Json(req): Json<UnfunRequest>,
) -> ApiResult<Json<UnfunResponse>> {
    blocking(move || {
        let outcome = state
            .store
            .record_submission(&session.player_id, &req.headline_id, &req.modified_text, now())?;
        Ok(Json(UnfunResponse {
            submission_id: outcome.submission.id,
            modified_id: outcome.headline.id,
            pending_reward: true,
        }))
    })
    .await
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingItem {
    pub id: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingsRequest {
    pub items: Vec<RatingItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingsResponse {
    pub reward: f64,
}

async fn ratings(
    State(state): State<Arc<AppState>>,
    Extension(session): Extension<Session>,
    Json(req): Json<RatingsRequest>,
) -> ApiResult<Json<RatingsResponse>> {
    blocking(move || {
        let items: Vec<(String, f64)> = req.items.into_iter().map(|i| (i.id, i.value)).collect();
        let reward = state
            .store
            .complete_rating_task(&session.player_id, &items, &state.game, now())?;
        Ok(Json(RatingsResponse { reward }))
    })
    .await
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileBody {
    pub player_id: String,
    pub cumulative_unfun_reward: f64,
    pub cumulative_rating_reward: f64,
    pub total_reward: f64,
    pub unfun_count: u64,
    pub rating_count: u64,
}

impl From<unfun_core::records::PlayerProfile> for ProfileBody {
    fn from(p: unfun_core::records::PlayerProfile) -> Self {
        ProfileBody {
            total_reward: p.total_reward(),
            player_id: p.player_id,
            cumulative_unfun_reward: p.cumulative_unfun_reward,
            cumulative_rating_reward: p.cumulative_rating_reward,
            unfun_count: p.unfun_count,
            rating_count: p.rating_count,
        }
    }
}

async fn me(State(state): State<Arc<AppState>>, Extension(session): Extension<Session>) -> ApiResult<Json<ProfileBody>> {
    blocking(move || {
        let profile = state.store.profile(&session.player_id, &state.game)?.unwrap_or_else(|| {
            unfun_core::records::PlayerProfile {
                player_id: session.player_id.clone(),
                ..Default::default()
            }
        });
        Ok(Json(profile.into()))
    })
    .await
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub rank: usize,
    #[serde(flatten)]
    pub profile: ProfileBody,
}

#[derive(Debug, Deserialize)]
struct LeaderboardQuery {
    limit: Option<usize>,
}

async fn leaderboard(
    State(state): State<Arc<AppState>>,
    Query(q): Query<LeaderboardQuery>,
) -> ApiResult<Json<Vec<LeaderboardEntry>>> {
    blocking(move || {
        let limit = q.limit.unwrap_or(state.leaderboard_size).min(state.leaderboard_size.max(1));
        let board = state.store.leaderboard(limit, &state.game)?;
        Ok(Json(
            board
                .into_iter()
                .enumerate()
                .map(|(i, p)| LeaderboardEntry {
                    rank: i + 1,
                    profile: p.into(),
                })
                .collect(),
        ))
    })
    .await
}

async fn export(State(state): State<Arc<AppState>>) -> ApiResult<Response> {
    blocking(move || {
        let mut body = Vec::new();
        state.store.export_pairs(&mut body)?;
        Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response())
    })
    .await
}
