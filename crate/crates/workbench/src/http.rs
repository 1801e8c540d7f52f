//! JSON-over-HTTP API.
//!
//! | method | path                                   |
//! |--------|----------------------------------------|
//! | POST   | `/sessions` (raw PNG/JPEG body)        |
//! | GET    | `/sessions/{id}`                       |
//! | POST   | `/sessions/{id}/seeds`                 |
//! | DELETE | `/sessions/{id}/seeds`                 |
//! | POST   | `/sessions/{id}/pipeline`              |
//! | GET    | `/sessions/{id}/artifacts/{kind}[/{k}]`|
//! | GET    | `/healthz`                             |

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;
use tower_http::services::ServeDir;
use tower_http::trace::TraceLayer;

use crate::error::WorkbenchError;
use crate::session::{ArtifactQuery, PipelineRequest, SeedRequest, SessionStore};

const MAX_UPLOAD: usize = 256 * 1024 * 1024;

impl WorkbenchError {
    pub fn status(&self) -> StatusCode {
        use lulc_core::Error as Core;
        match self {
            WorkbenchError::NotFound(_) => StatusCode::NOT_FOUND,
            WorkbenchError::Conflict(_) => StatusCode::CONFLICT,
            WorkbenchError::Rejected(_) | WorkbenchError::Core(Core::Degenerate(_) | Core::EmptySample(_)) => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            WorkbenchError::Core(Core::Bounds { .. }) => StatusCode::BAD_REQUEST,
            WorkbenchError::Core(_)
            | WorkbenchError::Decode(_)
            | WorkbenchError::EmptyImage
            | WorkbenchError::Json(_)
            | WorkbenchError::BadRequest(_) => StatusCode::BAD_REQUEST,
            WorkbenchError::Io(_) | WorkbenchError::Encode(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for WorkbenchError {
    fn into_response(self) -> Response {
        let status = self.status();
        if status.is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

type Shared = Arc<SessionStore>;
type ApiResult<T> = Result<T, WorkbenchError>;

/// Run blocking store work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| WorkbenchError::Io(std::io::Error::other(e)))?
}

async fn healthz() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

async fn create_session(State(store): State<Shared>, body: Bytes) -> ApiResult<impl IntoResponse> {
    let session = blocking(move || store.create(&body)).await?;
    Ok((StatusCode::CREATED, Json(session)))
}

async fn get_session(State(store): State<Shared>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(move || store.get(&id)).await?))
}

fn parse_json<T: serde::de::DeserializeOwned + Default>(body: &[u8]) -> ApiResult<T> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    Ok(serde_json::from_slice(body)?)
}

async fn add_seed(
    State(store): State<Shared>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let req: SeedRequest = serde_json::from_slice(&body)?;
    Ok(Json(blocking(move || store.add_seed(&id, &req)).await?))
}

async fn clear_seeds(State(store): State<Shared>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(move || store.clear_seeds(&id)).await?))
}

async fn run_pipeline(
    State(store): State<Shared>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let req: PipelineRequest = parse_json(&body)?;
    Ok(Json(blocking(move || store.run_pipeline(&id, req)).await?))
}

async fn artifact(
    store: Shared,
    id: String,
    kind: String,
    k: Option<String>,
    query: ArtifactQuery,
) -> ApiResult<Response> {
    let k = match k {
        None => None,
        Some(s) => Some(
            s.parse::<usize>()
                .map_err(|_| WorkbenchError::NotFound(format!("cluster {s}")))?,
        ),
    };
    let a = blocking(move || store.artifact(&id, &kind, k, &query)).await?;
    Ok(([(header::CONTENT_TYPE, a.content_type)], a.body).into_response())
}

async fn artifact_all(
    State(store): State<Shared>,
    Path((id, kind)): Path<(String, String)>,
    Query(query): Query<ArtifactQuery>,
) -> ApiResult<Response> {
    artifact(store, id, kind, None, query).await
}

async fn artifact_one(
    State(store): State<Shared>,
    Path((id, kind, k)): Path<(String, String, String)>,
    Query(query): Query<ArtifactQuery>,
) -> ApiResult<Response> {
    artifact(store, id, kind, Some(k), query).await
}

/// API routes, plus an optional static bundle served at `/`.
pub fn router(store: Arc<SessionStore>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/healthz", get(healthz))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/seeds", post(add_seed).delete(clear_seeds))
        .route("/sessions/{id}/pipeline", post(run_pipeline))
        .route("/sessions/{id}/artifacts/{kind}", get(artifact_all))
        .route("/sessions/{id}/artifacts/{kind}/{k}", get(artifact_one))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD))
        .with_state(store);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(TraceLayer::new_for_http())
}

pub async fn serve(store: Arc<SessionStore>, static_dir: Option<PathBuf>, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(store, static_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
