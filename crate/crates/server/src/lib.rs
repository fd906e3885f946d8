//! HTTP control surface over an exploration: the model graph, per-state
//! snapshots, coverage, and reproduce jobs.
//!
//! Handlers only ever read published snapshots, so a running exploration is
//! never blocked by requests.

mod jobs;

use std::convert::Infallible;
use std::future::Future;
use std::path::Path;
use std::time::Duration;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, State};
use axum::handler::HandlerWithoutStateExt;
use axum::http::{header, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::Stream;
use serde::Deserialize;
use serde_json::json;
use thiserror::Error;
use tokio::net::TcpListener;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

use uiwalk_core::coverage::CoverageLog;
use uiwalk_core::explorer::LiveView;
use uiwalk_core::model::{StateId, StateModel};
use uiwalk_core::shared::SnapshotCell;

pub use jobs::{EnvRunner, JobQueue, JobStatus, ReproduceJob, ReproduceRunner};

pub const DEFAULT_BIND: &str = "localhost:5000";

/// How often the event stream checks for new coverage samples.
const EVENT_POLL: Duration = Duration::from_millis(200);

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("cannot bind {addr}")]
    Bind {
        addr: String,
        #[source]
        source: std::io::Error,
    },
    #[error("server failed: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone)]
pub struct ServerState {
    model: SnapshotCell<StateModel>,
    coverage: SnapshotCell<CoverageLog>,
    jobs: JobQueue,
}

impl ServerState {
    /// Serves whatever is published into `live`; reproduce jobs run on
    /// `runner`.
    pub fn new(live: &LiveView, runner: impl ReproduceRunner) -> Self {
        ServerState {
            jobs: JobQueue::start(live.model.clone(), runner),
            model: live.model.clone(),
            coverage: live.coverage.clone(),
        }
    }

    pub fn jobs(&self) -> &JobQueue {
        &self.jobs
    }
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

pub fn router(state: ServerState, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/model/graph", get(graph))
        .route("/api/state/{id}/snapshot", get(snapshot))
        .route("/api/coverage", get(coverage_csv))
        .route("/api/coverage/summary", get(coverage_summary))
        .route("/api/reproduce", post(submit))
        .route("/api/reproduce/{job_id}", get(job))
        .route("/api/events", get(events))
        .with_state(state);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir).fallback(not_found.into_service())),
        None => api.fallback(not_found),
    };
    app.layer(CorsLayer::permissive())
}

pub async fn bind(addr: &str) -> Result<TcpListener, ServerError> {
    TcpListener::bind(addr).await.map_err(|source| ServerError::Bind {
        addr: addr.to_string(),
        source,
    })
}

/// Serves `app` on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    app: Router,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServerError> {
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await?;
    Ok(())
}

async fn not_found() -> ApiError {
    ApiError(StatusCode::NOT_FOUND, "not found".into())
}

async fn graph(State(s): State<ServerState>) -> Response {
    Json(s.model.read().export_graph()).into_response()
}

async fn snapshot(State(s): State<ServerState>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    let id: usize = id
        .parse()
        .map_err(|_| ApiError(StatusCode::BAD_REQUEST, format!("state id must be a number, got `{id}`")))?;
    let model = s.model.read();
    let state = model
        .state(StateId(id))
        .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("unknown state {id}")))?;
    Ok(Json(&state.snapshot).into_response())
}

async fn coverage_csv(State(s): State<ServerState>) -> Response {
    ([(header::CONTENT_TYPE, "text/csv")], s.coverage.read().to_csv()).into_response()
}

async fn coverage_summary(State(s): State<ServerState>) -> Response {
    Json(s.coverage.read().summary()).into_response()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReproduceRequest {
    target: usize,
}

async fn submit(
    State(s): State<ServerState>,
    body: Result<Json<ReproduceRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let Json(request) = body.map_err(|rejection| {
        let status = match rejection {
            JsonRejection::MissingJsonContentType(_) => StatusCode::UNSUPPORTED_MEDIA_TYPE,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError(status, rejection.body_text())
    })?;
    let target = StateId(request.target);
    if !s.model.read().contains(target) {
        return Err(ApiError(StatusCode::NOT_FOUND, format!("unknown state {target}")));
    }
    let job_id = s.jobs.submit(target);
    Ok((StatusCode::ACCEPTED, Json(json!({ "job_id": job_id }))).into_response())
}

async fn job(State(s): State<ServerState>, UrlPath(job_id): UrlPath<String>) -> Result<Response, ApiError> {
    s.jobs
        .get(&job_id)
        .map(|j| Json(j).into_response())
        .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("unknown job {job_id}")))
}

/// Server-sent `coverage` events, one per sample, replaying the samples
/// recorded so far and then following new ones.
async fn events(State(s): State<ServerState>) -> Sse<impl Stream<Item = Result<Event, Infallible>>> {
    let stream = futures::stream::unfold((s.coverage, 0usize), |(cell, mut sent)| async move {
        loop {
            let log = cell.read();
            if log.len() < sent {
                // A new run replaced the log.
                sent = 0;
            }
            if let Some(sample) = log.samples().get(sent) {
                let event = Event::default()
                    .event("coverage")
                    .json_data(sample)
                    .expect("samples always serialize");
                return Some((Ok(event), (cell, sent + 1)));
            }
            drop(log);
            tokio::time::sleep(EVENT_POLL).await;
        }
    });
    Sse::new(stream).keep_alive(KeepAlive::default())
}
