//! JSON-over-HTTP API:
//!
//! | method | path                      | body             | reply            |
//! |--------|---------------------------|------------------|------------------|
//! | POST   | `/sessions`               | `CreateSession`  | `SessionSummary` |
//! | GET    | `/sessions/{id}/next`     |                  | `PairView`       |
//! | POST   | `/sessions/{id}/response` | `SubmitResponse` | `Progress`       |
//! | POST   | `/sessions/{id}/replay`   |                  | `PairView`       |
//! | GET    | `/sessions/{id}`          |                  | `SessionSummary` |
//!
//! Errors reply with `{"error": {"kind", "message", ...}}`.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};

use crate::error::Error;
use crate::service::{CreateSession, SessionService, SubmitResponse};

/// Environment variable holding the listen address.
pub const LISTEN_ENV: &str = "JND_LISTEN";
pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";

pub struct ApiError(Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError(Error::Validation(e.body_text()))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            Error::UnknownPackage(_) | Error::UnknownSession(_) => StatusCode::NOT_FOUND,
            Error::Validation(_) | Error::Core(_) | Error::Json(_) => StatusCode::UNPROCESSABLE_ENTITY,
            Error::NoMorePairs(_) => StatusCode::GONE,
            Error::NotAccepting { .. } | Error::AlreadyAnswered { .. } => StatusCode::CONFLICT,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(self.0.to_body())).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

async fn create(
    State(svc): State<Arc<SessionService>>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<crate::session::SessionSummary>), ApiError> {
    let Json(req) = body?;
    Ok((StatusCode::CREATED, Json(svc.create_session(&req)?)))
}

async fn next(State(svc): State<Arc<SessionService>>, Path(id): Path<String>) -> ApiResult<crate::session::PairView> {
    Ok(Json(svc.next_pair(&id)?))
}

async fn respond(
    State(svc): State<Arc<SessionService>>,
    Path(id): Path<String>,
    body: Result<Json<SubmitResponse>, JsonRejection>,
) -> ApiResult<crate::session::Progress> {
    let Json(req) = body?;
    Ok(Json(svc.submit_response(&id, &req)?))
}

async fn replay(State(svc): State<Arc<SessionService>>, Path(id): Path<String>) -> ApiResult<crate::session::PairView> {
    Ok(Json(svc.replay(&id)?))
}

async fn summary(
    State(svc): State<Arc<SessionService>>,
    Path(id): Path<String>,
) -> ApiResult<crate::session::SessionSummary> {
    Ok(Json(svc.summary(&id)?))
}

pub fn router(service: Arc<SessionService>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(summary))
        .route("/sessions/{id}/next", get(next))
        .route("/sessions/{id}/response", post(respond))
        .route("/sessions/{id}/replay", post(replay))
        .with_state(service)
}

/// Listen address from the environment, or the default.
pub fn listen_addr() -> String {
    std::env::var(LISTEN_ENV).unwrap_or_else(|_| DEFAULT_LISTEN.into())
}

pub async fn serve(service: Arc<SessionService>, addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
