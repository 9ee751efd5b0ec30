//! HTTP routes over [`PollService`].

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use budgetpoll_core::{Amount, Answer};
use serde::Deserialize;
use serde_json::json;

use crate::poll::PollConfig;
use crate::service::{rescale_preview, PollService};
use crate::ServiceError;

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        if status.is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        (status, Json(json!({"error": self.code(), "message": self.to_string()}))).into_response()
    }
}

type AppState = Arc<PollService>;
type ApiResult = Result<Response, ServiceError>;

fn bearer(headers: &HeaderMap) -> Option<&str> {
    headers
        .get(header::AUTHORIZATION)?
        .to_str()
        .ok()?
        .strip_prefix("Bearer ")
        .map(str::trim)
}

fn body<T>(payload: Result<Json<T>, JsonRejection>, wrap: fn(String) -> ServiceError) -> Result<T, ServiceError> {
    payload.map(|Json(v)| v).map_err(|e| wrap(e.body_text()))
}

#[derive(Deserialize)]
struct NewSession {
    participant_id: String,
}

#[derive(Deserialize)]
struct IdealBody {
    ideal: Vec<Amount>,
    #[serde(default)]
    use_rescale: bool,
}

#[derive(Deserialize)]
struct AnswerBody {
    question_id: String,
    answer: Answer,
}

#[derive(Deserialize)]
struct RescaleBody {
    values: Vec<Amount>,
}

async fn create_poll(
    State(svc): State<AppState>,
    headers: HeaderMap,
    payload: Result<Json<PollConfig>, JsonRejection>,
) -> ApiResult {
    svc.check_admin(bearer(&headers))?;
    let config = body(payload, ServiceError::InvalidConfig)?;
    Ok((StatusCode::CREATED, Json(svc.create_poll(config)?)).into_response())
}

async fn get_poll(State(svc): State<AppState>, Path(id): Path<String>) -> ApiResult {
    Ok(Json(svc.poll(&id)?).into_response())
}

async fn close_poll(State(svc): State<AppState>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult {
    svc.check_admin(bearer(&headers))?;
    Ok(Json(svc.close_poll(&id)?).into_response())
}

async fn start_session(
    State(svc): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<NewSession>, JsonRejection>,
) -> ApiResult {
    let req = body(payload, ServiceError::ValidationFailed)?;
    let ticket = svc.start_session(&id, &req.participant_id)?;
    Ok((StatusCode::CREATED, Json(ticket)).into_response())
}

async fn submit_ideal(
    State(svc): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    payload: Result<Json<IdealBody>, JsonRejection>,
) -> ApiResult {
    let req = body(payload, ServiceError::ValidationFailed)?;
    Ok(Json(svc.submit_ideal(&id, bearer(&headers), &req.ideal, req.use_rescale)?).into_response())
}

async fn next_question(State(svc): State<AppState>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult {
    Ok(Json(svc.next_question(&id, bearer(&headers))?).into_response())
}

async fn submit_answer(
    State(svc): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    payload: Result<Json<AnswerBody>, JsonRejection>,
) -> ApiResult {
    let req = body(payload, |m| {
        ServiceError::ValidationFailed(format!("malformed answer: {m}"))
    })?;
    Ok(Json(svc.submit_answer(&id, bearer(&headers), &req.question_id, req.answer)?).into_response())
}

async fn export(State(svc): State<AppState>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult {
    svc.check_admin(bearer(&headers))?;
    let text = svc.export(&id)?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], text).into_response())
}

async fn rescale(payload: Result<Json<RescaleBody>, JsonRejection>) -> ApiResult {
    let req = body(payload, ServiceError::ValidationFailed)?;
    let allocation = rescale_preview(&req.values)?;
    Ok(Json(json!({ "allocation": allocation })).into_response())
}

async fn health() -> &'static str {
    "ok"
}

pub fn router(service: Arc<PollService>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/rescale", post(rescale))
        .route("/polls", post(create_poll))
        .route("/polls/{id}", get(get_poll))
        .route("/polls/{id}/close", post(close_poll))
        .route("/polls/{id}/sessions", post(start_session))
        .route("/polls/{id}/export", get(export))
        .route("/sessions/{id}/ideal", post(submit_ideal))
        .route("/sessions/{id}/next", get(next_question))
        .route("/sessions/{id}/answers", post(submit_answer))
        .with_state(service)
}

/// Serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, service: Arc<PollService>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
