use std::sync::Arc;
use std::time::UNIX_EPOCH;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use guidemap_core::imaging::io::{decode_png, encode_channel_png, encode_mask_png};
use guidemap_core::interaction::{InteractiveSession, Scene, SessionSummary};
use guidemap_core::{ChannelKind, Click, Pixel, Polarity, ScaleEstimate, SlicParams};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;
use tower_http::trace::TraceLayer;

use crate::error::{ApiError, ApiResult};
use crate::state::{AppState, SessionHandle};

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClickRequest {
    pub x: usize,
    pub y: usize,
    pub polarity: Polarity,
}

/// Reply to a click or an undo. `mask` is a base64 PNG.
#[derive(Debug, Serialize, Deserialize)]
pub struct MaskReply {
    pub mask: String,
    pub click_count: usize,
    pub foreground: usize,
    pub scale: Option<ScaleEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub undone: Option<Click>,
}

#[derive(Debug, Serialize)]
pub struct SessionInfo {
    pub id: String,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    #[serde(flatten)]
    pub summary: SessionSummary,
}

pub fn router(state: Arc<AppState>) -> Router {
    let limit = state.config.max_bytes;
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_info))
        .route("/sessions/{id}/clicks", post(post_click))
        .route("/sessions/{id}/clicks/last", delete(undo_click))
        .route("/sessions/{id}/mask", get(get_mask))
        .route("/sessions/{id}/channels/{kind}", get(get_channel))
        .layer(DefaultBodyLimit::max(limit))
        .layer(CorsLayer::permissive())
        .layer(TraceLayer::new_for_http())
        .with_state(state)
}

fn lookup(state: &AppState, id: &str) -> ApiResult<Arc<SessionHandle>> {
    state.get(id).ok_or_else(|| ApiError::not_found(id))
}

/// Runs CPU-bound work off the async executor.
async fn blocking<R: Send + 'static>(
    f: impl FnOnce() -> ApiResult<R> + Send + 'static,
) -> ApiResult<R> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

fn png(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, "image/png")], bytes).into_response()
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<Created>)> {
    let params = SlicParams::new(state.config.k);
    let max_proposals = state.config.max_proposals;
    let session = blocking(move || {
        let image = decode_png(&body)
            .map_err(|e| ApiError::bad_request(format!("cannot decode PNG: {e}")))?;
        let scene = Scene::prepare(image, &params, max_proposals)?;
        Ok(InteractiveSession::new(scene)?)
    })
    .await?;
    let handle = state.insert(session);
    tracing::info!(id = %handle.id, "session created");
    Ok((
        StatusCode::CREATED,
        Json(Created {
            id: handle.id.clone(),
        }),
    ))
}

fn mask_reply(session: &InteractiveSession, undone: Option<Click>) -> ApiResult<MaskReply> {
    let mask = session.mask();
    Ok(MaskReply {
        mask: STANDARD.encode(encode_mask_png(mask)?),
        click_count: session.clicks().len(),
        foreground: mask.count(),
        scale: session.scale(),
        undone,
    })
}

async fn post_click(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<ClickRequest>,
) -> ApiResult<Json<MaskReply>> {
    let handle = lookup(&state, &id)?;
    let mut guard = Arc::clone(&handle.state).write_owned().await;
    let reply = blocking(move || {
        let click = Click::new(Pixel::new(req.x, req.y), req.polarity);
        if !guard.contains(click.pixel()) {
            let (w, h) = guard.scene().dims();
            return Err(ApiError::bad_request(format!(
                "click ({}, {}) is outside the {w}x{h} image",
                req.x, req.y
            )));
        }
        guard.add_click(click)?;
        mask_reply(&guard, None)
    })
    .await?;
    Ok(Json(reply))
}

async fn undo_click(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<MaskReply>> {
    let handle = lookup(&state, &id)?;
    let mut guard = handle.state.write().await;
    let undone = guard
        .undo()
        .ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "session has no clicks to undo"))?;
    Ok(Json(mask_reply(&guard, Some(undone))?))
}

async fn get_mask(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let handle = lookup(&state, &id)?;
    let guard = handle.state.read().await;
    Ok(png(encode_mask_png(guard.mask())?))
}

async fn get_channel(
    State(state): State<Arc<AppState>>,
    Path((id, kind)): Path<(String, String)>,
) -> ApiResult<Response> {
    let kind: ChannelKind = kind
        .parse()
        .map_err(|e: guidemap_core::Error| ApiError::bad_request(e.to_string()))?;
    let handle = lookup(&state, &id)?;
    let guard = Arc::clone(&handle.state).read_owned().await;
    let bytes = blocking(move || Ok(encode_channel_png(&guard.channel(kind)?)?)).await?;
    Ok(png(bytes))
}

async fn session_info(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionInfo>> {
    let handle = lookup(&state, &id)?;
    let guard = handle.state.read().await;
    Ok(Json(SessionInfo {
        id: handle.id.clone(),
        created_at: handle
            .created_at
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        summary: guard.summary(),
    }))
}
