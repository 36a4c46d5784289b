use std::future::Future;
use std::path::Path;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::IntoResponse;
use axum::routing::get;
use axum::{Json, Router};
use fmc_core::env::Rocket;
use fmc_core::Environment;
use futures_util::{SinkExt, StreamExt};
use serde_json::json;
use tokio::net::TcpListener;
use tokio::sync::{broadcast, mpsc};
use tower_http::services::ServeDir;
use tracing::debug;

use crate::session::SessionLink;
use crate::steering::{apply_steering, SteeringMessage};
use crate::{spawn_session, AssistError, Session, SessionConfig};

#[derive(Clone)]
struct AppState {
    config: SessionConfig,
    link: SessionLink,
}

/// `/session`, `/config`, and static files from `static_dir` for everything else.
pub fn router(config: SessionConfig, link: SessionLink, static_dir: &Path) -> Router {
    Router::new()
        .route("/session", get(session_ws))
        .route("/config", get(get_config))
        .fallback_service(ServeDir::new(static_dir))
        .with_state(AppState { config, link })
}

/// Starts the simulation and serves it until `shutdown` resolves.
pub async fn serve<F>(listener: TcpListener, config: SessionConfig, static_dir: &Path, shutdown: F) -> Result<(), AssistError>
where
    F: Future<Output = ()> + Send + 'static,
{
    let session = Session::new(config.clone())?;
    let (link, _handle) = spawn_session(session);
    let app = router(config, link, static_dir);
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(|e| AssistError::Io(e.to_string()))
}

async fn get_config(State(app): State<AppState>) -> Json<SessionConfig> {
    Json(app.config)
}

async fn session_ws(ws: WebSocketUpgrade, State(app): State<AppState>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| client(socket, app))
}

fn parse_steering(text: &str, max_strength: f64) -> Result<SteeringMessage, String> {
    let msg: SteeringMessage = serde_json::from_str(text).map_err(|e| e.to_string())?;
    apply_steering(&msg, Rocket::default().action_spec(), max_strength).map_err(|e| e.to_string())?;
    Ok(msg)
}

async fn client(socket: WebSocket, app: AppState) {
    let (mut sink, mut stream) = socket.split();
    let mut frames = app.link.frames.subscribe();
    let (reply_tx, mut reply_rx) = mpsc::channel::<String>(4);
    let writer = tokio::spawn(async move {
        loop {
            let out = tokio::select! {
                f = frames.recv() => match f {
                    Ok(text) => Message::Text(text),
                    Err(broadcast::error::RecvError::Lagged(n)) => {
                        debug!(skipped = n, "slow client");
                        continue;
                    }
                    Err(broadcast::error::RecvError::Closed) => break,
                },
                Some(reply) = reply_rx.recv() => Message::Text(reply.into()),
            };
            if sink.send(out).await.is_err() {
                break;
            }
        }
    });
    while let Some(Ok(msg)) = stream.next().await {
        match msg {
            Message::Text(text) => match parse_steering(&text, app.config.max_strength) {
                Ok(steer) => {
                    app.link.steer.send_replace(steer);
                }
                Err(e) => {
                    let _ = reply_tx.try_send(json!({"type": "error", "message": e}).to_string());
                }
            },
            Message::Close(_) => break,
            _ => {}
        }
    }
    writer.abort();
}
