//! HTTP and WebSocket front end. One simulation lives on its own thread;
//! handlers talk to it over a channel and frames fan out over a broadcast.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::mpsc::{self, RecvTimeoutError};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use clock_core::{Button, ClockError, Edge};
use serde::Deserialize;
use serde_json::json;
use tokio::net::TcpListener;
use tokio::sync::{broadcast, oneshot};
use tower_http::services::ServeDir;

use crate::config::SimConfig;
use crate::error::SimError;
use crate::frame::Frame;
use crate::sim::Simulation;

/// How often the simulation thread catches virtual time up with the wall
/// clock when nothing else is happening.
const PACE_INTERVAL: Duration = Duration::from_millis(20);

const PLACEHOLDER_PAGE: &str = r#"<!doctype html>
<html>
<head><meta charset="utf-8"><title>clocksim</title></head>
<body>
<p>No UI bundle is being served (start with --ui-dir to serve one). Live state:</p>
<pre id="lcd"></pre>
<button data-b="set">SET</button> <button data-b="inc">INC</button> <button data-b="dec">DEC</button>
<script>
async function refresh() {
  const s = await (await fetch('/api/state')).json();
  document.getElementById('lcd').textContent = `${s.time} ${s.mode}\n\n${s.ascii}`;
}
for (const b of document.querySelectorAll('button')) {
  const send = (action) => fetch('/api/button', {method: 'POST', headers: {'content-type': 'application/json'},
    body: JSON.stringify({button: b.dataset.b, action})}).then(refresh);
  b.onpointerdown = () => send('down');
  b.onpointerup = () => send('up');
}
setInterval(refresh, 500);
refresh();
</script>
</body>
</html>
"#;

enum Request {
    State(oneshot::Sender<Result<Frame, String>>),
    Button {
        button: Button,
        edge: Edge,
        reply: oneshot::Sender<Result<(), SimError>>,
    },
}

/// Handle shared by all request handlers.
#[derive(Clone)]
pub struct AppState {
    requests: mpsc::Sender<Request>,
    frames: broadcast::Sender<Frame>,
    config: Arc<SimConfig>,
}

impl AppState {
    pub fn subscribe(&self) -> broadcast::Receiver<Frame> {
        self.frames.subscribe()
    }

    pub async fn current(&self) -> Result<Frame, String> {
        let (reply, rx) = oneshot::channel();
        self.requests
            .send(Request::State(reply))
            .map_err(|_| "simulation stopped".to_string())?;
        rx.await.map_err(|_| "simulation stopped".to_string())?
    }

    pub async fn button(&self, button: Button, edge: Edge) -> Result<(), SimError> {
        let (reply, rx) = oneshot::channel();
        let stopped = || SimError::Config("simulation stopped".into());
        self.requests
            .send(Request::Button { button, edge, reply })
            .map_err(|_| stopped())?;
        rx.await.map_err(|_| stopped())?
    }
}

/// Builds the simulation and starts its thread. With speed 0 virtual time
/// stays put and only button posts change the clock.
pub fn start_simulation(config: SimConfig) -> Result<AppState, SimError> {
    let mut sim = Simulation::new(&config)?;
    // Subscribers get the current frame on connect, so the initial one is
    // not broadcast.
    sim.take_frames();
    let (requests, rx) = mpsc::channel();
    let (frames, _) = broadcast::channel(256);
    let frames_tx = frames.clone();
    let speed = config.speed;
    thread::Builder::new()
        .name("simulation".into())
        .spawn(move || sim_loop(sim, speed, rx, frames_tx))?;
    Ok(AppState {
        requests,
        frames,
        config: Arc::new(config),
    })
}

fn sim_loop(mut sim: Simulation, speed: f64, requests: mpsc::Receiver<Request>, frames: broadcast::Sender<Frame>) {
    let started = Instant::now();
    let mut failure: Option<String> = None;
    loop {
        let request = requests.recv_timeout(PACE_INTERVAL);
        if speed > 0.0 && failure.is_none() {
            let t = (started.elapsed().as_secs_f64() * 1000.0 * speed) as u64;
            if let Err(e) = sim.advance_to(t).and_then(|()| sim.settle()) {
                failure = Some(e.to_string());
            }
        }
        match request {
            Ok(Request::State(reply)) => {
                let _ = reply.send(match &failure {
                    Some(e) => Err(e.clone()),
                    None => Ok(sim.current_frame()),
                });
            }
            Ok(Request::Button { button, edge, reply }) => {
                let result = match &failure {
                    Some(e) => Err(SimError::Config(e.clone())),
                    None => sim.button(button, edge).and_then(|()| sim.settle()),
                };
                let _ = reply.send(result);
            }
            Err(RecvTimeoutError::Timeout) => {}
            Err(RecvTimeoutError::Disconnected) => return,
        }
        for frame in sim.take_frames() {
            let _ = frames.send(frame);
        }
    }
}

fn error(status: StatusCode, code: &str, message: impl ToString) -> Response {
    (status, Json(json!({ "error": code, "message": message.to_string() }))).into_response()
}

async fn get_state(State(app): State<AppState>) -> Response {
    match app.current().await {
        Ok(frame) => Json(frame).into_response(),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, "simulation_failed", e),
    }
}

async fn get_config(State(app): State<AppState>) -> Response {
    Json(app.config.as_ref().clone()).into_response()
}

#[derive(Deserialize)]
struct ButtonBody {
    button: String,
    action: String,
}

fn parse_button(body: &[u8]) -> Result<(Button, Edge), String> {
    let body: ButtonBody = serde_json::from_slice(body).map_err(|e| e.to_string())?;
    let button = Button::from_str(&body.button).map_err(|e| e.to_string())?;
    let edge = match body.action.as_str() {
        "down" => Edge::Press,
        "up" => Edge::Release,
        other => return Err(format!("bad action '{other}' (expected down or up)")),
    };
    Ok((button, edge))
}

async fn post_button(State(app): State<AppState>, body: Bytes) -> Response {
    let (button, edge) = match parse_button(&body) {
        Ok(parsed) => parsed,
        Err(e) => return error(StatusCode::BAD_REQUEST, "bad_button", e),
    };
    match app.button(button, edge).await {
        Ok(()) => StatusCode::NO_CONTENT.into_response(),
        Err(e @ SimError::Button(ClockError::ProtocolViolation { .. })) => {
            error(StatusCode::CONFLICT, "protocol_violation", e)
        }
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, "simulation_failed", e),
    }
}

async fn events(ws: WebSocketUpgrade, State(app): State<AppState>) -> Response {
    ws.on_upgrade(move |socket| stream_frames(socket, app))
}

async fn stream_frames(mut socket: WebSocket, app: AppState) {
    let mut frames = app.subscribe();
    if let Ok(frame) = app.current().await {
        if send_frame(&mut socket, &frame).await.is_err() {
            return;
        }
    }
    loop {
        tokio::select! {
            next = frames.recv() => match next {
                Ok(frame) => {
                    if send_frame(&mut socket, &frame).await.is_err() {
                        return;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(_)) => continue,
                Err(broadcast::error::RecvError::Closed) => return,
            },
            incoming = socket.recv() => match incoming {
                Some(Ok(Message::Close(_))) | Some(Err(_)) | None => return,
                Some(Ok(_)) => {}
            },
        }
    }
}

async fn send_frame(socket: &mut WebSocket, frame: &Frame) -> Result<(), axum::Error> {
    let text = serde_json::to_string(frame).expect("frames serialize");
    socket.send(Message::Text(text.into())).await
}

/// Routes for the API, plus static files from `ui_dir` or a bare
/// placeholder page when no UI bundle is given.
pub fn router(app: AppState, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/state", get(get_state))
        .route("/api/config", get(get_config))
        .route("/api/button", post(post_button))
        .route("/api/events", get(events))
        .with_state(app);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER_PAGE) })),
    }
}

pub async fn bind(addr: SocketAddr) -> Result<TcpListener, SimError> {
    TcpListener::bind(addr).await.map_err(|e| match e.kind() {
        std::io::ErrorKind::AddrInUse => SimError::PortInUse(addr.port()),
        _ => SimError::Io(e),
    })
}

/// Runs the service until the process is stopped.
pub async fn serve(config: SimConfig, addr: SocketAddr, ui_dir: Option<PathBuf>) -> Result<(), SimError> {
    if let Some(dir) = &ui_dir {
        if !dir.is_dir() {
            return Err(SimError::Config(format!("UI directory {} does not exist", dir.display())));
        }
    }
    let listener = bind(addr).await?;
    let app = start_simulation(config)?;
    axum::serve(listener, router(app, ui_dir)).await?;
    Ok(())
}
