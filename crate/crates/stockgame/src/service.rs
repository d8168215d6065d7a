//! HTTP game service. Every state change goes through
//! [`Session::step`] or [`Session::submit_order`]; the service only adds
//! sessions, tokens, phases and pacing around the engine.
//!
//! Requests on one session serialize on that session's mutex. Tick
//! summaries fan out to stream subscribers over a broadcast channel.

use std::collections::HashMap;
use std::convert::Infallible;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};
use std::time::Duration;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::stream::{self, Stream, StreamExt};
use rand::Rng;
use serde::Deserialize;
use stockgame_core::agents::{Decision, StrategyKind};
use stockgame_core::engine::{HumanOrder, ParticipantSpec, Scenario, Session, SimConfig, TickRecord};
use stockgame_core::{Money, ParticipantId};
use tokio::sync::{broadcast, Mutex};

use crate::scenario;
use crate::wire::{
    leaderboard, own_tick, Advanced, CreateSession, ErrorBody, ErrorDetail, OrderAccepted, OrderLog, Pacing, Phase,
    PortfolioView, RosterEntry, SessionCreated, StateView, StockView, TickSummary, VERSION,
};

pub const DEFAULT_PLAYER: &str = "player";

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }
    fn bad_request(m: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", m)
    }
    fn conflict(m: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, "conflict", m)
    }
}

impl From<stockgame_core::Error> for ApiError {
    fn from(e: stockgame_core::Error) -> Self {
        use stockgame_core::Error as E;
        match e {
            E::Finished => Self::conflict(e.to_string()),
            E::InsufficientCash { .. }
            | E::InsufficientHoldings { .. }
            | E::NonPositiveQuantity(_)
            | E::UnknownSymbol(_) => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "rejected", e.to_string()),
            other => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody { version: VERSION, error: ErrorDetail { code: self.code.into(), message: self.message } };
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

struct Game {
    phase: Phase,
    session: Session,
}

struct Slot {
    id: String,
    token: String,
    player: ParticipantId,
    pacing: Pacing,
    game: Mutex<Game>,
    ticks: broadcast::Sender<TickSummary>,
}

impl Slot {
    fn summary(&self, game: &Game) -> TickSummary {
        TickSummary::of(&self.id, game.phase, &game.session)
    }

    /// One engine step plus the phase bookkeeping and broadcast.
    fn advance(&self, game: &mut Game) -> Result<TickSummary, ApiError> {
        if game.phase == Phase::Finished {
            return Err(ApiError::conflict("session finished"));
        }
        game.phase = Phase::Running;
        game.session.step()?;
        if game.session.is_finished() {
            game.phase = Phase::Finished;
        }
        let summary = self.summary(game);
        let _ = self.ticks.send(summary.clone());
        Ok(summary)
    }
}

/// Everything needed to re-run a session on a bare engine.
#[derive(Debug, Clone)]
pub struct SessionExport {
    pub config: SimConfig,
    pub scenario: Scenario,
    pub orders: Vec<HumanOrder>,
    pub log: Vec<TickRecord>,
}

#[derive(Default)]
pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Slot>>>,
    counter: AtomicU64,
}

impl AppState {
    fn slot(&self, id: &str) -> Result<Arc<Slot>, ApiError> {
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "not_found", format!("no session {id}")))
    }

    /// Operator access to a session's full record; not exposed over HTTP
    /// because the run log carries every participant's wealth.
    pub async fn export(&self, id: &str) -> Option<SessionExport> {
        let slot = self.slot(id).ok()?;
        let game = slot.game.lock().await;
        Some(SessionExport {
            config: game.session.config().clone(),
            scenario: game.session.scenario().clone(),
            orders: game.session.human_orders().to_vec(),
            log: game.session.log().to_vec(),
        })
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/sessions", post(create))
        .route("/api/sessions/{id}/state", get(state_view))
        .route("/api/sessions/{id}/orders", post(submit).get(orders))
        .route("/api/sessions/{id}/advance", post(advance))
        .route("/api/sessions/{id}/start", post(start))
        .route("/api/sessions/{id}/stream", get(stream_ticks))
        .with_state(state)
}

fn new_token() -> String {
    let bytes: [u8; 16] = rand::rng().random();
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn build_session(req: &CreateSession) -> Result<(SimConfig, Scenario, ParticipantId), ApiError> {
    let loaded = match (&req.scenario_toml, &req.scenario) {
        (Some(text), _) => scenario::parse_scenario(text).and_then(|f| f.build(None)),
        (None, Some(name)) => match scenario::bundled(name) {
            Some(text) => scenario::parse_scenario(text).and_then(|f| f.build(None)),
            None => return Err(ApiError::bad_request(format!("unknown scenario `{name}`"))),
        },
        (None, None) => scenario::parse_scenario(scenario::bundled("paper-defaults").expect("bundled")).and_then(|f| f.build(None)),
    }
    .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let loaded = match req.ticks {
        Some(ticks) => loaded.with_ticks(ticks),
        None => loaded,
    };
    let mut config = loaded.config;
    if let Some(seed) = req.seed {
        config.seed = seed;
    }
    if let Pacing::Timed { interval_ms: 0 } = req.pacing {
        return Err(ApiError::bad_request("timed pacing needs a positive interval"));
    }
    if config.participants.iter().any(|p| p.kind == StrategyKind::Human) {
        return Err(ApiError::bad_request("the scenario roster may not contain humans"));
    }
    let player = ParticipantId::from(req.player.as_deref().unwrap_or(DEFAULT_PLAYER));
    // equal resources: the human starts with what the agents start with
    let cash = config.participants.first().map_or(Money::from_units(100_000), |p| p.initial_cash);
    config.participants.push(ParticipantSpec { id: player.clone(), kind: StrategyKind::Human, initial_cash: cash });
    Ok((config, loaded.scenario, player))
}

async fn create(State(app): State<Arc<AppState>>, body: Result<Json<CreateSession>, JsonRejection>) -> ApiResult<SessionCreated> {
    let Json(req) = body.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let (config, scenario, player) = build_session(&req)?;
    let session = Session::new(config.clone(), scenario).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let n = app.counter.fetch_add(1, Ordering::Relaxed);
    let id = format!("s{n}-{}", &new_token()[..8]);
    let slot = Arc::new(Slot {
        id: id.clone(),
        token: new_token(),
        player: player.clone(),
        pacing: req.pacing,
        game: Mutex::new(Game { phase: Phase::Lobby, session }),
        ticks: broadcast::channel(64).0,
    });
    let created = SessionCreated {
        version: VERSION,
        session_id: id.clone(),
        token: slot.token.clone(),
        participant: player,
        phase: Phase::Lobby,
        pacing: req.pacing,
        ticks: config.ticks,
        initial_cash: config.participants.last().map(|p| p.initial_cash).unwrap_or_default(),
        participants: config.participants.iter().map(|p| RosterEntry { id: p.id.clone(), strategy: p.kind }).collect(),
    };
    app.sessions.write().expect("session map poisoned").insert(id, slot);
    Ok(Json(created))
}

#[derive(Debug, Deserialize)]
struct TokenQuery {
    token: Option<String>,
}

/// Bearer header, or `?token=` for clients that cannot set headers.
fn authorize(app: &AppState, id: &str, headers: &HeaderMap, query: &TokenQuery) -> Result<Arc<Slot>, ApiError> {
    let slot = app.slot(id)?;
    let given = headers
        .get(axum::http::header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .or(query.token.as_deref());
    if given != Some(slot.token.as_str()) {
        return Err(ApiError::new(StatusCode::UNAUTHORIZED, "unauthorized", "missing or wrong session token"));
    }
    Ok(slot)
}

async fn state_view(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<TokenQuery>,
    headers: HeaderMap,
) -> ApiResult<StateView> {
    let slot = authorize(&app, &id, &headers, &q)?;
    let game = slot.game.lock().await;
    let s = &game.session;
    let snap = s.snapshot();
    let portfolio = s.portfolio(&slot.player).expect("player is a participant");
    Ok(Json(StateView {
        version: VERSION,
        session_id: slot.id.clone(),
        phase: game.phase,
        pacing: slot.pacing,
        tick: snap.tick,
        ticks: s.config().ticks,
        index_level: snap.index_level,
        digest: stockgame_core::engine::snapshot_digest(snap),
        market: StockView::market(snap),
        participant: slot.player.clone(),
        portfolio: PortfolioView::of(portfolio, snap),
        pending_orders: s.pending_orders().iter().map(|o| o.decision.clone()).collect(),
        leaderboard: leaderboard(s),
        end: s.end_reason(),
    }))
}

async fn submit(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<TokenQuery>,
    headers: HeaderMap,
    body: Result<Json<Decision>, JsonRejection>,
) -> ApiResult<OrderAccepted> {
    let slot = authorize(&app, &id, &headers, &q)?;
    let Json(decision) = body.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let mut game = slot.game.lock().await;
    if game.phase == Phase::Finished {
        return Err(ApiError::conflict("session finished"));
    }
    game.session.submit_order(&slot.player, decision)?;
    let order = game.session.pending_orders().last().expect("just queued").clone();
    Ok(Json(OrderAccepted { version: VERSION, accepted: true, order }))
}

async fn orders(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<TokenQuery>,
    headers: HeaderMap,
) -> ApiResult<OrderLog> {
    let slot = authorize(&app, &id, &headers, &q)?;
    let game = slot.game.lock().await;
    Ok(Json(OrderLog { version: VERSION, orders: game.session.human_orders().to_vec() }))
}

async fn advance(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<TokenQuery>,
    headers: HeaderMap,
) -> ApiResult<Advanced> {
    let slot = authorize(&app, &id, &headers, &q)?;
    if slot.pacing != Pacing::Manual {
        return Err(ApiError::conflict("advance is disabled under timed pacing"));
    }
    let mut game = slot.game.lock().await;
    let summary = slot.advance(&mut game)?;
    let own = own_tick(&game.session, &slot.player).ok_or_else(|| ApiError::conflict("no tick executed"))?;
    Ok(Json(Advanced { version: VERSION, summary, own }))
}

/// Leaves the lobby. Under timed pacing this starts the clock.
async fn start(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<TokenQuery>,
    headers: HeaderMap,
) -> ApiResult<TickSummary> {
    let slot = authorize(&app, &id, &headers, &q)?;
    let mut game = slot.game.lock().await;
    if game.phase != Phase::Lobby {
        return Err(ApiError::conflict("session already started"));
    }
    game.phase = Phase::Running;
    if let Pacing::Timed { interval_ms } = slot.pacing {
        tokio::spawn(run_timed(slot.clone(), Duration::from_millis(interval_ms)));
    }
    Ok(Json(slot.summary(&game)))
}

async fn run_timed(slot: Arc<Slot>, interval: Duration) {
    let mut clock = tokio::time::interval(interval);
    clock.tick().await;
    loop {
        clock.tick().await;
        let mut game = slot.game.lock().await;
        if slot.advance(&mut game).is_err() || game.phase == Phase::Finished {
            break;
        }
    }
}

fn event(summary: &TickSummary) -> Result<Event, Infallible> {
    Ok(Event::default()
        .event("tick")
        .id(summary.tick.to_string())
        .data(serde_json::to_string(summary).expect("summary serializes")))
}

/// Sends the current state first, so a reconnecting client resumes from the
/// current tick, then one event per executed tick. Ends after `finished`.
async fn stream_ticks(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<TokenQuery>,
    headers: HeaderMap,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let slot = authorize(&app, &id, &headers, &q)?;
    let (current, rx) = {
        let game = slot.game.lock().await;
        (slot.summary(&game), slot.ticks.subscribe())
    };
    let done = current.phase == Phase::Finished;
    let rest = stream::unfold((rx, done), |(mut rx, done)| async move {
        if done {
            return None;
        }
        loop {
            match rx.recv().await {
                Ok(s) => {
                    let finished = s.phase == Phase::Finished;
                    return Some((s, (rx, finished)));
                }
                Err(broadcast::error::RecvError::Lagged(_)) => continue,
                Err(broadcast::error::RecvError::Closed) => return None,
            }
        }
    });
    let events = stream::once(async move { current }).chain(rest).map(|s| event(&s));
    Ok(Sse::new(events).keep_alive(KeepAlive::default()))
}

pub async fn serve(addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(Arc::new(AppState::default()))).await
}
