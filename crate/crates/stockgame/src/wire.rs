//! JSON payloads of the game service, version 1. `WIRE.md` documents every
//! field; bump [`VERSION`] on any incompatible change.
//!
//! Money amounts are exact decimal strings (`"12.500000"`); ratios and
//! returns are JSON numbers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use stockgame_core::accounting::{Lot, Portfolio};
use stockgame_core::agents::{Decision, StrategyKind};
use stockgame_core::engine::{snapshot_digest, EndReason, HumanOrder, Session};
use stockgame_core::market::{Fill, MarketSnapshot};
use stockgame_core::{Money, ParticipantId, Symbol};

pub const VERSION: u32 = 1;

fn version() -> u32 {
    VERSION
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Lobby,
    Running,
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Pacing {
    /// The player advances each tick.
    #[default]
    Manual,
    /// The server advances every `interval_ms` once running.
    Timed { interval_ms: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    /// Bundled scenario name. Ignored when `scenario_toml` is given.
    #[serde(default)]
    pub scenario: Option<String>,
    /// A whole scenario file inline.
    #[serde(default)]
    pub scenario_toml: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub ticks: Option<u64>,
    #[serde(default)]
    pub pacing: Pacing,
    /// Participant id of the human player.
    #[serde(default)]
    pub player: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosterEntry {
    pub id: ParticipantId,
    pub strategy: StrategyKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionCreated {
    #[serde(default = "version")]
    pub version: u32,
    pub session_id: String,
    /// Bearer token for every later request on this session.
    pub token: String,
    pub participant: ParticipantId,
    pub phase: Phase,
    pub pacing: Pacing,
    pub ticks: u64,
    pub initial_cash: Money,
    pub participants: Vec<RosterEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StockView {
    pub symbol: Symbol,
    pub price: Money,
    /// Shares executed in the clearing that produced this snapshot.
    pub volume: u64,
    pub eps: Money,
    pub book: Money,
    pub debt: Money,
    pub equity: Money,
    pub dividend: Money,
    pub shares_out: u64,
    pub pe: Option<f64>,
    pub book_to_price: f64,
    pub debt_to_equity: Option<f64>,
}

impl StockView {
    pub fn market(snapshot: &MarketSnapshot) -> Vec<StockView> {
        snapshot
            .stocks
            .values()
            .map(|s| StockView {
                symbol: s.symbol.clone(),
                price: s.price,
                volume: s.last_volume,
                eps: s.earnings_per_share,
                book: s.book_value_per_share,
                debt: s.debt,
                equity: s.equity,
                dividend: s.annual_dividend_per_share,
                shares_out: s.shares_outstanding,
                pe: s.pe_ratio(),
                book_to_price: s.book_to_price(),
                debt_to_equity: s.debt_to_equity(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldingView {
    pub symbol: Symbol,
    pub quantity: u64,
    pub average_price: Option<f64>,
    pub market_value: Money,
    pub unrealized: Money,
    pub lots: Vec<Lot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioView {
    pub cash: Money,
    pub wealth: Money,
    pub holdings: Vec<HoldingView>,
}

impl PortfolioView {
    pub fn of(portfolio: &Portfolio, snapshot: &MarketSnapshot) -> PortfolioView {
        let mut wealth = portfolio.cash;
        let holdings = portfolio
            .lots
            .iter()
            .map(|(symbol, lots)| {
                let quantity = portfolio.holdings(symbol);
                let price = snapshot.price(symbol).unwrap_or_default();
                let market_value = price.times(quantity);
                wealth += market_value;
                HoldingView {
                    symbol: symbol.clone(),
                    quantity,
                    average_price: portfolio.average_purchase_price(symbol),
                    market_value,
                    unrealized: market_value - portfolio.cost_basis(symbol),
                    lots: lots.iter().copied().collect(),
                }
            })
            .collect();
        PortfolioView { cash: portfolio.cash, wealth, holdings }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderEntry {
    pub rank: usize,
    pub participant: ParticipantId,
    pub strategy: StrategyKind,
    pub relative_score: f64,
}

/// Relative scores only; wealth and holdings of others stay hidden.
pub fn leaderboard(session: &Session) -> Vec<LeaderEntry> {
    let scores = session.relative_scores();
    let mut rows: Vec<LeaderEntry> = session
        .kinds()
        .iter()
        .map(|(id, kind)| LeaderEntry {
            rank: 0,
            participant: id.clone(),
            strategy: *kind,
            relative_score: scores.get(id).copied().unwrap_or(0.0),
        })
        .collect();
    rows.sort_by(|a, b| b.relative_score.total_cmp(&a.relative_score).then_with(|| a.participant.cmp(&b.participant)));
    for (i, r) in rows.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateView {
    #[serde(default = "version")]
    pub version: u32,
    pub session_id: String,
    pub phase: Phase,
    pub pacing: Pacing,
    pub tick: u64,
    pub ticks: u64,
    pub index_level: f64,
    /// Equals the run-log digest recorded when this tick is executed.
    pub digest: String,
    pub market: Vec<StockView>,
    pub participant: ParticipantId,
    pub portfolio: PortfolioView,
    /// Own orders queued for the next clearing.
    pub pending_orders: Vec<Decision>,
    pub leaderboard: Vec<LeaderEntry>,
    pub end: EndReason,
}

/// Broadcast after every executed tick. Contains public data only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickSummary {
    #[serde(default = "version")]
    pub version: u32,
    pub session_id: String,
    pub phase: Phase,
    /// The tick now open for orders.
    pub tick: u64,
    pub index_level: f64,
    pub digest: String,
    pub prices: BTreeMap<Symbol, Money>,
    pub volumes: BTreeMap<Symbol, u64>,
    pub leaderboard: Vec<LeaderEntry>,
    pub end: EndReason,
}

impl TickSummary {
    pub fn of(session_id: &str, phase: Phase, session: &Session) -> TickSummary {
        let snap = session.snapshot();
        TickSummary {
            version: VERSION,
            session_id: session_id.to_string(),
            phase,
            tick: snap.tick,
            index_level: snap.index_level,
            digest: snapshot_digest(snap),
            prices: snap.stocks.iter().map(|(s, st)| (s.clone(), st.price)).collect(),
            volumes: snap.stocks.iter().map(|(s, st)| (s.clone(), st.last_volume)).collect(),
            leaderboard: leaderboard(session),
            end: session.end_reason(),
        }
    }
}

/// The player's share of an executed tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OwnTick {
    /// Tick whose clearing these fills belong to.
    pub executed_tick: u64,
    pub fills: Vec<Fill>,
    pub fees: Money,
    pub dividends: Money,
    pub cash: Money,
    pub wealth: Money,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Advanced {
    #[serde(default = "version")]
    pub version: u32,
    pub summary: TickSummary,
    pub own: OwnTick,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderAccepted {
    #[serde(default = "version")]
    pub version: u32,
    pub accepted: bool,
    pub order: HumanOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderLog {
    #[serde(default = "version")]
    pub version: u32,
    pub orders: Vec<HumanOrder>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorDetail {
    /// One of `bad_request`, `unauthorized`, `not_found`, `rejected`, `conflict`.
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    #[serde(default = "version")]
    pub version: u32,
    pub error: ErrorDetail,
}

pub fn own_tick(session: &Session, player: &ParticipantId) -> Option<OwnTick> {
    let rec = session.log().last()?;
    let portfolio = session.portfolio(player)?;
    Some(OwnTick {
        executed_tick: rec.tick,
        fills: rec.fills.iter().filter(|f| &f.participant == player).cloned().collect(),
        fees: rec.fees.get(player).copied().unwrap_or_default(),
        dividends: rec.dividends.get(player).copied().unwrap_or_default(),
        cash: portfolio.cash,
        wealth: rec.wealths.get(player).copied().unwrap_or_default(),
    })
}
