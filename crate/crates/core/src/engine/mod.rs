//! Session orchestration: the tick loop, tournaments and the critic.

mod critic;
mod digest;
mod session;
mod tournament;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

pub use critic::{critic_evaluate, CriticReport, StrategySummary, TradeVerdict, Verdict};
pub use digest::snapshot_digest;
pub use session::{run, EndReason, HumanOrder, Session};
pub use tournament::{seeds, summarize, tournament, StrategyStats, TournamentStats};

use crate::accounting::TradeRecord;
use crate::agents::{StrategyKind, StrategyParams};
use crate::market::{Fill, FundamentalsDynamics, FundamentalsOverride, PriceBar, StockFundamentals};
use crate::money::{Money, ParticipantId, Symbol};
use crate::synthetic::PriceProcess;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MarketMode {
    /// Prices come from recorded bars.
    Replay,
    /// Prices respond to the participants' net demand.
    Endogenous,
    /// Prices come from a seeded [`PriceProcess`] per stock.
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParticipantSpec {
    pub id: ParticipantId,
    pub kind: StrategyKind,
    pub initial_cash: Money,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    pub mode: MarketMode,
    pub ticks: u64,
    pub seed: u64,
    pub participants: Vec<ParticipantSpec>,
    /// Price-impact coefficient for endogenous clearing.
    pub impact: f64,
    /// Flat fee per executed order.
    pub fee: Money,
    pub strategy: StrategyParams,
    pub ticks_per_year: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            mode: MarketMode::Endogenous,
            ticks: 252,
            seed: 0,
            participants: Vec::new(),
            impact: 0.1,
            fee: Money::ZERO,
            strategy: StrategyParams::default(),
            ticks_per_year: 252,
        }
    }
}

/// The market a session runs on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub stocks: Vec<StockFundamentals>,
    /// Tick-indexed fundamentals overrides, applied in every mode.
    pub script: Vec<FundamentalsOverride>,
    /// Earnings/book evolution outside replay mode.
    pub dynamics: FundamentalsDynamics,
    /// Price process for synthetic mode.
    pub process: Option<PriceProcess>,
    /// Recorded bars for replay mode.
    pub bars: BTreeMap<Symbol, Vec<PriceBar>>,
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TickRecord {
    pub tick: u64,
    /// Digest of the snapshot the participants traded on.
    pub digest: String,
    pub index_level: f64,
    pub fills: Vec<Fill>,
    pub fees: BTreeMap<ParticipantId, Money>,
    pub dividends: BTreeMap<ParticipantId, Money>,
    /// Wealth after the tick, marked at the next snapshot's prices.
    pub wealths: BTreeMap<ParticipantId, Money>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunResult {
    pub participants: Vec<ParticipantSpec>,
    /// Wealth per participant at ticks `0..=executed`.
    pub wealth_series: BTreeMap<ParticipantId, Vec<Money>>,
    pub final_wealths: BTreeMap<ParticipantId, Money>,
    pub relative_scores: BTreeMap<ParticipantId, f64>,
    pub trades: Vec<TradeRecord>,
    pub prices: BTreeMap<Symbol, Vec<Money>>,
    pub volumes: BTreeMap<Symbol, Vec<u64>>,
    pub index: Vec<f64>,
    pub log: Vec<TickRecord>,
    pub end: EndReason,
}

impl RunResult {
    pub fn kind_of(&self, id: &ParticipantId) -> Option<StrategyKind> {
        self.participants.iter().find(|p| &p.id == id).map(|p| p.kind)
    }

    pub fn roster(&self) -> BTreeMap<ParticipantId, StrategyKind> {
        self.participants.iter().map(|p| (p.id.clone(), p.kind)).collect()
    }

    pub fn critic(&self) -> CriticReport {
        critic_evaluate(&self.trades, &self.prices, &self.index, &self.roster(), &self.relative_scores)
    }
}
