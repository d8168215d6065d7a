use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{snapshot_digest, MarketMode, RunResult, Scenario, SimConfig, TickRecord};
use crate::accounting::{mark_to_market, relative_scores, Portfolio, TradeRecord};
use crate::agents::{decide, Decision, MarketView, StrategyKind};
use crate::market::{
    apply_overrides, clear_market, evolve_fundamentals, market_index, pay_dividends, Clearing, MarketSnapshot, Order,
    PriceBar, Side,
};
use crate::money::{Money, ParticipantId, Symbol};
use crate::synthetic::generate_path;
use crate::{Error, Result};

/// Independent random streams derived from the root seed.
const FUNDAMENTALS_STREAM: u64 = 1;
const SCENARIO_STREAM: u64 = 2;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "reason", rename_all = "snake_case"))]
pub enum EndReason {
    InProgress,
    Completed,
    /// No bar for the tick after `tick`.
    DataExhausted { tick: u64 },
}

/// A manual order as accepted by [`Session::submit_order`].
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HumanOrder {
    /// Tick whose clearing the order entered.
    pub tick: u64,
    pub participant: ParticipantId,
    pub decision: Decision,
}

/// One running simulation. All state changes go through [`Session::step`]
/// and [`Session::submit_order`].
#[derive(Debug, Clone)]
pub struct Session {
    config: SimConfig,
    bars: Option<BTreeMap<Symbol, BTreeMap<u64, PriceBar>>>,
    scenario: Scenario,
    fundamentals_rng: ChaCha8Rng,
    snapshots: Vec<MarketSnapshot>,
    kinds: BTreeMap<ParticipantId, StrategyKind>,
    portfolios: BTreeMap<ParticipantId, Portfolio>,
    float: BTreeMap<Symbol, i64>,
    pending: Vec<HumanOrder>,
    human_orders: Vec<HumanOrder>,
    trades: Vec<TradeRecord>,
    log: Vec<TickRecord>,
    wealth: BTreeMap<ParticipantId, Vec<Money>>,
    end: EndReason,
}

fn invalid(msg: impl Into<alloc::string::String>) -> Error {
    Error::InvalidConfig(msg.into())
}

fn validate(config: &SimConfig, scenario: &Scenario) -> Result<()> {
    if config.ticks == 0 {
        return Err(invalid("ticks must be positive"));
    }
    if config.ticks_per_year == 0 {
        return Err(invalid("ticks_per_year must be positive"));
    }
    let mut ids = BTreeSet::new();
    for p in &config.participants {
        if !p.initial_cash.is_positive() {
            return Err(invalid(format!("participant {} needs positive initial cash", p.id)));
        }
        if !ids.insert(&p.id) {
            return Err(invalid(format!("duplicate participant id {}", p.id)));
        }
    }
    if !(0.0..=1.0).contains(&config.strategy.buy_fraction) {
        return Err(invalid("buy_fraction must be within [0, 1]"));
    }
    if config.fee < Money::ZERO {
        return Err(invalid("fee must be non-negative"));
    }
    if scenario.stocks.is_empty() {
        return Err(Error::EmptyMarket);
    }
    let mut symbols = BTreeSet::new();
    for s in &scenario.stocks {
        if !symbols.insert(&s.symbol) {
            return Err(invalid(format!("duplicate symbol {}", s.symbol)));
        }
        if !s.price.is_positive() || s.shares_outstanding == 0 {
            return Err(invalid(format!("{} needs a positive price and share count", s.symbol)));
        }
    }
    for o in &scenario.script {
        if !symbols.contains(&o.symbol) {
            return Err(Error::UnknownSymbol(o.symbol.clone()));
        }
        if o.tick > config.ticks {
            return Err(invalid(format!("script tick {} beyond run length {}", o.tick, config.ticks)));
        }
    }
    match config.mode {
        MarketMode::Replay => {
            for s in &scenario.stocks {
                let bars = scenario.bars.get(&s.symbol).ok_or_else(|| Error::MissingBar { symbol: s.symbol.clone(), tick: 0 })?;
                if bars.first().map(|b| b.tick) != Some(0) {
                    return Err(Error::MissingBar { symbol: s.symbol.clone(), tick: 0 });
                }
                if bars.windows(2).any(|w| w[0].tick >= w[1].tick) {
                    return Err(invalid(format!("bars for {} are not strictly increasing in tick", s.symbol)));
                }
                if bars.iter().any(|b| !b.close.is_positive()) {
                    return Err(invalid(format!("non-positive close for {}", s.symbol)));
                }
            }
        }
        MarketMode::Synthetic if scenario.process.is_none() => {
            return Err(invalid("synthetic mode needs a price process"));
        }
        _ => {}
    }
    Ok(())
}

impl Session {
    pub fn new(config: SimConfig, scenario: Scenario) -> Result<Self> {
        validate(&config, &scenario)?;
        let mut initial = MarketSnapshot::initial(scenario.stocks.iter().cloned());
        apply_overrides(&mut initial, &scenario.script)?;

        let bars = match config.mode {
            MarketMode::Replay => Some(
                scenario
                    .bars
                    .iter()
                    .filter(|(sym, _)| initial.stocks.contains_key(*sym))
                    .map(|(sym, bars)| (sym.clone(), bars.iter().map(|b| (b.tick, *b)).collect()))
                    .collect::<BTreeMap<_, BTreeMap<_, _>>>(),
            ),
            MarketMode::Synthetic => {
                let process = scenario.process.as_ref().expect("validated");
                let mut rng = stream(config.seed, SCENARIO_STREAM);
                let mut out = BTreeMap::new();
                for stock in initial.stocks.values() {
                    let path = generate_path(process, stock, config.ticks, &mut rng)?;
                    out.insert(stock.symbol.clone(), path.into_iter().map(|b| (b.tick, b)).collect());
                }
                Some(out)
            }
            MarketMode::Endogenous => None,
        };
        if let Some(bars) = &bars {
            for (sym, stock) in initial.stocks.iter_mut() {
                stock.price = bars[sym][&0].close;
            }
        }

        let kinds = config.participants.iter().map(|p| (p.id.clone(), p.kind)).collect();
        let portfolios = config
            .participants
            .iter()
            .map(|p| (p.id.clone(), Portfolio::new(p.id.clone(), p.initial_cash)))
            .collect();
        let wealth = config.participants.iter().map(|p| (p.id.clone(), alloc::vec![p.initial_cash])).collect();
        let float = initial.stocks.values().map(|s| (s.symbol.clone(), s.shares_outstanding as i64)).collect();

        Ok(Session {
            fundamentals_rng: stream(config.seed, FUNDAMENTALS_STREAM),
            config,
            bars,
            scenario,
            snapshots: alloc::vec![initial],
            kinds,
            portfolios,
            float,
            pending: Vec::new(),
            human_orders: Vec::new(),
            trades: Vec::new(),
            log: Vec::new(),
            wealth,
            end: EndReason::InProgress,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn tick(&self) -> u64 {
        self.snapshot().tick
    }

    pub fn snapshot(&self) -> &MarketSnapshot {
        self.snapshots.last().expect("at least the initial snapshot")
    }

    pub fn snapshots(&self) -> &[MarketSnapshot] {
        &self.snapshots
    }

    pub fn kinds(&self) -> &BTreeMap<ParticipantId, StrategyKind> {
        &self.kinds
    }

    pub fn portfolio(&self, id: &ParticipantId) -> Option<&Portfolio> {
        self.portfolios.get(id)
    }

    pub fn portfolios(&self) -> &BTreeMap<ParticipantId, Portfolio> {
        &self.portfolios
    }

    /// Shares held by the market maker per symbol; may go negative.
    pub fn market_maker_float(&self) -> &BTreeMap<Symbol, i64> {
        &self.float
    }

    pub fn log(&self) -> &[TickRecord] {
        &self.log
    }

    pub fn trades(&self) -> &[TradeRecord] {
        &self.trades
    }

    pub fn human_orders(&self) -> &[HumanOrder] {
        &self.human_orders
    }

    pub fn pending_orders(&self) -> &[HumanOrder] {
        &self.pending
    }

    pub fn is_finished(&self) -> bool {
        self.end != EndReason::InProgress
    }

    pub fn end_reason(&self) -> EndReason {
        self.end
    }

    pub fn wealths(&self) -> BTreeMap<ParticipantId, Money> {
        self.wealth.iter().map(|(id, w)| (id.clone(), *w.last().expect("initial wealth"))).collect()
    }

    pub fn relative_scores(&self) -> BTreeMap<ParticipantId, f64> {
        relative_scores(&self.wealths())
    }

    /// Queues a manual order for the next clearing after checking it against
    /// the participant's cash and holdings net of already queued orders.
    pub fn submit_order(&mut self, participant: &ParticipantId, decision: Decision) -> Result<()> {
        if self.is_finished() {
            return Err(Error::Finished);
        }
        match self.kinds.get(participant) {
            None => return Err(Error::UnknownParticipant(participant.clone())),
            Some(StrategyKind::Human) => {}
            Some(_) => return Err(Error::NotManual(participant.clone())),
        }
        if decision.quantity == 0 {
            return Err(Error::NonPositiveQuantity(decision.symbol));
        }
        let snapshot = self.snapshots.last().expect("initial snapshot");
        let price = snapshot.price(&decision.symbol)?;
        let portfolio = &self.portfolios[participant];
        let fee = self.config.fee;
        let queued = self.pending.iter().filter(|o| &o.participant == participant);
        match decision.side {
            Side::Buy => {
                let committed: Money = queued
                    .filter(|o| o.decision.side == Side::Buy)
                    .map(|o| snapshot.price(&o.decision.symbol).map(|p| p.times(o.decision.quantity) + fee))
                    .sum::<Result<Money>>()?;
                let need = committed + price.times(decision.quantity) + fee;
                if need > portfolio.cash {
                    return Err(Error::InsufficientCash { need, have: portfolio.cash });
                }
            }
            Side::Sell => {
                let committed: u64 = queued
                    .filter(|o| o.decision.side == Side::Sell && o.decision.symbol == decision.symbol)
                    .map(|o| o.decision.quantity)
                    .sum();
                let have = portfolio.holdings(&decision.symbol);
                if committed + decision.quantity > have {
                    return Err(Error::InsufficientHoldings {
                        symbol: decision.symbol,
                        need: committed + decision.quantity,
                        have,
                    });
                }
            }
        }
        let order = HumanOrder { tick: snapshot.tick, participant: participant.clone(), decision };
        self.pending.push(order.clone());
        self.human_orders.push(order);
        Ok(())
    }

    fn next_bars(&self, tick: u64) -> Option<Option<BTreeMap<Symbol, PriceBar>>> {
        let Some(bars) = &self.bars else {
            return Some(None);
        };
        let mut next = BTreeMap::new();
        for (sym, series) in bars {
            next.insert(sym.clone(), *series.get(&(tick + 1))?);
        }
        Some(Some(next))
    }

    /// Advances one tick: collect decisions, cap them, clear, settle fills,
    /// pay dividends, evolve fundamentals and log.
    pub fn step(&mut self) -> Result<()> {
        if self.is_finished() {
            return Err(Error::Finished);
        }
        let tick = self.tick();
        let Some(next_bars) = self.next_bars(tick) else {
            self.end = EndReason::DataExhausted { tick };
            return Ok(());
        };

        let (history, current) = self.snapshots.split_at(self.snapshots.len() - 1);
        let current = &current[0];
        let view = MarketView::new(current, history);
        let fee = self.config.fee;
        let pending = core::mem::take(&mut self.pending);

        let mut orders = Vec::new();
        for (id, kind) in &self.kinds {
            let portfolio = &self.portfolios[id];
            let decisions: Vec<Decision> = match kind {
                StrategyKind::Human => {
                    pending.iter().filter(|o| &o.participant == id).map(|o| o.decision.clone()).collect()
                }
                _ => decide(*kind, view, portfolio, &self.config.strategy),
            };
            cap_orders(id, &decisions, portfolio, current, fee, &mut orders)?;
        }

        let clearing = match &next_bars {
            Some(bars) => Clearing::Replay { next_bars: bars },
            None => Clearing::Endogenous { impact: self.config.impact },
        };
        let (fills, mut next) = clear_market(current, &orders, clearing)?;

        let mut fees: BTreeMap<ParticipantId, Money> = BTreeMap::new();
        for fill in &fills {
            let portfolio = self.portfolios.get_mut(&fill.participant).expect("order from known participant");
            portfolio.apply_fill(fill, fee, tick)?;
            *fees.entry(fill.participant.clone()).or_default() += fee;
            let float = self.float.get_mut(&fill.symbol).expect("known symbol");
            match fill.side {
                Side::Buy => *float -= fill.quantity as i64,
                Side::Sell => *float += fill.quantity as i64,
            }
            self.trades.push(TradeRecord {
                tick,
                participant: fill.participant.clone(),
                symbol: fill.symbol.clone(),
                side: fill.side,
                quantity: fill.quantity,
                price: fill.price,
                fee,
            });
        }

        let paid = pay_dividends(current, self.portfolios.values_mut(), self.config.ticks_per_year);
        let dividends = self.portfolios.keys().cloned().zip(paid).collect();

        if self.config.mode != MarketMode::Replay {
            next = evolve_fundamentals(&next, &self.scenario.dynamics, self.config.ticks_per_year, &mut self.fundamentals_rng);
        }
        apply_overrides(&mut next, &self.scenario.script)?;
        next.index_level = market_index(&next, &self.snapshots[0])?;

        let mut wealths = BTreeMap::new();
        for (id, portfolio) in &self.portfolios {
            let w = mark_to_market(portfolio, &next)?;
            self.wealth.get_mut(id).expect("series per participant").push(w);
            wealths.insert(id.clone(), w);
        }
        let current = self.snapshots.last().expect("initial snapshot");
        self.log.push(TickRecord {
            tick,
            digest: snapshot_digest(current),
            index_level: current.index_level,
            fills,
            fees,
            dividends,
            wealths,
        });
        self.snapshots.push(next);
        if tick + 1 >= self.config.ticks {
            self.end = EndReason::Completed;
        }
        Ok(())
    }

    pub fn run_to_end(&mut self) -> Result<()> {
        while !self.is_finished() {
            self.step()?;
        }
        Ok(())
    }

    /// Re-runs a session from scratch, feeding each recorded manual order in
    /// at the tick it originally entered.
    pub fn replay(config: SimConfig, scenario: Scenario, orders: &[HumanOrder]) -> Result<Self> {
        let mut session = Session::new(config, scenario)?;
        let mut queue = orders.iter().peekable();
        while !session.is_finished() {
            while let Some(o) = queue.next_if(|o| o.tick == session.tick()) {
                session.submit_order(&o.participant, o.decision.clone())?;
            }
            session.step()?;
        }
        Ok(session)
    }

    pub fn result(&self) -> RunResult {
        let mut prices: BTreeMap<Symbol, Vec<Money>> = BTreeMap::new();
        let mut volumes: BTreeMap<Symbol, Vec<u64>> = BTreeMap::new();
        for snap in &self.snapshots {
            for (sym, stock) in &snap.stocks {
                prices.entry(sym.clone()).or_default().push(stock.price);
                volumes.entry(sym.clone()).or_default().push(stock.last_volume);
            }
        }
        let final_wealths = self.wealths();
        RunResult {
            participants: self.config.participants.clone(),
            wealth_series: self.wealth.clone(),
            relative_scores: relative_scores(&final_wealths),
            final_wealths,
            trades: self.trades.clone(),
            prices,
            volumes,
            index: self.snapshots.iter().map(|s| s.index_level).collect(),
            log: self.log.clone(),
            end: self.end,
        }
    }
}

/// Caps sells at holdings and buys at cash net of the fee, in decision order.
fn cap_orders(
    id: &ParticipantId,
    decisions: &[Decision],
    portfolio: &Portfolio,
    snapshot: &MarketSnapshot,
    fee: Money,
    out: &mut Vec<Order>,
) -> Result<()> {
    let mut cash = portfolio.cash;
    let mut sold: BTreeMap<&Symbol, u64> = BTreeMap::new();
    for d in decisions {
        let price = snapshot.price(&d.symbol)?;
        let quantity = match d.side {
            Side::Sell => {
                let already = sold.entry(&d.symbol).or_default();
                let q = d.quantity.min(portfolio.holdings(&d.symbol) - *already);
                if q == 0 || cash + price.times(q) < fee {
                    continue;
                }
                *already += q;
                cash += price.times(q) - fee;
                q
            }
            Side::Buy => {
                let q = d.quantity.min((cash - fee).shares_at(price));
                if q == 0 {
                    continue;
                }
                cash -= price.times(q) + fee;
                q
            }
        };
        out.push(Order { participant: id.clone(), symbol: d.symbol.clone(), side: d.side, quantity });
    }
    Ok(())
}

/// Runs a fresh session to completion.
pub fn run(config: &SimConfig, scenario: &Scenario) -> Result<RunResult> {
    let mut session = Session::new(config.clone(), scenario.clone())?;
    session.run_to_end()?;
    Ok(session.result())
}
