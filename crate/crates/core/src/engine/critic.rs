//! Judges executed trades against the market index.
//!
//! Sells are matched FIFO against earlier buys of the same participant and
//! symbol; every matched piece is one round trip. A round trip is good when
//! its price return beats the index return over the same holding period.
//! Lots still open at the end are judged at the final mark.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;

use crate::accounting::TradeRecord;
use crate::agents::StrategyKind;
use crate::market::Side;
use crate::money::{Money, ParticipantId, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Verdict {
    Good,
    Bad,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TradeVerdict {
    pub participant: ParticipantId,
    pub symbol: Symbol,
    pub quantity: u64,
    pub entry_tick: u64,
    pub entry_price: Money,
    pub exit_tick: u64,
    pub exit_price: Money,
    /// Still held; exit is the final mark.
    pub open: bool,
    pub trade_return: f64,
    pub index_return: f64,
    pub excess_return: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StrategySummary {
    pub kind: StrategyKind,
    pub participants: usize,
    pub trade_count: usize,
    /// Closed round trips plus open lots.
    pub verdicts: usize,
    pub hit_rate: f64,
    pub mean_excess_return: f64,
    /// Mean terminal relative score of this strategy's participants.
    pub relative_score: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CriticReport {
    pub verdicts: Vec<TradeVerdict>,
    pub strategies: Vec<StrategySummary>,
    /// Strategies by descending relative score.
    pub ranking: Vec<StrategyKind>,
}

struct OpenLot {
    quantity: u64,
    price: Money,
    tick: u64,
}

fn judge(
    participant: &ParticipantId,
    symbol: &Symbol,
    lot: &OpenLot,
    quantity: u64,
    exit: (u64, Money),
    open: bool,
    index: &[f64],
) -> TradeVerdict {
    let at = |t: u64| index.get(t as usize).or(index.last()).copied().unwrap_or(100.0);
    let trade_return = exit.1.to_f64() / lot.price.to_f64() - 1.0;
    let index_return = at(exit.0) / at(lot.tick) - 1.0;
    let excess_return = trade_return - index_return;
    TradeVerdict {
        participant: participant.clone(),
        symbol: symbol.clone(),
        quantity,
        entry_tick: lot.tick,
        entry_price: lot.price,
        exit_tick: exit.0,
        exit_price: exit.1,
        open,
        trade_return,
        index_return,
        excess_return,
        verdict: if excess_return > 0.0 { Verdict::Good } else { Verdict::Bad },
    }
}

pub fn critic_evaluate(
    trades: &[TradeRecord],
    prices: &BTreeMap<Symbol, Vec<Money>>,
    index: &[f64],
    roster: &BTreeMap<ParticipantId, StrategyKind>,
    scores: &BTreeMap<ParticipantId, f64>,
) -> CriticReport {
    let mut books: BTreeMap<(&ParticipantId, &Symbol), VecDeque<OpenLot>> = BTreeMap::new();
    let mut verdicts = Vec::new();

    for t in trades {
        let book = books.entry((&t.participant, &t.symbol)).or_default();
        match t.side {
            Side::Buy => book.push_back(OpenLot { quantity: t.quantity, price: t.price, tick: t.tick }),
            Side::Sell => {
                let mut remaining = t.quantity;
                while remaining > 0 {
                    let Some(front) = book.front_mut() else { break };
                    let take = front.quantity.min(remaining);
                    verdicts.push(judge(&t.participant, &t.symbol, front, take, (t.tick, t.price), false, index));
                    front.quantity -= take;
                    remaining -= take;
                    if front.quantity == 0 {
                        book.pop_front();
                    }
                }
            }
        }
    }
    for ((participant, symbol), book) in &books {
        let Some(series) = prices.get(*symbol) else { continue };
        let Some(&last) = series.last() else { continue };
        let exit_tick = series.len() as u64 - 1;
        for lot in book {
            verdicts.push(judge(participant, symbol, lot, lot.quantity, (exit_tick, last), true, index));
        }
    }

    let mut by_kind: BTreeMap<StrategyKind, StrategySummary> = BTreeMap::new();
    for (id, kind) in roster {
        let s = by_kind.entry(*kind).or_insert(StrategySummary {
            kind: *kind,
            participants: 0,
            trade_count: 0,
            verdicts: 0,
            hit_rate: 0.0,
            mean_excess_return: 0.0,
            relative_score: 0.0,
        });
        s.participants += 1;
        s.relative_score += scores.get(id).copied().unwrap_or(0.0);
        s.trade_count += trades.iter().filter(|t| &t.participant == id).count();
        for v in verdicts.iter().filter(|v| &v.participant == id) {
            s.verdicts += 1;
            s.mean_excess_return += v.excess_return;
            if v.verdict == Verdict::Good {
                s.hit_rate += 1.0;
            }
        }
    }
    let mut strategies: Vec<StrategySummary> = by_kind.into_values().collect();
    for s in &mut strategies {
        s.relative_score /= s.participants as f64;
        if s.verdicts > 0 {
            s.hit_rate /= s.verdicts as f64;
            s.mean_excess_return /= s.verdicts as f64;
        }
    }
    let mut ranked: Vec<&StrategySummary> = strategies.iter().collect();
    ranked.sort_by(|a, b| b.relative_score.total_cmp(&a.relative_score).then(a.kind.cmp(&b.kind)));
    let ranking = ranked.iter().map(|s| s.kind).collect();

    CriticReport { verdicts, strategies, ranking }
}
