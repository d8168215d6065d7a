//! Portfolios, FIFO lot tracking, wealth and relative scoring.

use alloc::collections::{BTreeMap, VecDeque};

use crate::market::{Fill, MarketSnapshot, Side};
use crate::money::{Money, ParticipantId, Symbol};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Lot {
    pub quantity: u64,
    pub purchase_price: Money,
    pub purchase_tick: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Portfolio {
    pub owner: ParticipantId,
    pub cash: Money,
    /// Open lots per symbol, oldest first. Symbols with no lots are absent.
    pub lots: BTreeMap<Symbol, VecDeque<Lot>>,
}

impl Portfolio {
    pub fn new(owner: ParticipantId, cash: Money) -> Self {
        Portfolio { owner, cash, lots: BTreeMap::new() }
    }

    pub fn holdings(&self, symbol: &Symbol) -> u64 {
        self.lots.get(symbol).map_or(0, |lots| lots.iter().map(|l| l.quantity).sum())
    }

    pub fn is_held(&self, symbol: &Symbol) -> bool {
        self.lots.contains_key(symbol)
    }

    pub fn held_symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.lots.keys()
    }

    /// Total purchase cost of the open lots in `symbol`.
    pub fn cost_basis(&self, symbol: &Symbol) -> Money {
        self.lots
            .get(symbol)
            .map_or(Money::ZERO, |lots| lots.iter().map(|l| l.purchase_price.times(l.quantity)).sum())
    }

    /// Quantity-weighted mean purchase price over open lots.
    pub fn average_purchase_price(&self, symbol: &Symbol) -> Option<f64> {
        let held = self.holdings(symbol);
        (held > 0).then(|| self.cost_basis(symbol).to_f64() / held as f64)
    }

    pub(crate) fn add_lot(&mut self, symbol: &Symbol, quantity: u64, price: Money, tick: u64) {
        self.lots
            .entry(symbol.clone())
            .or_default()
            .push_back(Lot { quantity, purchase_price: price, purchase_tick: tick });
    }

    /// Removes `quantity` shares oldest-first and returns the cost basis removed.
    fn consume_fifo(&mut self, symbol: &Symbol, mut quantity: u64) -> Money {
        let mut cost = Money::ZERO;
        let lots = self.lots.get_mut(symbol).expect("holdings checked by caller");
        while quantity > 0 {
            let front = lots.front_mut().expect("holdings checked by caller");
            let take = front.quantity.min(quantity);
            cost += front.purchase_price.times(take);
            front.quantity -= take;
            quantity -= take;
            if front.quantity == 0 {
                lots.pop_front();
            }
        }
        if lots.is_empty() {
            self.lots.remove(symbol);
        }
        cost
    }

    /// Applies an executed fill. Buys append a lot; sells consume lots FIFO.
    /// Returns the realized P&L (zero for buys), before fees.
    pub fn apply_fill(&mut self, fill: &Fill, fee: Money, tick: u64) -> Result<Money> {
        if fill.quantity == 0 {
            return Err(Error::NonPositiveQuantity(fill.symbol.clone()));
        }
        let notional = fill.price.times(fill.quantity);
        match fill.side {
            Side::Buy => {
                let need = notional + fee;
                if self.cash < need {
                    return Err(Error::InsufficientCash { need, have: self.cash });
                }
                self.cash -= need;
                self.add_lot(&fill.symbol, fill.quantity, fill.price, tick);
                Ok(Money::ZERO)
            }
            Side::Sell => {
                let have = self.holdings(&fill.symbol);
                if have < fill.quantity {
                    return Err(Error::InsufficientHoldings { symbol: fill.symbol.clone(), need: fill.quantity, have });
                }
                if self.cash + notional < fee {
                    return Err(Error::InsufficientCash { need: fee, have: self.cash + notional });
                }
                let cost = self.consume_fifo(&fill.symbol, fill.quantity);
                self.cash += notional - fee;
                Ok(notional - cost)
            }
        }
    }

    /// Market value of all open positions.
    pub fn holdings_value(&self, snapshot: &MarketSnapshot) -> Result<Money> {
        let mut value = Money::ZERO;
        for symbol in self.lots.keys() {
            value += snapshot.price(symbol)?.times(self.holdings(symbol));
        }
        Ok(value)
    }
}

/// Cash plus holdings at snapshot prices.
pub fn mark_to_market(portfolio: &Portfolio, snapshot: &MarketSnapshot) -> Result<Money> {
    Ok(portfolio.cash + portfolio.holdings_value(snapshot)?)
}

/// Wealth minus the field's mean wealth; the scores sum to zero.
pub fn relative_scores(wealths: &BTreeMap<ParticipantId, Money>) -> BTreeMap<ParticipantId, f64> {
    let n = wealths.len() as i128;
    let total: i128 = wealths.values().map(|w| w.micros() as i128).sum();
    wealths
        .iter()
        .map(|(id, w)| {
            // exact numerator; one rounding in the division
            let num = w.micros() as i128 * n - total;
            (id.clone(), num as f64 / (n as f64 * Money::SCALE as f64))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TradeRecord {
    pub tick: u64,
    pub participant: ParticipantId,
    pub symbol: Symbol,
    pub side: Side,
    pub quantity: u64,
    pub price: Money,
    pub fee: Money,
}
