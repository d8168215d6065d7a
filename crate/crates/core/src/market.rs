//! Market state and its per-tick evolution.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::accounting::Portfolio;
use crate::money::{Money, ParticipantId, Symbol};
use crate::{Error, Result};

/// Lowest price endogenous clearing may produce.
pub const PRICE_FLOOR: Money = Money::from_micros(10_000);

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StockFundamentals {
    pub symbol: Symbol,
    pub price: Money,
    /// Annual earnings per share; may be zero or negative.
    pub earnings_per_share: Money,
    pub book_value_per_share: Money,
    pub debt: Money,
    pub equity: Money,
    pub annual_dividend_per_share: Money,
    pub shares_outstanding: u64,
    /// Shares executed in the previous clearing.
    pub last_volume: u64,
}

impl StockFundamentals {
    /// Price over annual earnings. `None` unless earnings are positive.
    pub fn pe_ratio(&self) -> Option<f64> {
        self.earnings_per_share
            .is_positive()
            .then(|| self.price.to_f64() / self.earnings_per_share.to_f64())
    }

    /// Debt over equity. `None` unless equity is positive.
    pub fn debt_to_equity(&self) -> Option<f64> {
        self.equity.is_positive().then(|| self.debt.to_f64() / self.equity.to_f64())
    }

    pub fn book_to_price(&self) -> f64 {
        self.book_value_per_share.to_f64() / self.price.to_f64()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PriceBar {
    pub tick: u64,
    pub open: Money,
    pub close: Money,
    pub volume: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MarketSnapshot {
    pub tick: u64,
    pub stocks: BTreeMap<Symbol, StockFundamentals>,
    /// Equal-weighted index, 100 at tick 0.
    pub index_level: f64,
}

impl MarketSnapshot {
    /// Builds the tick-0 snapshot; the index starts at 100.
    pub fn initial(stocks: impl IntoIterator<Item = StockFundamentals>) -> Self {
        MarketSnapshot {
            tick: 0,
            stocks: stocks.into_iter().map(|s| (s.symbol.clone(), s)).collect(),
            index_level: 100.0,
        }
    }

    pub fn get(&self, symbol: &Symbol) -> Result<&StockFundamentals> {
        self.stocks.get(symbol).ok_or_else(|| Error::UnknownSymbol(symbol.clone()))
    }

    pub fn price(&self, symbol: &Symbol) -> Result<Money> {
        self.get(symbol).map(|s| s.price)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.stocks.keys()
    }
}

/// 100 times the equal-weighted mean of `price / base price`.
pub fn market_index(snapshot: &MarketSnapshot, base: &MarketSnapshot) -> Result<f64> {
    if snapshot.stocks.is_empty() {
        return Err(Error::EmptyMarket);
    }
    let mut total = 0.0;
    for (symbol, stock) in &snapshot.stocks {
        let base_price = base.price(symbol)?;
        total += stock.price.to_f64() / base_price.to_f64();
    }
    Ok(100.0 * total / snapshot.stocks.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Buy => "buy",
            Side::Sell => "sell",
        }
    }
}

/// An engine-capped order, ready for clearing.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Order {
    pub participant: ParticipantId,
    pub symbol: Symbol,
    pub side: Side,
    pub quantity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Fill {
    pub participant: ParticipantId,
    pub symbol: Symbol,
    pub side: Side,
    pub quantity: u64,
    pub price: Money,
}

/// How the next tick's price is formed.
#[derive(Debug, Clone, Copy)]
pub enum Clearing<'a> {
    /// Prices come from the next bar of each symbol; demand has no effect.
    Replay { next_bars: &'a BTreeMap<Symbol, PriceBar> },
    /// `p' = p * (1 + impact * net_demand / shares_outstanding)`, floored.
    Endogenous { impact: f64 },
}

/// Executes every order at the snapshot price (one batch auction per tick)
/// and returns the fills together with the next tick's snapshot.
///
/// The returned snapshot keeps the old `index_level`; the caller recomputes it
/// against its base snapshot.
pub fn clear_market(
    snapshot: &MarketSnapshot,
    orders: &[Order],
    clearing: Clearing<'_>,
) -> Result<(Vec<Fill>, MarketSnapshot)> {
    let mut net_demand: BTreeMap<&Symbol, i64> = BTreeMap::new();
    let mut volume: BTreeMap<&Symbol, u64> = BTreeMap::new();
    let mut fills = Vec::with_capacity(orders.len());

    for order in orders {
        let stock = snapshot.get(&order.symbol)?;
        if order.quantity == 0 {
            return Err(Error::NonPositiveQuantity(order.symbol.clone()));
        }
        let signed = match order.side {
            Side::Buy => order.quantity as i64,
            Side::Sell => -(order.quantity as i64),
        };
        *net_demand.entry(&stock.symbol).or_default() += signed;
        *volume.entry(&stock.symbol).or_default() += order.quantity;
        fills.push(Fill {
            participant: order.participant.clone(),
            symbol: order.symbol.clone(),
            side: order.side,
            quantity: order.quantity,
            price: stock.price,
        });
    }

    let mut next = snapshot.clone();
    next.tick = snapshot.tick + 1;
    for (symbol, stock) in next.stocks.iter_mut() {
        stock.last_volume = volume.get(symbol).copied().unwrap_or(0);
        stock.price = match clearing {
            Clearing::Replay { next_bars } => {
                let bar = next_bars.get(symbol).ok_or_else(|| Error::MissingBar {
                    symbol: symbol.clone(),
                    tick: next.tick,
                })?;
                bar.close
            }
            Clearing::Endogenous { impact } => {
                let demand = net_demand.get(symbol).copied().unwrap_or(0);
                if demand == 0 {
                    stock.price
                } else {
                    let pressure = demand as f64 / stock.shares_outstanding as f64;
                    Money::from_f64(stock.price.to_f64() * (1.0 + impact * pressure)).max(PRICE_FLOOR)
                }
            }
        };
    }
    Ok((fills, next))
}

/// Credits one tick of dividends to every portfolio and returns the amount
/// paid to each, in portfolio order.
pub fn pay_dividends<'a>(
    snapshot: &MarketSnapshot,
    portfolios: impl IntoIterator<Item = &'a mut Portfolio>,
    ticks_per_year: u32,
) -> Vec<Money> {
    portfolios
        .into_iter()
        .map(|portfolio| {
            let paid: Money = snapshot
                .stocks
                .values()
                .map(|stock| {
                    let held = portfolio.holdings(&stock.symbol);
                    stock
                        .annual_dividend_per_share
                        .mul_div(held as i64, ticks_per_year as i64)
                })
                .sum();
            portfolio.cash += paid;
            paid
        })
        .collect()
}

/// Seeded random walk parameters for earnings and book value.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct FundamentalsDynamics {
    /// Per-tick change of annual EPS, in currency.
    pub eps_drift: f64,
    /// Per-tick standard deviation of annual EPS, in currency.
    pub eps_volatility: f64,
    /// Fraction of each tick's earnings added to book value.
    pub retention: f64,
}

impl Default for FundamentalsDynamics {
    fn default() -> Self {
        FundamentalsDynamics { eps_drift: 0.0, eps_volatility: 0.0, retention: 0.0 }
    }
}

/// Advances earnings and book value by one tick. Dividends and debt/equity are
/// left alone; scenario overrides change those.
pub fn evolve_fundamentals<R: Rng + ?Sized>(
    snapshot: &MarketSnapshot,
    dynamics: &FundamentalsDynamics,
    ticks_per_year: u32,
    rng: &mut R,
) -> MarketSnapshot {
    let mut next = snapshot.clone();
    for stock in next.stocks.values_mut() {
        // draw unconditionally so the stream position does not depend on parameters
        let shock: f64 = rng.sample(StandardNormal);
        let retained = stock.earnings_per_share.to_f64() * dynamics.retention / f64::from(ticks_per_year);
        stock.book_value_per_share = (stock.book_value_per_share + Money::from_f64(retained)).max(Money::ZERO);
        let change = dynamics.eps_drift + dynamics.eps_volatility * shock;
        stock.earnings_per_share += Money::from_f64(change);
    }
    next
}

/// Tick-indexed replacement of fundamentals; `None` fields persist.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct FundamentalsOverride {
    pub tick: u64,
    pub symbol: Symbol,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub price: Option<Money>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub eps: Option<Money>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub book: Option<Money>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub debt: Option<Money>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub equity: Option<Money>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub dividend: Option<Money>,
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub shares_out: Option<u64>,
}

impl FundamentalsOverride {
    pub fn apply(&self, stock: &mut StockFundamentals) {
        if let Some(v) = self.price {
            stock.price = v.max(PRICE_FLOOR);
        }
        if let Some(v) = self.eps {
            stock.earnings_per_share = v;
        }
        if let Some(v) = self.book {
            stock.book_value_per_share = v;
        }
        if let Some(v) = self.debt {
            stock.debt = v;
        }
        if let Some(v) = self.equity {
            stock.equity = v;
        }
        if let Some(v) = self.dividend {
            stock.annual_dividend_per_share = v;
        }
        if let Some(v) = self.shares_out {
            stock.shares_outstanding = v;
        }
    }
}

/// Applies every override whose tick equals the snapshot's tick.
pub fn apply_overrides(snapshot: &mut MarketSnapshot, overrides: &[FundamentalsOverride]) -> Result<()> {
    for o in overrides.iter().filter(|o| o.tick == snapshot.tick) {
        let stock = snapshot
            .stocks
            .get_mut(&o.symbol)
            .ok_or_else(|| Error::UnknownSymbol(o.symbol.clone()))?;
        o.apply(stock);
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn stock(symbol: &str, price: f64) -> StockFundamentals {
        StockFundamentals {
            symbol: Symbol::from(symbol),
            price: Money::from_f64(price),
            earnings_per_share: Money::from_f64(4.0),
            book_value_per_share: Money::from_f64(price),
            debt: Money::from_units(50),
            equity: Money::from_units(100),
            annual_dividend_per_share: Money::ZERO,
            shares_outstanding: 1_000_000,
            last_volume: 0,
        }
    }
}
