//! Trading strategies as pure decision rules.
//!
//! Every rule reads the current snapshot, the earlier snapshots and the
//! agent's own portfolio, and returns order intents. Ratio tests use exact
//! integer cross-multiplication on the fixed-point fields, so boundary values
//! such as a p:e of exactly 30 are decided without rounding noise. Undefined
//! ratios (non-positive earnings or equity) fail every predicate that reads
//! them.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::accounting::Portfolio;
use crate::market::{MarketSnapshot, Side, StockFundamentals};
use crate::money::{Money, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StrategyKind {
    Bear,
    Conservative,
    BlueChip,
    BargainHunter,
    Fool,
    FoolImproved,
    Idiot,
    Eric,
    Reverse,
    Human,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 10] = [
        StrategyKind::Bear,
        StrategyKind::Conservative,
        StrategyKind::BlueChip,
        StrategyKind::BargainHunter,
        StrategyKind::Fool,
        StrategyKind::FoolImproved,
        StrategyKind::Idiot,
        StrategyKind::Eric,
        StrategyKind::Reverse,
        StrategyKind::Human,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Bear => "bear",
            StrategyKind::Conservative => "conservative",
            StrategyKind::BlueChip => "blue_chip",
            StrategyKind::BargainHunter => "bargain_hunter",
            StrategyKind::Fool => "fool",
            StrategyKind::FoolImproved => "fool_improved",
            StrategyKind::Idiot => "idiot",
            StrategyKind::Eric => "eric",
            StrategyKind::Reverse => "reverse",
            StrategyKind::Human => "human",
        }
    }

    /// Strategies that decide from company accounts only.
    pub fn is_fundamental(self) -> bool {
        matches!(
            self,
            StrategyKind::Bear
                | StrategyKind::Conservative
                | StrategyKind::BlueChip
                | StrategyKind::BargainHunter
                | StrategyKind::Fool
                | StrategyKind::FoolImproved
                | StrategyKind::Eric
        )
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownStrategy(pub alloc::string::String);

impl fmt::Display for UnknownStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown strategy `{}`", self.0)
    }
}

impl FromStr for StrategyKind {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: alloc::string::String =
            s.chars().filter(|c| *c != '_' && *c != '-').map(|c| c.to_ascii_lowercase()).collect();
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name().replace('_', "") == norm)
            .ok_or_else(|| UnknownStrategy(s.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Decision {
    pub symbol: Symbol,
    pub side: Side,
    pub quantity: u64,
}

/// Thresholds and sizing shared by all strategies.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct StrategyParams {
    /// Buy only below this price:earnings ratio.
    pub max_pe: f64,
    /// Buy only below this debt:equity ratio.
    pub max_debt_to_equity: f64,
    /// Blue chips need an annual dividend above this.
    pub min_dividend: Money,
    /// Eric buys up to this multiple of book value.
    pub eric_book_band: f64,
    /// Eric sells once price exceeds this multiple of its average purchase price.
    pub eric_take_profit: f64,
    /// Fraction of current cash each buy spends.
    pub buy_fraction: f64,
    /// Reverse strategy order size in shares.
    pub lot_size: u64,
    /// Idiot trend look-back in ticks.
    pub idiot_window: usize,
}

impl Default for StrategyParams {
    fn default() -> Self {
        StrategyParams {
            max_pe: 30.0,
            max_debt_to_equity: 1.0,
            min_dividend: Money::from_units(1),
            eric_book_band: 1.10,
            eric_take_profit: 1.20,
            buy_fraction: 0.10,
            lot_size: 10,
            idiot_window: 1,
        }
    }
}

/// Ratios are compared in basis points so `a < ratio * b` is exact.
fn bps(ratio: f64) -> i128 {
    libm::round(ratio * 10_000.0) as i128
}

fn lt_ratio(a: Money, ratio: f64, b: Money) -> bool {
    a.micros() as i128 * 10_000 < bps(ratio) * b.micros() as i128
}

/// What the current tick looks like plus everything before it, oldest first.
#[derive(Debug, Clone, Copy)]
pub struct MarketView<'a> {
    pub current: &'a MarketSnapshot,
    pub history: &'a [MarketSnapshot],
}

impl<'a> MarketView<'a> {
    pub fn new(current: &'a MarketSnapshot, history: &'a [MarketSnapshot]) -> Self {
        MarketView { current, history }
    }

    pub fn without_history(current: &'a MarketSnapshot) -> Self {
        MarketView { current, history: &[] }
    }

    fn previous(&self) -> Option<&'a MarketSnapshot> {
        self.history.last()
    }
}

pub fn pe_ok(stock: &StockFundamentals, params: &StrategyParams) -> bool {
    stock.earnings_per_share.is_positive() && lt_ratio(stock.price, params.max_pe, stock.earnings_per_share)
}

pub fn de_ok(stock: &StockFundamentals, params: &StrategyParams) -> bool {
    stock.equity.is_positive() && lt_ratio(stock.debt, params.max_debt_to_equity, stock.equity)
}

pub fn undervalued(stock: &StockFundamentals) -> bool {
    stock.book_value_per_share > stock.price
}

fn bear_ok(stock: &StockFundamentals, params: &StrategyParams) -> bool {
    pe_ok(stock, params) && undervalued(stock) && de_ok(stock, params) && stock.earnings_per_share.is_positive()
}

fn conservative_ok(stock: &StockFundamentals, params: &StrategyParams) -> bool {
    pe_ok(stock, params) && undervalued(stock)
}

fn dividend_ok(stock: &StockFundamentals, params: &StrategyParams) -> bool {
    stock.annual_dividend_per_share > params.min_dividend
}

fn eric_buy_ok(stock: &StockFundamentals, params: &StrategyParams) -> bool {
    let within_band = stock.price.micros() as i128 * 10_000
        <= bps(params.eric_book_band) * stock.book_value_per_share.micros() as i128;
    pe_ok(stock, params) && within_band && stock.earnings_per_share.is_positive() && de_ok(stock, params)
}

/// `price > ratio * average purchase price`, exact.
fn gained_over(portfolio: &Portfolio, stock: &StockFundamentals, ratio: f64) -> bool {
    let held = portfolio.holdings(&stock.symbol) as i128;
    held > 0
        && stock.price.micros() as i128 * held * 10_000 > bps(ratio) * portfolio.cost_basis(&stock.symbol).micros() as i128
}

/// Sequential cash budget: each buy spends a fraction of what is left.
struct Budget {
    cash: Money,
    fraction_bps: i64,
}

impl Budget {
    fn new(portfolio: &Portfolio, params: &StrategyParams) -> Self {
        Budget { cash: portfolio.cash.max(Money::ZERO), fraction_bps: bps(params.buy_fraction) as i64 }
    }

    fn buy_fraction(&mut self, stock: &StockFundamentals) -> Option<Decision> {
        let spend = self.cash.mul_div(self.fraction_bps, 10_000);
        self.buy_amount(stock, spend)
    }

    fn buy_amount(&mut self, stock: &StockFundamentals, spend: Money) -> Option<Decision> {
        let quantity = spend.min(self.cash).shares_at(stock.price);
        self.buy_shares(stock, quantity)
    }

    fn buy_shares(&mut self, stock: &StockFundamentals, quantity: u64) -> Option<Decision> {
        let quantity = quantity.min(self.cash.shares_at(stock.price));
        if quantity == 0 {
            return None;
        }
        self.cash -= stock.price.times(quantity);
        Some(Decision { symbol: stock.symbol.clone(), side: Side::Buy, quantity })
    }
}

fn sell_all(portfolio: &Portfolio, stock: &StockFundamentals) -> Option<Decision> {
    let quantity = portfolio.holdings(&stock.symbol);
    (quantity > 0).then(|| Decision { symbol: stock.symbol.clone(), side: Side::Sell, quantity })
}

/// Shared shape of the screen-style strategies: per symbol, sell the whole
/// position when `sell` holds, otherwise buy a cash fraction when `buy` holds.
fn screen(
    snapshot: &MarketSnapshot,
    portfolio: &Portfolio,
    params: &StrategyParams,
    buy: impl Fn(&StockFundamentals) -> bool,
    sell: impl Fn(&StockFundamentals) -> bool,
) -> Vec<Decision> {
    let mut budget = Budget::new(portfolio, params);
    let mut out = Vec::new();
    for stock in snapshot.stocks.values() {
        if portfolio.is_held(&stock.symbol) && sell(stock) {
            out.extend(sell_all(portfolio, stock));
        } else if buy(stock) {
            out.extend(budget.buy_fraction(stock));
        }
    }
    out
}

pub fn decide_bear(snapshot: &MarketSnapshot, portfolio: &Portfolio, params: &StrategyParams) -> Vec<Decision> {
    screen(
        snapshot,
        portfolio,
        params,
        |s| bear_ok(s, params) && !portfolio.is_held(&s.symbol),
        |s| !bear_ok(s, params),
    )
}

pub fn decide_conservative(snapshot: &MarketSnapshot, portfolio: &Portfolio, params: &StrategyParams) -> Vec<Decision> {
    screen(snapshot, portfolio, params, |s| conservative_ok(s, params), |s| !conservative_ok(s, params))
}

pub fn decide_bluechip(snapshot: &MarketSnapshot, portfolio: &Portfolio, params: &StrategyParams) -> Vec<Decision> {
    screen(
        snapshot,
        portfolio,
        params,
        |s| dividend_ok(s, params) && !portfolio.is_held(&s.symbol),
        |s| !dividend_ok(s, params),
    )
}

pub fn decide_bargain(snapshot: &MarketSnapshot, portfolio: &Portfolio, params: &StrategyParams) -> Vec<Decision> {
    // book == price is neither signal
    screen(snapshot, portfolio, params, undervalued, |s| s.book_value_per_share < s.price)
}

pub fn decide_fool(snapshot: &MarketSnapshot, portfolio: &Portfolio, params: &StrategyParams) -> Vec<Decision> {
    screen(snapshot, portfolio, params, |s| pe_ok(s, params), |s| !pe_ok(s, params))
}

/// Like the fool, but only sells at a profit over its average purchase price.
pub fn decide_fool_improved(snapshot: &MarketSnapshot, portfolio: &Portfolio, params: &StrategyParams) -> Vec<Decision> {
    screen(
        snapshot,
        portfolio,
        params,
        |s| pe_ok(s, params),
        |s| !pe_ok(s, params) && gained_over(portfolio, s, 1.0),
    )
}

/// Buys near book value on sound fundamentals and takes profit above the
/// configured gain. There is no loss-side exit.
pub fn decide_eric(snapshot: &MarketSnapshot, portfolio: &Portfolio, params: &StrategyParams) -> Vec<Decision> {
    screen(
        snapshot,
        portfolio,
        params,
        |s| eric_buy_ok(s, params),
        |s| gained_over(portfolio, s, params.eric_take_profit),
    )
}

/// Trend follower on the market index: buys everything after a rise, sells
/// everything after a fall.
pub fn decide_idiot(view: MarketView<'_>, portfolio: &Portfolio, params: &StrategyParams) -> Vec<Decision> {
    let k = params.idiot_window.max(1);
    if view.history.len() < k {
        return Vec::new();
    }
    let then = view.history[view.history.len() - k].index_level;
    let now = view.current.index_level;
    let stocks = &view.current.stocks;
    if now > then {
        let mut budget = Budget::new(portfolio, params);
        let total = budget.cash.mul_div(budget.fraction_bps, 10_000);
        let share = total.mul_div(1, stocks.len().max(1) as i64);
        stocks.values().filter_map(|s| budget.buy_amount(s, share)).collect()
    } else if now < then {
        stocks.values().filter_map(|s| sell_all(portfolio, s)).collect()
    } else {
        Vec::new()
    }
}

/// Sells a fixed lot after a price rise and buys one after a fall.
pub fn decide_reverse(view: MarketView<'_>, portfolio: &Portfolio, params: &StrategyParams) -> Vec<Decision> {
    let Some(previous) = view.previous() else {
        return Vec::new();
    };
    let mut budget = Budget::new(portfolio, params);
    let mut out = Vec::new();
    for stock in view.current.stocks.values() {
        let Some(last) = previous.stocks.get(&stock.symbol) else {
            continue;
        };
        if stock.price > last.price {
            let quantity = params.lot_size.min(portfolio.holdings(&stock.symbol));
            if quantity > 0 {
                out.push(Decision { symbol: stock.symbol.clone(), side: Side::Sell, quantity });
            }
        } else if stock.price < last.price {
            out.extend(budget.buy_shares(stock, params.lot_size));
        }
    }
    out
}

/// Dispatches to the rule for `kind`. Humans decide through the order queue.
pub fn decide(kind: StrategyKind, view: MarketView<'_>, portfolio: &Portfolio, params: &StrategyParams) -> Vec<Decision> {
    let snapshot = view.current;
    match kind {
        StrategyKind::Bear => decide_bear(snapshot, portfolio, params),
        StrategyKind::Conservative => decide_conservative(snapshot, portfolio, params),
        StrategyKind::BlueChip => decide_bluechip(snapshot, portfolio, params),
        StrategyKind::BargainHunter => decide_bargain(snapshot, portfolio, params),
        StrategyKind::Fool => decide_fool(snapshot, portfolio, params),
        StrategyKind::FoolImproved => decide_fool_improved(snapshot, portfolio, params),
        StrategyKind::Idiot => decide_idiot(view, portfolio, params),
        StrategyKind::Eric => decide_eric(snapshot, portfolio, params),
        StrategyKind::Reverse => decide_reverse(view, portfolio, params),
        StrategyKind::Human => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn stock(price: f64, eps: f64, book: f64, debt: f64, equity: f64, dividend: f64) -> StockFundamentals {
        StockFundamentals {
            symbol: "ACME".into(),
            price: Money::from_f64(price),
            earnings_per_share: Money::from_f64(eps),
            book_value_per_share: Money::from_f64(book),
            debt: Money::from_f64(debt),
            equity: Money::from_f64(equity),
            annual_dividend_per_share: Money::from_f64(dividend),
            shares_outstanding: 1_000_000,
            last_volume: 0,
        }
    }

    fn snap(stocks: impl IntoIterator<Item = StockFundamentals>) -> MarketSnapshot {
        MarketSnapshot::initial(stocks)
    }

    fn cash(units: i64) -> Portfolio {
        Portfolio::new("a".into(), Money::from_units(units))
    }

    fn holding(price: i64, qty: u64) -> Portfolio {
        let mut p = cash(10_000);
        p.add_lot(&"ACME".into(), qty, Money::from_units(price), 0);
        p
    }

    fn sides(ds: &[Decision]) -> Vec<Side> {
        ds.iter().map(|d| d.side).collect()
    }

    const P: StrategyParams = StrategyParams {
        max_pe: 30.0,
        max_debt_to_equity: 1.0,
        min_dividend: Money::from_units(1),
        eric_book_band: 1.10,
        eric_take_profit: 1.20,
        buy_fraction: 0.10,
        lot_size: 10,
        idiot_window: 1,
    };

    #[test]
    fn bear_examples() {
        // pe 25, book 120 > 100, d:e 0.5, eps 4
        let s = snap([stock(100.0, 4.0, 120.0, 50.0, 100.0, 0.0)]);
        let d = decide_bear(&s, &cash(10_000), &P);
        assert_eq!(d, vec![Decision { symbol: "ACME".into(), side: Side::Buy, quantity: 10 }]);

        let s = snap([stock(100.0, 0.0, 120.0, 50.0, 100.0, 0.0)]);
        assert!(decide_bear(&s, &cash(10_000), &P).is_empty());

        // pe exactly 30
        let s = snap([stock(120.0, 4.0, 130.0, 50.0, 100.0, 0.0)]);
        assert!(decide_bear(&s, &cash(10_000), &P).is_empty());
    }

    #[test]
    fn bear_does_not_add_to_position_and_sells_on_failure() {
        let s = snap([stock(100.0, 4.0, 120.0, 50.0, 100.0, 0.0)]);
        assert!(decide_bear(&s, &holding(100, 5), &P).is_empty());
        let s = snap([stock(100.0, 4.0, 120.0, 150.0, 100.0, 0.0)]);
        assert_eq!(sides(&decide_bear(&s, &holding(100, 5), &P)), [Side::Sell]);
    }

    #[test]
    fn conservative_examples() {
        let s = snap([stock(100.0, 4.0, 120.0, 500.0, 100.0, 0.0)]);
        assert_eq!(sides(&decide_conservative(&s, &cash(10_000), &P)), [Side::Buy]);
        let s = snap([stock(120.0, 4.8, 100.0, 0.0, 100.0, 0.0)]);
        assert!(decide_conservative(&s, &cash(10_000), &P).is_empty());
        assert_eq!(sides(&decide_conservative(&s, &holding(100, 3), &P)), [Side::Sell]);
    }

    #[test]
    fn bluechip_examples() {
        let s = snap([stock(100.0, 4.0, 1.0, 0.0, 1.0, 1.5)]);
        assert_eq!(sides(&decide_bluechip(&s, &cash(10_000), &P)), [Side::Buy]);
        let s = snap([stock(100.0, 4.0, 1.0, 0.0, 1.0, 1.0)]);
        assert!(decide_bluechip(&s, &cash(10_000), &P).is_empty());
        assert_eq!(sides(&decide_bluechip(&s, &holding(100, 3), &P)), [Side::Sell]);
        let s = snap([stock(100.0, 4.0, 1.0, 0.0, 1.0, 0.0)]);
        assert!(decide_bluechip(&s, &cash(10_000), &P).is_empty());
    }

    #[test]
    fn bargain_examples() {
        let s = snap([stock(100.0, -1.0, 110.0, 0.0, 0.0, 0.0)]);
        assert_eq!(sides(&decide_bargain(&s, &cash(10_000), &P)), [Side::Buy]);
        let s = snap([stock(110.0, -1.0, 100.0, 0.0, 0.0, 0.0)]);
        let d = decide_bargain(&s, &holding(100, 7), &P);
        assert_eq!(d, vec![Decision { symbol: "ACME".into(), side: Side::Sell, quantity: 7 }]);
        let s = snap([stock(100.0, -1.0, 100.0, 0.0, 0.0, 0.0)]);
        assert!(decide_bargain(&s, &holding(100, 7), &P).is_empty());
        assert!(decide_bargain(&s, &cash(10_000), &P).is_empty());
    }

    #[test]
    fn fool_examples() {
        let s = snap([stock(29.9, 1.0, 0.0, 0.0, 0.0, 0.0)]);
        assert_eq!(sides(&decide_fool(&s, &cash(10_000), &P)), [Side::Buy]);
        let s = snap([stock(31.0, 1.0, 0.0, 0.0, 0.0, 0.0)]);
        assert_eq!(sides(&decide_fool(&s, &holding(20, 1), &P)), [Side::Sell]);
        let s = snap([stock(31.0, -2.0, 0.0, 0.0, 0.0, 0.0)]);
        assert_eq!(sides(&decide_fool(&s, &holding(20, 1), &P)), [Side::Sell]);
    }

    #[test]
    fn fool_improved_examples() {
        let high_pe = snap([stock(100.0, 100.0 / 31.0, 0.0, 0.0, 0.0, 0.0)]);
        assert_eq!(sides(&decide_fool_improved(&high_pe, &holding(90, 4), &P)), [Side::Sell]);
        assert!(decide_fool_improved(&high_pe, &holding(110, 4), &P).is_empty());
        let low_pe = snap([stock(100.0, 4.0, 0.0, 0.0, 0.0, 0.0)]);
        assert_eq!(sides(&decide_fool_improved(&low_pe, &holding(90, 4), &P)), [Side::Buy]);
        assert!(!sides(&decide_fool_improved(&low_pe, &holding(90, 4), &P)).contains(&Side::Sell));
    }

    #[test]
    fn eric_examples() {
        let s = snap([stock(105.0, 5.25, 100.0, 40.0, 100.0, 0.0)]);
        assert_eq!(sides(&decide_eric(&s, &cash(10_000), &P)), [Side::Buy]);
        let s = snap([stock(121.0, -1.0, 0.0, 0.0, 0.0, 0.0)]);
        assert_eq!(sides(&decide_eric(&s, &holding(100, 4), &P)), [Side::Sell]);
        let s = snap([stock(80.0, -1.0, 0.0, 500.0, 100.0, 0.0)]);
        assert!(decide_eric(&s, &holding(100, 4), &P).is_empty());
    }

    fn indexed(level: f64) -> MarketSnapshot {
        let mut s = snap([
            stock(10.0, 1.0, 1.0, 0.0, 1.0, 0.0),
            StockFundamentals { symbol: "BETA".into(), ..stock(20.0, 1.0, 1.0, 0.0, 1.0, 0.0) },
        ]);
        s.index_level = level;
        s
    }

    #[test]
    fn idiot_examples() {
        let history = [indexed(100.0)];
        let now = indexed(102.0);
        let d = decide_idiot(MarketView::new(&now, &history), &cash(10_000), &P);
        // 1000 split evenly: 500 / 10 and 500 / 20
        assert_eq!(d.len(), 2);
        assert!(d.iter().all(|d| d.side == Side::Buy));
        assert_eq!(d.iter().map(|d| d.quantity).collect::<Vec<_>>(), [50, 25]);

        let history = [indexed(102.0)];
        let now = indexed(100.0);
        let mut p = holding(10, 3);
        p.add_lot(&"BETA".into(), 2, Money::from_units(20), 0);
        let d = decide_idiot(MarketView::new(&now, &history), &p, &P);
        assert_eq!(sides(&d), [Side::Sell, Side::Sell]);

        assert!(decide_idiot(MarketView::without_history(&now), &cash(10_000), &P).is_empty());
    }

    fn priced(price: f64) -> MarketSnapshot {
        snap([stock(price, 1.0, 1.0, 0.0, 1.0, 0.0)])
    }

    #[test]
    fn reverse_examples() {
        let p = holding(10, 25);
        let d = decide_reverse(MarketView::new(&priced(11.0), &[priced(10.0)]), &p, &P);
        assert_eq!(d, vec![Decision { symbol: "ACME".into(), side: Side::Sell, quantity: 10 }]);
        let d = decide_reverse(MarketView::new(&priced(10.0), &[priced(11.0)]), &p, &P);
        assert_eq!(d, vec![Decision { symbol: "ACME".into(), side: Side::Buy, quantity: 10 }]);
        assert!(decide_reverse(MarketView::new(&priced(10.0), &[priced(10.0)]), &p, &P).is_empty());
    }

    #[test]
    fn reverse_caps() {
        let d = decide_reverse(MarketView::new(&priced(11.0), &[priced(10.0)]), &holding(10, 4), &P);
        assert_eq!(d[0].quantity, 4);
        assert!(decide_reverse(MarketView::new(&priced(11.0), &[priced(10.0)]), &cash(100), &P).is_empty());
        let d = decide_reverse(MarketView::new(&priced(10.0), &[priced(11.0)]), &cash(35), &P);
        assert_eq!(d[0].quantity, 3);
    }

    #[test]
    fn buys_debit_sequentially_in_symbol_order() {
        let a = StockFundamentals { symbol: "AAA".into(), ..stock(10.0, 1.0, 1.0, 0.0, 1.0, 0.0) };
        let b = StockFundamentals { symbol: "BBB".into(), ..stock(10.0, 1.0, 1.0, 0.0, 1.0, 0.0) };
        let d = decide_fool(&snap([b, a]), &cash(1000), &P);
        assert_eq!(d[0].symbol, Symbol::from("AAA"));
        assert_eq!(d.iter().map(|d| d.quantity).collect::<Vec<_>>(), [10, 9]);
    }

    #[test]
    fn human_never_decides() {
        let s = snap([stock(100.0, 4.0, 120.0, 50.0, 100.0, 2.0)]);
        assert!(decide(StrategyKind::Human, MarketView::without_history(&s), &cash(10_000), &P).is_empty());
    }

    #[test]
    fn strategy_names_parse() {
        for k in StrategyKind::ALL {
            assert_eq!(k.name().parse::<StrategyKind>().unwrap(), k);
        }
        assert_eq!("BargainHunter".parse::<StrategyKind>().unwrap(), StrategyKind::BargainHunter);
        assert!("wizard".parse::<StrategyKind>().is_err());
    }
}
