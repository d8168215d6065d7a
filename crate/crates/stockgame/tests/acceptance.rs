//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stockgame::batch::par_tournament;
use stockgame::core::accounting::{relative_scores, Lot, Portfolio, TradeRecord};
use stockgame::core::agents::{self, Decision, MarketView, StrategyKind, StrategyParams};
use stockgame::core::engine::{critic_evaluate, run, tournament, Session, StrategyStats, Verdict};
use stockgame::core::market::{MarketSnapshot, PriceBar, Side, StockFundamentals};
use stockgame::core::signals::{detect_signals, evaluate_series, validate_series, SignalParams};
use stockgame::core::synthetic::{generate_ying_series, YingConfig};
use stockgame::core::{Money, ParticipantId, Symbol};
use stockgame::runlog::log_to_string;
use stockgame::scenario;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(started: Instant, limit: Duration) -> Result<(), String> {
    let took = started.elapsed();
    check(took < limit, || format!("took {took:.2?}, limit {limit:?}"))
}

fn m(v: f64) -> Money {
    Money::from_f64(v)
}

fn stock(symbol: &str, price: f64, eps: f64, book: f64, debt: f64, equity: f64, dividend: f64) -> StockFundamentals {
    StockFundamentals {
        symbol: symbol.into(),
        price: m(price),
        earnings_per_share: m(eps),
        book_value_per_share: m(book),
        debt: m(debt),
        equity: m(equity),
        annual_dividend_per_share: m(dividend),
        shares_outstanding: 1_000_000,
        last_volume: 0,
    }
}

fn snapshot(tick: u64, index_level: f64, stocks: Vec<StockFundamentals>) -> MarketSnapshot {
    MarketSnapshot { tick, stocks: stocks.into_iter().map(|s| (s.symbol.clone(), s)).collect(), index_level }
}

fn portfolio(cash: f64, held: &[(&str, u64, f64)]) -> Portfolio {
    let mut p = Portfolio::new("p".into(), m(cash));
    for &(symbol, quantity, cost) in held {
        let lot = Lot { quantity, purchase_price: m(cost), purchase_tick: 0 };
        p.lots.insert(symbol.into(), VecDeque::from([lot]));
    }
    p
}

fn buy(symbol: &str, quantity: u64) -> Decision {
    Decision { symbol: symbol.into(), side: Side::Buy, quantity }
}

fn sell(symbol: &str, quantity: u64) -> Decision {
    Decision { symbol: symbol.into(), side: Side::Sell, quantity }
}

const SCREENS: [StrategyKind; 7] = [
    StrategyKind::Bear,
    StrategyKind::Conservative,
    StrategyKind::BlueChip,
    StrategyKind::BargainHunter,
    StrategyKind::Fool,
    StrategyKind::FoolImproved,
    StrategyKind::Eric,
];

struct Row {
    label: &'static str,
    stock: [f64; 6],
    /// Purchase price of a 50-share holding.
    held_at: Option<f64>,
    buy_qty: u64,
    /// Per agent in `SCREENS` order: B buys `buy_qty`, S sells all 50, - does nothing.
    expect: &'static str,
}

const fn row(label: &'static str, stock: [f64; 6], held_at: Option<f64>, buy_qty: u64, expect: &'static str) -> Row {
    Row { label, stock, held_at, buy_qty, expect }
}

// price, eps, book, debt, equity, dividend; cash is always 10,000
const BASE: [f64; 6] = [100.0, 5.0, 105.0, 40.0, 100.0, 1.5];
const CHEAP: [f64; 6] = [29.99, 1.0, 40.0, 40.0, 100.0, 1.5];

#[rustfmt::skip]
const TABLE: &[Row] = &[
    row("all screens pass", BASE, None, 10, "BBBBBBB"),
    row("p:e 29.99", CHEAP, None, 33, "BBBBBBB"),
    row("p:e 30", [30.0, 1.0, 40.0, 40.0, 100.0, 1.5], None, 33, "--BB---"),
    row("p:e 30.01", [30.01, 1.0, 40.0, 40.0, 100.0, 1.5], None, 33, "--BB---"),
    row("p:e 29.99 held", CHEAP, Some(25.0), 33, "-B-BBBB"),
    row("p:e 30 held, gain exactly 20%", [30.0, 1.0, 40.0, 40.0, 100.0, 1.5], Some(25.0), 33, "SS-BSS-"),
    row("p:e 30.01 held, gain over 20%", [30.01, 1.0, 40.0, 40.0, 100.0, 1.5], Some(25.0), 33, "SS-BSSS"),
    row("dividend 0.99", [100.0, 5.0, 105.0, 40.0, 100.0, 0.99], None, 10, "BB-BBBB"),
    row("dividend 1.00", [100.0, 5.0, 105.0, 40.0, 100.0, 1.0], None, 10, "BB-BBBB"),
    row("dividend 1.01", [100.0, 5.0, 105.0, 40.0, 100.0, 1.01], None, 10, "BBBBBBB"),
    row("dividend 0.99 held", [100.0, 5.0, 105.0, 40.0, 100.0, 0.99], Some(100.0), 10, "-BSBBBB"),
    row("dividend 1.00 held", [100.0, 5.0, 105.0, 40.0, 100.0, 1.0], Some(100.0), 10, "-BSBBBB"),
    row("dividend 1.01 held", [100.0, 5.0, 105.0, 40.0, 100.0, 1.01], Some(100.0), 10, "-B-BBBB"),
    row("dividend 0 held", [100.0, 5.0, 105.0, 40.0, 100.0, 0.0], Some(100.0), 10, "-BSBBBB"),
    row("book/price 0.9", [100.0, 5.0, 90.0, 40.0, 100.0, 1.5], None, 10, "--B-BB-"),
    row("book/price 0.9 held", [100.0, 5.0, 90.0, 40.0, 100.0, 1.5], Some(100.0), 10, "SS-SBB-"),
    row("book/price 1.0", [100.0, 5.0, 100.0, 40.0, 100.0, 1.5], None, 10, "--B-BBB"),
    row("book/price 1.0 held", [100.0, 5.0, 100.0, 40.0, 100.0, 1.5], Some(100.0), 10, "SS--BBB"),
    row("book/price 1.1", [100.0, 5.0, 110.0, 40.0, 100.0, 1.5], None, 10, "BBBBBBB"),
    row("price/book 1.1", [110.0, 5.0, 100.0, 40.0, 100.0, 1.5], None, 9, "--B-BBB"),
    row("price/book 1.101", [110.1, 5.0, 100.0, 40.0, 100.0, 1.5], None, 9, "--B-BB-"),
    row("d:e 0.99", [100.0, 5.0, 105.0, 99.0, 100.0, 1.5], None, 10, "BBBBBBB"),
    row("d:e 1", [100.0, 5.0, 105.0, 100.0, 100.0, 1.5], None, 10, "-BBBBB-"),
    row("d:e 1.01", [100.0, 5.0, 105.0, 101.0, 100.0, 1.5], None, 10, "-BBBBB-"),
    row("d:e 1 held", [100.0, 5.0, 105.0, 100.0, 100.0, 1.5], Some(100.0), 10, "SB-BBB-"),
    row("zero equity", [100.0, 5.0, 105.0, 40.0, 0.0, 1.5], None, 10, "-BBBBB-"),
    row("gain 19%", [119.0, 10.0, 200.0, 40.0, 100.0, 1.5], Some(100.0), 8, "-B-BBBB"),
    row("gain 20%", [120.0, 10.0, 200.0, 40.0, 100.0, 1.5], Some(100.0), 8, "-B-BBBB"),
    row("gain 21%", [121.0, 10.0, 200.0, 40.0, 100.0, 1.5], Some(100.0), 8, "-B-BBBS"),
    row("p:e 31 in profit", [124.0, 4.0, 200.0, 40.0, 100.0, 1.5], Some(90.0), 8, "SS-BSSS"),
    row("p:e 31 at a loss", [124.0, 4.0, 200.0, 40.0, 100.0, 1.5], Some(130.0), 8, "SS-BS--"),
    row("negative eps held", [100.0, -2.0, 105.0, 40.0, 100.0, 1.5], Some(100.0), 10, "SS-BS--"),
];

struct HistoryRow {
    label: &'static str,
    kind: StrategyKind,
    /// (index, price of A, price of B) before and now; `None` means tick 0.
    before: Option<(f64, f64, f64)>,
    now: (f64, f64, f64),
    cash: f64,
    held: &'static [(&'static str, u64, f64)],
    expect: fn() -> Vec<Decision>,
}

#[rustfmt::skip]
const HISTORY: &[HistoryRow] = &[
    HistoryRow { label: "index up", kind: StrategyKind::Idiot, before: Some((100.0, 50.0, 20.0)), now: (102.0, 50.0, 20.0), cash: 10_000.0, held: &[], expect: || vec![buy("A", 10), buy("B", 25)] },
    HistoryRow { label: "index down", kind: StrategyKind::Idiot, before: Some((102.0, 50.0, 20.0)), now: (100.0, 50.0, 20.0), cash: 10_000.0, held: &[("A", 5, 40.0), ("B", 7, 30.0)], expect: || vec![sell("A", 5), sell("B", 7)] },
    HistoryRow { label: "index flat", kind: StrategyKind::Idiot, before: Some((100.0, 50.0, 20.0)), now: (100.0, 51.0, 19.0), cash: 10_000.0, held: &[("A", 5, 40.0)], expect: Vec::new },
    HistoryRow { label: "no history", kind: StrategyKind::Idiot, before: None, now: (100.0, 50.0, 20.0), cash: 10_000.0, held: &[], expect: Vec::new },
    HistoryRow { label: "rise sells a lot", kind: StrategyKind::Reverse, before: Some((100.0, 10.0, 20.0)), now: (100.0, 11.0, 20.0), cash: 0.0, held: &[("A", 50, 10.0)], expect: || vec![sell("A", 10)] },
    HistoryRow { label: "rise sells what is held", kind: StrategyKind::Reverse, before: Some((100.0, 10.0, 20.0)), now: (100.0, 11.0, 20.0), cash: 0.0, held: &[("A", 3, 10.0)], expect: || vec![sell("A", 3)] },
    HistoryRow { label: "rise with nothing held", kind: StrategyKind::Reverse, before: Some((100.0, 10.0, 20.0)), now: (100.0, 11.0, 20.0), cash: 0.0, held: &[], expect: Vec::new },
    HistoryRow { label: "fall buys a lot", kind: StrategyKind::Reverse, before: Some((100.0, 11.0, 20.0)), now: (100.0, 10.0, 20.0), cash: 1_000.0, held: &[], expect: || vec![buy("A", 10)] },
    HistoryRow { label: "fall buys what cash allows", kind: StrategyKind::Reverse, before: Some((100.0, 11.0, 20.0)), now: (100.0, 10.0, 20.0), cash: 55.0, held: &[], expect: || vec![buy("A", 5)] },
    HistoryRow { label: "both move", kind: StrategyKind::Reverse, before: Some((100.0, 11.0, 20.0)), now: (100.0, 10.0, 21.0), cash: 1_000.0, held: &[("B", 4, 20.0)], expect: || vec![buy("A", 10), sell("B", 4)] },
    HistoryRow { label: "unchanged", kind: StrategyKind::Reverse, before: Some((100.0, 10.0, 20.0)), now: (100.0, 10.0, 20.0), cash: 1_000.0, held: &[("A", 5, 10.0)], expect: Vec::new },
    HistoryRow { label: "tick 0", kind: StrategyKind::Reverse, before: None, now: (100.0, 10.0, 20.0), cash: 1_000.0, held: &[], expect: Vec::new },
];

fn two_stocks(tick: u64, (index, a, b): (f64, f64, f64)) -> MarketSnapshot {
    snapshot(tick, index, vec![stock("A", a, 1.0, a, 0.0, 1.0, 0.0), stock("B", b, 1.0, b, 0.0, 1.0, 0.0)])
}

fn a1() -> Outcome {
    let started = Instant::now();
    let params = StrategyParams::default();
    let mut mismatches = Vec::new();
    let mut decisions = 0;
    for r in TABLE {
        let [price, eps, book, debt, equity, dividend] = r.stock;
        let snap = snapshot(0, 100.0, vec![stock("X", price, eps, book, debt, equity, dividend)]);
        let held: Vec<_> = r.held_at.iter().map(|&cost| ("X", 50, cost)).collect();
        let p = portfolio(10_000.0, &held);
        for (kind, code) in SCREENS.into_iter().zip(r.expect.chars()) {
            let want = match code {
                'B' => vec![buy("X", r.buy_qty)],
                'S' => vec![sell("X", 50)],
                _ => vec![],
            };
            let got = agents::decide(kind, MarketView::without_history(&snap), &p, &params);
            decisions += 1;
            if got != want {
                mismatches.push(format!("{} / {kind}: want {want:?}, got {got:?}", r.label));
            }
        }
    }
    for r in HISTORY {
        let now = two_stocks(1, r.now);
        let history: Vec<_> = r.before.map(|b| two_stocks(0, b)).into_iter().collect();
        let got = agents::decide(r.kind, MarketView::new(&now, &history), &portfolio(r.cash, r.held), &params);
        decisions += 1;
        if got != (r.expect)() {
            mismatches.push(format!("{} / {}: want {:?}, got {got:?}", r.label, r.kind, (r.expect)()));
        }
    }
    check(mismatches.is_empty(), || mismatches.join("; "))?;
    within(started, Duration::from_secs(1))?;
    Ok(format!("{} snapshots, {decisions} decisions, 0 mismatches", TABLE.len() + HISTORY.len()))
}

fn random_snapshot(rng: &mut impl Rng) -> (MarketSnapshot, Portfolio) {
    // cents, so ratios land exactly on thresholds now and then
    let cents = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| Money::from_micros(rng.random_range(lo..=hi) * 10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(rng.random());
    let mut stocks = Vec::new();
    let mut held = Vec::new();
    for i in 0..rng.random_range(1..=6) {
        let price = cents(&mut rng, 100, 50_000);
        let stock = StockFundamentals {
            symbol: Symbol::from(format!("S{i}").as_str()),
            price,
            earnings_per_share: if rng.random_bool(0.1) { Money::ZERO } else { cents(&mut rng, -500, 2_000) },
            book_value_per_share: if rng.random_bool(0.1) { price } else { price.mul_div(rng.random_range(50..=150), 100) },
            debt: cents(&mut rng, 0, 20_000),
            equity: cents(&mut rng, -1_000, 20_000),
            annual_dividend_per_share: cents(&mut rng, 0, 300),
            shares_outstanding: 1_000_000,
            last_volume: 0,
        };
        if rng.random_bool(0.3) {
            held.push((stock.symbol.clone(), rng.random_range(1..100), price.mul_div(rng.random_range(50..=150), 100)));
        }
        stocks.push(stock);
    }
    let mut p = Portfolio::new("p".into(), Money::from_units(1_000_000));
    for (symbol, quantity, purchase_price) in held {
        p.lots.insert(symbol, VecDeque::from([Lot { quantity, purchase_price, purchase_tick: 0 }]));
    }
    (snapshot(0, 100.0, stocks), p)
}

fn buys(kind: StrategyKind, snap: &MarketSnapshot, p: &Portfolio) -> BTreeSet<Symbol> {
    agents::decide(kind, MarketView::without_history(snap), p, &StrategyParams::default())
        .into_iter()
        .filter(|d| d.side == Side::Buy)
        .map(|d| d.symbol)
        .collect()
}

fn a2() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    let mut bear_buys = 0;
    for _ in 0..10_000 {
        let (snap, p) = random_snapshot(&mut rng);
        let bear = buys(StrategyKind::Bear, &snap, &p);
        let conservative = buys(StrategyKind::Conservative, &snap, &p);
        let fool = buys(StrategyKind::Fool, &snap, &p);
        bear_buys += bear.len();
        if !bear.is_subset(&conservative) || !conservative.is_subset(&fool) {
            violations += 1;
        }
    }
    check(violations == 0, || format!("{violations} snapshots break the nesting"))?;
    check(bear_buys > 0, || "Bear never bought; the generator is too harsh".into())?;
    within(started, Duration::from_secs(5))?;
    Ok(format!("10000 snapshots, {bear_buys} Bear buys, 0 violations"))
}

fn a3() -> Outcome {
    let mut checked = 0;
    for name in ["paper-defaults", "mean-reverting", "crash"] {
        for seed in 0..3 {
            let mut loaded = scenario::resolve(name).map_err(|e| e.to_string())?.with_ticks(100);
            loaded.config.seed = seed;
            loaded.config.fee = Money::ZERO;
            let mut s = Session::new(loaded.config, loaded.scenario).map_err(|e| e.to_string())?;
            let outstanding: BTreeMap<Symbol, i64> =
                s.snapshot().stocks.values().map(|st| (st.symbol.clone(), st.shares_outstanding as i64)).collect();
            while !s.is_finished() {
                let cash_before: Money = s.portfolios().values().map(|p| p.cash).sum();
                s.step().map_err(|e| e.to_string())?;
                let rec = s.log().last().expect("one record per step");
                let tick = rec.tick;
                for (sym, total) in &outstanding {
                    let held: i64 = s.portfolios().values().map(|p| p.holdings(sym) as i64).sum();
                    check(held + s.market_maker_float()[sym] == *total, || format!("{name}/{seed} tick {tick}: {sym} not conserved"))?;
                }
                let cash_after: Money = s.portfolios().values().map(|p| p.cash).sum();
                let bought: Money = rec
                    .fills
                    .iter()
                    .map(|f| match f.side {
                        Side::Buy => f.price.times(f.quantity),
                        Side::Sell => -f.price.times(f.quantity),
                    })
                    .sum();
                let dividends: Money = rec.dividends.values().copied().sum();
                check(cash_after - cash_before == dividends - bought, || format!("{name}/{seed} tick {tick}: cash identity broken"))?;
                let n = rec.wealths.len() as f64;
                let mean = rec.wealths.values().map(|w| w.to_f64()).sum::<f64>() / n;
                let sum: f64 = relative_scores(&rec.wealths).values().sum();
                check(sum.abs() <= 1e-9 * n * mean, || format!("{name}/{seed} tick {tick}: scores sum to {sum}"))?;
                checked += 1;
            }
            check(!s.trades().is_empty(), || format!("{name}/{seed}: nobody traded"))?;
        }
    }
    Ok(format!("{checked} ticks over 9 runs of 100 ticks"))
}

/// Trade-by-trade replay of the reverse rule on a list of closes: decide on
/// close t against close t-1, fill at close t, mark at the last close.
fn reverse_oracle(closes: &[i64], ticks: usize, cash: i64, lot: i64) -> (i64, usize) {
    let (mut cash, mut held, mut trades) = (cash, 0i64, 0);
    for t in 1..ticks {
        let (now, before) = (closes[t], closes[t - 1]);
        let qty = if now > before {
            -lot.min(held)
        } else if now < before {
            lot.min(cash / now)
        } else {
            0
        };
        if qty != 0 {
            cash -= qty * now;
            held += qty;
            trades += 1;
        }
    }
    (cash + held * closes[ticks], trades)
}

fn a4() -> Outcome {
    let closes: Vec<i64> = (0..=100).map(|t| if t % 2 == 0 { 10 } else { 11 }).collect();
    let bars: Vec<PriceBar> = closes
        .iter()
        .enumerate()
        .map(|(t, &c)| PriceBar { tick: t as u64, open: Money::from_units(c), close: Money::from_units(c), volume: 0 })
        .collect();
    let scenario = stockgame::core::engine::Scenario {
        name: "sawtooth".into(),
        stocks: vec![stock("SAW", 10.0, 1.0, 10.0, 0.0, 1.0, 0.0)],
        bars: [(Symbol::from("SAW"), bars)].into_iter().collect(),
        ..Default::default()
    };
    let initial = 1_000;
    let config = stockgame::core::engine::SimConfig {
        mode: stockgame::core::engine::MarketMode::Replay,
        ticks: 100,
        participants: vec![stockgame::core::engine::ParticipantSpec {
            id: "reverse".into(),
            kind: StrategyKind::Reverse,
            initial_cash: Money::from_units(initial),
        }],
        fee: Money::ZERO,
        strategy: StrategyParams { lot_size: 10, ..Default::default() },
        ..Default::default()
    };
    let r = run(&config, &scenario).map_err(|e| e.to_string())?;
    let got = r.final_wealths[&ParticipantId::from("reverse")];
    let (want, trades) = reverse_oracle(&closes, 100, initial, 10);
    check(got == Money::from_units(want), || format!("engine {got}, oracle {want}"))?;
    check(r.trades.len() == trades, || format!("engine made {} trades, oracle {trades}", r.trades.len()))?;
    check(got > Money::from_units(initial), || format!("terminal wealth {got} does not beat {initial}"))?;

    let bundled = scenario::load_scenario(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/sawtooth.toml")).map_err(|e| e.to_string())?;
    let again = run(&bundled.config, &bundled.scenario).map_err(|e| e.to_string())?;
    check(again.final_wealths == r.final_wealths, || "sawtooth scenario file disagrees".into())?;
    Ok(format!("terminal wealth {got} from {initial} over {trades} trades, equal to the oracle"))
}

fn cohens_d(a: &StrategyStats, b: &StrategyStats) -> f64 {
    let (na, nb) = (a.samples as f64, b.samples as f64);
    let pooled = (((na - 1.0) * a.stddev_wealth.powi(2) + (nb - 1.0) * b.stddev_wealth.powi(2)) / (na + nb - 2.0)).sqrt();
    (a.mean_wealth - b.mean_wealth) / pooled
}

fn a5() -> Outcome {
    let started = Instant::now();
    let loaded = scenario::resolve("mean-reverting").map_err(|e| e.to_string())?;
    check(loaded.config.ticks == 252, || format!("scenario runs {} ticks", loaded.config.ticks))?;
    let stats = par_tournament(&loaded.config, &loaded.scenario, 200).map_err(|e| e.to_string())?;
    within(started, Duration::from_secs(60))?;
    let get = |k| stats.get(k).ok_or_else(|| format!("no {k} in the roster"));
    let idiot = get(StrategyKind::Idiot)?;
    let mut parts = vec![format!("Idiot mean {:.0}", idiot.mean_wealth)];
    let mut losers = Vec::new();
    for kind in [StrategyKind::Bear, StrategyKind::Conservative, StrategyKind::BargainHunter, StrategyKind::Eric] {
        let s = get(kind)?;
        parts.push(format!("{kind} {:.0} (d={:.2})", s.mean_wealth, cohens_d(s, idiot)));
        if s.mean_wealth <= idiot.mean_wealth {
            losers.push(kind.to_string());
        }
    }
    let summary = parts.join(", ");
    check(losers.is_empty(), || format!("{} did not beat Idiot: {summary}", losers.join(", ")))?;
    Ok(format!("200 seeds x 252 ticks in {:.1?}: {summary}", started.elapsed()))
}

fn a6() -> Outcome {
    let params = SignalParams::default();
    let mut low = 1.0f64;
    let mut fired = [0usize; 6];
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bars = generate_ying_series(&YingConfig::default(), &mut rng).map_err(|e| e.to_string())?;
        check(bars.len() == 500, || format!("seed {seed}: {} bars", bars.len()))?;
        let runs = validate_series(&bars, &params).into_iter().filter(|v| v.rule_id >= 5).count();
        check(runs == 0, || format!("seed {seed}: {runs} violations of rules 5-6"))?;
        let report = evaluate_series(&bars, &params);
        for (i, rule) in report.rules.iter().enumerate() {
            fired[i] += rule.checked();
            if i < 4 {
                check(rule.satisfaction() >= 0.95, || format!("seed {seed}: rule {} at {:.3}", i + 1, rule.satisfaction()))?;
                low = low.min(rule.satisfaction());
            }
        }
    }
    check(fired.iter().all(|&n| n > 0), || format!("some rule never fired: {fired:?}"))?;
    let flat: Vec<PriceBar> = (0..200)
        .map(|t| PriceBar { tick: t, open: Money::from_units(50), close: Money::from_units(50), volume: 5_000 })
        .collect();
    let signals = detect_signals(&flat, &params).map_err(|e| e.to_string())?;
    check(signals.is_empty(), || format!("constant volume gave {} signals", signals.len()))?;
    Ok(format!("10 series of 500 bars, checked per rule {fired:?}, worst rule 1-4 satisfaction {low:.3}, 0 run violations"))
}

fn a7() -> Outcome {
    for name in ["paper-defaults", "mean-reverting", "crash"] {
        let loaded = scenario::resolve(name).map_err(|e| e.to_string())?;
        let first = run(&loaded.config, &loaded.scenario).map_err(|e| e.to_string())?;
        let second = run(&loaded.config, &loaded.scenario).map_err(|e| e.to_string())?;
        let (a, b) = (log_to_string(&first.log).map_err(|e| e.to_string())?, log_to_string(&second.log).map_err(|e| e.to_string())?);
        check(a.as_bytes() == b.as_bytes(), || format!("{name}: run logs differ"))?;
    }
    let loaded = scenario::resolve("paper-defaults").map_err(|e| e.to_string())?.with_ticks(60);
    let t1 = tournament(&loaded.config, &loaded.scenario, 5).map_err(|e| e.to_string())?;
    let t2 = tournament(&loaded.config, &loaded.scenario, 5).map_err(|e| e.to_string())?;
    let t3 = par_tournament(&loaded.config, &loaded.scenario, 5).map_err(|e| e.to_string())?;
    check(t1 == t2 && t2 == t3, || "tournament statistics differ between invocations".into())?;
    Ok("3 scenarios byte-identical, tournament repeated 3 times identical".into())
}

fn a8() -> Outcome {
    let trade = |tick, participant: &str, symbol: &str, side, price: f64| TradeRecord {
        tick,
        participant: participant.into(),
        symbol: symbol.into(),
        side,
        quantity: 10,
        price: m(price),
        fee: Money::ZERO,
    };
    let trades = vec![
        trade(0, "p", "A", Side::Buy, 100.0),
        trade(1, "p", "A", Side::Sell, 120.0),
        trade(1, "p", "B", Side::Buy, 100.0),
        trade(2, "p", "B", Side::Sell, 105.0),
        trade(2, "p", "C", Side::Buy, 100.0),
        trade(3, "p", "C", Side::Sell, 90.0),
    ];
    // flat, then +10%, then -5%
    let index = [100.0, 100.0, 110.0, 104.5];
    let prices: BTreeMap<Symbol, Vec<Money>> = [
        ("A", [100.0, 120.0, 120.0, 120.0]),
        ("B", [100.0, 100.0, 105.0, 105.0]),
        ("C", [100.0, 100.0, 100.0, 90.0]),
    ]
    .into_iter()
    .map(|(s, p)| (Symbol::from(s), p.into_iter().map(m).collect()))
    .collect();
    let roster = [(ParticipantId::from("p"), StrategyKind::Human)].into_iter().collect();
    let scores = [(ParticipantId::from("p"), 0.0)].into_iter().collect();
    let report = critic_evaluate(&trades, &prices, &index, &roster, &scores);
    let got: Vec<_> = report.verdicts.iter().map(|v| (v.verdict, v.excess_return)).collect();
    let want = [(Verdict::Good, 0.20), (Verdict::Bad, -0.05), (Verdict::Bad, -0.05)];
    check(got.len() == 3, || format!("{} verdicts", got.len()))?;
    for ((gv, ge), (wv, we)) in got.iter().zip(want) {
        check(*gv == wv && (ge - we).abs() <= 1e-9, || format!("want {wv:?} {we:+}, got {gv:?} {ge:+}"))?;
    }
    check(report.verdicts.iter().all(|v| !v.open), || "a round trip was judged as open".into())?;
    Ok(format!("verdicts {:?}", got.iter().map(|(v, e)| format!("{v:?} {e:+.2}")).collect::<Vec<_>>()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("A1", "rule fidelity table", a1),
        ("A2", "buy-set nesting", a2),
        ("A3", "conservation and zero-sum", a3),
        ("A4", "reverse strategy on a sawtooth", a4),
        ("A5", "fundamental agents beat Idiot", a5),
        ("A6", "Ying round trip", a6),
        ("A7", "determinism", a7),
        ("A8", "critic oracle", a8),
    ];
    let mut failed = 0;
    for (id, name, f) in criteria {
        match f() {
            Ok(detail) => println!("{id} PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("{id} FAIL {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
