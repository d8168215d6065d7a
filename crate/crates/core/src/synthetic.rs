//! Synthetic price paths: scenario families and a volume/price series on
//! which every rule in [`crate::signals`] holds.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::market::{PriceBar, StockFundamentals, PRICE_FLOOR};
use crate::money::Money;
use crate::signals::{Direction, SignalParams, VolumeFeatures};
use crate::{Error, Result};

/// A seeded price process for one stock.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum PriceProcess {
    /// Noise around the stock's book value:
    /// `p' = p + reversion * (book - p) + volatility * book * z`.
    MeanReverting { reversion: f64, volatility: f64 },
    /// `p' = p * (1 + drift + volatility * z)`.
    Trending { drift: f64, volatility: f64 },
    /// A trend that loses `depth` of its value at `crash_tick`.
    Crash { drift: f64, volatility: f64, crash_tick: u64, depth: f64 },
    /// Volume-driven closes from [`generate_ying_series`].
    YingDynamics { base_volume: u64, volume_dispersion: f64 },
}

fn bar(tick: u64, open: Money, close: Money, volume: u64) -> PriceBar {
    PriceBar { tick, open, close, volume }
}

/// `ticks + 1` bars starting at the stock's current price.
pub fn generate_path<R: Rng + ?Sized>(
    process: &PriceProcess,
    stock: &StockFundamentals,
    ticks: u64,
    rng: &mut R,
) -> Result<Vec<PriceBar>> {
    if let PriceProcess::YingDynamics { base_volume, volume_dispersion } = process {
        let config = YingConfig {
            length: (ticks as usize + 1).max(YingConfig::MIN_LENGTH),
            initial_close: stock.price,
            base_volume: *base_volume,
            volume_dispersion: *volume_dispersion,
            ..YingConfig::default()
        };
        let mut bars = generate_ying_series(&config, rng)?;
        bars.truncate(ticks as usize + 1);
        return Ok(bars);
    }

    let anchor = stock.book_value_per_share.to_f64();
    let mut price = stock.price.to_f64();
    let mut bars = Vec::with_capacity(ticks as usize + 1);
    bars.push(bar(0, stock.price, stock.price, 0));
    for tick in 1..=ticks {
        let z: f64 = rng.sample(StandardNormal);
        let next = match *process {
            PriceProcess::MeanReverting { reversion, volatility } => {
                price + reversion * (anchor - price) + volatility * anchor * z
            }
            PriceProcess::Trending { drift, volatility } => price * (1.0 + drift + volatility * z),
            PriceProcess::Crash { drift, volatility, crash_tick, depth } => {
                let p = price * (1.0 + drift + volatility * z);
                if tick == crash_tick {
                    p * (1.0 - depth)
                } else {
                    p
                }
            }
            PriceProcess::YingDynamics { .. } => unreachable!(),
        };
        let open = Money::from_f64(price).max(PRICE_FLOOR);
        let close = Money::from_f64(next).max(PRICE_FLOOR);
        price = close.to_f64();
        bars.push(bar(tick, open, close, 0));
    }
    Ok(bars)
}

/// A planted run of strictly monotone volumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ForcedRun {
    pub start: usize,
    pub length: usize,
    pub rising: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct YingConfig {
    pub length: usize,
    pub initial_close: Money,
    pub base_volume: u64,
    /// Log-normal spread of free volume draws.
    pub volume_dispersion: f64,
    pub forced_runs: Vec<ForcedRun>,
    /// Also plant alternating rising/falling runs every this many bars,
    /// skipping any that would contradict `forced_runs`.
    pub planted_run_spacing: Option<usize>,
    pub signals: SignalParams,
    /// Redraws allowed per tick before the config is declared infeasible.
    pub max_attempts: usize,
}

impl YingConfig {
    pub const MIN_LENGTH: usize = 10;
}

impl Default for YingConfig {
    fn default() -> Self {
        YingConfig {
            length: 500,
            initial_close: Money::from_units(100),
            base_volume: 1_000_000,
            volume_dispersion: 0.3,
            forced_runs: Vec::new(),
            planted_run_spacing: Some(40),
            signals: SignalParams::default(),
            max_attempts: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct MoveConstraint {
    direction: Option<Direction>,
    large: bool,
}

fn merge(slot: &mut Option<Direction>, want: Direction) -> bool {
    match *slot {
        None => {
            *slot = Some(want);
            true
        }
        Some(have) => have == want,
    }
}

/// Direction each tick must take relative to its predecessor under the
/// forced runs, or an error if two runs disagree. The second vector flags
/// ticks that belong only to planted runs and may be given up.
fn forced_directions(config: &YingConfig) -> Result<(Vec<Option<bool>>, Vec<bool>)> {
    let mut forced = alloc::vec![None; config.length];
    for run in &config.forced_runs {
        mark_run(&mut forced, run, config.length)?;
    }
    let user = forced.clone();
    let run_length = config.signals.run_length.max(2);
    if let Some(spacing) = config.planted_run_spacing.filter(|s| *s > run_length) {
        let mut rising = true;
        let mut start = spacing / 2;
        while start + run_length <= config.length {
            let run = ForcedRun { start, length: run_length, rising };
            let mut trial = forced.clone();
            if mark_run(&mut trial, &run, config.length).is_ok() {
                forced = trial;
            }
            rising = !rising;
            start += spacing;
        }
    }
    let planted = forced.iter().zip(&user).map(|(f, u)| f.is_some() && u.is_none()).collect();
    Ok((forced, planted))
}

fn mark_run(forced: &mut [Option<bool>], run: &ForcedRun, length: usize) -> Result<()> {
    {
        if run.length < 2 || run.start + run.length > length {
            return Err(Error::Infeasible(format!(
                "forced run at {} of length {} does not fit in {} bars",
                run.start, run.length, length
            )));
        }
        for slot in &mut forced[run.start + 1..run.start + run.length] {
            match *slot {
                Some(r) if r != run.rising => {
                    return Err(Error::Infeasible(format!("forced runs contradict near tick {}", run.start)))
                }
                _ => *slot = Some(run.rising),
            }
        }
    }
    Ok(())
}

/// Generates bars whose closes satisfy the consequent of every signal the
/// detector finds in their volumes.
///
/// Volumes are drawn tick by tick; a draw is rejected when the signals it
/// completes would demand a close direction already demanded the other way.
/// Closes are then laid down to satisfy the collected demands, with large
/// moves after volume spikes and small ones elsewhere.
pub fn generate_ying_series<R: Rng + ?Sized>(config: &YingConfig, rng: &mut R) -> Result<Vec<PriceBar>> {
    if config.length < YingConfig::MIN_LENGTH {
        return Err(Error::Infeasible(format!(
            "need at least {} bars, got {}",
            YingConfig::MIN_LENGTH,
            config.length
        )));
    }
    let params = &config.signals;
    let (forced, planted) = forced_directions(config)?;
    let attempts = config.max_attempts.max(1);
    let n = config.length;
    // moves[m] constrains close[m] relative to close[m - 1]
    let mut moves = alloc::vec![MoveConstraint::default(); n];
    let mut volumes: Vec<u64> = Vec::with_capacity(n);

    for t in 0..n {
        let mut accepted = None;
        // planted ticks that keep failing fall back to free draws
        for attempt in 0..2 * attempts {
            let direction = match (attempt < attempts, planted[t]) {
                (true, _) => forced[t],
                (false, true) => None,
                (false, false) => break,
            };
            let candidate = match direction {
                Some(rising) => {
                    let prev = volumes[t - 1];
                    let step = rng.random_range(0.05..0.30);
                    let raw = libm::round(prev as f64 * if rising { 1.0 + step } else { 1.0 - step }) as u64;
                    if rising {
                        raw.max(prev + 1)
                    } else {
                        raw.min(prev.saturating_sub(1)).max(1)
                    }
                }
                None => {
                    let z: f64 = rng.sample(StandardNormal);
                    (libm::round(config.base_volume as f64 * libm::exp(config.volume_dispersion * z)) as u64).max(1)
                }
            };
            if direction == Some(false) && candidate >= volumes[t - 1] {
                break;
            }
            volumes.push(candidate);
            let features = VolumeFeatures::at(&volumes, t, params);
            let mut trial = moves.clone();
            let ok = features.signals(t as u64, params).all(|s| {
                let span = if s.direction == Direction::LargeMove { 1 } else { s.horizon as usize };
                (t + 1..=t + span).filter(|m| *m < n).all(|m| {
                    if s.direction == Direction::LargeMove {
                        trial[m].large = true;
                        true
                    } else {
                        merge(&mut trial[m].direction, s.direction)
                    }
                })
            });
            if ok {
                accepted = Some(trial);
                break;
            }
            volumes.pop();
        }
        match accepted {
            Some(trial) => moves = trial,
            None => {
                return Err(Error::Infeasible(format!("no consistent volume at tick {t}")));
            }
        }
    }

    let threshold = params.large_move_threshold;
    let mut close = config.initial_close.max(PRICE_FLOOR);
    let mut bars = Vec::with_capacity(n);
    bars.push(bar(0, close, close, volumes[0]));
    for m in 1..n {
        let c = moves[m];
        let up = match c.direction {
            Some(Direction::Up) => true,
            Some(Direction::Down) => false,
            _ => rng.random_bool(0.5),
        };
        let magnitude = if c.large {
            threshold * rng.random_range(1.5..3.0)
        } else {
            threshold * rng.random_range(0.1..0.9)
        };
        let open = close;
        let factor = if up { 1.0 + magnitude } else { 1.0 - magnitude };
        let mut next = Money::from_f64(close.to_f64() * factor).max(PRICE_FLOOR);
        if up && next <= close {
            next = close + Money::from_micros(1);
        } else if !up && next >= close {
            // only reachable at the floor; let the move fail rather than go non-positive
            next = (close - Money::from_micros(1)).max(Money::from_micros(1));
        }
        close = next;
        bars.push(bar(m as u64, open, close, volumes[m]));
    }
    Ok(bars)
}
