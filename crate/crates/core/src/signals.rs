//! Volume/price regularities: detection and consequent checking.
//!
//! Six rules, numbered as follows:
//!
//! 1. small volume at `t` forecasts a lower close at `t+1`;
//! 2. heavy volume at `t` forecasts a higher close at `t+1`;
//! 3. a large increase in volume at `t` forecasts a large move at `t+1`;
//! 4. large volume on one day forecasts a rise the next day (same antecedent as 2);
//! 5. volume falling for five consecutive bars forecasts four falling closes;
//! 6. volume rising for five consecutive bars forecasts four rising closes.
//!
//! "Small", "heavy" and "large increase" are relative to a trailing window of
//! earlier bars: below the lower quantile, above the upper quantile, and a
//! volume increase above the spike quantile of absolute volume changes.

use alloc::vec::Vec;
use core::fmt;

use crate::market::PriceBar;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Direction {
    Up,
    Down,
    LargeMove,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::LargeMove => "large_move",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Signal {
    pub rule_id: u8,
    /// Tick at which the antecedent completes.
    pub tick: u64,
    pub direction: Direction,
    /// Number of following ticks the forecast covers.
    pub horizon: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SignalParams {
    /// Trailing bars used for the volume quantiles.
    pub window: usize,
    /// Earlier bars required before rules 1-4 can fire.
    pub min_history: usize,
    pub small_quantile: f64,
    pub heavy_quantile: f64,
    pub spike_quantile: f64,
    /// Consecutive monotone volumes for rules 5 and 6.
    pub run_length: usize,
    /// Horizon of rules 5 and 6.
    pub run_horizon: u32,
    /// Absolute close-to-close return that counts as a large move.
    pub large_move_threshold: f64,
}

impl Default for SignalParams {
    fn default() -> Self {
        SignalParams {
            window: 20,
            min_history: 5,
            small_quantile: 0.25,
            heavy_quantile: 0.75,
            spike_quantile: 0.90,
            run_length: 5,
            run_horizon: 4,
            large_move_threshold: 0.02,
        }
    }
}

pub const MIN_BARS: usize = 6;

/// Linear-interpolation quantile of an ascending slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = libm::floor(pos) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Antecedents that hold at one tick, computed from `volumes[..=t]` only.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VolumeFeatures {
    pub small: bool,
    pub heavy: bool,
    pub spike: bool,
    pub rising_run: bool,
    pub falling_run: bool,
}

impl VolumeFeatures {
    pub fn at(volumes: &[u64], t: usize, params: &SignalParams) -> Self {
        let mut f = VolumeFeatures::default();
        let v = volumes[t] as f64;
        if t >= params.min_history.max(2) {
            let start = t.saturating_sub(params.window.max(1));
            let levels = sorted(volumes[start..t].iter().map(|&x| x as f64).collect());
            f.small = v < quantile(&levels, params.small_quantile);
            f.heavy = v > quantile(&levels, params.heavy_quantile);
            let changes = sorted(
                (start + 1..t)
                    .map(|i| libm::fabs(volumes[i] as f64 - volumes[i - 1] as f64))
                    .collect(),
            );
            f.spike = !changes.is_empty() && v - volumes[t - 1] as f64 > quantile(&changes, params.spike_quantile);
        }
        let n = params.run_length.max(2);
        if t + 1 >= n {
            let run = &volumes[t + 1 - n..=t];
            f.rising_run = run.windows(2).all(|w| w[0] < w[1]);
            f.falling_run = run.windows(2).all(|w| w[0] > w[1]);
        }
        f
    }

    /// Signals implied by these features, in rule order.
    pub fn signals(&self, tick: u64, params: &SignalParams) -> impl Iterator<Item = Signal> {
        let one = |rule_id, direction| Signal { rule_id, tick, direction, horizon: 1 };
        let run = |rule_id, direction| Signal { rule_id, tick, direction, horizon: params.run_horizon };
        [
            self.small.then(|| one(1, Direction::Down)),
            self.heavy.then(|| one(2, Direction::Up)),
            self.spike.then(|| one(3, Direction::LargeMove)),
            self.heavy.then(|| one(4, Direction::Up)),
            self.falling_run.then(|| run(5, Direction::Down)),
            self.rising_run.then(|| run(6, Direction::Up)),
        ]
        .into_iter()
        .flatten()
    }
}

pub fn detect_signals(bars: &[PriceBar], params: &SignalParams) -> Result<Vec<Signal>> {
    if bars.len() < MIN_BARS {
        return Err(Error::WindowTooShort { need: MIN_BARS, got: bars.len() });
    }
    let volumes: Vec<u64> = bars.iter().map(|b| b.volume).collect();
    Ok((0..bars.len())
        .flat_map(|t| VolumeFeatures::at(&volumes, t, params).signals(bars[t].tick, params).collect::<Vec<_>>())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Violation {
    pub rule_id: u8,
    pub tick: u64,
    pub expected: Direction,
    /// The first close-to-close return that contradicts the forecast.
    pub observed: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RuleStats {
    pub signals: usize,
    pub satisfied: usize,
    /// Signals whose horizon runs past the end of the series.
    pub unverifiable: usize,
}

impl RuleStats {
    pub fn checked(&self) -> usize {
        self.signals - self.unverifiable
    }

    /// Satisfied fraction of checked signals; 1 when nothing was checked.
    pub fn satisfaction(&self) -> f64 {
        match self.checked() {
            0 => 1.0,
            n => self.satisfied as f64 / n as f64,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeriesReport {
    pub violations: Vec<Violation>,
    /// Indexed by `rule_id - 1`.
    pub rules: [RuleStats; 6],
}

fn close_return(bars: &[PriceBar], i: usize) -> f64 {
    bars[i].close.to_f64() / bars[i - 1].close.to_f64() - 1.0
}

/// Detects signals and checks each consequent against the closes that follow.
pub fn evaluate_series(bars: &[PriceBar], params: &SignalParams) -> SeriesReport {
    let mut report = SeriesReport::default();
    let Ok(signals) = detect_signals(bars, params) else {
        return report;
    };
    let position = |tick: u64| bars.iter().position(|b| b.tick == tick).expect("signal tick from bars");
    for signal in signals {
        let stats = &mut report.rules[usize::from(signal.rule_id - 1)];
        stats.signals += 1;
        let i = position(signal.tick);
        let horizon = signal.horizon as usize;
        if i + horizon >= bars.len() {
            stats.unverifiable += 1;
            continue;
        }
        let failed = (i + 1..=i + horizon).map(|j| close_return(bars, j)).find(|r| match signal.direction {
            Direction::Up => *r <= 0.0,
            Direction::Down => *r >= 0.0,
            Direction::LargeMove => libm::fabs(*r) <= params.large_move_threshold,
        });
        match failed {
            None => stats.satisfied += 1,
            Some(observed) => report.violations.push(Violation {
                rule_id: signal.rule_id,
                tick: signal.tick,
                expected: signal.direction,
                observed,
            }),
        }
    }
    report
}

/// Every signal whose forecast the following closes contradict.
pub fn validate_series(bars: &[PriceBar], params: &SignalParams) -> Vec<Violation> {
    evaluate_series(bars, params).violations
}
