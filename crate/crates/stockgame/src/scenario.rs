//! Scenario files: a TOML description of the market, the roster and the run
//! parameters. The schema is documented in `SCENARIOS.md` next to this crate.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stockgame_core::agents::{StrategyKind, StrategyParams};
use stockgame_core::engine::{MarketMode, ParticipantSpec, Scenario, Session, SimConfig};
use stockgame_core::market::{FundamentalsDynamics, FundamentalsOverride, StockFundamentals};
use stockgame_core::synthetic::PriceProcess;
use stockgame_core::Money;

use crate::csvio;
use crate::error::{Error, Result};

/// Directory searched for relative data paths and scenario names that are
/// neither files nor bundled.
pub const DATA_DIR_ENV: &str = "STOCKGAME_DATA_DIR";

pub const BUNDLED: &[(&str, &str)] = &[
    ("paper-defaults", include_str!("../scenarios/paper-defaults.toml")),
    ("mean-reverting", include_str!("../scenarios/mean-reverting.toml")),
    ("crash", include_str!("../scenarios/crash.toml")),
    ("ying", include_str!("../scenarios/ying.toml")),
];

fn default_ticks() -> u64 {
    252
}
fn default_impact() -> f64 {
    0.1
}
fn default_tpy() -> u32 {
    252
}
fn default_cash() -> Money {
    Money::from_units(100_000)
}
fn default_mode() -> MarketMode {
    MarketMode::Endogenous
}
fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StockEntry {
    pub symbol: String,
    pub price: Money,
    pub eps: Money,
    pub book: Money,
    pub debt: Money,
    pub equity: Money,
    #[serde(default, skip_serializing_if = "is_default")]
    pub dividend: Money,
    pub shares_out: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticipantEntry {
    pub id: String,
    pub strategy: String,
    /// Defaults to the scenario's `initial_cash`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cash: Option<Money>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default = "default_mode")]
    pub mode: MarketMode,
    #[serde(default = "default_ticks")]
    pub ticks: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_impact")]
    pub impact: f64,
    #[serde(default)]
    pub fee: Money,
    #[serde(default = "default_tpy")]
    pub ticks_per_year: u32,
    #[serde(default = "default_cash")]
    pub initial_cash: Money,
    /// Bars CSV for replay mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bars: Option<PathBuf>,
    /// Sparse fundamentals CSV, merged into the script.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fundamentals: Option<PathBuf>,
    #[serde(default)]
    pub strategy: StrategyParams,
    #[serde(default)]
    pub dynamics: FundamentalsDynamics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<PriceProcess>,
    #[serde(default)]
    pub stocks: Vec<StockEntry>,
    #[serde(default)]
    pub participants: Vec<ParticipantEntry>,
    #[serde(default)]
    pub script: Vec<FundamentalsOverride>,
}

/// A scenario ready to run.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub file: ScenarioFile,
    pub config: SimConfig,
    pub scenario: Scenario,
}

impl Loaded {
    /// Changes the run length, dropping script entries past the new end.
    pub fn with_ticks(mut self, ticks: u64) -> Self {
        self.config.ticks = ticks;
        self.scenario.script.retain(|o| o.tick <= ticks);
        self
    }
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    Ok(toml::from_str(text)?)
}

pub fn print_scenario(file: &ScenarioFile) -> Result<String> {
    toml::to_string(file).map_err(|e| Error::Scenario(e.to_string()))
}

fn data_dir() -> Option<PathBuf> {
    std::env::var_os(DATA_DIR_ENV).map(PathBuf::from)
}

/// Relative paths are tried against `base`, then the data directory.
fn resolve_data_path(path: &Path, base: Option<&Path>) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    base.map(|b| b.join(path))
        .into_iter()
        .chain(data_dir().map(|d| d.join(path)))
        .find(|p| p.exists())
        .unwrap_or_else(|| path.to_path_buf())
}

impl ScenarioFile {
    /// Validates the file and resolves it into engine inputs. Relative data
    /// paths are resolved against `base`.
    pub fn build(&self, base: Option<&Path>) -> Result<Loaded> {
        let bad = |msg: String| Err(Error::Scenario(msg));
        for s in &self.stocks {
            if !s.price.is_positive() {
                return bad(format!("stock {} has non-positive price {}", s.symbol, s.price));
            }
        }
        let mut participants = Vec::with_capacity(self.participants.len());
        for p in &self.participants {
            let kind: StrategyKind = p.strategy.parse().map_err(|e| Error::Scenario(format!("participant {}: {e}", p.id)))?;
            participants.push(ParticipantSpec { id: p.id.as_str().into(), kind, initial_cash: p.cash.unwrap_or(self.initial_cash) });
        }

        let bars = match &self.bars {
            Some(path) => csvio::load_bars(resolve_data_path(path, base))?,
            None => Default::default(),
        };
        let mut script = self.script.clone();
        if let Some(path) = &self.fundamentals {
            script.extend(csvio::load_fundamentals(resolve_data_path(path, base))?);
        }
        script.sort_by_key(|o| o.tick);

        let mut stocks: Vec<StockFundamentals> = self
            .stocks
            .iter()
            .map(|s| StockFundamentals {
                symbol: s.symbol.as_str().into(),
                price: s.price,
                earnings_per_share: s.eps,
                book_value_per_share: s.book,
                debt: s.debt,
                equity: s.equity,
                annual_dividend_per_share: s.dividend,
                shares_outstanding: s.shares_out,
                last_volume: 0,
            })
            .collect();
        // a replay universe may come entirely from the data files
        if stocks.is_empty() {
            for (symbol, series) in &bars {
                let mut stock = StockFundamentals {
                    symbol: symbol.clone(),
                    price: series[0].close,
                    earnings_per_share: Money::ZERO,
                    book_value_per_share: Money::ZERO,
                    debt: Money::ZERO,
                    equity: Money::ZERO,
                    annual_dividend_per_share: Money::ZERO,
                    shares_outstanding: 1_000_000,
                    last_volume: series[0].volume,
                };
                for o in script.iter().filter(|o| o.tick == 0 && &o.symbol == symbol) {
                    o.apply(&mut stock);
                }
                stocks.push(stock);
            }
        }
        let symbols: BTreeSet<_> = stocks.iter().map(|s| s.symbol.clone()).collect();
        if let Some(o) = script.iter().find(|o| !symbols.contains(&o.symbol)) {
            return bad(format!("script names unknown symbol {} at tick {}", o.symbol, o.tick));
        }

        let config = SimConfig {
            mode: self.mode,
            ticks: self.ticks,
            seed: self.seed,
            participants,
            impact: self.impact,
            fee: self.fee,
            strategy: self.strategy,
            ticks_per_year: self.ticks_per_year,
        };
        let scenario = Scenario {
            name: self.name.clone(),
            stocks,
            script,
            dynamics: self.dynamics,
            process: self.process.clone(),
            bars,
        };
        // the engine owns the remaining invariants
        Session::new(config.clone(), scenario.clone())?;
        Ok(Loaded { file: self.clone(), config, scenario })
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Loaded> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    parse_scenario(&text)?.build(path.parent())
}

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// A path to a scenario file, a bundled scenario name, or a file in the data
/// directory (with or without `.toml`).
pub fn resolve(target: &str) -> Result<Loaded> {
    let path = Path::new(target);
    if path.is_file() {
        return load_scenario(path);
    }
    if let Some(text) = bundled(target) {
        return parse_scenario(text)?.build(data_dir().as_deref());
    }
    if let Some(dir) = data_dir() {
        for candidate in [dir.join(target), dir.join(format!("{target}.toml"))] {
            if candidate.is_file() {
                return load_scenario(candidate);
            }
        }
    }
    let names: Vec<&str> = BUNDLED.iter().map(|(n, _)| *n).collect();
    Err(Error::Scenario(format!("no scenario file or bundled scenario `{target}` (bundled: {})", names.join(", "))))
}
