use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{run, RunResult, Scenario, SimConfig};
use crate::agents::StrategyKind;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StrategyStats {
    pub kind: StrategyKind,
    /// Terminal wealths pooled over participants and seeds.
    pub samples: usize,
    pub mean_wealth: f64,
    /// Sample standard deviation; zero for a single sample.
    pub stddev_wealth: f64,
    pub mean_relative_score: f64,
    /// Seeds on which a participant of this strategy ended richest.
    pub wins: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TournamentStats {
    pub seeds: u64,
    pub strategies: Vec<StrategyStats>,
}

impl TournamentStats {
    pub fn get(&self, kind: StrategyKind) -> Option<&StrategyStats> {
        self.strategies.iter().find(|s| s.kind == kind)
    }
}

/// Runs seeds `config.seed..config.seed + n_seeds` in order and aggregates them.
pub fn tournament(config: &SimConfig, scenario: &Scenario, n_seeds: u64) -> Result<TournamentStats> {
    let results = seeds(config, n_seeds)
        .map(|seed| run(&SimConfig { seed, ..config.clone() }, scenario))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(&results))
}

/// The seeds a tournament of `n_seeds` runs on; always at least one.
pub fn seeds(config: &SimConfig, n_seeds: u64) -> core::ops::Range<u64> {
    config.seed..config.seed + n_seeds.max(1)
}

/// Per-strategy statistics over runs given in seed order. Ties for richest
/// go to the lowest participant id.
pub fn summarize(results: &[RunResult]) -> TournamentStats {
    let mut wealths: BTreeMap<StrategyKind, Vec<f64>> = BTreeMap::new();
    let mut scores: BTreeMap<StrategyKind, f64> = BTreeMap::new();
    let mut wins: BTreeMap<StrategyKind, u64> = BTreeMap::new();
    for r in results {
        let mut best: Option<(&crate::ParticipantId, crate::Money)> = None;
        for (id, w) in &r.final_wealths {
            let Some(kind) = r.kind_of(id) else { continue };
            wealths.entry(kind).or_default().push(w.to_f64());
            *scores.entry(kind).or_default() += r.relative_scores.get(id).copied().unwrap_or(0.0);
            wins.entry(kind).or_default();
            if best.is_none_or(|(_, bw)| *w > bw) {
                best = Some((id, *w));
            }
        }
        if let Some(kind) = best.and_then(|(id, _)| r.kind_of(id)) {
            *wins.entry(kind).or_default() += 1;
        }
    }
    let strategies = wealths
        .into_iter()
        .map(|(kind, ws)| {
            let n = ws.len() as f64;
            let mean = ws.iter().sum::<f64>() / n;
            let var = if ws.len() > 1 { ws.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>() / (n - 1.0) } else { 0.0 };
            StrategyStats {
                kind,
                samples: ws.len(),
                mean_wealth: mean,
                stddev_wealth: libm::sqrt(var),
                mean_relative_score: scores[&kind] / n,
                wins: wins[&kind],
            }
        })
        .collect();
    TournamentStats { seeds: results.len() as u64, strategies }
}
