use rayon::prelude::*;
use stockgame_core::engine::{run, seeds, summarize, Scenario, SimConfig, TournamentStats};

use crate::error::Result;

/// Same statistics as the serial tournament, with seeds spread over the
/// rayon pool. Results are collected in seed order before aggregation.
pub fn par_tournament(config: &SimConfig, scenario: &Scenario, n_seeds: u64) -> Result<TournamentStats> {
    let results = seeds(config, n_seeds)
        .into_par_iter()
        .map(|seed| run(&SimConfig { seed, ..config.clone() }, scenario))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(summarize(&results))
}
