//! Run and tournament reports as CSV tables or aligned text.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use stockgame_core::agents::StrategyKind;
use stockgame_core::engine::{CriticReport, RunResult, TournamentStats};
use stockgame_core::{Money, ParticipantId};

use crate::csvio;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeaderRow {
    pub rank: usize,
    pub participant: ParticipantId,
    pub strategy: StrategyKind,
    pub wealth: Money,
    pub relative_score: f64,
}

/// Participants by descending relative score; ties by id.
pub fn leaderboard(result: &RunResult) -> Vec<LeaderRow> {
    let mut rows: Vec<LeaderRow> = result
        .participants
        .iter()
        .map(|p| LeaderRow {
            rank: 0,
            participant: p.id.clone(),
            strategy: p.kind,
            wealth: result.final_wealths.get(&p.id).copied().unwrap_or_default(),
            relative_score: result.relative_scores.get(&p.id).copied().unwrap_or(0.0),
        })
        .collect();
    rows.sort_by(|a, b| b.relative_score.total_cmp(&a.relative_score).then_with(|| a.participant.cmp(&b.participant)));
    for (i, r) in rows.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    rows
}

fn table<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Scenario(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Long format: one row per participant and tick.
pub fn wealth_csv(result: &RunResult) -> Result<String> {
    table(
        &["tick", "participant", "wealth"],
        result
            .wealth_series
            .iter()
            .flat_map(|(id, ws)| ws.iter().enumerate().map(move |(t, w)| vec![t.to_string(), id.to_string(), w.to_string()])),
    )
}

pub fn leaderboard_csv(result: &RunResult) -> Result<String> {
    table(
        &["rank", "participant", "strategy", "wealth", "relative_score"],
        leaderboard(result).into_iter().map(|r| {
            vec![
                r.rank.to_string(),
                r.participant.to_string(),
                r.strategy.to_string(),
                r.wealth.to_string(),
                format!("{:.6}", r.relative_score),
            ]
        }),
    )
}

/// Strategy summaries in ranking order.
pub fn critic_csv(report: &CriticReport) -> Result<String> {
    let rows = report.ranking.iter().filter_map(|k| report.strategies.iter().find(|s| s.kind == *k)).map(|s| {
        vec![
            s.kind.to_string(),
            s.participants.to_string(),
            s.trade_count.to_string(),
            s.verdicts.to_string(),
            format!("{:.6}", s.hit_rate),
            format!("{:.6}", s.mean_excess_return),
            format!("{:.6}", s.relative_score),
        ]
    });
    table(
        &["strategy", "participants", "trades", "verdicts", "hit_rate", "mean_excess_return", "relative_score"],
        rows,
    )
}

pub fn verdicts_csv(report: &CriticReport) -> Result<String> {
    table(
        &[
            "participant",
            "symbol",
            "qty",
            "entry_tick",
            "entry_price",
            "exit_tick",
            "exit_price",
            "open",
            "trade_return",
            "index_return",
            "excess_return",
            "verdict",
        ],
        report.verdicts.iter().map(|v| {
            vec![
                v.participant.to_string(),
                v.symbol.to_string(),
                v.quantity.to_string(),
                v.entry_tick.to_string(),
                v.entry_price.to_string(),
                v.exit_tick.to_string(),
                v.exit_price.to_string(),
                v.open.to_string(),
                format!("{:.6}", v.trade_return),
                format!("{:.6}", v.index_return),
                format!("{:.6}", v.excess_return),
                format!("{:?}", v.verdict).to_lowercase(),
            ]
        }),
    )
}

/// One row per strategy present in the tournament.
pub fn tournament_csv(stats: &TournamentStats) -> Result<String> {
    table(
        &["strategy", "samples", "mean_wealth", "stddev_wealth", "mean_relative_score", "wins"],
        stats.strategies.iter().map(|s| {
            vec![
                s.kind.to_string(),
                s.samples.to_string(),
                format!("{:.6}", s.mean_wealth),
                format!("{:.6}", s.stddev_wealth),
                format!("{:.6}", s.mean_relative_score),
                s.wins.to_string(),
            ]
        }),
    )
}

pub fn run_text(result: &RunResult) -> String {
    let mut out = String::new();
    let ticks = result.log.len();
    let _ = writeln!(out, "{ticks} ticks, {} trades, end: {:?}", result.trades.len(), result.end);
    let _ = writeln!(out, "\n{:>4}  {:<16} {:<16} {:>16} {:>14}", "rank", "participant", "strategy", "wealth", "score");
    for r in leaderboard(result) {
        let _ = writeln!(
            out,
            "{:>4}  {:<16} {:<16} {:>16} {:>14.2}",
            r.rank,
            r.participant.as_str(),
            r.strategy.name(),
            r.wealth.to_string(),
            r.relative_score
        );
    }
    let critic = result.critic();
    let _ = writeln!(out, "\n{:<16} {:>7} {:>9} {:>9} {:>12}", "strategy", "trades", "verdicts", "hit rate", "mean excess");
    for kind in &critic.ranking {
        let Some(s) = critic.strategies.iter().find(|s| s.kind == *kind) else { continue };
        let _ = writeln!(
            out,
            "{:<16} {:>7} {:>9} {:>9.3} {:>12.4}",
            s.kind.name(),
            s.trade_count,
            s.verdicts,
            s.hit_rate,
            s.mean_excess_return
        );
    }
    out
}

pub fn tournament_text(stats: &TournamentStats) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} seeds", stats.seeds);
    let _ = writeln!(out, "{:<16} {:>8} {:>14} {:>12} {:>12} {:>6}", "strategy", "samples", "mean wealth", "stddev", "mean score", "wins");
    let mut rows: Vec<_> = stats.strategies.iter().collect();
    rows.sort_by(|a, b| b.mean_wealth.total_cmp(&a.mean_wealth).then(a.kind.cmp(&b.kind)));
    for s in rows {
        let _ = writeln!(
            out,
            "{:<16} {:>8} {:>14.2} {:>12.2} {:>12.2} {:>6}",
            s.kind.name(),
            s.samples,
            s.mean_wealth,
            s.stddev_wealth,
            s.mean_relative_score,
            s.wins
        );
    }
    out
}

fn write(dir: &Path, name: &str, body: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(Error::io(&path))?;
    written.push(path);
    Ok(())
}

/// Writes the run's reports into `dir` and returns the files written.
pub fn write_run_report(result: &RunResult, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(Error::io(dir))?;
    let mut written = Vec::new();
    match format {
        Format::Text => write(dir, "report.txt", &run_text(result), &mut written)?,
        Format::Csv => {
            let critic = result.critic();
            write(dir, "wealth.csv", &wealth_csv(result)?, &mut written)?;
            write(dir, "leaderboard.csv", &leaderboard_csv(result)?, &mut written)?;
            write(dir, "critic.csv", &critic_csv(&critic)?, &mut written)?;
            write(dir, "verdicts.csv", &verdicts_csv(&critic)?, &mut written)?;
            let mut trades = Vec::new();
            csvio::write_trades(&mut trades, &result.trades)?;
            write(dir, "trades.csv", std::str::from_utf8(&trades).expect("utf-8"), &mut written)?;
        }
    }
    Ok(written)
}

pub fn write_tournament_report(stats: &TournamentStats, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(Error::io(dir))?;
    let mut written = Vec::new();
    match format {
        Format::Text => write(dir, "tournament.txt", &tournament_text(stats), &mut written)?,
        Format::Csv => write(dir, "tournament.csv", &tournament_csv(stats)?, &mut written)?,
    }
    Ok(written)
}
