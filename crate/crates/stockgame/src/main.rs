use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use stockgame::core::engine::{RunResult, Session, TournamentStats};
use stockgame::core::market::PriceBar;
use stockgame::core::signals::{evaluate_series, SeriesReport, SignalParams};
use stockgame::core::synthetic::{generate_ying_series, YingConfig};
use stockgame::report::{self, Format};
use stockgame::scenario::{self, Loaded};
use stockgame::{batch, csvio, runlog};

#[derive(Parser)]
#[command(name = "stockgame", version, about = "Rule-based multi-agent stock market game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file, bundled scenario name, or a name in $STOCKGAME_DATA_DIR.
    #[arg(long, default_value = "paper-defaults")]
    config: String,
    /// Overrides the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn load(&self) -> anyhow::Result<Loaded> {
        let mut loaded = scenario::resolve(&self.config).with_context(|| format!("loading {}", self.config))?;
        if let Some(seed) = self.seed {
            loaded.config.seed = seed;
        }
        Ok(loaded)
    }

    fn out_dir(&self) -> anyhow::Result<&Path> {
        std::fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok(&self.out)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one session and write its log and reports.
    Run {
        #[command(flatten)]
        common: Common,
        /// Overrides the run length; script entries past the end are dropped
        #[arg(long)]
        ticks: Option<u64>,
    },
    /// Run the scenario over consecutive seeds and tabulate per-strategy results.
    Tournament {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        seeds: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Re-run a session with a recorded manual order log.
    Replay {
        #[command(flatten)]
        common: Common,
        /// NDJSON file of manual orders.
        #[arg(long)]
        orders: Option<PathBuf>,
        /// Run log to compare against byte for byte.
        #[arg(long)]
        expect: Option<PathBuf>,
    },
    /// Generate a volume/price series and check it, or check a bars file.
    ValidateYing {
        #[command(flatten)]
        common: Common,
        /// Bars CSV to check instead of generating.
        #[arg(long)]
        bars: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        length: usize,
    },
    /// Serve the HTTP game API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: std::net::SocketAddr,
    },
    /// Render a saved run or tournament result.
    Report {
        #[command(flatten)]
        common: Common,
        /// `result.json` from `run` or `tournament.json` from `tournament`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Saved {
    Run(Box<RunResult>),
    Tournament(TournamentStats),
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(file, value)?;
    Ok(())
}

fn write_run(session: &Session, out: &Path) -> anyhow::Result<RunResult> {
    let result = session.result();
    std::fs::write(out.join("run.ndjson"), runlog::log_to_string(&result.log)?)?;
    std::fs::write(out.join("orders.ndjson"), runlog::to_ndjson(session.human_orders())?)?;
    write_json(&out.join("result.json"), &Saved::Run(Box::new(result.clone())))?;
    report::write_run_report(&result, out, Format::Csv)?;
    report::write_run_report(&result, out, Format::Text)?;
    Ok(result)
}

fn print_series(label: &str, report: &SeriesReport) {
    println!("{label}: {} violations", report.violations.len());
    for (i, r) in report.rules.iter().enumerate() {
        println!(
            "  rule {}: {:>4} signals, {:>4} checked, satisfaction {:.3}",
            i + 1,
            r.signals,
            r.checked(),
            r.satisfaction()
        );
    }
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run { common, ticks } => {
            let mut loaded = common.load()?;
            if let Some(t) = ticks {
                loaded = loaded.with_ticks(t);
            }
            let mut session = Session::new(loaded.config, loaded.scenario)?;
            session.run_to_end()?;
            let result = write_run(&session, common.out_dir()?)?;
            print!("{}", report::run_text(&result));
        }
        Command::Tournament { common, seeds, format } => {
            let loaded = common.load()?;
            let stats = batch::par_tournament(&loaded.config, &loaded.scenario, seeds)?;
            let out = common.out_dir()?;
            write_json(&out.join("tournament.json"), &Saved::Tournament(stats.clone()))?;
            report::write_tournament_report(&stats, out, format)?;
            print!("{}", report::tournament_text(&stats));
        }
        Command::Replay { common, orders, expect } => {
            let loaded = common.load()?;
            let orders = match orders {
                Some(path) => runlog::read_orders(BufReader::new(File::open(&path).with_context(|| path.display().to_string())?))?,
                None => Vec::new(),
            };
            let session = Session::replay(loaded.config, loaded.scenario, &orders)?;
            let result = write_run(&session, common.out_dir()?)?;
            if let Some(path) = expect {
                let expected = std::fs::read(&path).with_context(|| path.display().to_string())?;
                if expected != runlog::log_to_string(&result.log)?.into_bytes() {
                    eprintln!("replayed log differs from {}", path.display());
                    return Ok(false);
                }
                println!("replay matches {}", path.display());
            }
            print!("{}", report::run_text(&result));
        }
        Command::ValidateYing { common, bars, length } => {
            let params = SignalParams::default();
            let out = common.out_dir()?;
            let mut clean = true;
            let series: Vec<(String, Vec<PriceBar>)> = match bars {
                Some(path) => csvio::load_bars(&path)?.into_iter().map(|(s, b)| (s.to_string(), b)).collect(),
                None => {
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(common.seed.unwrap_or(0));
                    let config = YingConfig { length, ..YingConfig::default() };
                    let bars = generate_ying_series(&config, &mut rng)?;
                    let map = [("YING".into(), bars.clone())].into_iter().collect();
                    csvio::save_bars(out.join("ying_bars.csv"), &map)?;
                    vec![("YING".into(), bars)]
                }
            };
            let mut violations = Vec::new();
            for (symbol, bars) in &series {
                let report = evaluate_series(bars, &params);
                print_series(symbol, &report);
                clean &= report.violations.is_empty();
                violations.extend(report.violations);
            }
            csvio::write_violations(File::create(out.join("violations.csv"))?, &violations)?;
            return Ok(clean);
        }
        Command::Serve { addr } => {
            let rt = tokio::runtime::Runtime::new()?;
            eprintln!("listening on http://{addr}");
            rt.block_on(stockgame::service::serve(addr))?;
        }
        Command::Report { common, input, format } => {
            let text = std::fs::read_to_string(&input).with_context(|| input.display().to_string())?;
            let saved: Saved = serde_json::from_str(&text).context("neither a run result nor tournament stats")?;
            let out = common.out_dir()?;
            let written = match &saved {
                Saved::Run(r) => report::write_run_report(r, out, format)?,
                Saved::Tournament(t) => report::write_tournament_report(t, out, format)?,
            };
            if written.is_empty() {
                bail!("nothing written");
            }
            for path in written {
                println!("{}", path.display());
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
