use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use spr_experiments::{run_scenario, ExpError, Result, Scenario, ScenarioConfig};

/// Run one stability experiment and write `<out>/<scenario>.{csv,json}`.
///
/// Exit status: 0 when every verdict passes, 1 on a failed verdict or a
/// runtime error, 2 on a configuration error.
#[derive(Parser, Debug)]
#[command(name = "spr", version)]
struct Cli {
    /// One of: stability-sweep, frame-bounds, small-ball, jset-tails,
    /// net-transfer, instability-demo, pr-failure-demo, peaky-demo,
    /// lemma-suite, bounds-table.
    scenario: String,
    /// `key = value` config file; scenario defaults apply without one.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory. Falls back to `SPR_OUT_DIR`, then `out_dir` in the
    /// config, then `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads. Falls back to `threads` in the config, then all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn run(cli: Cli) -> Result<bool> {
    let scenario: Scenario = cli.scenario.parse()?;
    let (mut cfg, file_threads) = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| ExpError::Io {
                path: path.clone(),
                source,
            })?;
            (
                ScenarioConfig::parse(scenario, &text)?,
                ScenarioConfig::threads_entry(&text)?,
            )
        }
        None => (ScenarioConfig::defaults(scenario), None),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(k) = cli.threads.or(file_threads) {
        if k == 0 {
            return Err(ExpError::config(
                "threads",
                "needs at least one thread".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| ExpError::config("threads", e.to_string()))?;
    }
    let out_dir = cli
        .out
        .or_else(|| std::env::var_os("SPR_OUT_DIR").map(PathBuf::from))
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    let report = run_scenario(&cfg)?;
    let (csv, json) = report.write(&out_dir)?;
    print!("{}", report.summary());
    println!(
        "{}: {} ({:.2}s) -> {}, {}",
        report.scenario,
        if report.passed() { "PASS" } else { "FAIL" },
        report.wall_time_secs,
        csv.display(),
        json.display()
    );
    Ok(report.passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
