use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use braidflow_harness::{exit, run, Command, Config, HarnessError};
use clap::Parser;

/// Averaged braid invariants of area-preserving surface flows.
#[derive(Debug, Parser)]
#[command(name = "braidflow", version)]
struct Cli {
    #[arg(value_enum)]
    subcommand: Command,
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `budgets.samples`.
    #[arg(long)]
    samples: Option<usize>,
    /// Also write per-sample tables.
    #[arg(long)]
    trace: bool,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match Config::load(&cli.config).and_then(|c| c.with_overrides(cli.seed, cli.samples)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("braidflow: {e}");
            return code(exit::USAGE);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 || rayon::ThreadPoolBuilder::new().num_threads(t).build_global().is_err() {
            eprintln!("braidflow: cannot start {t} worker threads");
            return code(exit::USAGE);
        }
    }
    let start = Instant::now();
    let outcome = match run(cli.subcommand, &cfg, cli.trace) {
        Ok(o) => o,
        Err(e @ HarnessError::Config(_)) => {
            eprintln!("braidflow: {e}");
            return code(exit::USAGE);
        }
        Err(e) => {
            eprintln!("braidflow: {e}");
            return code(exit::CHECK_FAILED);
        }
    };
    if let Err(e) = outcome.write(&cli.out) {
        eprintln!("braidflow: cannot write {}: {e}", cli.out.display());
        return code(exit::USAGE);
    }
    for c in &outcome.report.checks {
        eprintln!(
            "{} {} [{}]: {:e} {} {:e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.table,
            c.observed,
            c.relation,
            c.threshold
        );
    }
    for c in outcome.report.checks.iter().filter(|c| !c.passed) {
        eprintln!("braidflow: check `{}` failed, see table `{}`", c.name, c.table);
    }
    eprintln!("runtime: {:.2} s", start.elapsed().as_secs_f64());
    code(if outcome.passed() { exit::PASS } else { exit::CHECK_FAILED })
}
