//! One campaign per subcommand.

use std::collections::BTreeMap;

use braidflow::mc::Seed;
use braidflow::quasimorphism::{ExponentSum, LinkingNumber, LkCombination, Quasimorphism};
use braidflow::scalar::binomial;

use crate::config::{Config, QmSpec};
use crate::fit::Fitted;
use crate::report::{Check, Outcome, Report, Table};
use crate::scenario::{self, Scenario};
use crate::HarnessError;

mod averages;
mod braids;
mod lengths;
mod metrics;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    VerifyDerivatives,
    VerifyMetricBound,
    LpLength,
    ExtractBraid,
    GgAverage,
    Theorem1Scan,
    CalabiCheck,
    ZkEmbedding,
    SchwarzMilnorFit,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::VerifyDerivatives,
        Command::VerifyMetricBound,
        Command::LpLength,
        Command::ExtractBraid,
        Command::GgAverage,
        Command::Theorem1Scan,
        Command::CalabiCheck,
        Command::ZkEmbedding,
        Command::SchwarzMilnorFit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyDerivatives => "verify-derivatives",
            Command::VerifyMetricBound => "verify-metric-bound",
            Command::LpLength => "lp-length",
            Command::ExtractBraid => "extract-braid",
            Command::GgAverage => "gg-average",
            Command::Theorem1Scan => "theorem1-scan",
            Command::CalabiCheck => "calabi-check",
            Command::ZkEmbedding => "zk-embedding",
            Command::SchwarzMilnorFit => "schwarz-milnor-fit",
        }
    }
}

/// Everything a campaign reads.
pub struct Ctx<'a> {
    pub cfg: &'a Config,
    pub scenario: Scenario,
    pub seed: Seed,
    pub trace: bool,
}

impl Ctx<'_> {
    /// Independent stream for a named sub-computation.
    pub fn stream(&self, label: &str) -> Seed {
        // FNV-1a; stable across platforms and releases
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in label.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        self.seed.derive(h)
    }

    pub fn steps(&self) -> usize {
        self.cfg.flow.steps_per_unit
    }
}

/// Collects checks and tables while a campaign runs.
#[derive(Default)]
pub(crate) struct Builder {
    checks: Vec<Check>,
    fitted: BTreeMap<String, Fitted>,
    summary: BTreeMap<String, f64>,
    notes: Vec<String>,
    tables: Vec<Table>,
    scope: String,
}

impl Builder {
    /// Table that later checks refer to.
    pub fn scope(&mut self, table: &str) {
        self.scope = table.into();
    }

    pub fn check(&mut self, mut c: Check) {
        if c.table.is_empty() {
            c.table.clone_from(&self.scope);
        }
        self.checks.push(c);
    }

    pub fn fitted(&mut self, name: &str, f: Fitted) {
        self.fitted.insert(name.into(), f);
    }

    pub fn summary(&mut self, name: &str, v: f64) {
        self.summary.insert(name.into(), v);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    fn finish(self, ctx: &Ctx, cmd: Command) -> Outcome {
        let passed = !self.checks.is_empty() && self.checks.iter().all(|c| c.passed);
        let report = Report {
            tool: "braidflow".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: cmd.name().into(),
            scenario: ctx.scenario.echo(),
            seed: ctx.cfg.run.seed,
            config: ctx.cfg.clone(),
            passed,
            checks: self.checks,
            fitted: self.fitted,
            summary: self.summary,
            notes: self.notes,
            tables: self.tables.iter().map(Table::meta).collect(),
        };
        Outcome { report, tables: self.tables }
    }
}

/// Resolves the configured quasimorphism for `n` strands.
pub fn quasimorphism_for(spec: &QmSpec, n: usize) -> Result<Box<dyn Quasimorphism>, HarnessError> {
    match spec {
        QmSpec::Named(s) => match s.as_str() {
            "lk" => Ok(Box::new(LinkingNumber { i: 0, j: 1 })),
            "total-lk" => Ok(Box::new(LkCombination::total(n))),
            "exponent-sum" => Ok(Box::new(ExponentSum)),
            other => Err(HarnessError::Config(format!(
                "unknown quasimorphism `{other}` (known: lk, total-lk, exponent-sum, or a coefficient list)"
            ))),
        },
        QmSpec::Coefficients(c) => {
            if c.len() != binomial(n, 2) {
                return Err(HarnessError::Config(format!(
                    "gg.qm needs {} coefficients for n = {n}, got {}",
                    binomial(n, 2),
                    c.len()
                )));
            }
            Ok(Box::new(LkCombination::new(n, c.clone())))
        }
    }
}

/// `sum |c_ij|` when the quasimorphism is written as `sum c_ij lk_ij`.
pub fn linking_weight(spec: &QmSpec, n: usize) -> f64 {
    let pairs = binomial(n, 2) as f64;
    match spec {
        QmSpec::Named(s) if s == "lk" => 1.0,
        QmSpec::Named(s) if s == "total-lk" => pairs,
        // twice the total linking number on pure braids
        QmSpec::Named(_) => 2.0 * pairs,
        QmSpec::Coefficients(c) => c.iter().map(|c| c.abs() as f64).sum(),
    }
}

/// Checks that the scenario suits the command, before anything runs.
pub fn validate(cmd: Command, cfg: &Config, sc: &Scenario) -> Result<(), HarnessError> {
    let need_n = |lo: usize, hi: usize| {
        if cfg.gg.n < lo || cfg.gg.n > hi {
            Err(HarnessError::Config(format!("{} needs gg.n in {lo}..={hi}, got {}", cmd.name(), cfg.gg.n)))
        } else {
            Ok(())
        }
    };
    match cmd {
        Command::VerifyDerivatives | Command::VerifyMetricBound | Command::LpLength => Ok(()),
        Command::ExtractBraid => sc.require_disc().and_then(|_| sc.single().map(|_| ())),
        Command::GgAverage => {
            sc.require_disc()?;
            sc.single()?;
            need_n(2, 8)
        }
        Command::Theorem1Scan => {
            sc.require_disc()?;
            sc.single()?;
            need_n(2, 4)
        }
        Command::CalabiCheck => {
            sc.require_disc()?;
            if sc.flows.len() < 2 || sc.flows.iter().any(|f| f.bump.is_none()) {
                return Err(HarnessError::Config(format!(
                    "calabi-check needs a family of at least two twists, `{}` is not one",
                    sc.name
                )));
            }
            for f in &sc.flows {
                let b = f.bump.expect("checked");
                if b.center[0].hypot(b.center[1]) + b.outer_radius > 1.0 {
                    return Err(HarnessError::Config(format!("twist `{}` leaves the disc", f.label)));
                }
            }
            Ok(())
        }
        Command::ZkEmbedding => {
            sc.require_disc()?;
            let bumps: Vec<_> = sc.flows.iter().filter_map(|f| f.bump).collect();
            if bumps.len() != sc.flows.len() || bumps.len() < 2 {
                return Err(HarnessError::Config(format!("zk-embedding needs a family of twists, `{}` is not one", sc.name)));
            }
            for (i, a) in bumps.iter().enumerate() {
                if a.center[0].hypot(a.center[1]) + a.outer_radius > 1.0 {
                    return Err(HarnessError::Config("a twist leaves the disc".into()));
                }
                for b in &bumps[i + 1..] {
                    let d = (a.center[0] - b.center[0]).hypot(a.center[1] - b.center[1]);
                    if d <= a.outer_radius + b.outer_radius {
                        return Err(HarnessError::Config("zk-embedding needs disjoint twist supports".into()));
                    }
                }
            }
            if 2 * bumps.len() > 8 {
                return Err(HarnessError::Config("zk-embedding supports at most four twists".into()));
            }
            Ok(())
        }
        Command::SchwarzMilnorFit => {
            sc.require_disc()?;
            need_n(3, 4)
        }
    }
}

/// Resolves the scenario, validates, and runs `cmd`. Configuration problems
/// surface before any computation.
pub fn run(cmd: Command, cfg: &Config, trace: bool) -> Result<Outcome, HarnessError> {
    let sc = scenario::lookup(&cfg.scenario.name)?;
    validate(cmd, cfg, &sc)?;
    let ctx = Ctx { cfg, scenario: sc, seed: Seed(cfg.run.seed), trace };
    let mut b = Builder::default();
    match cmd {
        Command::VerifyDerivatives => metrics::verify_derivatives(&ctx, &mut b),
        Command::VerifyMetricBound => metrics::verify_metric_bound(&ctx, &mut b),
        Command::LpLength => lengths::lp_length(&ctx, &mut b),
        Command::ExtractBraid => braids::extract_braid(&ctx, &mut b)?,
        Command::GgAverage => averages::gg_average(&ctx, &mut b)?,
        Command::Theorem1Scan => averages::theorem1_scan(&ctx, &mut b)?,
        Command::CalabiCheck => averages::calabi_check(&ctx, &mut b)?,
        Command::ZkEmbedding => averages::zk_embedding(&ctx, &mut b)?,
        Command::SchwarzMilnorFit => averages::schwarz_milnor_fit(&ctx, &mut b)?,
    }
    Ok(b.finish(&ctx, cmd))
}
