//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p braidflow-harness --test acceptance`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use braidflow_harness::scenario::SCENARIO_NAMES;
use braidflow_harness::{run, Command, Config, Outcome};

fn config(toml: &str) -> Config {
    Config::from_toml_str(toml).expect("acceptance config parses")
}

fn campaign(cmd: Command, toml: &str) -> Outcome {
    run(cmd, &config(toml), false).unwrap_or_else(|e| panic!("{} failed to run: {e}", cmd.name()))
}

/// Names of the given checks that are missing or failed.
fn failing(o: &Outcome, names: &[&str]) -> Vec<String> {
    names
        .iter()
        .filter(|n| !o.check(n).is_some_and(|c| c.passed))
        .map(|n| n.to_string())
        .collect()
}

fn verdict(failed: Vec<String>, detail: String) -> (bool, String) {
    if failed.is_empty() {
        (true, detail)
    } else {
        (false, format!("{detail}; failed: {}", failed.join(", ")))
    }
}

fn observed(o: &Outcome, name: &str) -> f64 {
    o.check(name).map_or(f64::NAN, |c| c.observed)
}

fn criterion_1() -> (bool, String) {
    let o = campaign(Command::VerifyDerivatives, "[scenario]\nname = \"twist\"\n[run]\nseed = 101\n");
    verdict(
        failing(&o, &["derivative_formulas", "direction_example", "ratio_example"]),
        format!("max relative error {:.2e} over 1000 samples per (surface, n)", observed(&o, "derivative_formulas")),
    )
}

fn criterion_2() -> (bool, String) {
    let o = campaign(Command::VerifyMetricBound, "[scenario]\nname = \"twist\"\n[run]\nseed = 102\n");
    verdict(
        failing(&o, &["metric_comparison", "per_term_bounds", "geodesic_rescaling"]),
        format!("max g^2 / (C g0^2) = {:.4} over 1e5 samples per (surface, n)", observed(&o, "metric_comparison")),
    )
}

fn criterion_3() -> (bool, String) {
    let mut failed = Vec::new();
    let mut z = f64::NAN;
    for name in SCENARIO_NAMES {
        let o = campaign(Command::LpLength, &format!("[scenario]\nname = \"{name}\"\n[run]\nseed = 103\n"));
        if name == "rotation" {
            z = observed(&o, "rotation_closed_form");
            failed.extend(failing(&o, &["rotation_closed_form"]).into_iter().map(|c| format!("{name}/{c}")));
        }
        failed.extend(failing(&o, &["jensen_monotonicity"]).into_iter().map(|c| format!("{name}/{c}")));
    }
    verdict(failed, format!("rotation within {z:.2} standard errors; l1 <= l2 <= l3 on {} scenarios", SCENARIO_NAMES.len()))
}

fn extract() -> Outcome {
    campaign(Command::ExtractBraid, "[scenario]\nname = \"twist\"\n[run]\nseed = 104\n[gg]\nn = 3\n")
}

fn criterion_4(o: &Outcome) -> (bool, String) {
    let rows = o.table("relative_turns").map_or(0, |t| t.rows.len());
    verdict(failing(o, &["relative_turns", "reading_invariance"]), format!("{rows} readings of k = 1..5 turns"))
}

fn calabi() -> Outcome {
    campaign(Command::CalabiCheck, "[scenario]\nname = \"calabi-trio\"\n[run]\nseed = 105\n")
}

fn criterion_5(o: &Outcome) -> (bool, String) {
    let c = &o.report.fitted["ratio_c"];
    verdict(
        failing(o, &["bad_set_rejection", "relative_std_error", "ratio_consistency", "reference_ratio"]),
        format!(
            "ratio {:.4} [{:.4}, {:.4}], spread {:.2}% across three twists",
            c.value,
            c.ci_low,
            c.ci_high,
            100.0 * observed(o, "ratio_consistency")
        ),
    )
}

fn criterion_6() -> (bool, String) {
    let o = campaign(
        Command::Theorem1Scan,
        "[scenario]\nname = \"twist\"\n[run]\nseed = 106\n[budgets]\nsamples = 4000\nk_max = 10\n",
    );
    let a = o.report.fitted.get("slope_A").map_or(f64::NAN, |f| f.value);
    verdict(
        failing(&o, &["no_superlinear_growth", "linear_growth", "slope_prediction"]),
        format!("slope {a:.4}, relative deviation from prediction {:.2}%", 100.0 * observed(&o, "slope_prediction")),
    )
}

fn criterion_7(o: &Outcome) -> (bool, String) {
    let c = o.report.fitted.get("lipschitz_C").map_or(f64::NAN, |f| f.value);
    let rows = o.table("lipschitz").map_or(0, |t| t.rows.len());
    verdict(failing(o, &["lipschitz_bound"]), format!("C_fit = {c:.4} bounds {rows} (scenario, combination) pairs"))
}

fn criterion_8() -> (bool, String) {
    let o = campaign(Command::ZkEmbedding, "[scenario]\nname = \"zk3\"\n[run]\nseed = 108\n");
    verdict(
        failing(
            &o,
            &[
                "coordinate_exactness",
                "additivity",
                "sandwich_order",
                "lower_linear_in_linf",
                "upper_linear_in_linf",
            ],
        ),
        format!("{} vectors in Z^3", o.table("zk").map_or(0, |t| t.rows.len())),
    )
}

fn criterion_9(o: &Outcome) -> (bool, String) {
    let rows = o.table("word_norms").map_or(0, |t| t.rows.len());
    verdict(failing(o, &["two_strand_norms", "norm_sandwich"]), format!("{rows} braids, 100 of them random on P_2"))
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .expect("output directory")
        .map(|e| {
            let e = e.expect("entry");
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).expect("readable"))
        })
        .collect()
}

fn criterion_10() -> (bool, String) {
    let root = tempfile::tempdir().expect("temporary directory");
    let cases = [
        (Command::GgAverage, "[scenario]\nname = \"offcenter\"\n[run]\nseed = 110\n[gg]\nn = 3\nqm = \"total-lk\"\n[budgets]\nsamples = 2000\n"),
        (Command::LpLength, "[scenario]\nname = \"blend\"\n[run]\nseed = 110\n[budgets]\nlp_samples = 5000\n"),
    ];
    let mut failed = Vec::new();
    let mut compared = 0;
    for (cmd, toml) in cases {
        let mut outputs = Vec::new();
        for (i, threads) in [1, 3, 3].into_iter().enumerate() {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("pool");
            let dir = root.path().join(format!("{}-{i}", cmd.name()));
            pool.install(|| campaign(cmd, toml)).write(&dir).expect("writable");
            outputs.push(files(&dir));
        }
        compared += outputs[0].len();
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            failed.push(cmd.name().to_string());
        }
    }
    verdict(failed, format!("{compared} files identical across repeated runs and 1 or 3 workers"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut all = true;
    let mut line = |k: usize, (ok, detail): (bool, String), t: Instant| {
        all &= ok;
        println!("criterion {k:>2}: {} ({detail}; {:.1} s)", if ok { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64());
    };
    let t = Instant::now();
    line(1, criterion_1(), t);
    let t = Instant::now();
    line(2, criterion_2(), t);
    let t = Instant::now();
    line(3, criterion_3(), t);
    let t = Instant::now();
    let ex = extract();
    line(4, criterion_4(&ex), t);
    let t = Instant::now();
    let cal = calabi();
    line(5, criterion_5(&cal), t);
    let t = Instant::now();
    line(6, criterion_6(), t);
    let t = Instant::now();
    line(7, criterion_7(&cal), t);
    let t = Instant::now();
    line(8, criterion_8(), t);
    let t = Instant::now();
    line(9, criterion_9(&ex), t);
    let t = Instant::now();
    line(10, criterion_10(), t);
    println!("acceptance: {} in {:.1} s", if all { "all criteria pass" } else { "FAILED" }, start.elapsed().as_secs_f64());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
