//! `L^p` lengths of the scenario flows.

use braidflow::flow::LpEstimate;
use braidflow::geometry::{HamiltonianSpec, Preset};

use super::{Builder, Ctx};
use crate::report::{cell, Check, Table};

const EXPONENTS: [f64; 3] = [1.0, 2.0, 3.0];

/// Closed forms for rigid rotations by `theta`: `l_p = theta * (2 / (p + 2))^(1/p)`
/// on the unit disc, where `|X| = r`.
fn rotation_oracle(spec: &HamiltonianSpec<f64>, duration: f64, p: f64) -> Option<f64> {
    match spec {
        HamiltonianSpec::Preset(Preset::DiscRotation) => Some(duration * (2.0 / (p + 2.0)).powf(1.0 / p)),
        HamiltonianSpec::Preset(Preset::Zero) => Some(0.0),
        _ => None,
    }
}

pub(super) fn lp_length(ctx: &Ctx, b: &mut Builder) {
    b.scope("lp_length");
    let n = ctx.cfg.budgets.lp_samples;
    let mut table = Table::new(
        "lp_length",
        &[
            ("flow", "flow label"),
            ("p", "exponent"),
            ("value", "Monte Carlo estimate of l_p"),
            ("std_error", "standard error (delta method)"),
            ("samples", "area samples shared by all time nodes"),
            ("oracle", "closed form where one is known, else empty"),
        ],
    );
    let mut monotone_gap: f64 = f64::NEG_INFINITY;
    let mut oracle_z: f64 = 0.0;
    for flow in &ctx.scenario.flows {
        let iso = flow.isotopy(ctx.scenario.surface, ctx.steps());
        // a shared seed makes Jensen's inequality hold sample by sample
        let seed = ctx.stream(&format!("lp/{}", flow.label));
        let est: Vec<LpEstimate> =
            EXPONENTS.iter().map(|&p| iso.lp_length(p, n, seed).expect("exponent at least one")).collect();
        for (p, e) in EXPONENTS.iter().zip(&est) {
            let oracle = rotation_oracle(&flow.spec, flow.duration, *p);
            if let Some(o) = oracle {
                let z = if e.std_error > 0.0 {
                    (e.value - o).abs() / e.std_error
                } else if (e.value - o).abs() <= 1e-12 {
                    0.0
                } else {
                    f64::INFINITY
                };
                oracle_z = oracle_z.max(z);
            }
            table.push(vec![
                flow.label.clone(),
                cell(p),
                cell(e.value),
                cell(e.std_error),
                cell(e.n_samples),
                oracle.map(cell).unwrap_or_default(),
            ]);
        }
        for w in est.windows(2) {
            monotone_gap = monotone_gap.max((w[0].value - w[1].value) / w[1].value.abs().max(1e-300));
        }
        b.summary(&format!("{}/l1", flow.label), est[0].value);
        b.summary(&format!("{}/l1_std_error", flow.label), est[0].std_error);
    }
    b.check(Check::at_most(
        "jensen_monotonicity",
        "l_1 <= l_2 <= l_3 on the common sample set (relative excess)",
        monotone_gap.max(0.0),
        1e-12,
    ));
    let has_oracle = ctx.scenario.flows.iter().any(|f| rotation_oracle(&f.spec, f.duration, 1.0).is_some());
    if has_oracle {
        b.check(Check::at_most(
            "rotation_closed_form",
            "l_p of a rigid rotation by theta equals theta (2/(p+2))^(1/p), within three standard errors",
            oracle_z,
            3.0,
        ));
    }
    b.table(table);
}
