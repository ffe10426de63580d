//! Pointwise checks of the embedding derivatives and the metric comparison.

use braidflow::configspace::{
    dpi, ds_exp, g0_norm, g_norm, gb_norm, min_dist, random_configuration, random_tangent, sinha_embed,
    two_metrics_constant, ConfigTangent, Configuration,
};
use braidflow::geometry::Surface;
use braidflow::mc::{self, MeanEstimate};
use braidflow::Surface64;

use super::{Builder, Ctx};
use crate::report::{cell, Check, Table};
use crate::scenario::surface_name;

const DERIVATIVE_TOLERANCE: f64 = 1e-6;

fn surfaces() -> [Surface64; 3] {
    [Surface::UnitDisc, Surface::flat_torus(1.0, 1.5), Surface::round_sphere(1.0)]
}

// fourth-order estimate of d/dt f(x + t v) at 0
fn richardson<F>(f: F, x: &Configuration<f64>, v: &ConfigTangent<f64>, h: f64) -> Vec<f64>
where
    F: Fn(&Configuration<f64>) -> Vec<f64>,
{
    let central = |h: f64| {
        let (p, m) = (f(&x.displaced(v, h)), f(&x.displaced(v, -h)));
        p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>()
    };
    let (c1, c2) = (central(h), central(h / 2.0));
    c1.iter().zip(&c2).map(|(a, b)| (4.0 * b - a) / 3.0).collect()
}

/// Worst relative error of the closed-form derivatives at one sample.
/// Errors are measured against `max(|exact|, |v| / d(x))`, the natural
/// scale of both derivatives.
fn derivative_error(x: &Configuration<f64>, v: &ConfigTangent<f64>) -> f64 {
    let n = x.n();
    let d = min_dist(x);
    let scale = v.norm() / d;
    let h = 1e-3 * d / v.norm();
    let img = |c: &Configuration<f64>| sinha_embed(c).expect("off the diagonal");
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let fd = richardson(|c| img(c).direction(i, j).to_vec(), x, v, h);
            let exact = dpi(x, v, i, j);
            let err = fd.iter().zip(&exact).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let size = exact.iter().map(|a| a * a).sum::<f64>().sqrt();
            worst = worst.max(err / size.max(scale));
            for k in (j + 1)..n {
                let fd = richardson(|c| vec![img(c).ratio(i, j, k)], x, v, h)[0];
                let exact = ds_exp(x, v, i, j, k);
                worst = worst.max((fd - exact).abs() / exact.abs().max(scale));
            }
        }
    }
    worst
}

pub(super) fn verify_derivatives(ctx: &Ctx, b: &mut Builder) {
    b.scope("derivatives");
    let samples = ctx.cfg.budgets.derivative_samples;
    let mut table = Table::new(
        "derivatives",
        &[
            ("surface", "surface the points are drawn on"),
            ("n", "number of points"),
            ("samples", "random (x, v) pairs"),
            ("max_relative_error", "worst error of the closed forms against extrapolated central differences"),
            ("mean_relative_error", "mean of the same error"),
        ],
    );
    let mut trace = Table::new(
        "derivative_samples",
        &[("surface", "surface"), ("n", "number of points"), ("index", "sample index"), ("relative_error", "worst error at this sample")],
    );
    let mut overall: f64 = 0.0;
    for s in surfaces() {
        for n in 2..=4 {
            let seed = ctx.stream(&format!("derivatives/{}/{n}", surface_name(&s)));
            let errs = mc::sample_map(seed, samples, |rng, _| {
                let x = random_configuration(&s, n, rng);
                let v = random_tangent(&s, &x, rng);
                derivative_error(&x, &v)
            });
            let worst = errs.iter().copied().fold(0.0, f64::max);
            overall = overall.max(worst);
            table.push(vec![
                surface_name(&s),
                cell(n),
                cell(samples),
                cell(worst),
                cell(MeanEstimate::from_samples(&errs).mean),
            ]);
            if ctx.trace {
                for (i, e) in errs.iter().enumerate() {
                    trace.push(vec![surface_name(&s), cell(n), cell(i), cell(*e)]);
                }
            }
        }
    }
    b.check(Check::at_most(
        "derivative_formulas",
        "closed-form derivatives of the pair directions and triple ratios agree with finite differences",
        overall,
        DERIVATIVE_TOLERANCE,
    ));

    // hand-checkable values
    let x = Configuration::from_ambient(2, vec![0.0, 0.0, 1.0, 0.0]).expect("distinct");
    let v = ConfigTangent::new(2, vec![0.0, 1.0, 0.0, 0.0]);
    let d: Vec<f64> = dpi(&x, &v, 0, 1);
    b.check(Check::at_most(
        "direction_example",
        "moving the first of (0,0),(1,0) up at unit speed turns the pair direction at rate (0,1)",
        d[0].abs().max((d[1] - 1.0).abs()),
        1e-12,
    ));
    let x = Configuration::from_ambient(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 2.0]).expect("distinct");
    let v = ConfigTangent::new(2, vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    let expected = 0.25 * (-0.5f64).exp();
    b.check(Check::at_most(
        "ratio_example",
        "at (0,0),(1,0),(0,2) with the third point moving up, d/dt exp(-|x1-x2|/|x1-x3|) = e^(-1/2)/4",
        (ds_exp(&x, &v, 0, 1, 2) - expected).abs(),
        1e-12,
    ));
    b.summary("max_relative_error", overall);
    b.table(table);
    if ctx.trace {
        b.table(trace);
    }
}

pub(super) fn verify_metric_bound(ctx: &Ctx, b: &mut Builder) {
    b.scope("metric_bound");
    let samples = ctx.cfg.budgets.metric_samples;
    let mut table = Table::new(
        "metric_bound",
        &[
            ("surface", "surface the points are drawn on"),
            ("n", "number of points"),
            ("samples", "random (x, v) pairs"),
            ("constant", "C(n, A) with A the ambient diameter bound"),
            ("max_ratio", "max of |v|_g^2 / (C |v|_g0^2); at most 1 by the comparison"),
            ("mean_ratio", "mean of the same ratio"),
            ("max_gb_over_g0", "max of |v|_gb / |v|_g0; at most 1"),
            ("max_direction_term", "max of |D pi_ij| d(x) / (sqrt(n) |v|); at most 1"),
            ("max_ratio_term", "max of |D exp(-s_ijk)| d(x) / (2 sqrt(n) |v|); at most 1"),
        ],
    );
    let mut worst_ratio: f64 = 0.0;
    let mut worst_gb: f64 = 0.0;
    let mut worst_term: f64 = 0.0;
    for s in surfaces() {
        for n in 2..=4 {
            let c = two_metrics_constant(n, s.ambient_diameter_bound());
            let seed = ctx.stream(&format!("metric/{}/{n}", surface_name(&s)));
            let rows = mc::sample_map(seed, samples, |rng, _| {
                let x = random_configuration(&s, n, rng);
                let v = random_tangent(&s, &x, rng);
                let (g, g0) = (g_norm(&x, &v), g0_norm(&x, &v));
                let d = min_dist(&x);
                let unit = (n as f64).sqrt() * v.norm() / d;
                let mut dir: f64 = 0.0;
                let mut rat: f64 = 0.0;
                for i in 0..n {
                    for j in (i + 1)..n {
                        let p = dpi(&x, &v, i, j);
                        dir = dir.max(p.iter().map(|a| a * a).sum::<f64>().sqrt() / unit);
                        for k in (j + 1)..n {
                            rat = rat.max(ds_exp(&x, &v, i, j, k).abs() / (2.0 * unit));
                        }
                    }
                }
                [g * g / (c * g0 * g0), gb_norm(&s, &x, &v) / g0, dir, rat]
            });
            let col = |k: usize| rows.iter().map(|r| r[k]).fold(0.0, f64::max);
            let ratios: Vec<f64> = rows.iter().map(|r| r[0]).collect();
            worst_ratio = worst_ratio.max(col(0));
            worst_gb = worst_gb.max(col(1));
            worst_term = worst_term.max(col(2)).max(col(3));
            table.push(vec![
                surface_name(&s),
                cell(n),
                cell(samples),
                cell(c),
                cell(col(0)),
                cell(MeanEstimate::from_samples(&ratios).mean),
                cell(col(1)),
                cell(col(2)),
                cell(col(3)),
            ]);
        }
    }
    b.check(Check::at_most(
        "metric_comparison",
        "|v|_g^2 <= C(n, A) |v|_g0^2 when pairwise distances are at most A",
        worst_ratio,
        1.0,
    ));
    b.check(Check::at_most(
        "per_term_bounds",
        "|D pi_ij| <= sqrt(n) |v| / d(x) and |D exp(-s_ijk)| <= 2 sqrt(n) |v| / d(x)",
        worst_term,
        1.0 + 1e-12,
    ));
    b.check(Check::at_most("geodesic_rescaling", "|v|_gb <= |v|_g0", worst_gb, 1.0 + 1e-12));
    b.summary("max_ratio", worst_ratio);
    b.table(table);
}
