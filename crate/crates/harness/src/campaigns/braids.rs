//! Braid extraction and word-norm consistency.

use std::f64::consts::TAU;

use braidflow::braid::{
    band_expression, extract_braid as read_braid, extract_loop_braid, planar_strands, word_norm, word_norm_bounds, BraidError,
    PureBraid,
};
use braidflow::configspace::Configuration;
use braidflow::geometry::{HamiltonianSpec, RadialBump, Surface};
use braidflow::gg::ShortPathSystem;
use braidflow::mc::{self, Seed};
use braidflow::quasimorphism::{qm_lower_bound_word_norm, random_pure_braid, LinkingNumber, LkCombination, Quasimorphism};
use braidflow::{Isotopy64, ShortPathSystem64};
use rand::Rng;

use super::{Builder, Ctx};
use crate::report::{cell, Check, Table};
use crate::HarnessError;

const READ_ANGLES: [f64; 2] = [0.3, 1.1];
const TURNS: usize = 5;

fn runtime(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Runtime(e.to_string())
}

/// Two points inside the rigid core of a twist making `k` full turns.
fn turn_table(ctx: &Ctx, b: &mut Builder) -> Result<(), HarnessError> {
    b.scope("relative_turns");
    let disc = Surface::UnitDisc;
    let starts = [disc.point_from_chart([0.2, 0.1]), disc.point_from_chart([-0.3, -0.05])];
    let mut table = Table::new(
        "relative_turns",
        &[
            ("turns", "full turns k of the two points about each other"),
            ("steps", "integration steps"),
            ("angle", "projection angle"),
            ("word", "extracted word in the Artin generators"),
            ("expected", "sigma_1^(2k)"),
            ("matches", "1 when the reduced word is exactly the expected one"),
        ],
    );
    let mut mismatches = 0usize;
    for k in 1..=TURNS {
        let bump = RadialBump::new(&disc.point_from_chart([0.0, 0.0]), 0.5, 0.7, TAU * k as f64);
        for refine in [1, 2] {
            let steps = ctx.steps() * k * refine;
            let iso = Isotopy64::new(disc, HamiltonianSpec::RadialBump(bump), 0.0, 1.0, steps).map_err(runtime)?;
            let strands = planar_strands(&disc, &iso.advect_many(&starts));
            for angle in READ_ANGLES {
                let e = read_braid(&strands, angle).map_err(runtime)?;
                let expected = vec![1; 2 * k];
                let ok = e.word.free_reduce().letters() == expected.as_slice();
                mismatches += usize::from(!ok);
                table.push(vec![cell(k), cell(steps), cell(angle), e.word.to_string(), format!("{:?}", expected), cell(u8::from(ok))]);
            }
        }
    }
    b.check(Check::equals(
        "relative_turns",
        "k relative counterclockwise turns of two points read as sigma_1^(2k), at every angle and resolution",
        mismatches as f64,
        0.0,
    ));
    b.table(table);
    Ok(())
}

fn refined(path: &[Configuration<f64>]) -> Vec<Configuration<f64>> {
    let mut out = Vec::with_capacity(2 * path.len());
    for w in path.windows(2) {
        out.push(w[0].clone());
        let mid = w[0].coords().iter().zip(w[1].coords()).map(|(a, b)| 0.5 * (a + b)).collect();
        if let Ok(c) = Configuration::from_ambient(2, mid) {
            out.push(c);
        }
    }
    out.extend(path.last().cloned());
    out
}

fn strands_of(path: &[Configuration<f64>]) -> Vec<Vec<[f64; 2]>> {
    let n = path.first().map_or(0, Configuration::n);
    (0..n).map(|i| path.iter().map(|c| [c.point(i)[0], c.point(i)[1]]).collect()).collect()
}

struct LoopReading {
    consistent: bool,
    degenerate: bool,
    word: String,
}

fn read_loop(path: &[Configuration<f64>]) -> LoopReading {
    let strands = strands_of(path);
    let fine = strands_of(&refined(path));
    let mut words = Vec::new();
    let mut degenerate = false;
    for s in [&strands, &fine] {
        for angle in [0.0, 0.7] {
            match extract_loop_braid(s, angle) {
                Ok(e) => words.push(e.word),
                Err(BraidError::DegenerateProjection { .. }) => degenerate = true,
                Err(_) => return LoopReading { consistent: false, degenerate: false, word: String::new() },
            }
        }
    }
    let consistent = words.windows(2).all(|w| w[0].group_eq(&w[1]));
    let word = words.first().map(|w| w.free_reduce().to_string()).unwrap_or_default();
    LoopReading { consistent, degenerate, word }
}

/// Loops of the scenario flow read at several angles and resolutions.
fn loop_table(ctx: &Ctx, b: &mut Builder, system: &ShortPathSystem64, iso: &Isotopy64) {
    b.scope("loop_readings");
    let m = ctx.cfg.budgets.samples.min(64);
    let seed = ctx.stream("extract/loops");
    let surface = ctx.scenario.surface;
    let n = system.n();
    let readings = mc::sample_map(seed, m, |rng, _| {
        let pts: Vec<_> = (0..n).map(|_| surface.area_sample(rng)).collect();
        let x = Configuration::from_points(&pts).ok()?;
        let path = system.loop_path(iso, &x).ok()?;
        Some(read_loop(&path))
    });
    let mut table = Table::new(
        "loop_readings",
        &[
            ("index", "sample index"),
            ("status", "read, rejected (bad set) or degenerate (a reading hit a tie)"),
            ("consistent", "1 when all readings agree in the braid group"),
            ("word", "reduced word at angle 0"),
        ],
    );
    let mut inconsistent = 0usize;
    for (i, r) in readings.iter().enumerate() {
        match r {
            None => table.push(vec![cell(i), "rejected".into(), String::new(), String::new()]),
            Some(r) => {
                inconsistent += usize::from(!r.consistent);
                let status = if r.degenerate { "degenerate" } else { "read" };
                table.push(vec![cell(i), status.into(), cell(u8::from(r.consistent)), r.word.clone()]);
            }
        }
    }
    b.check(Check::equals(
        "reading_invariance",
        "the class of a loop does not depend on the projection angle or on refining the time grid",
        inconsistent as f64,
        0.0,
    ));
    b.table(table);
}

struct NormRow {
    source: &'static str,
    lk_bound: u64,
    exact: Option<u64>,
    lower: u64,
    upper: u64,
    reference: Option<u64>,
}

fn qm_bound(bp: &PureBraid) -> u64 {
    let n = bp.n_strands();
    let mut best = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let q = LinkingNumber { i, j };
            best = best.max(qm_lower_bound_word_norm(&q, bp, q.generator_max(n)).unwrap_or(0));
        }
    }
    let total = LkCombination::total(n);
    best.max(qm_lower_bound_word_norm(&total, bp, total.generator_max(n)).unwrap_or(0))
}

fn norm_row(source: &'static str, bp: &PureBraid, depth: usize, reference: Option<u64>) -> Result<NormRow, HarnessError> {
    let est = word_norm_bounds(bp, depth).map_err(runtime)?;
    let upper = est.upper.min(band_expression(bp).map_err(runtime)?.len() as u64);
    Ok(NormRow { source, lk_bound: qm_bound(bp), exact: est.exact, lower: est.lower, upper, reference })
}

/// Exact norms against linking numbers, quasimorphism bounds and rewrites.
fn norm_table(ctx: &Ctx, b: &mut Builder, iso: &Isotopy64) -> Result<(), HarnessError> {
    b.scope("word_norms");
    let seed = ctx.stream("extract/norms");
    let mut rng = seed.rng();
    let mut rows = Vec::new();
    for _ in 0..100 {
        let len = rng.gen_range(1..=20);
        let bp = random_pure_braid(2, len, &mut rng);
        let lk = bp.lk(0, 1).unsigned_abs();
        let est = word_norm(&bp, 0).map_err(runtime)?;
        rows.push(NormRow { source: "random-p2", lk_bound: lk, exact: est.exact, lower: est.lower, upper: est.upper, reference: Some(lk) });
    }
    for _ in 0..100 {
        let len = rng.gen_range(1..=5);
        let bp = random_pure_braid(3, len, &mut rng);
        // the generating word has `len` letters
        rows.push(norm_row("random-p3", &bp, 10, None)?);
        let r = rows.last_mut().expect("just pushed");
        r.upper = r.upper.min(len as u64);
    }
    let system = ShortPathSystem::on_circle([0.0, 0.0], ctx.cfg.gg.base_radius, 3, ctx.cfg.gg.path_steps).map_err(runtime)?;
    let loops = system.sample_loops(iso, ctx.cfg.budgets.samples.min(100), Seed(seed.0 ^ 1));
    for s in loops.accepted() {
        rows.push(norm_row("loop-p3", &s.braid, 10, None)?);
    }
    let mut table = Table::new(
        "word_norms",
        &[
            ("source", "random-p2, random-p3 (random band words) or loop-p3 (flow loops)"),
            ("qm_lower_bound", "lower bound from linking numbers through their defect and generator values"),
            ("exact", "exact norm from the search, empty when the budget ran out"),
            ("lower", "certified lower bound"),
            ("upper", "length of an explicit band word (rewrite or generating word)"),
            ("reference", "|lk_12| for two strands"),
        ],
    );
    let mut p2_mismatch = 0usize;
    let mut violations = 0usize;
    for r in &rows {
        if r.source == "random-p2" {
            p2_mismatch += usize::from(r.exact != r.reference);
        }
        let lo = r.exact.unwrap_or(r.lower);
        let hi = r.exact.unwrap_or(r.upper);
        violations += usize::from(r.lk_bound > lo || lo > hi || r.lower > r.upper || hi > r.upper);
        table.push(vec![
            r.source.into(),
            cell(r.lk_bound),
            r.exact.map(cell).unwrap_or_default(),
            cell(r.lower),
            cell(r.upper),
            r.reference.map(cell).unwrap_or_default(),
        ]);
    }
    b.check(Check::equals(
        "two_strand_norms",
        "on P_2 the exact norm equals |lk_12|",
        p2_mismatch as f64,
        0.0,
    ));
    b.check(Check::equals(
        "norm_sandwich",
        "quasimorphism lower bound <= exact norm <= length of any explicit band word",
        violations as f64,
        0.0,
    ));
    b.summary("norm_rows", rows.len() as f64);
    b.summary("exact_fraction", rows.iter().filter(|r| r.exact.is_some()).count() as f64 / rows.len() as f64);
    b.table(table);
    Ok(())
}

pub(super) fn extract_braid(ctx: &Ctx, b: &mut Builder) -> Result<(), HarnessError> {
    turn_table(ctx, b)?;
    let flow = ctx.scenario.single()?;
    let iso = flow.isotopy(ctx.scenario.surface, ctx.steps());
    let system = ShortPathSystem::on_circle([0.0, 0.0], ctx.cfg.gg.base_radius, ctx.cfg.gg.n, ctx.cfg.gg.path_steps)
        .map_err(runtime)?;
    loop_table(ctx, b, &system, &iso);
    norm_table(ctx, b, &iso)
}
