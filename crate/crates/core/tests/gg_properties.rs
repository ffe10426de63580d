//! Loop classes and averages over configurations.

use braidflow::configspace::Configuration;
use braidflow::flow::Isotopy;
use braidflow::geometry::{HamiltonianSpec, RadialBump, Surface};
use braidflow::gg::{gg_average, gg_homogenized, ShortPathSystem};
use braidflow::mc::Seed;
use braidflow::quasimorphism::{LinkingNumber, LkCombination};
use std::f64::consts::TAU;

fn bump(center: [f64; 2], inner: f64, outer: f64, amp: f64) -> HamiltonianSpec<f64> {
    HamiltonianSpec::RadialBump(RadialBump::new(&Surface::UnitDisc.point_from_chart(center), inner, outer, amp))
}

fn iso(spec: HamiltonianSpec<f64>, t: f64, steps: usize) -> Isotopy<f64> {
    Isotopy::new(Surface::UnitDisc, spec, 0.0, t, steps).unwrap()
}

#[test]
fn reparametrized_isotopies_give_the_same_classes() {
    let sys = ShortPathSystem::on_circle([0.0, 0.0], 0.35, 3, 4).unwrap();
    let spec = bump([0.1, 0.0], 0.2, 0.8, 5.0);
    let slow = iso(spec.clone(), 1.0, 200);
    let fast = iso(spec.scaled(2.0), 0.5, 100);
    let a = sys.sample_loops(&slow, 300, Seed(5));
    let b = sys.sample_loops(&fast, 300, Seed(5));
    let mut compared = 0;
    for (x, y) in a.samples.iter().zip(&b.samples) {
        if let (Ok(x), Ok(y)) = (x, y) {
            assert!(x.braid.word().group_eq(y.braid.word()));
            compared += 1;
        }
    }
    assert!(compared > 290);
}

#[test]
fn bad_set_is_rarely_hit() {
    let sys = ShortPathSystem::on_circle([0.0, 0.0], 0.35, 3, 4).unwrap();
    let r = sys.sample_loops(&iso(bump([0.0, 0.0], 0.5, 0.7, TAU), 1.0, 100), 4000, Seed(6));
    assert!((r.n_rejected() as f64) < 0.01 * r.samples.len() as f64);
}

#[test]
fn disjoint_supports_add_linking_numbers() {
    let sys = ShortPathSystem::on_circle([0.0, 0.0], 0.1, 2, 4).unwrap();
    // both points in the left disc, which the second flow does not touch
    let x = Configuration::from_ambient(2, vec![-0.55, 0.05, -0.45, -0.1]).unwrap();
    let left = iso(bump([-0.5, 0.0], 0.2, 0.3, 2.0 * TAU), 1.0, 200);
    let right = iso(bump([0.5, 0.0], 0.2, 0.3, 3.0 * TAU), 1.0, 200);
    let a = sys.loop_class(&left, &x).unwrap().lk(0, 1);
    let b = sys.loop_class(&right, &x).unwrap().lk(0, 1);
    let ab = sys.loop_class(&left.then(&right).unwrap(), &x).unwrap().lk(0, 1);
    assert_eq!((a, b, ab), (2, 0, 2));
}

#[test]
fn there_and_back_averages_to_zero() {
    let sys = ShortPathSystem::on_circle([0.0, 0.0], 0.35, 2, 4).unwrap();
    let phi = iso(bump([0.1, -0.1], 0.3, 0.6, 9.0), 1.0, 150);
    let r = gg_average(&sys, &phi.then(&phi.reversed()).unwrap(), &LinkingNumber { i: 0, j: 1 }, 1000, Seed(7));
    assert_eq!(r.estimate, 0.0);
}

#[test]
fn homogenization_matches_one_period_for_homomorphisms() {
    let sys = ShortPathSystem::on_circle([0.0, 0.0], 0.35, 3, 4).unwrap();
    let phi = iso(bump([0.0, 0.0], 0.3, 0.7, TAU), 1.0, 100);
    let qm = LkCombination::total(3);
    let one = gg_average(&sys, &phi, &qm, 3000, Seed(8));
    let hom = gg_homogenized(&sys, &phi, &qm, 3, 3000, Seed(9));
    let se = one.std_error.hypot(hom.std_error);
    assert!((one.estimate - hom.estimate).abs() < 4.0 * se, "{one:?} vs {hom:?}");
}
