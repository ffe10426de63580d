//! Pointwise comparisons between the metrics on configuration space.

use braidflow::configspace::{
    dpi, ds_exp, g0_norm, g_norm, gb_norm, min_dist, min_dist_geodesic, path_length, random_configuration,
    random_tangent, two_metrics_constant, Configuration, Metric,
};
use braidflow::geometry::Surface;
use braidflow::mc::Seed;
use proptest::prelude::*;

fn surface(idx: usize) -> Surface<f64> {
    match idx {
        0 => Surface::UnitDisc,
        1 => Surface::flat_torus(1.0, 1.0),
        _ => Surface::round_sphere(0.8),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn comparison_constant_dominates(seed in any::<u64>(), s in 0usize..3, n in 2usize..=5) {
        let surface = surface(s);
        let mut rng = Seed(seed).rng();
        let x = random_configuration(&surface, n, &mut rng);
        let v = random_tangent(&surface, &x, &mut rng);
        let c = two_metrics_constant(n, surface.ambient_diameter_bound());
        let (g, g0) = (g_norm(&x, &v), g0_norm(&x, &v));
        prop_assert!(g * g < c * g0 * g0);
        // and the per-term bounds behind it
        let d = min_dist(&x);
        let nf = n as f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let p = dpi(&x, &v, i, j);
                let pn = p.iter().map(|a| a * a).sum::<f64>().sqrt();
                prop_assert!(pn <= nf.sqrt() * v.norm() / d * (1.0 + 1e-12));
                prop_assert!(pn <= 2.0 / d * v.sum_of_norms() * (1.0 + 1e-12));
                for k in (j + 1)..n {
                    let s = ds_exp(&x, &v, i, j, k).abs();
                    prop_assert!(s <= 2.0 * nf.sqrt() * v.norm() / d * (1.0 + 1e-12));
                    prop_assert!(s <= 2.0 / d * v.sum_of_norms() * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn geodesic_rescaling_is_weaker(seed in any::<u64>(), s in 0usize..3, n in 2usize..=4) {
        let surface = surface(s);
        let mut rng = Seed(seed).rng();
        let x = random_configuration(&surface, n, &mut rng);
        let v = random_tangent(&surface, &x, &mut rng);
        prop_assert!(min_dist_geodesic(&surface, &x) >= min_dist(&x) * (1.0 - 1e-12));
        prop_assert!(gb_norm(&surface, &x, &v) <= g0_norm(&x, &v) * (1.0 + 1e-12));
        if s == 0 {
            prop_assert!((gb_norm(&surface, &x, &v) - g0_norm(&x, &v)).abs() <= 1e-12 * g0_norm(&x, &v));
        }
    }

    #[test]
    fn g0_is_scale_invariant(seed in any::<u64>(), scale in 0.1f64..10.0) {
        let mut rng = Seed(seed).rng();
        let x = random_configuration(&Surface::UnitDisc, 3, &mut rng);
        let v = random_tangent(&Surface::UnitDisc, &x, &mut rng);
        let a = g0_norm(&x, &v);
        let b = g0_norm(&x.scaled(scale), &v.scaled(scale));
        prop_assert!((a - b).abs() <= 1e-12 * a);
        prop_assert!((min_dist(&x.scaled(scale)) - scale * min_dist(&x)).abs() <= 1e-12 * scale);
    }

    #[test]
    fn path_lengths_compare(seed in any::<u64>()) {
        let surface = Surface::<f64>::UnitDisc;
        let mut rng = Seed(seed).rng();
        let a = random_configuration(&surface, 3, &mut rng);
        let b = random_configuration(&surface, 3, &mut rng);
        let path = vec![a, b];
        if let (Ok(g), Ok(g0), Ok(gb)) = (
            path_length(&surface, &path, Metric::G),
            path_length(&surface, &path, Metric::G0),
            path_length(&surface, &path, Metric::Gb),
        ) {
            let c = two_metrics_constant(3, 2.0f64);
            prop_assert!(gb <= g0 * (1.0 + 1e-9));
            prop_assert!(g <= c.sqrt() * g0 * (1.0 + 1e-9));
        }
    }
}

#[test]
fn equivalence_ratio_is_bounded_on_the_torus() {
    let surface = Surface::flat_torus(1.0, 1.0);
    let mut rng = Seed(9).rng();
    let mut worst: f64 = 1.0;
    for _ in 0..20_000 {
        let x = random_configuration(&surface, 3, &mut rng);
        worst = worst.max(min_dist_geodesic(&surface, &x) / min_dist(&x));
    }
    // chord vs arc on circles of circumference 1 is at most pi / 2
    assert!(worst <= std::f64::consts::FRAC_PI_2 + 1e-9, "{worst}");
}

#[test]
fn collision_paths() {
    // two points merging along a line: g stays bounded, g0 grows like -ln(eps)
    let surface = Surface::UnitDisc;
    let mut g_lengths: Vec<f64> = Vec::new();
    let mut g0_lengths: Vec<f64> = Vec::new();
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let path = vec![
            Configuration::from_ambient(2, vec![0.0, 0.0, 0.5, 0.0]).unwrap(),
            Configuration::from_ambient(2, vec![0.0, 0.0, eps, 0.0]).unwrap(),
        ];
        g_lengths.push(path_length(&surface, &path, Metric::G).unwrap());
        g0_lengths.push(path_length(&surface, &path, Metric::G0).unwrap());
    }
    // the direction is constant, so only the positions move
    for (l, eps) in g_lengths.iter().zip([1e-1f64, 1e-2, 1e-3, 1e-4]) {
        assert!((l - (0.5 - eps)).abs() < 1e-9, "{g_lengths:?}");
    }
    for (l, eps) in g0_lengths.iter().zip([1e-1f64, 1e-2, 1e-3, 1e-4]) {
        let exact = (0.5 / eps).ln();
        assert!((l - exact).abs() < 0.005 * exact, "{l} vs {exact}");
    }
}
