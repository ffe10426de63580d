//! Derivative formulas against Richardson-extrapolated central differences
//! of the embedding along the straight curve `x + t v`.

use braidflow::configspace::{
    dpi, ds_exp, min_dist, random_configuration, random_tangent, sinha_embed, ConfigTangent, Configuration,
};
use braidflow::geometry::Surface;
use braidflow::mc::Seed;

fn surfaces() -> Vec<Surface<f64>> {
    vec![Surface::UnitDisc, Surface::flat_torus(1.0, 1.5), Surface::round_sphere(1.0)]
}

// fourth-order estimate of d/dt f(x + t v) at 0
fn richardson<F: Fn(&Configuration<f64>) -> Vec<f64>>(f: F, x: &Configuration<f64>, v: &ConfigTangent<f64>, h: f64) -> Vec<f64> {
    let central = |h: f64| {
        let (p, m) = (f(&x.displaced(v, h)), f(&x.displaced(v, -h)));
        p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>()
    };
    let (c1, c2) = (central(h), central(h / 2.0));
    c1.iter().zip(&c2).map(|(a, b)| (4.0 * b - a) / 3.0).collect()
}

fn max_relative_error(surface: &Surface<f64>, n: usize, samples: usize, seed: Seed) -> f64 {
    let mut rng = seed.rng();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = random_configuration(surface, n, &mut rng);
        let v = random_tangent(surface, &x, &mut rng);
        let d = min_dist(&x);
        let scale = v.norm() / d;
        let h = 1e-3 * d / v.norm();
        let img = |c: &Configuration<f64>| sinha_embed(c).unwrap();
        for i in 0..n {
            for j in (i + 1)..n {
                let fd = richardson(|c| img(c).direction(i, j).to_vec(), &x, &v, h);
                let exact = dpi(&x, &v, i, j);
                let err = fd.iter().zip(&exact).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                let size = exact.iter().map(|a| a * a).sum::<f64>().sqrt();
                worst = worst.max(err / size.max(scale));
                for k in (j + 1)..n {
                    let fd = richardson(|c| vec![img(c).ratio(i, j, k)], &x, &v, h)[0];
                    let exact = ds_exp(&x, &v, i, j, k);
                    worst = worst.max((fd - exact).abs() / exact.abs().max(scale));
                }
            }
        }
    }
    worst
}

#[test]
fn formulas_match_finite_differences() {
    for (s_idx, surface) in surfaces().iter().enumerate() {
        for n in 2..=4 {
            let e = max_relative_error(surface, n, 1000, Seed(100 + 10 * s_idx as u64 + n as u64));
            eprintln!("{surface:?} n={n}: {e:e}");
            assert!(e < 1e-6, "{surface:?} n={n}: relative error {e}");
        }
    }
}

#[test]
fn hand_evaluations() {
    let x = Configuration::from_ambient(2, vec![0.0, 0.0, 1.0, 0.0]).unwrap();
    let v = ConfigTangent::new(2, vec![0.0, 1.0, 0.0, 0.0]);
    let fd = richardson(|c| sinha_embed(c).unwrap().direction(0, 1).to_vec(), &x, &v, 1e-3);
    assert!((fd[0] - 0.0).abs() < 1e-10 && (fd[1] - 1.0).abs() < 1e-10);

    let x = Configuration::from_ambient(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 2.0]).unwrap();
    let v = ConfigTangent::new(2, vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    let fd = richardson(|c| vec![sinha_embed(c).unwrap().ratio(0, 1, 2)], &x, &v, 1e-3)[0];
    assert!((fd - 0.25 * (-0.5f64).exp()).abs() < 1e-10);
    assert!((ds_exp(&x, &v, 0, 1, 2) - 0.151_632_664_928_158_4).abs() < 1e-12);
}
