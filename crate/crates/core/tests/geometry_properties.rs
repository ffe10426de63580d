//! Area sampling, symplectic gradients and geodesic distances.

use braidflow::geometry::{
    hamiltonian_vector_field, surface_gradient, HamiltonianSpec, Preset, RadialBump, Surface, SurfacePoint,
};
use braidflow::mc::{sample_map, MeanEstimate, Seed};
use rand::Rng;

fn surfaces() -> [Surface<f64>; 3] {
    [Surface::UnitDisc, Surface::flat_torus(1.0, 2.0), Surface::round_sphere(1.3)]
}

#[test]
fn area_sample_moments() {
    let n = 1_000_000;
    let disc: Vec<f64> = sample_map(Seed(1), n, |rng, _| {
        let p = Surface::<f64>::UnitDisc.area_sample(rng);
        p.ambient()[0].powi(2) + p.ambient()[1].powi(2)
    });
    let e = MeanEstimate::from_samples(&disc);
    assert!((e.mean - 0.5).abs() < 3.0 * e.std_error, "{e:?}");

    let torus = Surface::flat_torus(1.0, 2.0);
    for k in 0..2 {
        let xs: Vec<f64> = sample_map(Seed(2 + k as u64), n, |rng, _| torus.area_sample(rng).chart[k]);
        let e = MeanEstimate::from_samples(&xs);
        let mid = [0.5, 1.0][k];
        assert!((e.mean - mid).abs() < 3.0 * e.std_error, "{e:?}");
    }

    let sphere = Surface::round_sphere(1.0);
    let zs: Vec<f64> = sample_map(Seed(4), n, |rng, _| sphere.area_sample(rng).ambient()[2]);
    let e = MeanEstimate::from_samples(&zs);
    assert!(e.mean.abs() < 3.0 * e.std_error, "{e:?}");
}

fn random_spec<R: Rng>(surface: &Surface<f64>, rng: &mut R) -> HamiltonianSpec<f64> {
    let bump = |rng: &mut R| {
        let c = surface.area_sample(rng);
        let inner = rng.gen_range(0.0..0.4);
        let outer = inner + rng.gen_range(0.05..0.5);
        HamiltonianSpec::RadialBump(RadialBump::new(&c, inner, outer, rng.gen_range(-8.0..8.0)))
    };
    let preset = match surface {
        Surface::UnitDisc => Preset::DiscRotation,
        Surface::FlatTorus { .. } => Preset::TorusWave,
        Surface::RoundSphere { .. } => Preset::SphereRotation,
    };
    match rng.gen_range(0..3) {
        0 => bump(rng),
        1 => HamiltonianSpec::Preset(preset),
        _ => HamiltonianSpec::sum(vec![(rng.gen_range(-2.0..2.0), bump(rng)), (0.5, HamiltonianSpec::Preset(preset))]),
    }
}

#[test]
fn hamiltonian_fields_are_level_preserving() {
    for (s, surface) in surfaces().iter().enumerate() {
        let mut rng = Seed(10 + s as u64).rng();
        for _ in 0..1000 {
            let spec = random_spec(surface, &mut rng);
            let p = surface.area_sample(&mut rng);
            let t = rng.gen_range(0.0..1.0);
            let x = hamiltonian_vector_field(surface, &spec, &p, t);
            let grad = surface_gradient(surface, &spec, &p, t);
            let gn = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            assert!((x.norm() - gn).abs() <= 1e-12 * (1.0 + gn));
            // dH(X) by central differences along the field direction
            let h = 1e-5;
            let shift = |sgn: f64| {
                let a: Vec<f64> = p.ambient().iter().zip(x.ambient()).map(|(a, v)| a + sgn * h * v).collect();
                a
            };
            let value = |a: &[f64]| {
                spec.active_terms(t).iter().map(|(w, term)| w * term.value(a)).sum::<f64>()
            };
            let dh = (value(&shift(1.0)) - value(&shift(-1.0))) / (2.0 * h);
            let scale = gn * x.norm();
            // absolute floor: cancellation in H(p + hX) - H(p - hX)
            assert!(dh.abs() <= 1e-6 * scale + 1e-10, "{surface:?}: dH(X) = {dh}, scale {scale}");
        }
    }
}

#[test]
fn geodesic_distance_is_a_metric_above_chords() {
    for (s, surface) in surfaces().iter().enumerate() {
        let mut rng = Seed(20 + s as u64).rng();
        for _ in 0..200 {
            let pts: Vec<SurfacePoint<f64>> = (0..3).map(|_| surface.area_sample(&mut rng)).collect();
            let d = |a: usize, b: usize| surface.geodesic_distance(&pts[a], &pts[b]);
            assert_eq!(d(0, 1), d(1, 0));
            assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-12);
            assert!(d(0, 0) < 1e-7);
            let chord: f64 = pts[0].ambient().iter().zip(pts[1].ambient()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!(chord <= d(0, 1) + 1e-12);
            assert!(chord <= surface.ambient_diameter_bound() + 1e-12);
        }
    }
}
