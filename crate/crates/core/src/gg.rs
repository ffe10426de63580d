//! Averaging braids traced out by an isotopy.
//!
//! A configuration `x` is joined to a base configuration `q` by straight
//! coordinate-wise segments; following the isotopy from `x` and returning
//! from `phi_1(x)` to `q` closes a loop in the configuration space whose
//! pure braid is then measured, by its word norm or by a quasimorphism, and
//! averaged over `x` distributed by the normalized area measure.

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::braid::{extract_loop_braid, word_norm_bounds, BraidError, PureBraid, WordNormEstimate};
use crate::configspace::{segment_min_dist, ConfigError, Configuration};
use crate::flow::Isotopy;
use crate::geometry::Surface;
use crate::mc::{self, MeanEstimate, Seed};
use crate::quasimorphism::Quasimorphism;
use crate::scalar::{binomial, Real};

/// Pairwise distance along the short path below which `x` counts as a
/// member of the bad set.
pub const BAD_SET_THRESHOLD: f64 = 1e-6;

/// Projection angles tried in turn when a reading is degenerate.
pub const RETRY_ANGLES: [f64; 5] = [0.0, 0.613, 1.377, 2.231, 0.291];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GgError {
    #[error("configuration lies in the bad set (paths from the base collide)")]
    InBadSet,
    #[error("short-path systems are implemented on the unit disc only")]
    UnsupportedSurface,
    #[error("base configuration has coincident projections")]
    DegenerateBase,
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Straight-segment paths from a base configuration `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortPathSystem<T> {
    surface: Surface<T>,
    base: Configuration<T>,
    path_steps: usize,
}

impl<T: Real> ShortPathSystem<T> {
    /// The base points are relabelled in increasing first coordinate, so that
    /// strand `i` of every extracted braid is the one starting at `q_i`.
    pub fn new(surface: Surface<T>, base: Configuration<T>, path_steps: usize) -> Result<Self, GgError> {
        if surface != Surface::UnitDisc {
            return Err(GgError::UnsupportedSurface);
        }
        let n = base.n();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| base.point(a)[0].partial_cmp(&base.point(b)[0]).expect("finite base"));
        let sorted: Vec<T> = idx.iter().flat_map(|&i| base.point(i).iter().copied()).collect();
        let base = Configuration::from_ambient(2, sorted)?;
        let tol = T::lit(crate::braid::PROJECTION_TOLERANCE);
        if (1..n).any(|i| base.point(i)[0] - base.point(i - 1)[0] < tol) {
            return Err(GgError::DegenerateBase);
        }
        Ok(ShortPathSystem { surface, base, path_steps: path_steps.max(1) })
    }

    /// `n` points evenly spaced on the circle of the given radius about
    /// `center`, starting at angle 0.1.
    pub fn on_circle(center: [T; 2], radius: T, n: usize, path_steps: usize) -> Result<Self, GgError> {
        let coords = (0..n)
            .flat_map(|k| {
                let a = T::lit(0.1 + std::f64::consts::TAU * k as f64 / n as f64);
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            })
            .collect();
        Self::new(Surface::UnitDisc, Configuration::from_ambient(2, coords)?, path_steps)
    }

    pub fn base(&self) -> &Configuration<T> {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn surface(&self) -> &Surface<T> {
        &self.surface
    }

    /// `D` with `l_g(gamma(x)) <= D` for every `x` off the bad set.
    ///
    /// Positions move at most `sqrt(n) A`; each direction `pi_ij` turns
    /// monotonically through at most `pi` along linear motion; each ratio
    /// `exp(-s_ijk)` is a ratio of quadratics with at most three monotone
    /// pieces, so varies by at most 3.
    pub fn length_bound(&self) -> T {
        let n = self.n();
        T::lit(n as f64).sqrt() * self.surface.ambient_diameter_bound()
            + T::PI() * T::lit(binomial(n, 2) as f64)
            + T::lit(3.0 * binomial(n, 3) as f64)
    }

    pub fn in_bad_set(&self, x: &Configuration<T>) -> bool {
        x.n() != self.n() || segment_min_dist(&self.base, x) < T::lit(BAD_SET_THRESHOLD)
    }

    /// `gamma(x)`: the sampled straight path from `q` to `x`.
    pub fn short_path(&self, x: &Configuration<T>) -> Result<Vec<Configuration<T>>, GgError> {
        if self.in_bad_set(x) {
            return Err(GgError::InBadSet);
        }
        let m = self.path_steps;
        Ok((0..=m)
            .map(|k| {
                let s = T::lit(k as f64 / m as f64);
                let coords = self.base.coords().iter().zip(x.coords()).map(|(a, b)| *a + s * (*b - *a)).collect();
                Configuration::from_ambient(2, coords).expect("off the bad set")
            })
            .collect())
    }

    /// `gamma(path[0]) # path # gamma(path[last])^-1`.
    pub fn close_loop(&self, path: &[Configuration<T>]) -> Result<Vec<Configuration<T>>, GgError> {
        let (first, last) = match (path.first(), path.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(GgError::Braid(BraidError::InvalidStrands)),
        };
        let mut out = self.short_path(first)?;
        out.extend(path.iter().skip(1).cloned());
        let mut back = self.short_path(last)?;
        back.reverse();
        out.extend(back.into_iter().skip(1));
        Ok(out)
    }

    /// `lambda(x, phi)`: the loop through the trajectory of `x`.
    pub fn loop_path(&self, isotopy: &Isotopy<T>, x: &Configuration<T>) -> Result<Vec<Configuration<T>>, GgError> {
        if self.in_bad_set(x) {
            return Err(GgError::InBadSet);
        }
        let starts = x.surface_points(&self.surface);
        let trajectories = isotopy.advect_many(&starts);
        let strands: Vec<Vec<_>> = trajectories.into_iter().map(|t| t.points).collect();
        let path = crate::configspace::configuration_path(&strands);
        self.close_loop(&path)
    }

    /// The pure braid of a closed loop based at `q`, retrying projection
    /// angles on degenerate readings.
    pub fn loop_braid(&self, loop_path: &[Configuration<T>]) -> Result<PureBraid, GgError> {
        let n = self.n();
        let strands: Vec<Vec<[T; 2]>> =
            (0..n).map(|i| loop_path.iter().map(|c| [c.point(i)[0], c.point(i)[1]]).collect()).collect();
        let mut last = BraidError::InvalidStrands;
        for angle in RETRY_ANGLES {
            match extract_loop_braid(&strands, T::lit(angle)) {
                Ok(e) => {
                    debug_assert!(e.order.iter().enumerate().all(|(p, &s)| p == s));
                    return Ok(e.pure()?);
                }
                Err(err @ BraidError::DegenerateProjection { .. }) => last = err,
                Err(err) => return Err(err.into()),
            }
        }
        Err(last.into())
    }

    /// `[lambda(x, phi)]` in the pure braid group.
    pub fn loop_class(&self, isotopy: &Isotopy<T>, x: &Configuration<T>) -> Result<PureBraid, GgError> {
        self.loop_braid(&self.loop_path(isotopy, x)?)
    }

    /// `n_samples` independent configurations drawn by `sampler`, each with
    /// its loop class or the reason it was rejected.
    pub fn sample_loops_with<S>(&self, isotopy: &Isotopy<T>, n_samples: usize, seed: Seed, sampler: S) -> LoopSamples<T>
    where
        S: Fn(&mut ChaCha8Rng) -> Result<Configuration<T>, ConfigError> + Sync,
    {
        let samples = mc::sample_map(seed, n_samples, |rng, _| {
            let x = sampler(rng)?;
            let braid = self.loop_class(isotopy, &x);
            Ok(LoopSample { x, braid: braid? })
        });
        LoopSamples { samples }
    }

    /// As [`Self::sample_loops_with`], with `x` distributed by the product
    /// of normalized area measures.
    pub fn sample_loops(&self, isotopy: &Isotopy<T>, n_samples: usize, seed: Seed) -> LoopSamples<T> {
        let n = self.n();
        let surface = self.surface;
        self.sample_loops_with(isotopy, n_samples, seed, move |rng| {
            let pts: Vec<_> = (0..n).map(|_| surface.area_sample(rng)).collect();
            Configuration::from_points(&pts)
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopSample<T> {
    pub x: Configuration<T>,
    pub braid: PureBraid,
}

#[derive(Clone, Debug)]
pub struct LoopSamples<T> {
    pub samples: Vec<Result<LoopSample<T>, GgError>>,
}

/// Monte Carlo estimate over accepted samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GgResult {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub n_rejected: usize,
}

impl GgResult {
    pub fn scaled(self, s: f64) -> Self {
        GgResult { estimate: self.estimate * s, std_error: self.std_error * s.abs(), ..self }
    }

    pub fn rejection_rate(&self) -> f64 {
        if self.n_samples == 0 {
            0.0
        } else {
            self.n_rejected as f64 / self.n_samples as f64
        }
    }
}

impl<T: Real> LoopSamples<T> {
    pub fn accepted(&self) -> impl Iterator<Item = &LoopSample<T>> {
        self.samples.iter().filter_map(|s| s.as_ref().ok())
    }

    pub fn n_rejected(&self) -> usize {
        self.samples.iter().filter(|s| s.is_err()).count()
    }

    fn summarize(&self, values: &[f64]) -> GgResult {
        let e = MeanEstimate::from_samples(values);
        GgResult { estimate: e.mean, std_error: e.std_error, n_samples: self.samples.len(), n_rejected: self.n_rejected() }
    }

    /// Word-norm bounds per accepted sample, in sample order.
    pub fn word_norms(&self, max_bfs_depth: usize) -> Result<Vec<WordNormEstimate>, BraidError> {
        let accepted: Vec<&LoopSample<T>> = self.accepted().collect();
        let out: Vec<Result<WordNormEstimate, BraidError>> =
            mc::ordered_map(&accepted, |s| word_norm_bounds(&s.braid, max_bfs_depth));
        out.into_iter().collect()
    }

    /// Mean word norm. Samples known only up to an interval contribute its
    /// midpoint, and the mean half-width is added to the error in quadrature.
    pub fn average_word_norm(&self, max_bfs_depth: usize) -> Result<GgResult, BraidError> {
        let norms = self.word_norms(max_bfs_depth)?;
        let mids: Vec<f64> = norms.iter().map(WordNormEstimate::midpoint).collect();
        let mut r = self.summarize(&mids);
        if !norms.is_empty() {
            let hw = norms.iter().map(WordNormEstimate::half_width).sum::<f64>() / norms.len() as f64;
            r.std_error = r.std_error.hypot(hw);
        }
        Ok(r)
    }

    pub fn average_qm<Q: Quasimorphism + ?Sized>(&self, qm: &Q) -> GgResult {
        let values: Vec<f64> = self.accepted().map(|s| qm.evaluate(&s.braid)).collect();
        self.summarize(&values)
    }
}

/// `W(phi) = int |[lambda(x, phi)]| dmu^n`.
pub fn average_word_norm<T: Real>(
    system: &ShortPathSystem<T>,
    isotopy: &Isotopy<T>,
    n_samples: usize,
    max_bfs_depth: usize,
    seed: Seed,
) -> Result<GgResult, BraidError> {
    system.sample_loops(isotopy, n_samples, seed).average_word_norm(max_bfs_depth)
}

/// `Phi(phi) = int r([lambda(x, phi)]) dmu^n`.
pub fn gg_average<T: Real, Q: Quasimorphism + ?Sized>(
    system: &ShortPathSystem<T>,
    isotopy: &Isotopy<T>,
    qm: &Q,
    n_samples: usize,
    seed: Seed,
) -> GgResult {
    system.sample_loops(isotopy, n_samples, seed).average_qm(qm)
}

/// `Phi(phi^k) / k`.
pub fn gg_homogenized<T: Real, Q: Quasimorphism + ?Sized>(
    system: &ShortPathSystem<T>,
    isotopy: &Isotopy<T>,
    qm: &Q,
    k_max: usize,
    n_samples: usize,
    seed: Seed,
) -> GgResult {
    assert!(k_max >= 1, "iteration count must be positive");
    gg_average(system, &isotopy.iterate(k_max), qm, n_samples, seed).scaled(1.0 / k_max as f64)
}
