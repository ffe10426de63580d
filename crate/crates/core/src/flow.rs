//! Isotopies generated by Hamiltonians, their trajectories and `L^p`-lengths.

use thiserror::Error;

use crate::geometry::{
    frozen_field, frozen_field_at, AutonomousTerm, BlendEntry, HamiltonianSpec, Surface, SurfacePoint,
    MAX_AMBIENT,
};
use crate::mc::{self, MeanEstimate, Seed};
use crate::scalar::{norm, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("L^p exponent must be at least 1, got {0}")]
    ExponentBelowOne(f64),
    #[error("isotopy needs t_end > t_start and at least one step")]
    InvalidTimeGrid,
    #[error("cannot concatenate isotopies on different surfaces")]
    SurfaceMismatch,
}

/// `{phi_t}` for `t` in `[t_start, t_end]`, generated by `spec` and
/// discretized into `steps` equal steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Isotopy<T> {
    pub surface: Surface<T>,
    pub spec: HamiltonianSpec<T>,
    pub t_start: T,
    pub t_end: T,
    pub steps: usize,
}

/// Sampled path `t -> phi_t(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub points: Vec<SurfacePoint<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn end(&self) -> &SurfacePoint<T> {
        self.points.last().expect("trajectory has at least one point")
    }

    /// Riemannian length of the sampled polyline (chords).
    pub fn chord_length(&self) -> T {
        self.points
            .windows(2)
            .map(|w| crate::scalar::dist(w[0].ambient(), w[1].ambient()))
            .fold(T::zero(), |a, b| a + b)
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl<T: Real> Isotopy<T> {
    pub fn new(surface: Surface<T>, spec: HamiltonianSpec<T>, t_start: T, t_end: T, steps: usize) -> Result<Self, FlowError> {
        if !(t_end > t_start) || steps == 0 {
            return Err(FlowError::InvalidTimeGrid);
        }
        Ok(Isotopy { surface, spec, t_start, t_end, steps })
    }

    /// The constant isotopy.
    pub fn identity(surface: Surface<T>, steps: usize) -> Self {
        Isotopy { surface, spec: HamiltonianSpec::zero(), t_start: T::zero(), t_end: T::one(), steps }
    }

    pub fn duration(&self) -> T {
        self.t_end - self.t_start
    }

    pub fn step_size(&self) -> T {
        self.duration() / T::lit(self.steps as f64)
    }

    /// `phi^k` traced out as `k` consecutive copies of the isotopy.
    pub fn iterate(&self, k: usize) -> Self {
        assert!(k >= 1, "iterate count must be positive");
        let period = self.duration();
        let spec = if self.spec.is_autonomous() {
            self.spec.clone()
        } else {
            HamiltonianSpec::TimeDependentBlend(
                (0..k)
                    .map(|j| {
                        let dt = period * T::lit(j as f64);
                        BlendEntry {
                            spec: self.spec.shifted(dt),
                            start: self.t_start + dt,
                            end: self.t_end + dt,
                            weight: T::one(),
                        }
                    })
                    .collect(),
            )
        };
        Isotopy {
            surface: self.surface,
            spec,
            t_start: self.t_start,
            t_end: self.t_start + period * T::lit(k as f64),
            steps: self.steps * k,
        }
    }

    /// `t -> phi_{t_end + t_start - t} o phi_{t_end}^{-1}`, ending at `phi^{-1}`.
    pub fn reversed(&self) -> Self {
        Isotopy { spec: self.spec.time_reversed(self.t_start, self.t_end), ..self.clone() }
    }

    /// Runs `self`, then `other`. Step sizes should agree so that the window
    /// boundary falls on the step grid.
    pub fn then(&self, other: &Isotopy<T>) -> Result<Self, FlowError> {
        if self.surface != other.surface {
            return Err(FlowError::SurfaceMismatch);
        }
        let dt = self.t_end - other.t_start;
        let t_end = self.t_end + other.duration();
        let spec = HamiltonianSpec::TimeDependentBlend(vec![
            BlendEntry { spec: self.spec.clone(), start: self.t_start, end: self.t_end, weight: T::one() },
            BlendEntry { spec: other.spec.shifted(dt), start: self.t_end, end: t_end, weight: T::one() },
        ]);
        Ok(Isotopy { surface: self.surface, spec, t_start: self.t_start, t_end, steps: self.steps + other.steps })
    }

    fn step_terms(&self) -> Vec<Vec<(T, AutonomousTerm<T>)>> {
        let h = self.step_size();
        if self.spec.is_autonomous() {
            let terms = self.spec.active_terms(self.t_start);
            return vec![terms; self.steps];
        }
        (0..self.steps)
            .map(|k| self.spec.active_terms(self.t_start + h * (T::lit(k as f64) + T::lit(0.5))))
            .collect()
    }

    /// Integrates `x -> phi_t(x)` with the classical fourth-order Runge-Kutta
    /// scheme in ambient coordinates, projecting back onto the surface after
    /// every step.
    pub fn advect(&self, start: &SurfacePoint<T>) -> Trajectory<T> {
        let terms = self.step_terms();
        self.advect_with(&terms, start)
    }

    fn advect_with(&self, terms: &[Vec<(T, AutonomousTerm<T>)>], start: &SurfacePoint<T>) -> Trajectory<T> {
        let h = self.step_size();
        let mut times = Vec::with_capacity(self.steps + 1);
        let mut points = Vec::with_capacity(self.steps + 1);
        let mut p = *start;
        times.push(self.t_start);
        points.push(p);
        for (k, step) in terms.iter().enumerate() {
            if !step.is_empty() {
                p = rk4_step(&self.surface, step, &p, h);
            }
            times.push(self.t_start + h * T::lit((k + 1) as f64));
            points.push(p);
        }
        Trajectory { times, points }
    }

    /// End points `phi_1(x)` for several starts, sharing the step schedule.
    pub fn advect_many(&self, starts: &[SurfacePoint<T>]) -> Vec<Trajectory<T>> {
        let terms = self.step_terms();
        starts.iter().map(|s| self.advect_with(&terms, s)).collect()
    }

    /// Monte Carlo estimate of
    /// `l_p = int (vol^-1 int |X_t|^p dmu)^(1/p) dt`.
    ///
    /// The spatial average uses `n_samples` area samples shared by all time
    /// nodes; the time integral is the midpoint rule on the step grid. The
    /// standard error comes from the delta method (exact for `p = 1`).
    pub fn lp_length(&self, p: f64, n_samples: usize, seed: Seed) -> Result<LpEstimate, FlowError> {
        if !(p >= 1.0) {
            return Err(FlowError::ExponentBelowOne(p));
        }
        let terms = self.step_terms();
        // consecutive steps with identical fields share one evaluation
        let mut groups: Vec<(usize, &Vec<(T, AutonomousTerm<T>)>)> = Vec::new();
        for t in &terms {
            match groups.last_mut() {
                Some((count, last)) if *last == t => *count += 1,
                _ => groups.push((1, t)),
            }
        }
        let h = self.step_size().to_f64_lossy();
        let surface = self.surface;
        let speeds = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
            let x = surface.area_sample(rng);
            groups
                .iter()
                .map(|(_, g)| norm(&frozen_field(&surface, g, &x)[..surface.ambient_dim()]).to_f64_lossy().powf(p))
                .collect()
        };
        let per_sample: Vec<Vec<f64>> = mc::sample_map(seed, n_samples, |rng, _| speeds(rng));
        let ng = groups.len();
        let mut means = vec![0.0; ng];
        for s in &per_sample {
            for (m, v) in means.iter_mut().zip(s) {
                *m += v;
            }
        }
        for m in means.iter_mut() {
            *m /= n_samples.max(1) as f64;
        }
        let value: f64 = groups.iter().zip(&means).map(|((c, _), m)| *c as f64 * h * m.powf(1.0 / p)).sum();
        // linearization of m -> m^(1/p) around the sample means
        let slopes: Vec<f64> = groups
            .iter()
            .zip(&means)
            .map(|((c, _), m)| if *m > 0.0 { *c as f64 * h * m.powf(1.0 / p - 1.0) / p } else { 0.0 })
            .collect();
        let influence: Vec<f64> = per_sample.iter().map(|s| s.iter().zip(&slopes).map(|(v, w)| v * w).sum()).collect();
        let se = MeanEstimate::from_samples(&influence).std_error;
        Ok(LpEstimate { value, std_error: se, n_samples })
    }

    /// `l_1` of this isotopy: an upper bound for `d_1(id, phi_1)`, not the
    /// distance itself (which is an infimum over all isotopies).
    pub fn d1_upper_bound(&self, n_samples: usize, seed: Seed) -> LpEstimate {
        self.lp_length(1.0, n_samples, seed).expect("p = 1 is admissible")
    }
}

fn rk4_step<T: Real>(
    surface: &Surface<T>,
    terms: &[(T, AutonomousTerm<T>)],
    p: &SurfacePoint<T>,
    h: T,
) -> SurfacePoint<T> {
    let d = surface.ambient_dim();
    let a0 = p.ambient_array();
    let k1 = frozen_field(surface, terms, p);
    let a1 = axpy(&a0, h / T::lit(2.0), &k1, d);
    let k2 = frozen_field_at(surface, terms, &a1);
    let a2 = axpy(&a0, h / T::lit(2.0), &k2, d);
    let k3 = frozen_field_at(surface, terms, &a2);
    let a3 = axpy(&a0, h, &k3, d);
    let k4 = frozen_field_at(surface, terms, &a3);
    let mut out = a0;
    let six = T::lit(6.0);
    for i in 0..d {
        out[i] = a0[i] + h / six * (k1[i] + T::lit(2.0) * k2[i] + T::lit(2.0) * k3[i] + k4[i]);
    }
    surface.project(&out[..d])
}

fn axpy<T: Real>(a: &[T; MAX_AMBIENT], s: T, v: &[T; MAX_AMBIENT], d: usize) -> [T; MAX_AMBIENT] {
    let mut out = *a;
    for i in 0..d {
        out[i] = a[i] + s * v[i];
    }
    out
}

/// Pushes `n` area samples through `phi_1` and returns, for each test set,
/// the fraction of pushed-forward samples that land in it.
pub fn pushforward_fractions<T: Real, F>(isotopy: &Isotopy<T>, n: usize, seed: Seed, sets: &[F]) -> Vec<f64>
where
    F: Fn(&SurfacePoint<T>) -> bool + Sync,
{
    let terms = isotopy.step_terms();
    let hits: Vec<Vec<bool>> = mc::sample_map(seed, n, |rng, _| {
        let x = isotopy.surface.area_sample(rng);
        let y = *isotopy.advect_with(&terms, &x).end();
        sets.iter().map(|s| s(&y)).collect()
    });
    (0..sets.len())
        .map(|j| hits.iter().filter(|h| h[j]).count() as f64 / n as f64)
        .collect()
}
