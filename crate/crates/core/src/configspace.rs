//! Configuration spaces `X_n(M)` of distinct points and their metrics.
//!
//! A configuration is stored by its ambient coordinates. The compactifying
//! embedding sends it to its positions, the unit directions `pi_ij` between
//! pairs `i < j` and the ratios `s_ijk = |x_i - x_j| / |x_i - x_k|` for
//! triples `i < j < k`, the latter stored through the chart `exp(-s)`.
//!
//! Three length structures live on `X_n(M)`:
//!
//! * `g`, the pull-back of the product metric on the target of the
//!   embedding, `|v|_g^2 = |v|^2 + sum |D pi_ij v|^2 + sum |D exp(-s_ijk) v|^2`;
//! * `g0`, the Euclidean norm divided by the minimal pairwise ambient
//!   distance `d(x)`;
//! * `gb`, the same with the minimal pairwise geodesic distance `d_M(x)`.
//!
//! Tangent vectors are ambient and all derivatives are taken along the
//! straight ambient curve `x + t v`, which need not stay on the surface.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{Surface, SurfacePoint};
use crate::scalar::{binomial, dot, Real};

/// Pairs closer than this are treated as collided when walking a path.
pub const COLLISION_THRESHOLD: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("points {i} and {j} coincide")]
    NotDistinct { i: usize, j: usize },
    #[error("configuration has {got} points, expected {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("path segment {segment} comes within {distance:e} of a diagonal and leaves the configuration space")]
    LeavesConfigurationSpace { segment: usize, distance: f64 },
}

/// `x = (x_1, ..., x_n)` with pairwise distinct ambient points.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration<T> {
    dim: usize,
    coords: Vec<T>,
}

/// `v = (v_1, ..., v_n)`, one ambient vector per point.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigTangent<T> {
    dim: usize,
    coords: Vec<T>,
}

/// Image of a configuration under the compactifying embedding.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SinhaImage<T> {
    pub n: usize,
    pub dim: usize,
    /// Positions, `n * dim` numbers.
    pub base: Vec<T>,
    /// `pi_ij` for `i < j` in lexicographic order, `dim` numbers each.
    pub directions: Vec<T>,
    /// `exp(-s_ijk)` for `i < j < k` in lexicographic order.
    pub ratios_compactified: Vec<T>,
}

impl<T: Real> SinhaImage<T> {
    pub fn direction(&self, i: usize, j: usize) -> &[T] {
        let p = pair_index(self.n, i, j);
        &self.directions[p * self.dim..(p + 1) * self.dim]
    }

    pub fn ratio(&self, i: usize, j: usize, k: usize) -> T {
        self.ratios_compactified[triple_index(self.n, i, j, k)]
    }
}

/// Position of `(i, j)`, `i < j`, in the lexicographic list of pairs.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    assert!(i < j && j < n, "pair indices must satisfy i < j < n");
    // pairs before row i, then offset in row
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Position of `(i, j, k)`, `i < j < k`, in the lexicographic list of triples.
pub fn triple_index(n: usize, i: usize, j: usize, k: usize) -> usize {
    assert!(i < j && j < k && k < n, "triple indices must satisfy i < j < k < n");
    let mut idx = 0;
    for a in 0..i {
        idx += binomial(n - a - 1, 2);
    }
    for b in (i + 1)..j {
        idx += n - b - 1;
    }
    idx + (k - j - 1)
}

impl<T: Real> Configuration<T> {
    pub fn from_points(points: &[SurfacePoint<T>]) -> Result<Self, ConfigError> {
        let dim = points.first().map_or(2, |p| p.dim());
        let coords = points.iter().flat_map(|p| p.ambient().iter().copied()).collect();
        Self::from_ambient(dim, coords)
    }

    /// From flat ambient coordinates, `n * dim` numbers.
    pub fn from_ambient(dim: usize, coords: Vec<T>) -> Result<Self, ConfigError> {
        assert!(dim > 0 && coords.len() % dim == 0, "coordinate count must be a multiple of dim");
        let c = Configuration { dim, coords };
        for i in 0..c.n() {
            for j in (i + 1)..c.n() {
                if c.pair_distance(i, j) <= T::zero() {
                    return Err(ConfigError::NotDistinct { i, j });
                }
            }
        }
        Ok(c)
    }

    /// Without the distinctness check; used for interpolated path points
    /// whose distances are controlled separately.
    pub(crate) fn from_ambient_unchecked(dim: usize, coords: Vec<T>) -> Self {
        Configuration { dim, coords }
    }

    pub fn n(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Surface points, by nearest-point projection of each ambient point.
    pub fn surface_points(&self, surface: &Surface<T>) -> Vec<SurfacePoint<T>> {
        (0..self.n()).map(|i| surface.project(self.point(i))).collect()
    }

    pub fn pair_distance(&self, i: usize, j: usize) -> T {
        crate::scalar::dist(self.point(i), self.point(j))
    }

    fn diff(&self, i: usize, j: usize) -> impl Iterator<Item = T> + '_ {
        self.point(i).iter().zip(self.point(j)).map(|(a, b)| *a - *b)
    }

    /// Ambient rescaling `x -> s x`.
    pub fn scaled(&self, s: T) -> Self {
        Configuration { dim: self.dim, coords: self.coords.iter().map(|c| *c * s).collect() }
    }

    /// `x + t v`, unchecked.
    pub fn displaced(&self, v: &ConfigTangent<T>, t: T) -> Self {
        Configuration {
            dim: self.dim,
            coords: self.coords.iter().zip(&v.coords).map(|(x, dv)| *x + t * *dv).collect(),
        }
    }
}

impl<T: Real> ConfigTangent<T> {
    pub fn new(dim: usize, coords: Vec<T>) -> Self {
        assert!(dim > 0 && coords.len() % dim == 0, "coordinate count must be a multiple of dim");
        ConfigTangent { dim, coords }
    }

    pub fn zero(n: usize, dim: usize) -> Self {
        ConfigTangent { dim, coords: vec![T::zero(); n * dim] }
    }

    pub fn n(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn component(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Euclidean norm of the stacked vector in `(R^d)^n`.
    pub fn norm(&self) -> T {
        dot(&self.coords, &self.coords).sqrt()
    }

    /// `sum_i |v_i|`.
    pub fn sum_of_norms(&self) -> T {
        (0..self.n()).map(|i| crate::scalar::norm(self.component(i))).sum()
    }

    pub fn scaled(&self, s: T) -> Self {
        ConfigTangent { dim: self.dim, coords: self.coords.iter().map(|c| *c * s).collect() }
    }
}

/// `n` independent area samples, redrawn in the (null) event of a
/// coincidence.
pub fn random_configuration<T: Real, R: Rng + ?Sized>(surface: &Surface<T>, n: usize, rng: &mut R) -> Configuration<T> {
    loop {
        let pts: Vec<SurfacePoint<T>> = (0..n).map(|_| surface.area_sample(rng)).collect();
        if let Ok(c) = Configuration::from_points(&pts) {
            return c;
        }
    }
}

/// A tangent vector at `x` whose components have coordinates uniform in
/// `[-1, 1]` along the tangent frame of each point.
pub fn random_tangent<T: Real, R: Rng + ?Sized>(surface: &Surface<T>, x: &Configuration<T>, rng: &mut R) -> ConfigTangent<T> {
    let d = x.dim();
    let mut coords = Vec::with_capacity(x.n() * d);
    for p in x.surface_points(surface) {
        let [e1, e2] = surface.tangent_frame(&p);
        let (a, b) = (T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)));
        coords.extend((0..d).map(|k| a * e1[k] + b * e2[k]));
    }
    ConfigTangent::new(d, coords)
}

/// `d(x)`: minimal pairwise ambient distance.
pub fn min_dist<T: Real>(x: &Configuration<T>) -> T {
    let n = x.n();
    let mut m = T::infinity();
    for i in 0..n {
        for j in (i + 1)..n {
            m = m.min(x.pair_distance(i, j));
        }
    }
    m
}

/// `d_M(x)`: minimal pairwise geodesic distance on the surface.
pub fn min_dist_geodesic<T: Real>(surface: &Surface<T>, x: &Configuration<T>) -> T {
    let pts = x.surface_points(surface);
    let mut m = T::infinity();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            m = m.min(surface.geodesic_distance(&pts[i], &pts[j]));
        }
    }
    m
}

/// The compactifying embedding: positions, directions and `exp(-s_ijk)`.
pub fn sinha_embed<T: Real>(x: &Configuration<T>) -> Result<SinhaImage<T>, ConfigError> {
    let (n, d) = (x.n(), x.dim());
    for i in 0..n {
        for j in (i + 1)..n {
            if x.pair_distance(i, j) <= T::zero() {
                return Err(ConfigError::NotDistinct { i, j });
            }
        }
    }
    let mut directions = Vec::with_capacity(binomial(n, 2) * d);
    for i in 0..n {
        for j in (i + 1)..n {
            let r = x.pair_distance(i, j);
            directions.extend(x.diff(i, j).map(|c| c / r));
        }
    }
    let mut ratios = Vec::with_capacity(binomial(n, 3));
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let s = x.pair_distance(i, j) / x.pair_distance(i, k);
                ratios.push((-s).exp());
            }
        }
    }
    Ok(SinhaImage { n, dim: d, base: x.coords().to_vec(), directions, ratios_compactified: ratios })
}

/// `D pi_ij (v) = (v_i - v_j)/|x_i - x_j| - (x_i - x_j) <v_i - v_j, x_i - x_j> / |x_i - x_j|^3`.
pub fn dpi<T: Real>(x: &Configuration<T>, v: &ConfigTangent<T>, i: usize, j: usize) -> Vec<T> {
    assert!(i < j, "dpi expects i < j");
    let dx: Vec<T> = x.diff(i, j).collect();
    let dv: Vec<T> = v.component(i).iter().zip(v.component(j)).map(|(a, b)| *a - *b).collect();
    let r = dot(&dx, &dx).sqrt();
    let proj = dot(&dv, &dx) / (r * r * r);
    dv.iter().zip(&dx).map(|(a, b)| *a / r - *b * proj).collect()
}

/// Derivative of `exp(-s_ijk)` along `v`: `-Ds_ijk(v) exp(-s_ijk)` with
/// `Ds_ijk(v) = <v_i - v_j, x_i - x_j>/(|x_i - x_j||x_i - x_k|) - |x_i - x_j|<x_i - x_k, v_i - v_k>/|x_i - x_k|^3`.
pub fn ds_exp<T: Real>(x: &Configuration<T>, v: &ConfigTangent<T>, i: usize, j: usize, k: usize) -> T {
    assert!(i < j && j < k, "ds_exp expects i < j < k");
    let dij: Vec<T> = x.diff(i, j).collect();
    let dik: Vec<T> = x.diff(i, k).collect();
    let vij: Vec<T> = v.component(i).iter().zip(v.component(j)).map(|(a, b)| *a - *b).collect();
    let vik: Vec<T> = v.component(i).iter().zip(v.component(k)).map(|(a, b)| *a - *b).collect();
    let rij = dot(&dij, &dij).sqrt();
    let rik = dot(&dik, &dik).sqrt();
    let bracket = dot(&vij, &dij) / (rij * rik) - rij * dot(&dik, &vik) / (rik * rik * rik);
    -bracket * (-(rij / rik)).exp()
}

/// `|v|_{g0} = |v| / d(x)`.
pub fn g0_norm<T: Real>(x: &Configuration<T>, v: &ConfigTangent<T>) -> T {
    v.norm() / min_dist(x)
}

/// `|v|_{gb} = |v| / d_M(x)`.
pub fn gb_norm<T: Real>(surface: &Surface<T>, x: &Configuration<T>, v: &ConfigTangent<T>) -> T {
    v.norm() / min_dist_geodesic(surface, x)
}

/// Squared pull-back norm `|v|_g^2`, returned with its three parts
/// `(|v|^2, sum |D pi|^2, sum (D exp(-s))^2)`.
pub fn g_norm_parts<T: Real>(x: &Configuration<T>, v: &ConfigTangent<T>) -> (T, T, T) {
    let n = x.n();
    let base = dot(v.coords(), v.coords());
    let mut dirs = T::zero();
    let mut ratios = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dpi(x, v, i, j);
            dirs = dirs + dot(&d, &d);
            for k in (j + 1)..n {
                let s = ds_exp(x, v, i, j, k);
                ratios = ratios + s * s;
            }
        }
    }
    (base, dirs, ratios)
}

/// `|v|_g`.
pub fn g_norm<T: Real>(x: &Configuration<T>, v: &ConfigTangent<T>) -> T {
    let (a, b, c) = g_norm_parts(x, v);
    (a + b + c).sqrt()
}

/// `C(n, A) = A^2 + n * C(n,2) + 4n * C(n,3)`, so that
/// `|v|_g^2 <= C |v|_{g0}^2` whenever all pairwise distances are at most `A`.
pub fn two_metrics_constant<T: Real>(n: usize, diameter_bound: T) -> T {
    assert!(n >= 2, "configurations need at least two points");
    let nf = T::lit(n as f64);
    diameter_bound * diameter_bound
        + nf * T::lit(binomial(n, 2) as f64)
        + T::lit(4.0) * nf * T::lit(binomial(n, 3) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    G,
    G0,
    Gb,
}

impl Metric {
    pub fn norm_at<T: Real>(self, surface: &Surface<T>, x: &Configuration<T>, v: &ConfigTangent<T>) -> T {
        match self {
            Metric::G => g_norm(x, v),
            Metric::G0 => g0_norm(x, v),
            Metric::Gb => gb_norm(surface, x, v),
        }
    }
}

/// Minimum over `s in [0, 1]` of the distance between two points moving
/// linearly from `(a0, b0)` to `(a1, b1)`.
pub(crate) fn min_linear_distance<T: Real>(a0: &[T], b0: &[T], a1: &[T], b1: &[T]) -> T {
    let d0: Vec<T> = a0.iter().zip(b0).map(|(a, b)| *a - *b).collect();
    let d1: Vec<T> = a1.iter().zip(b1).map(|(a, b)| *a - *b).collect();
    let e: Vec<T> = d1.iter().zip(&d0).map(|(a, b)| *a - *b).collect();
    let ee = dot(&e, &e);
    let s = if ee > T::zero() { (-dot(&d0, &e) / ee).max(T::zero()).min(T::one()) } else { T::zero() };
    d0.iter().zip(&e).map(|(a, b)| (*a + s * *b) * (*a + s * *b)).sum::<T>().sqrt()
}

/// Minimum pairwise distance along the straight segment between two
/// configurations.
pub fn segment_min_dist<T: Real>(a: &Configuration<T>, b: &Configuration<T>) -> T {
    let n = a.n();
    let mut m = T::infinity();
    for i in 0..n {
        for j in (i + 1)..n {
            m = m.min(min_linear_distance(a.point(i), a.point(j), b.point(i), b.point(j)));
        }
    }
    m
}

const MAX_REFINE_DEPTH: usize = 40;

/// Length of the polyline through `path` in the chosen metric.
///
/// Each segment is integrated with the midpoint rule, bisecting until the
/// minimal distance changes by less than 10% across a piece and the
/// one-piece and two-piece estimates agree to 0.5%.
pub fn path_length<T: Real>(
    surface: &Surface<T>,
    path: &[Configuration<T>],
    metric: Metric,
) -> Result<T, ConfigError> {
    let mut total = T::zero();
    let threshold = T::lit(COLLISION_THRESHOLD);
    for (segment, w) in path.windows(2).enumerate() {
        let (a, b) = (&w[0], &w[1]);
        if a.n() != b.n() {
            return Err(ConfigError::SizeMismatch { expected: a.n(), got: b.n() });
        }
        let m = segment_min_dist(a, b);
        if m < threshold {
            return Err(ConfigError::LeavesConfigurationSpace { segment, distance: m.to_f64_lossy() });
        }
        if a.coords == b.coords {
            continue;
        }
        let v = ConfigTangent::new(a.dim, b.coords.iter().zip(&a.coords).map(|(p, q)| *p - *q).collect());
        total = total + refine(surface, a, &v, metric, T::zero(), T::one(), 0);
    }
    Ok(total)
}

fn refine<T: Real>(
    surface: &Surface<T>,
    start: &Configuration<T>,
    v: &ConfigTangent<T>,
    metric: Metric,
    lo: T,
    hi: T,
    depth: usize,
) -> T {
    let half = T::lit(0.5);
    let mid = (lo + hi) * half;
    let at = |s: T| start.displaced(v, s);
    let width = hi - lo;
    let one = width * metric.norm_at(surface, &at(mid), v);
    let q1 = (lo + mid) * half;
    let q3 = (mid + hi) * half;
    let two = width * half * (metric.norm_at(surface, &at(q1), v) + metric.norm_at(surface, &at(q3), v));
    let (dlo, dhi) = (min_dist(&at(lo)), min_dist(&at(hi)));
    let d_change = (dlo - dhi).abs() / dlo.min(dhi);
    let converged = (one - two).abs() <= T::lit(0.005) * two.abs() + T::lit(1e-14);
    if depth >= MAX_REFINE_DEPTH || (converged && d_change < T::lit(0.1)) {
        return two;
    }
    refine(surface, start, v, metric, lo, mid, depth + 1) + refine(surface, start, v, metric, mid, hi, depth + 1)
}

/// Configurations from `n` trajectories sampled on a common grid.
pub fn configuration_path<T: Real>(strands: &[Vec<SurfacePoint<T>>]) -> Vec<Configuration<T>> {
    let len = strands.first().map_or(0, |s| s.len());
    let dim = strands.first().and_then(|s| s.first()).map_or(2, |p| p.dim());
    (0..len)
        .map(|t| {
            let coords = strands.iter().flat_map(|s| s[t].ambient().iter().copied()).collect();
            Configuration::from_ambient_unchecked(dim, coords)
        })
        .collect()
}
