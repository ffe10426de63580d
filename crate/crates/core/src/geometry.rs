//! Surface models embedded in Euclidean space.
//!
//! Every surface carries the metric and area form restricted from its ambient
//! space: the unit disc in `R^2`, a flat torus as a product of two circles in
//! `R^4`, and a round sphere in `R^3`. Hamiltonians are functions of the
//! ambient point; their symplectic gradient is the tangential part of the
//! ambient gradient rotated by `+90` degrees in the oriented tangent plane.

use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::{dot, norm, Real};

/// Largest ambient dimension of the shipped surfaces.
pub const MAX_AMBIENT: usize = 4;

/// A point of a surface, in chart and ambient coordinates.
///
/// Chart coordinates are `(x, y)` on the disc, `(u, v) in [0, a) x [0, b)` on
/// the torus and the equal-area pair `(phi, z)` on the sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint<T> {
    pub chart: [T; 2],
    amb: [T; MAX_AMBIENT],
    dim: usize,
}

impl<T: Real> SurfacePoint<T> {
    pub fn ambient(&self) -> &[T] {
        &self.amb[..self.dim]
    }

    pub fn ambient_array(&self) -> [T; MAX_AMBIENT] {
        self.amb
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// A tangent vector, in chart and ambient components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVector<T> {
    pub chart: [T; 2],
    amb: [T; MAX_AMBIENT],
    dim: usize,
}

impl<T: Real> TangentVector<T> {
    pub fn ambient(&self) -> &[T] {
        &self.amb[..self.dim]
    }

    pub fn ambient_array(&self) -> [T; MAX_AMBIENT] {
        self.amb
    }

    pub fn norm(&self) -> T {
        norm(self.ambient())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Surface<T> {
    UnitDisc,
    /// `R^2 / (a Z x b Z)`, embedded as two circles of circumference `a`, `b`.
    FlatTorus { sides: [T; 2] },
    RoundSphere { radius: T },
}

impl<T: Real> Surface<T> {
    pub fn flat_torus(a: T, b: T) -> Self {
        assert!(a > T::zero() && b > T::zero(), "torus sides must be positive");
        Surface::FlatTorus { sides: [a, b] }
    }

    pub fn round_sphere(radius: T) -> Self {
        assert!(radius > T::zero(), "sphere radius must be positive");
        Surface::RoundSphere { radius }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Surface::UnitDisc => 2,
            Surface::FlatTorus { .. } => 4,
            Surface::RoundSphere { .. } => 3,
        }
    }

    pub fn total_area(&self) -> T {
        match *self {
            Surface::UnitDisc => T::PI(),
            Surface::FlatTorus { sides: [a, b] } => a * b,
            Surface::RoundSphere { radius } => T::lit(4.0) * T::PI() * radius * radius,
        }
    }

    /// Bound `A` on the ambient distance between any two points.
    pub fn ambient_diameter_bound(&self) -> T {
        match *self {
            Surface::UnitDisc => T::lit(2.0),
            Surface::FlatTorus { sides: [a, b] } => {
                // each circle has diameter side / pi
                ((a / T::PI()).powi(2) + (b / T::PI()).powi(2)).sqrt()
            }
            Surface::RoundSphere { radius } => T::lit(2.0) * radius,
        }
    }

    fn circle_radii(sides: [T; 2]) -> [T; 2] {
        let tau = T::lit(2.0) * T::PI();
        [sides[0] / tau, sides[1] / tau]
    }

    fn make_point(&self, chart: [T; 2], amb: [T; MAX_AMBIENT]) -> SurfacePoint<T> {
        SurfacePoint { chart, amb, dim: self.ambient_dim() }
    }

    /// Embeds chart coordinates. Torus coordinates are reduced modulo the
    /// sides; disc and sphere charts must already lie in the domain.
    pub fn point_from_chart(&self, chart: [T; 2]) -> SurfacePoint<T> {
        let z = T::zero();
        match *self {
            Surface::UnitDisc => self.make_point(chart, [chart[0], chart[1], z, z]),
            Surface::FlatTorus { sides } => {
                let u = wrap(chart[0], sides[0]);
                let v = wrap(chart[1], sides[1]);
                let [ra, rb] = Self::circle_radii(sides);
                let (al, be) = (u / ra, v / rb);
                self.make_point(
                    [u, v],
                    [ra * al.cos(), ra * al.sin(), rb * be.cos(), rb * be.sin()],
                )
            }
            Surface::RoundSphere { radius } => {
                let (phi, zc) = (chart[0], chart[1]);
                let s = (radius * radius - zc * zc).max(z).sqrt();
                self.make_point(
                    [wrap(phi, T::lit(2.0) * T::PI()), zc],
                    [s * phi.cos(), s * phi.sin(), zc, z],
                )
            }
        }
    }

    /// Nearest-point projection of an ambient vector onto the surface.
    pub fn project(&self, amb: &[T]) -> SurfacePoint<T> {
        let z = T::zero();
        match *self {
            Surface::UnitDisc => {
                let (mut x, mut y) = (amb[0], amb[1]);
                let r = (x * x + y * y).sqrt();
                if r > T::one() {
                    x = x / r;
                    y = y / r;
                }
                self.make_point([x, y], [x, y, z, z])
            }
            Surface::FlatTorus { sides } => {
                let [ra, rb] = Self::circle_radii(sides);
                let al = amb[1].atan2(amb[0]);
                let be = amb[3].atan2(amb[2]);
                self.point_from_chart([al * ra, be * rb])
            }
            Surface::RoundSphere { radius } => {
                let r = norm(&amb[..3]);
                let k = if r > z { radius / r } else { z };
                let (x, y, zc) = (amb[0] * k, amb[1] * k, amb[2] * k);
                let phi = if x == z && y == z { z } else { wrap(y.atan2(x), T::lit(2.0) * T::PI()) };
                self.make_point([phi, zc], [x, y, zc, z])
            }
        }
    }

    /// Residual of the defining ambient equation (zero on the surface; the
    /// disc reports the excess of `|x|` over 1).
    pub fn residual(&self, p: &SurfacePoint<T>) -> T {
        let a = p.ambient();
        match *self {
            Surface::UnitDisc => (norm(a) - T::one()).max(T::zero()),
            Surface::FlatTorus { sides } => {
                let [ra, rb] = Self::circle_radii(sides);
                ((a[0] * a[0] + a[1] * a[1]).sqrt() - ra)
                    .abs()
                    .max(((a[2] * a[2] + a[3] * a[3]).sqrt() - rb).abs())
            }
            Surface::RoundSphere { radius } => (norm(a) - radius).abs(),
        }
    }

    /// A point distributed by the normalized area measure.
    pub fn area_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SurfacePoint<T> {
        let u1 = T::lit(rng.gen::<f64>());
        let u2 = T::lit(rng.gen::<f64>());
        let tau = T::lit(2.0) * T::PI();
        match *self {
            Surface::UnitDisc => {
                let r = u1.sqrt();
                let th = tau * u2;
                self.point_from_chart([r * th.cos(), r * th.sin()])
            }
            Surface::FlatTorus { sides } => self.point_from_chart([sides[0] * u1, sides[1] * u2]),
            // Archimedes: z is uniform on [-R, R] under the area measure
            Surface::RoundSphere { radius } => {
                self.point_from_chart([tau * u2, radius * (T::lit(2.0) * u1 - T::one())])
            }
        }
    }

    /// Orthonormal oriented basis `(e1, e2)` of the tangent plane at `p`.
    pub fn tangent_frame(&self, p: &SurfacePoint<T>) -> [[T; MAX_AMBIENT]; 2] {
        self.frame_at(&p.amb)
    }

    // Frames are built from the normalized ambient point, so they extend
    // smoothly to a neighbourhood of the surface (used by integrator stages).
    fn frame_at(&self, a: &[T; MAX_AMBIENT]) -> [[T; MAX_AMBIENT]; 2] {
        let z = T::zero();
        match *self {
            Surface::UnitDisc => [[T::one(), z, z, z], [z, T::one(), z, z]],
            Surface::FlatTorus { .. } => {
                let ra = (a[0] * a[0] + a[1] * a[1]).sqrt();
                let rb = (a[2] * a[2] + a[3] * a[3]).sqrt();
                [[-a[1] / ra, a[0] / ra, z, z], [z, z, -a[3] / rb, a[2] / rb]]
            }
            Surface::RoundSphere { .. } => {
                let r = norm(&a[..3]);
                let n = [a[0] / r, a[1] / r, a[2] / r];
                let helper = if n[2].abs() < T::lit(0.9) { [z, z, T::one()] } else { [T::one(), z, z] };
                let mut e1 = cross(helper, n);
                let l = norm(&e1);
                e1 = [e1[0] / l, e1[1] / l, e1[2] / l];
                let e2 = cross(n, e1);
                [[e1[0], e1[1], e1[2], z], [e2[0], e2[1], e2[2], z]]
            }
        }
    }

    /// Orthogonal projection of an ambient vector onto the tangent plane.
    pub fn tangent_part(&self, p: &SurfacePoint<T>, v: &[T]) -> [T; MAX_AMBIENT] {
        self.tangent_part_at(&p.amb, v)
    }

    fn tangent_part_at(&self, a: &[T; MAX_AMBIENT], v: &[T]) -> [T; MAX_AMBIENT] {
        let d = self.ambient_dim();
        let mut out = [T::zero(); MAX_AMBIENT];
        if let Surface::RoundSphere { .. } = self {
            let r = norm(&a[..3]);
            let vn = dot(&a[..3], &v[..3]) / (r * r);
            for k in 0..3 {
                out[k] = v[k] - vn * a[k];
            }
            return out;
        }
        let [e1, e2] = self.frame_at(a);
        let (x, y) = (dot(&e1[..d], &v[..d]), dot(&e2[..d], &v[..d]));
        for k in 0..d {
            out[k] = x * e1[k] + y * e2[k];
        }
        out
    }

    /// Rotation by `+90` degrees in the oriented tangent plane at `p`.
    pub fn rotate_quarter(&self, p: &SurfacePoint<T>, v: &[T]) -> [T; MAX_AMBIENT] {
        self.rotate_quarter_at(&p.amb, v)
    }

    /// Tangential part of `v` rotated by `+90` degrees at the ambient point
    /// `a`, which need only be near the surface.
    pub fn rotate_quarter_at(&self, a: &[T; MAX_AMBIENT], v: &[T]) -> [T; MAX_AMBIENT] {
        let d = self.ambient_dim();
        let mut out = [T::zero(); MAX_AMBIENT];
        match self {
            Surface::UnitDisc => {
                out[0] = -v[1];
                out[1] = v[0];
            }
            Surface::RoundSphere { .. } => {
                // outward normal orientation: n x v
                let r = norm(&a[..3]);
                let c = cross([a[0] / r, a[1] / r, a[2] / r], [v[0], v[1], v[2]]);
                out[..3].copy_from_slice(&c);
            }
            Surface::FlatTorus { .. } => {
                let [e1, e2] = self.frame_at(a);
                let (x, y) = (dot(&e1[..d], &v[..d]), dot(&e2[..d], &v[..d]));
                for k in 0..d {
                    out[k] = -y * e1[k] + x * e2[k];
                }
            }
        }
        out
    }

    fn tangent_vector(&self, p: &SurfacePoint<T>, amb: [T; MAX_AMBIENT]) -> TangentVector<T> {
        let z = T::zero();
        let chart = match *self {
            Surface::UnitDisc => [amb[0], amb[1]],
            Surface::FlatTorus { .. } => {
                let [e1, e2] = self.tangent_frame(p);
                [dot(&e1, &amb), dot(&e2, &amb)]
            }
            Surface::RoundSphere { .. } => {
                let a = p.amb;
                let rho2 = a[0] * a[0] + a[1] * a[1];
                let dphi = if rho2 > z { (a[0] * amb[1] - a[1] * amb[0]) / rho2 } else { z };
                [dphi, amb[2]]
            }
        };
        TangentVector { chart, amb, dim: self.ambient_dim() }
    }

    /// Distance in the induced length metric.
    pub fn geodesic_distance(&self, p: &SurfacePoint<T>, q: &SurfacePoint<T>) -> T {
        match *self {
            Surface::UnitDisc => crate::scalar::dist(p.ambient(), q.ambient()),
            Surface::FlatTorus { sides } => {
                let mut s = T::zero();
                for k in 0..2 {
                    let d = (p.chart[k] - q.chart[k]).abs() % sides[k];
                    let d = d.min(sides[k] - d);
                    s = s + d * d;
                }
                s.sqrt()
            }
            Surface::RoundSphere { radius } => {
                let (a, b) = (&p.amb, &q.amb);
                let c = cross([a[0], a[1], a[2]], [b[0], b[1], b[2]]);
                radius * norm(&c).atan2(dot(&a[..3], &b[..3]))
            }
        }
    }
}

fn wrap<T: Real>(x: T, period: T) -> T {
    let r = x % period;
    if r < T::zero() {
        r + period
    } else {
        r
    }
}

fn cross<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Closed-form Hamiltonians.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// `H = 0`.
    Zero,
    /// `H = (x^2 + y^2) / 2` in the first two ambient coordinates; rigid unit
    /// rotation of the disc.
    DiscRotation,
    /// `H = -z`; rotation of the sphere about the `z` axis at rate `1/R`.
    SphereRotation,
    /// `H = x_2`, the sine of the first torus circle scaled by its radius;
    /// a shear along the second circle.
    TorusWave,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Zero => "zero",
            Preset::DiscRotation => "disc-rotation",
            Preset::SphereRotation => "sphere-rotation",
            Preset::TorusWave => "torus-wave",
        }
    }

    fn value<T: Real>(self, a: &[T]) -> T {
        match self {
            Preset::Zero => T::zero(),
            Preset::DiscRotation => (a[0] * a[0] + a[1] * a[1]) / T::lit(2.0),
            Preset::SphereRotation => -a[2],
            Preset::TorusWave => a[1],
        }
    }

    fn gradient<T: Real>(self, a: &[T]) -> [T; MAX_AMBIENT] {
        let (z, one) = (T::zero(), T::one());
        match self {
            Preset::Zero => [z; MAX_AMBIENT],
            Preset::DiscRotation => [a[0], a[1], z, z],
            Preset::SphereRotation => [z, z, -one, z],
            Preset::TorusWave => [z, one, z, z],
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(Preset::Zero),
            "disc-rotation" => Ok(Preset::DiscRotation),
            "sphere-rotation" => Ok(Preset::SphereRotation),
            "torus-wave" => Ok(Preset::TorusWave),
            other => Err(format!("unknown Hamiltonian preset `{other}`")),
        }
    }
}

/// A radial twist supported in an ambient ball.
///
/// With `rho` the ambient distance to `center`, the angular velocity of the
/// generated flow is `amplitude` for `rho <= inner_radius`, decays by a
/// quintic smoothstep across the transition annulus and vanishes for
/// `rho >= outer_radius`. So `H(rho) = -amplitude * int_rho^outer s w(s) ds`,
/// which is zero outside the outer radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialBump<T> {
    pub center: [T; MAX_AMBIENT],
    pub inner_radius: T,
    pub outer_radius: T,
    pub amplitude: T,
}

// 4-point Gauss-Legendre; exact through degree 7, and the transition
// integrand s * (1 - smoothstep) has degree 6.
const GL4_NODES: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GL4_WEIGHTS: [f64; 4] = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];

impl<T: Real> RadialBump<T> {
    pub fn new(center: &SurfacePoint<T>, inner_radius: T, outer_radius: T, amplitude: T) -> Self {
        assert!(
            T::zero() <= inner_radius && inner_radius < outer_radius,
            "bump radii must satisfy 0 <= inner < outer"
        );
        RadialBump { center: center.ambient_array(), inner_radius, outer_radius, amplitude }
    }

    /// Angular-velocity profile in `[0, 1]`.
    pub fn profile(&self, rho: T) -> T {
        if rho <= self.inner_radius {
            T::one()
        } else if rho >= self.outer_radius {
            T::zero()
        } else {
            let t = (rho - self.inner_radius) / (self.outer_radius - self.inner_radius);
            T::one() - smoothstep(t)
        }
    }

    /// `int_rho^outer s * profile(s) ds`.
    fn tail_integral(&self, rho: T) -> T {
        let (ri, ro) = (self.inner_radius, self.outer_radius);
        if rho >= ro {
            return T::zero();
        }
        let lo = rho.max(ri);
        let half = (ro - lo) / T::lit(2.0);
        let mid = (ro + lo) / T::lit(2.0);
        let mut acc = T::zero();
        for (x, w) in GL4_NODES.iter().zip(GL4_WEIGHTS.iter()) {
            let s = mid + half * T::lit(*x);
            acc = acc + T::lit(*w) * s * self.profile(s);
        }
        acc = acc * half;
        if rho < ri {
            acc = acc + (ri * ri - rho * rho) / T::lit(2.0);
        }
        acc
    }

    pub fn radius_of(&self, a: &[T]) -> T {
        crate::scalar::dist(&self.center[..a.len()], a)
    }

    fn value(&self, a: &[T]) -> T {
        -self.amplitude * self.tail_integral(self.radius_of(a))
    }

    fn gradient(&self, a: &[T]) -> [T; MAX_AMBIENT] {
        let rho = self.radius_of(a);
        let mut g = [T::zero(); MAX_AMBIENT];
        if rho >= self.outer_radius || rho == T::zero() {
            return g;
        }
        // dH/drho = amplitude * rho * w(rho); times (a - c) / rho
        let k = self.amplitude * self.profile(rho);
        for (i, gi) in g.iter_mut().enumerate().take(a.len()) {
            *gi = k * (a[i] - self.center[i]);
        }
        g
    }
}

fn smoothstep<T: Real>(t: T) -> T {
    t * t * t * (T::lit(10.0) - T::lit(15.0) * t + T::lit(6.0) * t * t)
}

/// One term of a time-dependent blend: `weight * spec` on `[start, end)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlendEntry<T> {
    pub spec: HamiltonianSpec<T>,
    pub start: T,
    pub end: T,
    pub weight: T,
}

/// A Hamiltonian, possibly time-dependent.
///
/// Time dependence is piecewise autonomous: a blend is the weighted sum of
/// the entries whose window contains `t`. Integrators select the active
/// entries once per step (at the step midpoint), so windows should fall on
/// the step grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianSpec<T> {
    RadialBump(RadialBump<T>),
    Preset(Preset),
    TimeDependentBlend(Vec<BlendEntry<T>>),
}

impl<T: Real> HamiltonianSpec<T> {
    pub fn zero() -> Self {
        HamiltonianSpec::Preset(Preset::Zero)
    }

    pub fn is_autonomous(&self) -> bool {
        match self {
            HamiltonianSpec::TimeDependentBlend(entries) => entries.iter().all(|e| {
                e.start == T::neg_infinity() && e.end == T::infinity() && e.spec.is_autonomous()
            }),
            _ => true,
        }
    }

    /// `weight * self` at all times.
    pub fn scaled(self, weight: T) -> Self {
        HamiltonianSpec::TimeDependentBlend(vec![BlendEntry {
            spec: self,
            start: T::neg_infinity(),
            end: T::infinity(),
            weight,
        }])
    }

    /// Sum of autonomous-in-time terms `sum_i w_i H_i`.
    pub fn sum(terms: Vec<(T, HamiltonianSpec<T>)>) -> Self {
        HamiltonianSpec::TimeDependentBlend(
            terms
                .into_iter()
                .map(|(weight, spec)| BlendEntry { spec, start: T::neg_infinity(), end: T::infinity(), weight })
                .collect(),
        )
    }

    /// `H(p, t - dt)`.
    pub fn shifted(&self, dt: T) -> Self {
        match self {
            HamiltonianSpec::TimeDependentBlend(entries) => HamiltonianSpec::TimeDependentBlend(
                entries
                    .iter()
                    .map(|e| BlendEntry {
                        spec: e.spec.shifted(dt),
                        start: e.start + dt,
                        end: e.end + dt,
                        weight: e.weight,
                    })
                    .collect(),
            ),
            other => other.clone(),
        }
    }

    /// Generator of the time-reversed isotopy on `[t0, t1]`:
    /// `-H(p, t0 + t1 - t)`.
    pub fn time_reversed(&self, t0: T, t1: T) -> Self {
        match self {
            HamiltonianSpec::TimeDependentBlend(entries) => HamiltonianSpec::TimeDependentBlend(
                entries
                    .iter()
                    .map(|e| {
                        let (start, end) = if e.start == T::neg_infinity() && e.end == T::infinity() {
                            (e.start, e.end)
                        } else {
                            (t0 + t1 - e.end, t0 + t1 - e.start)
                        };
                        // the inner spec is reversed (which negates it), the
                        // weight is kept
                        BlendEntry { spec: e.spec.time_reversed(t0, t1), start, end, weight: e.weight }
                    })
                    .collect(),
            ),
            other => other.clone().scaled(-T::one()),
        }
    }

    /// The autonomous terms active at time `t`, with accumulated weights.
    pub fn active_terms(&self, t: T) -> Vec<(T, AutonomousTerm<T>)> {
        let mut out = Vec::new();
        self.collect_terms(t, T::one(), &mut out);
        out
    }

    fn collect_terms(&self, t: T, w: T, out: &mut Vec<(T, AutonomousTerm<T>)>) {
        match self {
            HamiltonianSpec::RadialBump(b) => out.push((w, AutonomousTerm::Bump(*b))),
            HamiltonianSpec::Preset(Preset::Zero) => {}
            HamiltonianSpec::Preset(p) => out.push((w, AutonomousTerm::Preset(*p))),
            HamiltonianSpec::TimeDependentBlend(entries) => {
                for e in entries {
                    if e.start <= t && t < e.end {
                        e.spec.collect_terms(t, w * e.weight, out);
                    }
                }
            }
        }
    }

    pub fn value(&self, p: &SurfacePoint<T>, t: T) -> T {
        self.active_terms(t).iter().fold(T::zero(), |acc, (w, term)| acc + *w * term.value(p.ambient()))
    }

    /// Gradient of the ambient extension of `H(., t)`.
    pub fn ambient_gradient(&self, p: &SurfacePoint<T>, t: T) -> [T; MAX_AMBIENT] {
        frozen_gradient(&self.active_terms(t), p.ambient())
    }
}

/// A time-independent leaf of a [`HamiltonianSpec`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AutonomousTerm<T> {
    Bump(RadialBump<T>),
    Preset(Preset),
}

impl<T: Real> AutonomousTerm<T> {
    pub fn value(&self, a: &[T]) -> T {
        match self {
            AutonomousTerm::Bump(b) => b.value(a),
            AutonomousTerm::Preset(p) => p.value(a),
        }
    }

    pub fn gradient(&self, a: &[T]) -> [T; MAX_AMBIENT] {
        match self {
            AutonomousTerm::Bump(b) => b.gradient(a),
            AutonomousTerm::Preset(p) => p.gradient(a),
        }
    }
}

/// Ambient gradient of a frozen weighted sum of autonomous terms.
pub fn frozen_gradient<T: Real>(terms: &[(T, AutonomousTerm<T>)], a: &[T]) -> [T; MAX_AMBIENT] {
    let mut g = [T::zero(); MAX_AMBIENT];
    for (w, term) in terms {
        let gi = term.gradient(a);
        for k in 0..MAX_AMBIENT {
            g[k] = g[k] + *w * gi[k];
        }
    }
    g
}

/// Symplectic gradient of a frozen sum of autonomous terms, in ambient
/// components.
pub fn frozen_field<T: Real>(
    surface: &Surface<T>,
    terms: &[(T, AutonomousTerm<T>)],
    p: &SurfacePoint<T>,
) -> [T; MAX_AMBIENT] {
    if terms.is_empty() {
        return [T::zero(); MAX_AMBIENT];
    }
    let g = frozen_gradient(terms, p.ambient());
    surface.rotate_quarter(p, &g)
}

/// As [`frozen_field`], at an ambient point near (not necessarily on) the
/// surface.
pub fn frozen_field_at<T: Real>(
    surface: &Surface<T>,
    terms: &[(T, AutonomousTerm<T>)],
    a: &[T; MAX_AMBIENT],
) -> [T; MAX_AMBIENT] {
    if terms.is_empty() {
        return [T::zero(); MAX_AMBIENT];
    }
    let g = frozen_gradient(terms, &a[..surface.ambient_dim()]);
    surface.rotate_quarter_at(a, &g)
}

/// Riemannian gradient of `H(., t)` on the surface.
pub fn surface_gradient<T: Real>(
    surface: &Surface<T>,
    spec: &HamiltonianSpec<T>,
    p: &SurfacePoint<T>,
    t: T,
) -> [T; MAX_AMBIENT] {
    surface.tangent_part(p, &spec.ambient_gradient(p, t))
}

/// The time-dependent vector field `X_t` generated by `spec` at `p`.
pub fn hamiltonian_vector_field<T: Real>(
    surface: &Surface<T>,
    spec: &HamiltonianSpec<T>,
    p: &SurfacePoint<T>,
    t: T,
) -> TangentVector<T> {
    let amb = frozen_field(surface, &spec.active_terms(t), p);
    surface.tangent_vector(p, amb)
}
