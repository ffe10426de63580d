//! Numerical laboratory for area-preserving isotopies of surfaces and the
//! braids their trajectories trace out.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`]: surface models embedded in Euclidean space, area sampling,
//!   Hamiltonian vector fields and geodesic distances.
//! * [`flow`]: fixed-step integration of Hamiltonian isotopies and Monte Carlo
//!   `L^p`-lengths.
//! * [`configspace`]: configurations of distinct points, the compactifying
//!   embedding by positions, pairwise directions and distance ratios, and the
//!   three path metrics `g`, `g0` and `gb`.
//! * [`braid`]: braid words from planar trajectories, pure-braid bookkeeping,
//!   linking numbers and word norms in the band generators.
//! * [`quasimorphism`]: evaluators on pure braids with defect estimation and
//!   homogenization.
//! * [`gg`]: short-path systems and the averaged word norm / averaged
//!   quasimorphism of an isotopy.
//!
//! Floating-point code is generic over [`Real`]; the `*64` aliases below pin
//! it to `f64`, which is what the harness uses.

pub mod braid;
pub mod configspace;
pub mod flow;
pub mod geometry;
pub mod gg;
pub mod mc;
pub mod quasimorphism;
pub mod scalar;

pub use scalar::Real;

pub type Surface64 = geometry::Surface<f64>;
pub type SurfacePoint64 = geometry::SurfacePoint<f64>;
pub type HamiltonianSpec64 = geometry::HamiltonianSpec<f64>;
pub type RadialBump64 = geometry::RadialBump<f64>;
pub type Isotopy64 = flow::Isotopy<f64>;
pub type Trajectory64 = flow::Trajectory<f64>;
pub type Configuration64 = configspace::Configuration<f64>;
pub type ConfigTangent64 = configspace::ConfigTangent<f64>;
pub type SinhaImage64 = configspace::SinhaImage<f64>;
pub type ShortPathSystem64 = gg::ShortPathSystem<f64>;

pub type Surface32 = geometry::Surface<f32>;
pub type Configuration32 = configspace::Configuration<f32>;
pub type ConfigTangent32 = configspace::ConfigTangent<f32>;
