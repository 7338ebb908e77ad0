//! Metric spaces carrying a field of dilations.
//!
//! A dilation structure equips each point `x` of a metric space with a
//! one-parameter family of contractions `u -> dilate(x, eps, u)` defined on
//! a ball around `x`. The submodules verify the structure axioms
//! numerically, derive the tangent-space operations they induce, and
//! transport structures along maps.

pub(crate) mod axioms;
mod conical;
mod models;
mod pansu;
mod transport;

pub use axioms::{
    axiom_report, check_a0, check_a1_a2, check_a3, check_a4, difference, tangent_inverse,
    tangent_sum, A0Report, A3Result, A4Result, AxiomReport,
};
pub use conical::{conical_checks, ConicalReport, NormChecks};
pub use models::{
    structure_by_name, ConicalDilation, EuclideanDilation, EuclideanGroup, HeisenbergDilation,
    HeisenbergGroup, LogPerturbedEuclidean, NormedGroupWithDilations, SnowflakeDilation,
    SnowflakeGroup,
};
pub use pansu::{pansu_map_by_name, pansu_residual, PansuMap, PansuReport};
pub use transport::{
    linearity_residual, structure_agreement, transport, MagnifiedDilation, TransportedStructure,
};

use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

/// A point of a model space; at most four coordinates are stored inline.
pub type ModelPoint = SmallVec<[f64; 4]>;

/// Convenience constructor from a coordinate slice.
pub fn point(coords: &[f64]) -> ModelPoint {
    SmallVec::from_slice(coords)
}

pub(crate) fn vec_add(p: &ModelPoint, q: &ModelPoint) -> ModelPoint {
    p.iter().zip(q.iter()).map(|(a, b)| a + b).collect()
}

pub(crate) fn vec_sub(p: &ModelPoint, q: &ModelPoint) -> ModelPoint {
    p.iter().zip(q.iter()).map(|(a, b)| a - b).collect()
}

pub(crate) fn vec_scale(t: f64, p: &ModelPoint) -> ModelPoint {
    p.iter().map(|a| t * a).collect()
}

/// Euclidean length, with the squares summed before a single square root so
/// that power-of-two rescaling of the input commutes bitwise with the result.
pub(crate) fn vec_norm(p: &ModelPoint) -> f64 {
    p.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// A metric space together with a field of dilations based at every point
/// of the model.
///
/// Implementations guarantee that `dilate(x, eps, x) == x` and that base
/// points, offsets, and dyadic dilation coefficients produced by the
/// sampling hooks keep all arithmetic exact in double precision.
pub trait DilationStructure: Send + Sync {
    /// Stable identifier used in reports and on the command line.
    fn name(&self) -> &str;

    /// Number of model coordinates.
    fn dim(&self) -> usize;

    /// The distance of the underlying metric space.
    fn distance(&self, p: &ModelPoint, q: &ModelPoint) -> f64;

    /// The dilation of coefficient `eps` based at `x`, applied to `u`.
    ///
    /// Coefficients may exceed one: `dilate(x, 1/eps, .)` inverts
    /// `dilate(x, eps, .)` wherever both sides are defined.
    fn dilate(&self, x: &ModelPoint, eps: f64, u: &ModelPoint) -> ModelPoint;

    /// The limit metric `d^x(u, v)` of the rescaled distances
    /// `(1/eps) d(dilate(x, eps, u), dilate(x, eps, v))`.
    fn tangent_distance(&self, x: &ModelPoint, u: &ModelPoint, v: &ModelPoint) -> f64;

    /// Whether the rescaled distance equals the tangent distance at every
    /// scale, not only in the limit.
    fn is_conical(&self) -> bool;

    /// Radius of the closed ball around each base point on which the
    /// dilation field is exercised.
    fn domain_radius(&self) -> f64 {
        1.0
    }

    /// Constants `(A, B)` for the domain-inclusion check: the ball of
    /// radius `eps` at `x` sits inside `dilate(x, eps, ball(x, A))`, and
    /// dilated unit-ball points remain inside reach `B` of their base.
    fn inclusion_constants(&self) -> (f64, f64) {
        (2.0, 3.0)
    }

    /// The model origin (identity offset).
    fn origin(&self) -> ModelPoint;

    /// Places an offset at a base point; `attach(x, origin) == x` and
    /// offset geometry is preserved:
    /// `distance(attach(x, o), attach(x, o')) == distance(o, o')` measured
    /// from the origin chart.
    fn attach(&self, x: &ModelPoint, offset: &ModelPoint) -> ModelPoint;

    /// Inverse of [`DilationStructure::attach`] in its first argument.
    fn detach(&self, x: &ModelPoint, u: &ModelPoint) -> ModelPoint;

    /// Draws a grid offset with `distance(origin, offset) <= radius`.
    fn random_offset(&self, rng: &mut ChaCha8Rng, radius: f64) -> ModelPoint;

    /// Draws a base point; defaults to a unit-ball grid offset at the origin.
    fn random_base(&self, rng: &mut ChaCha8Rng) -> ModelPoint {
        self.random_offset(rng, self.domain_radius())
    }

    /// Draws a point of the closed metric ball of radius `r` at `x`,
    /// reaching the full ball (not a proper subset) as the sample grows.
    fn random_in_metric_ball(&self, rng: &mut ChaCha8Rng, x: &ModelPoint, r: f64)
        -> ModelPoint;

    /// Deterministic enumeration of the step-`2^-step_bits` offset lattice
    /// inside the metric ball of the given radius at the origin.
    fn lattice_offsets(&self, step_bits: u32, radius: f64) -> Vec<ModelPoint>;

    /// Stated covering radius, in the tangent metric at the origin, of the
    /// unit-radius offset lattice of the given step.
    fn covering_radius(&self, step_bits: u32) -> f64;
}

/// Shared handle to a structure; checks and builders take this form.
pub type SharedStructure = std::sync::Arc<dyn DilationStructure>;
