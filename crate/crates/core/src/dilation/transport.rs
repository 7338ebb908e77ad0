//! Transport of a dilation structure along a map, and magnification.
//!
//! Pulling a structure back along an invertible map yields a new structure
//! whose metric and dilation field are the conjugates of the originals.
//! Magnification is the special case of conjugating by one fixed dilation
//! and rescaling the metric to match: the structure "as seen" at a chosen
//! base point and scale.

use rand_chacha::ChaCha8Rng;

use super::{DilationStructure, ModelPoint, SharedStructure};
use crate::error::{Error, Result};
use crate::sampling;

/// Point map used to move a structure between charts.
pub type MapFn = Box<dyn Fn(&ModelPoint) -> ModelPoint + Send + Sync>;

/// How far the forward/backward pair may fail to round-trip before
/// [`transport`] refuses the map.
pub const ROUNDTRIP_TOL: f64 = 1e-9;

/// The pullback of `target` along `forward` (with inverse `backward`):
/// distances and dilations are measured after pushing points forward.
pub struct TransportedStructure {
    target: SharedStructure,
    forward: MapFn,
    backward: MapFn,
    label: String,
}

/// Builds the pullback structure, first spot-checking on sampled points
/// that `forward` and `backward` actually invert each other.
pub fn transport(
    target: SharedStructure,
    forward: MapFn,
    backward: MapFn,
    spot_checks: usize,
    seed: u64,
) -> Result<TransportedStructure> {
    let mut rng = sampling::seeded(seed);
    for _ in 0..spot_checks.max(1) {
        let y = target.random_base(&mut rng);
        let roundtrip = forward(&backward(&y));
        let err = target.distance(&roundtrip, &y);
        if !(err <= ROUNDTRIP_TOL) {
            return Err(Error::Argument(format!(
                "map and inverse fail to round-trip: distance {err:.3e} at {y:?}"
            )));
        }
    }
    let label = format!("transport({})", target.name());
    Ok(TransportedStructure {
        target,
        forward,
        backward,
        label,
    })
}

impl DilationStructure for TransportedStructure {
    fn name(&self) -> &str {
        &self.label
    }

    fn dim(&self) -> usize {
        self.target.dim()
    }

    fn distance(&self, p: &ModelPoint, q: &ModelPoint) -> f64 {
        self.target.distance(&(self.forward)(p), &(self.forward)(q))
    }

    fn dilate(&self, x: &ModelPoint, eps: f64, u: &ModelPoint) -> ModelPoint {
        let image = self
            .target
            .dilate(&(self.forward)(x), eps, &(self.forward)(u));
        (self.backward)(&image)
    }

    fn tangent_distance(&self, x: &ModelPoint, u: &ModelPoint, v: &ModelPoint) -> f64 {
        self.target
            .tangent_distance(&(self.forward)(x), &(self.forward)(u), &(self.forward)(v))
    }

    fn is_conical(&self) -> bool {
        self.target.is_conical()
    }

    fn domain_radius(&self) -> f64 {
        self.target.domain_radius()
    }

    fn inclusion_constants(&self) -> (f64, f64) {
        self.target.inclusion_constants()
    }

    fn origin(&self) -> ModelPoint {
        (self.backward)(&self.target.origin())
    }

    fn attach(&self, x: &ModelPoint, offset: &ModelPoint) -> ModelPoint {
        (self.backward)(&self.target.attach(&(self.forward)(x), offset))
    }

    fn detach(&self, x: &ModelPoint, u: &ModelPoint) -> ModelPoint {
        self.target.detach(&(self.forward)(x), &(self.forward)(u))
    }

    fn random_offset(&self, rng: &mut ChaCha8Rng, radius: f64) -> ModelPoint {
        self.target.random_offset(rng, radius)
    }

    fn random_base(&self, rng: &mut ChaCha8Rng) -> ModelPoint {
        (self.backward)(&self.target.random_base(rng))
    }

    fn random_in_metric_ball(
        &self,
        rng: &mut ChaCha8Rng,
        x: &ModelPoint,
        r: f64,
    ) -> ModelPoint {
        (self.backward)(&self.target.random_in_metric_ball(rng, &(self.forward)(x), r))
    }

    fn lattice_offsets(&self, step_bits: u32, radius: f64) -> Vec<ModelPoint> {
        self.target.lattice_offsets(step_bits, radius)
    }

    fn covering_radius(&self, step_bits: u32) -> f64 {
        self.target.covering_radius(step_bits)
    }
}

/// The structure magnified at `x0` by the scale `eps0`: points are pushed
/// through `dilate(x0, eps0, .)`, distances divided by `eps0`, and the
/// dilation field conjugated accordingly. With dyadic `eps0`, exact models
/// stay exact.
pub struct MagnifiedDilation {
    inner: SharedStructure,
    x0: ModelPoint,
    eps0: f64,
    label: String,
}

impl MagnifiedDilation {
    pub fn new(inner: SharedStructure, x0: ModelPoint, eps0: f64) -> Result<Self> {
        if x0.len() != inner.dim() {
            return Err(Error::Argument(format!(
                "magnification center has {} coordinates, structure '{}' expects {}",
                x0.len(),
                inner.name(),
                inner.dim()
            )));
        }
        if !(eps0.is_finite() && eps0 > 0.0 && eps0 <= 1.0) {
            return Err(Error::Argument(format!(
                "magnification scale {eps0} must lie in (0, 1]"
            )));
        }
        let label = format!("magnified({})", inner.name());
        Ok(Self {
            inner,
            x0,
            eps0,
            label,
        })
    }

    fn push(&self, p: &ModelPoint) -> ModelPoint {
        self.inner.dilate(&self.x0, self.eps0, p)
    }

    fn pull(&self, p: &ModelPoint) -> ModelPoint {
        self.inner.dilate(&self.x0, 1.0 / self.eps0, p)
    }
}

impl DilationStructure for MagnifiedDilation {
    fn name(&self) -> &str {
        &self.label
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn distance(&self, p: &ModelPoint, q: &ModelPoint) -> f64 {
        self.inner.distance(&self.push(p), &self.push(q)) / self.eps0
    }

    fn dilate(&self, x: &ModelPoint, eps: f64, u: &ModelPoint) -> ModelPoint {
        self.pull(&self.inner.dilate(&self.push(x), eps, &self.push(u)))
    }

    fn tangent_distance(&self, x: &ModelPoint, u: &ModelPoint, v: &ModelPoint) -> f64 {
        self.inner
            .tangent_distance(&self.push(x), &self.push(u), &self.push(v))
            / self.eps0
    }

    fn is_conical(&self) -> bool {
        self.inner.is_conical()
    }

    fn domain_radius(&self) -> f64 {
        self.inner.domain_radius()
    }

    fn inclusion_constants(&self) -> (f64, f64) {
        self.inner.inclusion_constants()
    }

    fn origin(&self) -> ModelPoint {
        self.inner.origin()
    }

    fn attach(&self, x: &ModelPoint, offset: &ModelPoint) -> ModelPoint {
        let scaled = self
            .inner
            .dilate(&self.inner.origin(), self.eps0, offset);
        self.pull(&self.inner.attach(&self.push(x), &scaled))
    }

    fn detach(&self, x: &ModelPoint, u: &ModelPoint) -> ModelPoint {
        let offset = self.inner.detach(&self.push(x), &self.push(u));
        self.inner.dilate(&self.inner.origin(), 1.0 / self.eps0, &offset)
    }

    fn random_offset(&self, rng: &mut ChaCha8Rng, radius: f64) -> ModelPoint {
        // The magnified norm of an offset can exceed its inner norm (the
        // rescaled metric sits closer to the tangent), so resample until
        // the offset fits in the *magnified* ball. The inner ball always
        // contains it for the shipped models.
        let origin = self.origin();
        for _ in 0..10_000 {
            let o = self.inner.random_offset(rng, radius);
            let norm = self.distance(&self.attach(&origin, &o), &origin);
            if norm <= radius {
                return o;
            }
        }
        unreachable!("magnified offset sampling failed for radius {radius}");
    }

    fn random_base(&self, rng: &mut ChaCha8Rng) -> ModelPoint {
        self.pull(&self.inner.random_base(rng))
    }

    fn random_in_metric_ball(
        &self,
        rng: &mut ChaCha8Rng,
        x: &ModelPoint,
        r: f64,
    ) -> ModelPoint {
        self.pull(
            &self
                .inner
                .random_in_metric_ball(rng, &self.push(x), r * self.eps0),
        )
    }

    fn lattice_offsets(&self, step_bits: u32, radius: f64) -> Vec<ModelPoint> {
        self.inner.lattice_offsets(step_bits, radius)
    }

    fn covering_radius(&self, step_bits: u32) -> f64 {
        self.inner.covering_radius(step_bits)
    }
}

/// Largest disagreement between two same-dimension structures on sampled
/// points: distance tables and dilation images are both compared, the
/// latter measured in `a`'s metric.
pub fn structure_agreement(
    a: &dyn DilationStructure,
    b: &dyn DilationStructure,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Argument(format!(
            "cannot compare structures of dimension {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let mut rng = sampling::seeded(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples.max(1) {
        let x = a.random_base(&mut rng);
        let u = a.attach(&x, &a.random_offset(&mut rng, a.domain_radius()));
        let v = a.attach(&x, &a.random_offset(&mut rng, a.domain_radius()));
        worst = worst.max((a.distance(&u, &v) - b.distance(&u, &v)).abs());
        for k in [1i32, 3, 6, 9] {
            let eps = (2.0f64).powi(-k);
            let pa = a.dilate(&x, eps, &u);
            let pb = b.dilate(&x, eps, &u);
            worst = worst.max(a.distance(&pa, &pb));
        }
    }
    Ok(worst)
}

/// Residuals of the linearity laws tying dilations to the induced
/// tangent operations.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct LinearityResidual {
    /// `dilate(x, mu, sum(u, v))` versus `sum(dilate(x, mu, u), dilate(x, mu, v))`.
    pub morphism: f64,
    /// Tangent-distance homogeneity:
    /// `tangent(dilate(x, mu, u), dilate(x, mu, v))` versus `mu * tangent(u, v)`.
    pub homothety: f64,
}

impl LinearityResidual {
    pub fn max(&self) -> f64 {
        self.morphism.max(self.homothety)
    }
}

/// Measures how linear the finite-scale sum is under dilations based at
/// the same point.
pub fn linearity_residual(
    structure: &dyn DilationStructure,
    x: &ModelPoint,
    eps: f64,
    mu: f64,
    samples: usize,
    seed: u64,
) -> Result<LinearityResidual> {
    if !(eps.is_finite() && eps > 0.0 && eps <= 1.0) || !(mu.is_finite() && mu > 0.0 && mu <= 1.0)
    {
        return Err(Error::Argument(format!(
            "scales must lie in (0, 1], got eps {eps} and mu {mu}"
        )));
    }
    let mut rng = sampling::seeded(seed);
    let radius = structure.domain_radius();
    let mut morphism = 0.0f64;
    let mut homothety = 0.0f64;
    for _ in 0..samples.max(1) {
        let u = structure.attach(x, &structure.random_offset(&mut rng, radius));
        let v = structure.attach(x, &structure.random_offset(&mut rng, radius));

        let du = structure.dilate(x, mu, &u);
        let dv = structure.dilate(x, mu, &v);
        let summed = super::tangent_sum(structure, x, eps, &u, &v)?;
        let lhs = structure.dilate(x, mu, &summed);
        let rhs = super::tangent_sum(structure, x, eps, &du, &dv)?;
        morphism = morphism.max(structure.distance(&lhs, &rhs));

        let scaled = structure.tangent_distance(x, &du, &dv);
        homothety = homothety.max((scaled - mu * structure.tangent_distance(x, &u, &v)).abs());
    }
    Ok(LinearityResidual {
        morphism,
        homothety,
    })
}
