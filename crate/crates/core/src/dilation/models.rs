//! Concrete dilation structures and the normed groups behind them.
//!
//! Four models ship with the crate: plain Euclidean space, its snowflake
//! reparametrization, a logarithmically perturbed Euclidean metric whose
//! dilations stay affine, and the Heisenberg group with its parabolic
//! dilations and quartic gauge. The first, second, and fourth are exact
//! cones: rescaled distances agree with the tangent distance at every
//! scale, bitwise, whenever inputs come from the dyadic sampling hooks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    point, vec_norm, vec_scale, vec_sub, DilationStructure, ModelPoint, SharedStructure,
};
use crate::error::{Error, Result};
use crate::sampling::{self, GRID_BITS};

const MAX_REJECTION_ROUNDS: usize = 1_000_000;

fn box_lattice(dim: usize, step_bits: u32, coord_range: f64) -> Vec<ModelPoint> {
    let h = (2.0f64).powi(-(step_bits as i32));
    let m = (coord_range / h).ceil() as i64;
    let side = (2 * m + 1) as usize;
    let total = side.pow(dim as u32);
    let mut out = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut p = ModelPoint::new();
        for _ in 0..dim {
            let i = (idx % side) as i64 - m;
            idx /= side;
            p.push(i as f64 * h);
        }
        out.push(p);
    }
    out
}

// ---------------------------------------------------------------------------
// Euclidean space
// ---------------------------------------------------------------------------

/// Euclidean space with the affine dilations `x + eps (u - x)`.
pub struct EuclideanDilation {
    dim: usize,
}

impl EuclideanDilation {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > 4 {
            return Err(Error::Argument(format!(
                "model dimension must be between 1 and 4, got {dim}"
            )));
        }
        Ok(Self { dim })
    }
}

impl DilationStructure for EuclideanDilation {
    fn name(&self) -> &str {
        "euclidean"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn distance(&self, p: &ModelPoint, q: &ModelPoint) -> f64 {
        vec_norm(&vec_sub(p, q))
    }

    fn dilate(&self, x: &ModelPoint, eps: f64, u: &ModelPoint) -> ModelPoint {
        x.iter()
            .zip(u.iter())
            .map(|(a, b)| a + eps * (b - a))
            .collect()
    }

    fn tangent_distance(&self, _x: &ModelPoint, u: &ModelPoint, v: &ModelPoint) -> f64 {
        self.distance(u, v)
    }

    fn is_conical(&self) -> bool {
        true
    }

    fn origin(&self) -> ModelPoint {
        point(&vec![0.0; self.dim])
    }

    fn attach(&self, x: &ModelPoint, offset: &ModelPoint) -> ModelPoint {
        super::vec_add(x, offset)
    }

    fn detach(&self, x: &ModelPoint, u: &ModelPoint) -> ModelPoint {
        vec_sub(u, x)
    }

    fn random_offset(&self, rng: &mut ChaCha8Rng, radius: f64) -> ModelPoint {
        for _ in 0..MAX_REJECTION_ROUNDS {
            let p: ModelPoint = sampling::dyadic_vec(rng, self.dim, GRID_BITS, radius)
                .into_iter()
                .collect();
            if vec_norm(&p) <= radius {
                return p;
            }
        }
        unreachable!("rejection sampling failed for radius {radius}");
    }

    fn random_in_metric_ball(
        &self,
        rng: &mut ChaCha8Rng,
        x: &ModelPoint,
        r: f64,
    ) -> ModelPoint {
        let o = continuous_unit_box(rng, self.dim, |p| vec_norm(p) <= 1.0);
        self.attach(x, &vec_scale(r, &o))
    }

    fn lattice_offsets(&self, step_bits: u32, radius: f64) -> Vec<ModelPoint> {
        box_lattice(self.dim, step_bits, radius)
            .into_iter()
            .filter(|p| vec_norm(p) <= radius)
            .collect()
    }

    fn covering_radius(&self, step_bits: u32) -> f64 {
        // Stated, conservative: nearest-lattice rounding contributes
        // h*sqrt(dim)/2 and clamping back into the ball at most doubles it.
        (2.0f64).powi(-(step_bits as i32)) * (self.dim as f64).sqrt()
    }
}

fn continuous_unit_box(
    rng: &mut ChaCha8Rng,
    dim: usize,
    accept: impl Fn(&ModelPoint) -> bool,
) -> ModelPoint {
    for _ in 0..MAX_REJECTION_ROUNDS {
        let p: ModelPoint = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        if accept(&p) {
            return p;
        }
    }
    unreachable!("continuous rejection sampling failed");
}

// ---------------------------------------------------------------------------
// Snowflake reparametrization
// ---------------------------------------------------------------------------

fn snowflake_norm(alpha: f64, w: &ModelPoint) -> f64 {
    let s: f64 = w.iter().map(|a| a * a).sum();
    if alpha == 0.5 {
        // norm^(1/2) = (sum of squares)^(1/4); two correctly rounded square
        // roots keep power-of-two homogeneity bitwise.
        s.sqrt().sqrt()
    } else {
        s.sqrt().powf(alpha)
    }
}

fn snowflake_factor(alpha: f64, inv_exponent: Option<i32>, eps: f64) -> f64 {
    match inv_exponent {
        Some(k) => eps.powi(k),
        None => eps.powf(1.0 / alpha),
    }
}

/// Euclidean space remetrized as `|u - v|^alpha` with the matching
/// dilations `x + eps^(1/alpha) (u - x)`, so dilations still contract
/// distances linearly in `eps`.
pub struct SnowflakeDilation {
    dim: usize,
    alpha: f64,
    inv_exponent: Option<i32>,
}

impl SnowflakeDilation {
    pub fn new(dim: usize, alpha: f64) -> Result<Self> {
        if dim == 0 || dim > 4 {
            return Err(Error::Argument(format!(
                "model dimension must be between 1 and 4, got {dim}"
            )));
        }
        if !(alpha.is_finite() && alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Argument(format!(
                "snowflake exponent must lie in (0, 1], got {alpha}"
            )));
        }
        let inv = 1.0 / alpha;
        let inv_exponent = if (inv - inv.round()).abs() < 1e-9 {
            Some(inv.round() as i32)
        } else {
            None
        };
        Ok(Self {
            dim,
            alpha,
            inv_exponent,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl DilationStructure for SnowflakeDilation {
    fn name(&self) -> &str {
        "snowflake"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn distance(&self, p: &ModelPoint, q: &ModelPoint) -> f64 {
        snowflake_norm(self.alpha, &vec_sub(p, q))
    }

    fn dilate(&self, x: &ModelPoint, eps: f64, u: &ModelPoint) -> ModelPoint {
        let f = snowflake_factor(self.alpha, self.inv_exponent, eps);
        x.iter().zip(u.iter()).map(|(a, b)| a + f * (b - a)).collect()
    }

    fn tangent_distance(&self, _x: &ModelPoint, u: &ModelPoint, v: &ModelPoint) -> f64 {
        self.distance(u, v)
    }

    fn is_conical(&self) -> bool {
        true
    }

    fn origin(&self) -> ModelPoint {
        point(&vec![0.0; self.dim])
    }

    fn attach(&self, x: &ModelPoint, offset: &ModelPoint) -> ModelPoint {
        super::vec_add(x, offset)
    }

    fn detach(&self, x: &ModelPoint, u: &ModelPoint) -> ModelPoint {
        vec_sub(u, x)
    }

    fn random_offset(&self, rng: &mut ChaCha8Rng, radius: f64) -> ModelPoint {
        let coord_range = radius.powf(1.0 / self.alpha).min(radius.max(1.0));
        for _ in 0..MAX_REJECTION_ROUNDS {
            let p: ModelPoint = sampling::dyadic_vec(rng, self.dim, GRID_BITS, coord_range)
                .into_iter()
                .collect();
            if snowflake_norm(self.alpha, &p) <= radius {
                return p;
            }
        }
        unreachable!("rejection sampling failed for radius {radius}");
    }

    fn random_in_metric_ball(
        &self,
        rng: &mut ChaCha8Rng,
        x: &ModelPoint,
        r: f64,
    ) -> ModelPoint {
        let o = continuous_unit_box(rng, self.dim, |p| vec_norm(p) <= 1.0);
        self.attach(x, &vec_scale(r.powf(1.0 / self.alpha), &o))
    }

    fn lattice_offsets(&self, step_bits: u32, radius: f64) -> Vec<ModelPoint> {
        let coord_range = radius.powf(1.0 / self.alpha);
        box_lattice(self.dim, step_bits, coord_range)
            .into_iter()
            .filter(|p| snowflake_norm(self.alpha, p) <= radius)
            .collect()
    }

    fn covering_radius(&self, step_bits: u32) -> f64 {
        let euclidean = (2.0f64).powi(-(step_bits as i32)) * (self.dim as f64).sqrt();
        euclidean.powf(self.alpha)
    }
}

// ---------------------------------------------------------------------------
// Logarithmically perturbed Euclidean space
// ---------------------------------------------------------------------------

/// Euclidean space remetrized as `log(1 + |u - v|)` while keeping the
/// affine Euclidean dilations. Not a cone: rescaled distances converge to
/// the Euclidean tangent at first order instead of agreeing exactly.
pub struct LogPerturbedEuclidean {
    dim: usize,
}

impl LogPerturbedEuclidean {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > 4 {
            return Err(Error::Argument(format!(
                "model dimension must be between 1 and 4, got {dim}"
            )));
        }
        Ok(Self { dim })
    }
}

impl DilationStructure for LogPerturbedEuclidean {
    fn name(&self) -> &str {
        "log_perturbed"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn distance(&self, p: &ModelPoint, q: &ModelPoint) -> f64 {
        vec_norm(&vec_sub(p, q)).ln_1p()
    }

    fn dilate(&self, x: &ModelPoint, eps: f64, u: &ModelPoint) -> ModelPoint {
        x.iter()
            .zip(u.iter())
            .map(|(a, b)| a + eps * (b - a))
            .collect()
    }

    fn tangent_distance(&self, _x: &ModelPoint, u: &ModelPoint, v: &ModelPoint) -> f64 {
        vec_norm(&vec_sub(u, v))
    }

    fn is_conical(&self) -> bool {
        false
    }

    fn origin(&self) -> ModelPoint {
        point(&vec![0.0; self.dim])
    }

    fn attach(&self, x: &ModelPoint, offset: &ModelPoint) -> ModelPoint {
        super::vec_add(x, offset)
    }

    fn detach(&self, x: &ModelPoint, u: &ModelPoint) -> ModelPoint {
        vec_sub(u, x)
    }

    fn random_offset(&self, rng: &mut ChaCha8Rng, radius: f64) -> ModelPoint {
        let coord_range = radius.exp_m1();
        for _ in 0..MAX_REJECTION_ROUNDS {
            let p: ModelPoint = sampling::dyadic_vec(rng, self.dim, GRID_BITS, coord_range)
                .into_iter()
                .collect();
            if vec_norm(&p).ln_1p() <= radius {
                return p;
            }
        }
        unreachable!("rejection sampling failed for radius {radius}");
    }

    fn random_in_metric_ball(
        &self,
        rng: &mut ChaCha8Rng,
        x: &ModelPoint,
        r: f64,
    ) -> ModelPoint {
        let o = continuous_unit_box(rng, self.dim, |p| vec_norm(p) <= 1.0);
        self.attach(x, &vec_scale(r.exp_m1(), &o))
    }

    fn lattice_offsets(&self, step_bits: u32, radius: f64) -> Vec<ModelPoint> {
        box_lattice(self.dim, step_bits, radius.exp_m1())
            .into_iter()
            .filter(|p| vec_norm(p).ln_1p() <= radius)
            .collect()
    }

    fn covering_radius(&self, step_bits: u32) -> f64 {
        (2.0f64).powi(-(step_bits as i32)) * (self.dim as f64).sqrt()
    }
}

// ---------------------------------------------------------------------------
// Normed groups with dilations
// ---------------------------------------------------------------------------

/// A group with a one-parameter family of automorphisms `group_dilate` and
/// a homogeneous norm; these induce a left-invariant cone metric.
pub trait NormedGroupWithDilations: Send + Sync {
    fn name(&self) -> &'static str;
    fn dim(&self) -> usize;
    fn identity(&self) -> ModelPoint;
    fn mul(&self, p: &ModelPoint, q: &ModelPoint) -> ModelPoint;
    fn inv(&self, p: &ModelPoint) -> ModelPoint;
    /// The dilation automorphism of coefficient `eps` based at the identity.
    fn group_dilate(&self, eps: f64, p: &ModelPoint) -> ModelPoint;
    fn norm(&self, p: &ModelPoint) -> f64;
    /// A grid element with norm at most `radius`.
    fn random_element(&self, rng: &mut ChaCha8Rng, radius: f64) -> ModelPoint;
    /// A continuous (off-grid) element of the closed unit ball.
    fn random_unit_continuous(&self, rng: &mut ChaCha8Rng) -> ModelPoint;
    /// Grid elements of step `2^-step_bits` with norm at most `radius`.
    fn lattice(&self, step_bits: u32, radius: f64) -> Vec<ModelPoint>;
    /// Stated covering radius of the unit-ball lattice of the given step.
    fn covering_radius(&self, step_bits: u32) -> f64;
}

/// The abelian model: vector addition, scalar dilations, Euclidean norm.
pub struct EuclideanGroup {
    pub dim: usize,
}

impl NormedGroupWithDilations for EuclideanGroup {
    fn name(&self) -> &'static str {
        "euclidean"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn identity(&self) -> ModelPoint {
        point(&vec![0.0; self.dim])
    }

    fn mul(&self, p: &ModelPoint, q: &ModelPoint) -> ModelPoint {
        super::vec_add(p, q)
    }

    fn inv(&self, p: &ModelPoint) -> ModelPoint {
        p.iter().map(|a| -a).collect()
    }

    fn group_dilate(&self, eps: f64, p: &ModelPoint) -> ModelPoint {
        vec_scale(eps, p)
    }

    fn norm(&self, p: &ModelPoint) -> f64 {
        vec_norm(p)
    }

    fn random_element(&self, rng: &mut ChaCha8Rng, radius: f64) -> ModelPoint {
        for _ in 0..MAX_REJECTION_ROUNDS {
            let p: ModelPoint = sampling::dyadic_vec(rng, self.dim, GRID_BITS, radius)
                .into_iter()
                .collect();
            if vec_norm(&p) <= radius {
                return p;
            }
        }
        unreachable!("rejection sampling failed for radius {radius}");
    }

    fn random_unit_continuous(&self, rng: &mut ChaCha8Rng) -> ModelPoint {
        continuous_unit_box(rng, self.dim, |p| vec_norm(p) <= 1.0)
    }

    fn lattice(&self, step_bits: u32, radius: f64) -> Vec<ModelPoint> {
        box_lattice(self.dim, step_bits, radius)
            .into_iter()
            .filter(|p| vec_norm(p) <= radius)
            .collect()
    }

    fn covering_radius(&self, step_bits: u32) -> f64 {
        (2.0f64).powi(-(step_bits as i32)) * (self.dim as f64).sqrt()
    }
}

/// Vector addition with the snowflake norm `|p|^alpha` and the matching
/// dilations `eps^(1/alpha) p`.
pub struct SnowflakeGroup {
    pub dim: usize,
    alpha: f64,
    inv_exponent: Option<i32>,
}

impl SnowflakeGroup {
    pub fn new(dim: usize, alpha: f64) -> Result<Self> {
        let probe = SnowflakeDilation::new(dim, alpha)?;
        Ok(Self {
            dim,
            alpha,
            inv_exponent: probe.inv_exponent,
        })
    }
}

impl NormedGroupWithDilations for SnowflakeGroup {
    fn name(&self) -> &'static str {
        "snowflake"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn identity(&self) -> ModelPoint {
        point(&vec![0.0; self.dim])
    }

    fn mul(&self, p: &ModelPoint, q: &ModelPoint) -> ModelPoint {
        super::vec_add(p, q)
    }

    fn inv(&self, p: &ModelPoint) -> ModelPoint {
        p.iter().map(|a| -a).collect()
    }

    fn group_dilate(&self, eps: f64, p: &ModelPoint) -> ModelPoint {
        vec_scale(snowflake_factor(self.alpha, self.inv_exponent, eps), p)
    }

    fn norm(&self, p: &ModelPoint) -> f64 {
        snowflake_norm(self.alpha, p)
    }

    fn random_element(&self, rng: &mut ChaCha8Rng, radius: f64) -> ModelPoint {
        let coord_range = radius.powf(1.0 / self.alpha).min(radius.max(1.0));
        for _ in 0..MAX_REJECTION_ROUNDS {
            let p: ModelPoint = sampling::dyadic_vec(rng, self.dim, GRID_BITS, coord_range)
                .into_iter()
                .collect();
            if snowflake_norm(self.alpha, &p) <= radius {
                return p;
            }
        }
        unreachable!("rejection sampling failed for radius {radius}");
    }

    fn random_unit_continuous(&self, rng: &mut ChaCha8Rng) -> ModelPoint {
        continuous_unit_box(rng, self.dim, |p| vec_norm(p) <= 1.0)
    }

    fn lattice(&self, step_bits: u32, radius: f64) -> Vec<ModelPoint> {
        let coord_range = radius.powf(1.0 / self.alpha);
        box_lattice(self.dim, step_bits, coord_range)
            .into_iter()
            .filter(|p| snowflake_norm(self.alpha, p) <= radius)
            .collect()
    }

    fn covering_radius(&self, step_bits: u32) -> f64 {
        let euclidean = (2.0f64).powi(-(step_bits as i32)) * (self.dim as f64).sqrt();
        euclidean.powf(self.alpha)
    }
}

/// The three-dimensional Heisenberg group: coordinates `(a, b, c)` with
/// product `(a, b, c) (a', b', c') = (a + a', b + b', c + c' + (a b' - a' b)/2)`,
/// parabolic dilations `(eps a, eps b, eps^2 c)`, and the homogeneous gauge
/// `((a^2 + b^2)^2 + 16 c^2)^(1/4)`.
///
/// Grid elements keep `a, b` on the step-`2^-10` grid and `c` on the
/// step-`2^-21` grid, which the product and inverse preserve; all group and
/// gauge arithmetic on such elements is then exact in double precision.
pub struct HeisenbergGroup;

impl HeisenbergGroup {
    fn c_bits() -> u32 {
        2 * GRID_BITS + 1
    }
}

impl NormedGroupWithDilations for HeisenbergGroup {
    fn name(&self) -> &'static str {
        "heisenberg"
    }

    fn dim(&self) -> usize {
        3
    }

    fn identity(&self) -> ModelPoint {
        point(&[0.0, 0.0, 0.0])
    }

    fn mul(&self, p: &ModelPoint, q: &ModelPoint) -> ModelPoint {
        point(&[
            p[0] + q[0],
            p[1] + q[1],
            p[2] + q[2] + (p[0] * q[1] - q[0] * p[1]) / 2.0,
        ])
    }

    fn inv(&self, p: &ModelPoint) -> ModelPoint {
        point(&[-p[0], -p[1], -p[2]])
    }

    fn group_dilate(&self, eps: f64, p: &ModelPoint) -> ModelPoint {
        point(&[eps * p[0], eps * p[1], (eps * eps) * p[2]])
    }

    fn norm(&self, p: &ModelPoint) -> f64 {
        let planar = p[0] * p[0] + p[1] * p[1];
        (planar * planar + 16.0 * p[2] * p[2]).sqrt().sqrt()
    }

    fn random_element(&self, rng: &mut ChaCha8Rng, radius: f64) -> ModelPoint {
        let c_range = radius * radius / 4.0;
        for _ in 0..MAX_REJECTION_ROUNDS {
            let p = point(&[
                sampling::dyadic(rng, GRID_BITS, radius),
                sampling::dyadic(rng, GRID_BITS, radius),
                sampling::dyadic(rng, Self::c_bits(), c_range),
            ]);
            if self.norm(&p) <= radius {
                return p;
            }
        }
        unreachable!("rejection sampling failed for radius {radius}");
    }

    fn random_unit_continuous(&self, rng: &mut ChaCha8Rng) -> ModelPoint {
        for _ in 0..MAX_REJECTION_ROUNDS {
            let p = point(&[
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
                rng.random_range(-0.25..=0.25),
            ]);
            if self.norm(&p) <= 1.0 {
                return p;
            }
        }
        unreachable!("continuous rejection sampling failed");
    }

    fn lattice(&self, step_bits: u32, radius: f64) -> Vec<ModelPoint> {
        let h = (2.0f64).powi(-(step_bits as i32));
        let c_step = h * h / 2.0;
        let n = (radius / h).ceil() as i64;
        let k = (radius * radius / 4.0 / c_step).ceil() as i64;
        let mut out = Vec::new();
        for i in -n..=n {
            for j in -n..=n {
                for l in -k..=k {
                    let p = point(&[i as f64 * h, j as f64 * h, l as f64 * c_step]);
                    if self.norm(&p) <= radius {
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    fn covering_radius(&self, step_bits: u32) -> f64 {
        // Stated, conservative: planar rounding contributes h/sqrt(2) in
        // gauge, the central correction at most h/sqrt(2) more, and
        // clamping back into the ball stays under this bound.
        2.0 * (2.0f64).powi(-(step_bits as i32))
    }
}

// ---------------------------------------------------------------------------
// Cone over a normed group
// ---------------------------------------------------------------------------

/// The dilation structure induced by a normed group with dilations: the
/// left-invariant distance `|p^-1 q|` and the conjugated dilations
/// `x (delta_eps (x^-1 u))`.
pub struct ConicalDilation<G: NormedGroupWithDilations> {
    group: G,
}

impl<G: NormedGroupWithDilations> ConicalDilation<G> {
    pub fn new(group: G) -> Self {
        Self { group }
    }

    pub fn group(&self) -> &G {
        &self.group
    }
}

impl<G: NormedGroupWithDilations> DilationStructure for ConicalDilation<G> {
    fn name(&self) -> &str {
        self.group.name()
    }

    fn dim(&self) -> usize {
        self.group.dim()
    }

    fn distance(&self, p: &ModelPoint, q: &ModelPoint) -> f64 {
        self.group.norm(&self.group.mul(&self.group.inv(p), q))
    }

    fn dilate(&self, x: &ModelPoint, eps: f64, u: &ModelPoint) -> ModelPoint {
        let offset = self.group.mul(&self.group.inv(x), u);
        self.group.mul(x, &self.group.group_dilate(eps, &offset))
    }

    fn tangent_distance(&self, _x: &ModelPoint, u: &ModelPoint, v: &ModelPoint) -> f64 {
        self.distance(u, v)
    }

    fn is_conical(&self) -> bool {
        true
    }

    fn origin(&self) -> ModelPoint {
        self.group.identity()
    }

    fn attach(&self, x: &ModelPoint, offset: &ModelPoint) -> ModelPoint {
        self.group.mul(x, offset)
    }

    fn detach(&self, x: &ModelPoint, u: &ModelPoint) -> ModelPoint {
        self.group.mul(&self.group.inv(x), u)
    }

    fn random_offset(&self, rng: &mut ChaCha8Rng, radius: f64) -> ModelPoint {
        self.group.random_element(rng, radius)
    }

    fn random_in_metric_ball(
        &self,
        rng: &mut ChaCha8Rng,
        x: &ModelPoint,
        r: f64,
    ) -> ModelPoint {
        let o = self.group.random_unit_continuous(rng);
        self.attach(x, &self.group.group_dilate(r, &o))
    }

    fn lattice_offsets(&self, step_bits: u32, radius: f64) -> Vec<ModelPoint> {
        self.group.lattice(step_bits, radius)
    }

    fn covering_radius(&self, step_bits: u32) -> f64 {
        self.group.covering_radius(step_bits)
    }
}

/// The Heisenberg group as a dilation structure.
pub type HeisenbergDilation = ConicalDilation<HeisenbergGroup>;

/// Builds a structure from its command-line name.
///
/// `dim` is ignored for the Heisenberg group (always three coordinates);
/// `alpha` only applies to the snowflake.
pub fn structure_by_name(name: &str, dim: usize, alpha: f64) -> Result<SharedStructure> {
    match name.to_ascii_lowercase().as_str() {
        "euclid" | "euclidean" => Ok(std::sync::Arc::new(EuclideanDilation::new(dim)?)),
        "snowflake" => Ok(std::sync::Arc::new(SnowflakeDilation::new(dim, alpha)?)),
        "logpe" | "log_perturbed" | "log-perturbed" => {
            Ok(std::sync::Arc::new(LogPerturbedEuclidean::new(dim)?))
        }
        "heis" | "heisenberg" => Ok(std::sync::Arc::new(ConicalDilation::new(HeisenbergGroup))),
        other => Err(Error::Argument(format!(
            "unknown structure '{other}'; expected euclidean, snowflake, log_perturbed, or heisenberg"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::seeded;

    fn heis() -> HeisenbergDilation {
        ConicalDilation::new(HeisenbergGroup)
    }

    #[test]
    fn heisenberg_group_laws_hold_exactly_on_grid() {
        let g = HeisenbergGroup;
        let mut rng = seeded(11);
        for _ in 0..200 {
            let p = g.random_element(&mut rng, 1.0);
            let q = g.random_element(&mut rng, 1.0);
            let r = g.random_element(&mut rng, 1.0);
            let left = g.mul(&g.mul(&p, &q), &r);
            let right = g.mul(&p, &g.mul(&q, &r));
            assert_eq!(left, right, "associativity drifted off grid");
            assert_eq!(g.mul(&p, &g.identity()), p);
            assert_eq!(g.mul(&g.inv(&p), &p), g.identity());
        }
    }

    #[test]
    fn heisenberg_gauge_homogeneity_is_bitwise_for_dyadic_scales() {
        let g = HeisenbergGroup;
        let mut rng = seeded(13);
        for _ in 0..500 {
            let p = g.random_element(&mut rng, 1.0);
            for k in 0..=12 {
                let eps = (2.0f64).powi(-k);
                let lhs = g.norm(&g.group_dilate(eps, &p));
                let rhs = eps * g.norm(&p);
                assert_eq!(lhs.to_bits(), rhs.to_bits(), "eps {eps}, p {p:?}");
            }
        }
    }

    #[test]
    fn heisenberg_dilations_are_group_morphisms() {
        let g = HeisenbergGroup;
        let mut rng = seeded(17);
        for _ in 0..200 {
            let p = g.random_element(&mut rng, 1.0);
            let q = g.random_element(&mut rng, 1.0);
            let eps = (2.0f64).powi(-(rng.random_range(0..10i32)));
            let lhs = g.group_dilate(eps, &g.mul(&p, &q));
            let rhs = g.mul(&g.group_dilate(eps, &p), &g.group_dilate(eps, &q));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn euclidean_direct_and_cone_forms_agree_bitwise() {
        let direct = EuclideanDilation::new(3).unwrap();
        let cone = ConicalDilation::new(EuclideanGroup { dim: 3 });
        let mut rng = seeded(19);
        for _ in 0..200 {
            let x = direct.random_base(&mut rng);
            let u = direct.attach(&x, &direct.random_offset(&mut rng, 1.0));
            let v = direct.attach(&x, &direct.random_offset(&mut rng, 1.0));
            let eps = (2.0f64).powi(-(rng.random_range(0..10i32)));
            assert_eq!(direct.dilate(&x, eps, &u), cone.dilate(&x, eps, &u));
            assert_eq!(
                direct.distance(&u, &v).to_bits(),
                cone.distance(&u, &v).to_bits()
            );
        }
    }

    #[test]
    fn snowflake_rescales_distances_exactly_at_half_exponent() {
        let s = SnowflakeDilation::new(2, 0.5).unwrap();
        let mut rng = seeded(23);
        for _ in 0..200 {
            let x = s.random_base(&mut rng);
            let u = s.attach(&x, &s.random_offset(&mut rng, 1.0));
            let v = s.attach(&x, &s.random_offset(&mut rng, 1.0));
            for k in 1..=10 {
                let eps = (2.0f64).powi(-k);
                let lhs = s.distance(&s.dilate(&x, eps, &u), &s.dilate(&x, eps, &v));
                let rhs = eps * s.distance(&u, &v);
                assert_eq!(lhs.to_bits(), rhs.to_bits());
            }
        }
    }

    #[test]
    fn log_perturbed_rescaling_converges_to_the_euclidean_tangent() {
        let s = LogPerturbedEuclidean::new(2).unwrap();
        let x = point(&[0.25, -0.5]);
        let u = point(&[0.75, -0.5]);
        let v = point(&[0.25, 0.25]);
        let target = s.tangent_distance(&x, &u, &v);
        let mut prev = f64::INFINITY;
        for k in 3..=10 {
            let eps = (2.0f64).powi(-k);
            let got =
                s.distance(&s.dilate(&x, eps, &u), &s.dilate(&x, eps, &v)) / eps;
            let err = (got - target).abs();
            assert!(err < prev, "error should shrink monotonically");
            prev = err;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn heisenberg_cone_distance_is_left_invariant_on_grid() {
        let h = heis();
        let g = HeisenbergGroup;
        let mut rng = seeded(29);
        for _ in 0..200 {
            let x = h.random_base(&mut rng);
            let u = g.random_element(&mut rng, 1.0);
            let v = g.random_element(&mut rng, 1.0);
            let lhs = h.distance(&u, &v);
            let rhs = h.distance(&h.attach(&x, &u), &h.attach(&x, &v));
            assert_eq!(lhs.to_bits(), rhs.to_bits());
        }
    }

    #[test]
    fn lattices_contain_the_origin_and_respect_the_radius() {
        let models: Vec<SharedStructure> = vec![
            std::sync::Arc::new(EuclideanDilation::new(2).unwrap()),
            std::sync::Arc::new(SnowflakeDilation::new(2, 0.5).unwrap()),
            std::sync::Arc::new(LogPerturbedEuclidean::new(2).unwrap()),
            std::sync::Arc::new(heis()),
        ];
        for m in &models {
            let lat = m.lattice_offsets(2, 1.0);
            assert!(lat.len() >= 20, "{} lattice too sparse", m.name());
            assert!(lat.contains(&m.origin()));
            for o in &lat {
                assert!(m.distance(&m.origin(), o) <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn random_offsets_stay_in_the_requested_ball() {
        let models: Vec<SharedStructure> = vec![
            std::sync::Arc::new(EuclideanDilation::new(3).unwrap()),
            std::sync::Arc::new(SnowflakeDilation::new(2, 0.5).unwrap()),
            std::sync::Arc::new(LogPerturbedEuclidean::new(2).unwrap()),
            std::sync::Arc::new(heis()),
        ];
        let mut rng = seeded(31);
        for m in &models {
            for _ in 0..200 {
                let o = m.random_offset(&mut rng, 1.0);
                assert!(m.distance(&m.origin(), &o) <= 1.0);
                let b = m.random_in_metric_ball(&mut rng, &m.origin(), 0.5);
                assert!(m.distance(&m.origin(), &b) <= 0.5 + 1e-12);
            }
        }
    }

    #[test]
    fn factory_resolves_names_and_rejects_unknowns() {
        assert_eq!(structure_by_name("euclidean", 2, 0.5).unwrap().dim(), 2);
        assert_eq!(structure_by_name("heisenberg", 7, 0.5).unwrap().dim(), 3);
        assert_eq!(
            structure_by_name("snowflake", 2, 0.5).unwrap().name(),
            "snowflake"
        );
        assert!(structure_by_name("hyperbolic", 2, 0.5).is_err());
        assert!(structure_by_name("snowflake", 2, 1.5).is_err());
        assert!(structure_by_name("euclidean", 0, 0.5).is_err());
    }
}
