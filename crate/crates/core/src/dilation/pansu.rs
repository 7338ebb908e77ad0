//! Derivative residuals for maps between dilation structures.
//!
//! A candidate derivative at a base point is a map that intertwines the
//! dilations of the source and target. The residual at scale `eps`
//! measures, after rescaling by `1/eps`, how far the map is from its
//! candidate derivative on the dilated unit ball; the residual table then
//! certifies differentiability (decay) or rules it out (growth).

use serde::{Deserialize, Serialize};

use super::models::{ConicalDilation, EuclideanDilation, HeisenbergGroup};
use super::transport::MapFn;
use super::{point, ModelPoint, SharedStructure};
use crate::convergence::ConvergenceEstimate;
use crate::error::{Error, Result};
use crate::sampling;

/// Largest allowed intertwining defect before a candidate derivative is
/// rejected outright.
pub const MORPHISM_TOL: f64 = 1e-9;

/// A map between structures together with a candidate derivative at a
/// chosen base point.
pub struct PansuMap {
    pub label: String,
    pub source: SharedStructure,
    pub target: SharedStructure,
    /// Base point of the differentiation, in the source model.
    pub base: ModelPoint,
    forward: MapFn,
    derivative: MapFn,
}

impl PansuMap {
    pub fn new(
        label: impl Into<String>,
        source: SharedStructure,
        target: SharedStructure,
        base: ModelPoint,
        forward: MapFn,
        derivative: MapFn,
    ) -> Result<Self> {
        if base.len() != source.dim() {
            return Err(Error::Argument(format!(
                "base point has {} coordinates, source structure expects {}",
                base.len(),
                source.dim()
            )));
        }
        Ok(Self {
            label: label.into(),
            source,
            target,
            base,
            forward,
            derivative,
        })
    }

    pub fn forward(&self, p: &ModelPoint) -> ModelPoint {
        (self.forward)(p)
    }

    pub fn derivative(&self, p: &ModelPoint) -> ModelPoint {
        (self.derivative)(p)
    }
}

/// Residual table of a map against its candidate derivative.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PansuReport {
    pub map: String,
    pub base: Vec<f64>,
    /// Worst intertwining defect of the candidate derivative (always at
    /// most [`MORPHISM_TOL`], otherwise the check refuses to run).
    pub morphism_residual: f64,
    pub estimate: ConvergenceEstimate,
}

/// Measures `(1/eps) dbar(f(dilate(x, eps, u)), dilate(f(x), eps, L(u)))`
/// over sampled unit-ball points `u`, after verifying that `L` is a
/// conical morphism (it must send base to image and intertwine the two
/// dilation fields).
pub fn pansu_residual(
    map: &PansuMap,
    schedule: &[f64],
    samples: usize,
    seed: u64,
) -> Result<PansuReport> {
    if schedule.is_empty() {
        return Err(Error::Argument("empty scale schedule".into()));
    }
    if samples == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    let src = map.source.as_ref();
    let dst = map.target.as_ref();
    let x = &map.base;
    let fx = map.forward(x);
    let lx = map.derivative(x);

    let mut rng = sampling::seeded(seed);
    let probes: Vec<ModelPoint> = (0..samples)
        .map(|_| src.attach(x, &src.random_offset(&mut rng, src.domain_radius())))
        .collect();

    // The candidate must send the base to the image point and commute with
    // the dilations; otherwise the residual table would be meaningless.
    let mut morphism_residual = dst.distance(&lx, &fx);
    for u in &probes {
        let lu = map.derivative(u);
        for &eps in schedule {
            let lhs = map.derivative(&src.dilate(x, eps, u));
            let rhs = dst.dilate(&lx, eps, &lu);
            morphism_residual = morphism_residual.max(dst.distance(&lhs, &rhs));
        }
    }
    if !(morphism_residual <= MORPHISM_TOL) {
        return Err(Error::Argument(format!(
            "candidate derivative of '{}' is not a conical morphism (defect {morphism_residual:.3e})",
            map.label
        )));
    }

    let mut residuals = Vec::with_capacity(schedule.len());
    for &eps in schedule {
        let mut worst = 0.0f64;
        for u in &probes {
            let through_map = map.forward(&src.dilate(x, eps, u));
            let through_derivative = dst.dilate(&fx, eps, &map.derivative(u));
            worst = worst.max(dst.distance(&through_map, &through_derivative) / eps);
        }
        residuals.push(worst);
    }
    let estimate = ConvergenceEstimate::from_residuals(schedule.to_vec(), residuals)?;

    Ok(PansuReport {
        map: map.label.clone(),
        base: x.to_vec(),
        morphism_residual,
        estimate,
    })
}

/// The built-in example maps: `linear` (an exactly dyadic matrix on the
/// plane), `smooth` (a curved planar map with its affine derivative), and
/// `shear` (a vertical shear of the Heisenberg group, which is Lipschitz
/// but not differentiable in this sense).
pub fn pansu_map_by_name(name: &str, base: Option<ModelPoint>) -> Result<PansuMap> {
    match name.to_ascii_lowercase().as_str() {
        "linear" => {
            let plane: SharedStructure =
                std::sync::Arc::new(EuclideanDilation::new(2)?);
            let base = base.unwrap_or_else(|| point(&[0.25, -0.5]));
            let apply = |p: &ModelPoint| -> ModelPoint {
                point(&[0.75 * p[0] + 0.25 * p[1], -0.5 * p[0] + 0.5 * p[1]])
            };
            PansuMap::new(
                "linear",
                plane.clone(),
                plane,
                base,
                Box::new(apply),
                Box::new(apply),
            )
        }
        "smooth" => {
            let plane: SharedStructure =
                std::sync::Arc::new(EuclideanDilation::new(2)?);
            let base = base.unwrap_or_else(|| point(&[0.25, -0.5]));
            let forward =
                |p: &ModelPoint| -> ModelPoint { point(&[p[0].sin(), p[1] + p[0] * p[0]]) };
            let (bx, by) = (base[0], base[1]);
            let fx = forward(&base);
            let derivative = move |p: &ModelPoint| -> ModelPoint {
                let (du, dv) = (p[0] - bx, p[1] - by);
                point(&[fx[0] + bx.cos() * du, fx[1] + 2.0 * bx * du + dv])
            };
            PansuMap::new(
                "smooth",
                plane.clone(),
                plane,
                base,
                Box::new(forward),
                Box::new(derivative),
            )
        }
        "shear" => {
            let heis: SharedStructure =
                std::sync::Arc::new(ConicalDilation::new(HeisenbergGroup));
            let base = base.unwrap_or_else(|| point(&[0.0, 0.0, 0.0]));
            if base[0] != 0.0 {
                return Err(Error::Argument(
                    "the shear's identity candidate only matches the map where the first \
                     coordinate vanishes; pick a base with first coordinate zero"
                        .into(),
                ));
            }
            let forward =
                |p: &ModelPoint| -> ModelPoint { point(&[p[0], p[1], p[2] + p[0]]) };
            let derivative = |p: &ModelPoint| -> ModelPoint { p.clone() };
            PansuMap::new(
                "shear",
                heis.clone(),
                heis,
                base,
                Box::new(forward),
                Box::new(derivative),
            )
        }
        other => Err(Error::Argument(format!(
            "unknown map '{other}'; expected linear, smooth, or shear"
        ))),
    }
}
