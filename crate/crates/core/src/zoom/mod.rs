//! Multi-scale charts of a dilation structure around a base point.
//!
//! A zoom sequence fixes a finite template of offsets inside the unit domain
//! ball, attaches it at a base point `x`, and for every scale `eps` of a
//! decreasing schedule records the relation between the dilated sample
//! `dilate(x, eps, u_i)` (metrized by `(1/eps) d`) and the fixed template
//! pixels (metrized by the tangent distance at `x`). The accuracy of that
//! relation, as a function of `eps`, is the zoom modulus: it vanishes
//! identically on cones and decays linearly on the log-perturbed model.
//!
//! The template is a union of dyadic layers `delta_{2^-j}(L)` of a lattice
//! `L` intersected with the domain ball, plus the origin. Layering keeps the
//! template closed under the dyadic dilations `delta_{2^-m}` (up to the
//! deepest layer), which the composite and foveal constructions in the
//! sibling modules rely on: rescaled template offsets can be matched to
//! template pixels by exact bit comparison instead of nearest-neighbour
//! search.

mod foveal;
mod stability;

pub use foveal::{
    foveal, foveal_fixedpoint_check, FixedpointReport, FovealReport, FovealRow, FovealSequence,
};
pub use stability::{
    cascade_check, composite_map, hausdorff_dmu, scale_stability, viewpoint_difference,
    viewpoint_stability, CascadeReport, CascadeRow, DriftRow, StabilityReport, ViewpointReport,
};

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use smallvec::SmallVec;

use crate::convergence::ConvergenceEstimate;
use crate::dilation::axioms::{check_a3, validate_base, validate_scales};
use crate::dilation::{ModelPoint, SharedStructure};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, SharedSpace};
use crate::relation::{MapQuality, Relation};

/// Number of dyadic refinement layers in the offset template.
pub const TEMPLATE_LAYERS: u32 = 3;

/// Relative tolerance when matching a requested scale against the schedule.
const SCALE_MATCH_TOL: f64 = 1e-12;

/// Construction parameters for [`build_zoom`].
#[derive(Clone, Debug, Serialize)]
pub struct ZoomConfig {
    /// Strictly decreasing scales in `(0, 1]`; dyadic scales keep the chart
    /// arithmetic of the shipped models exact.
    pub schedule: Vec<f64>,
    /// Minimum number of template offsets; the lattice step is halved until
    /// the template reaches this size.
    pub ball_resolution: usize,
    /// Cap on lattice refinement (step `2^-bits`) while growing the template.
    pub max_step_bits: u32,
}

impl Default for ZoomConfig {
    fn default() -> Self {
        Self {
            schedule: crate::convergence::dyadic_schedule(3, 10),
            ball_resolution: 20,
            max_step_bits: 6,
        }
    }
}

/// Bit pattern of an offset, used for exact dedup and lookup. Negative zero
/// is collapsed onto positive zero so that `-0.0` coordinates produced by
/// dilation arithmetic still match.
type OffsetKey = SmallVec<[u64; 4]>;

fn offset_key(o: &ModelPoint) -> OffsetKey {
    o.iter()
        .map(|&c| if c == 0.0 { 0.0f64.to_bits() } else { c.to_bits() })
        .collect()
}

/// A fixed template of offsets attached at a base point, together with the
/// chart relations of every scale in the schedule.
pub struct ZoomSequence {
    structure: SharedStructure,
    base: ModelPoint,
    offsets: Vec<ModelPoint>,
    layer_of: Vec<u32>,
    points: Vec<ModelPoint>,
    map_space: SharedSpace,
    schedule: Vec<f64>,
    relations: Vec<Relation>,
    modulus: Vec<f64>,
    tangent_residual: ConvergenceEstimate,
    step_bits: u32,
    index: HashMap<OffsetKey, usize>,
}

/// Serializable summary of a [`ZoomSequence`].
#[derive(Clone, Debug, Serialize)]
pub struct ZoomReport {
    pub structure: String,
    pub dim: usize,
    pub base: Vec<f64>,
    pub step_bits: u32,
    pub template_size: usize,
    /// Template population per dyadic layer.
    pub layer_sizes: Vec<usize>,
    pub schedule: Vec<f64>,
    /// Chart accuracy per scale, with verdict and fitted decay order.
    pub modulus: ConvergenceEstimate,
    /// Convergence of the rescaled chart metric against the tangent metric.
    pub tangent_residual: ConvergenceEstimate,
}

fn layered_template(
    structure: &SharedStructure,
    step_bits: u32,
) -> (Vec<ModelPoint>, Vec<u32>, HashMap<OffsetKey, usize>) {
    let origin = structure.origin();
    let radius = structure.domain_radius();
    let mut offsets = vec![origin.clone()];
    let mut layer_of = vec![0u32];
    let mut index = HashMap::new();
    index.insert(offset_key(&origin), 0usize);
    let lattice = structure.lattice_offsets(step_bits, radius);
    for layer in 0..=TEMPLATE_LAYERS {
        let scale = (0.5f64).powi(layer as i32);
        for l in &lattice {
            let o = if layer == 0 {
                l.clone()
            } else {
                structure.dilate(&origin, scale, l)
            };
            let key = offset_key(&o);
            if !index.contains_key(&key) {
                index.insert(key, offsets.len());
                offsets.push(o);
                layer_of.push(layer);
            }
        }
    }
    (offsets, layer_of, index)
}

/// Builds the zoom sequence of `structure` around `x`.
///
/// The source space of the relation at scale `eps` carries the rescaled
/// metric `(1/eps) d(dilate(x, eps, u_i), dilate(x, eps, u_j))`; the target
/// is the template metrized by the tangent distance at `x`. Every relation
/// is the identity pairing `u_i -> u_i`, so its accuracy is exactly the
/// worst mismatch between the rescaled chart metric and the tangent metric.
pub fn build_zoom(
    structure: &SharedStructure,
    x: &ModelPoint,
    config: &ZoomConfig,
) -> Result<ZoomSequence> {
    validate_base(structure.as_ref(), x)?;
    validate_scales(&config.schedule)?;
    if config.ball_resolution < 2 {
        return Err(Error::Argument(
            "template needs at least two offsets".into(),
        ));
    }

    let mut step_bits = 1;
    let (mut offsets, mut layer_of, mut index) = layered_template(structure, step_bits);
    while offsets.len() < config.ball_resolution && step_bits < config.max_step_bits {
        step_bits += 1;
        (offsets, layer_of, index) = layered_template(structure, step_bits);
    }
    if offsets.len() < config.ball_resolution {
        return Err(Error::Precondition(format!(
            "template has {} offsets at the finest allowed lattice step, {} requested",
            offsets.len(),
            config.ball_resolution
        )));
    }

    let points: Vec<ModelPoint> = offsets.iter().map(|o| structure.attach(x, o)).collect();
    let labels: Vec<String> = (0..points.len()).map(|i| format!("u{i}")).collect();
    let map_space: SharedSpace = Arc::new(FiniteMetricSpace::from_points(
        labels.clone(),
        &points,
        |a, b| structure.tangent_distance(x, a, b),
    ));

    let mut relations = Vec::with_capacity(config.schedule.len());
    let mut modulus = Vec::with_capacity(config.schedule.len());
    for &eps in &config.schedule {
        let dilated: Vec<ModelPoint> = points.iter().map(|u| structure.dilate(x, eps, u)).collect();
        let src = Arc::new(FiniteMetricSpace::from_points(
            labels.clone(),
            &dilated,
            |a, b| structure.distance(a, b) / eps,
        ));
        let pairs = (0..points.len())
            .map(|i| (crate::metric::PointId(i), crate::metric::PointId(i)))
            .collect();
        let rel = Relation::new(src, map_space.clone(), pairs)?;
        modulus.push(rel.quality().accuracy);
        relations.push(rel);
    }

    let tangent_residual = check_a3(structure.as_ref(), x, &points, &config.schedule, true)?.estimate;

    Ok(ZoomSequence {
        structure: structure.clone(),
        base: x.clone(),
        offsets,
        layer_of,
        points,
        map_space,
        schedule: config.schedule.clone(),
        relations,
        modulus,
        tangent_residual,
        step_bits,
        index,
    })
}

impl ZoomSequence {
    pub fn structure(&self) -> &SharedStructure {
        &self.structure
    }

    pub fn base(&self) -> &ModelPoint {
        &self.base
    }

    /// Template offsets; index 0 is always the origin offset.
    pub fn offsets(&self) -> &[ModelPoint] {
        &self.offsets
    }

    /// Template offsets attached at the base point.
    pub fn points(&self) -> &[ModelPoint] {
        &self.points
    }

    pub fn layer_of(&self) -> &[u32] {
        &self.layer_of
    }

    pub fn map_space(&self) -> &SharedSpace {
        &self.map_space
    }

    pub fn schedule(&self) -> &[f64] {
        &self.schedule
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// Chart accuracy at each scale of the schedule.
    pub fn modulus(&self) -> &[f64] {
        &self.modulus
    }

    pub fn tangent_residual(&self) -> &ConvergenceEstimate {
        &self.tangent_residual
    }

    pub fn step_bits(&self) -> u32 {
        self.step_bits
    }

    pub fn template_len(&self) -> usize {
        self.offsets.len()
    }

    /// Index of an offset in the template, by exact bit comparison.
    pub fn lookup_offset(&self, o: &ModelPoint) -> Option<usize> {
        self.index.get(&offset_key(o)).copied()
    }

    pub(crate) fn scale_index(&self, eps: f64) -> Result<usize> {
        self.schedule
            .iter()
            .position(|&s| (s - eps).abs() <= SCALE_MATCH_TOL * s)
            .ok_or_else(|| {
                Error::Argument(format!("scale {eps} is not part of the zoom schedule"))
            })
    }

    pub fn relation_at(&self, eps: f64) -> Result<&Relation> {
        Ok(&self.relations[self.scale_index(eps)?])
    }

    /// Chart accuracy at an arbitrary scale in `(0, 1]`, computed directly
    /// from the template without materializing a relation.
    pub fn modulus_at(&self, eps: f64) -> Result<f64> {
        if !(eps.is_finite() && eps > 0.0 && eps <= 1.0) {
            return Err(Error::Argument(format!(
                "dilation coefficient {eps} must lie in (0, 1]"
            )));
        }
        let dilated: Vec<ModelPoint> = self
            .points
            .iter()
            .map(|u| self.structure.dilate(&self.base, eps, u))
            .collect();
        let mut worst = 0.0f64;
        for i in 0..dilated.len() {
            for j in (i + 1)..dilated.len() {
                let chart = self.structure.distance(&dilated[i], &dilated[j]) / eps;
                let tangent = self
                    .map_space
                    .dist(crate::metric::PointId(i), crate::metric::PointId(j));
                worst = worst.max((chart - tangent).abs());
            }
        }
        Ok(worst)
    }

    pub fn report(&self) -> ZoomReport {
        let layers = (self.layer_of.iter().copied().max().unwrap_or(0) + 1) as usize;
        let mut layer_sizes = vec![0usize; layers];
        for &l in &self.layer_of {
            layer_sizes[l as usize] += 1;
        }
        let modulus =
            ConvergenceEstimate::from_residuals(self.schedule.clone(), self.modulus.clone())
                .expect("schedule and modulus table are built together");
        ZoomReport {
            structure: self.structure.name().to_string(),
            dim: self.structure.dim(),
            base: self.base.to_vec(),
            step_bits: self.step_bits,
            template_size: self.offsets.len(),
            layer_sizes,
            schedule: self.schedule.clone(),
            modulus,
            tangent_residual: self.tangent_residual.clone(),
        }
    }
}

/// Quality functionals of the chart relation at a scheduled scale.
pub fn zoom_quality(zoom: &ZoomSequence, eps: f64) -> Result<MapQuality> {
    Ok(zoom.relation_at(eps)?.quality())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::structure_by_name;

    fn zoom_for(name: &str, bits: u32) -> ZoomSequence {
        let s = structure_by_name(name, 2, 0.5).unwrap();
        let x = s.origin();
        let cfg = ZoomConfig {
            schedule: crate::convergence::dyadic_schedule(1, 6),
            ball_resolution: 20,
            max_step_bits: bits,
        };
        build_zoom(&s, &x, &cfg).unwrap()
    }

    #[test]
    fn template_is_deduplicated_and_keeps_the_origin_first() {
        let z = zoom_for("euclidean", 3);
        assert_eq!(z.offsets()[0], z.structure().origin());
        let mut keys: Vec<_> = z.offsets().iter().map(offset_key).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), z.template_len());
        assert!(z.template_len() >= 20);
        // Every offset stays inside the domain ball.
        let x = z.base().clone();
        for u in z.points() {
            assert!(z.structure().distance(&x, u) <= z.structure().domain_radius() + 1e-12);
        }
    }

    #[test]
    fn template_layers_are_closed_under_halving() {
        for name in ["euclidean", "heisenberg"] {
            let z = zoom_for(name, 2);
            let origin = z.structure().origin();
            for (i, o) in z.offsets().iter().enumerate() {
                if z.layer_of()[i] + 1 <= TEMPLATE_LAYERS {
                    let half = z.structure().dilate(&origin, 0.5, o);
                    assert!(
                        z.lookup_offset(&half).is_some(),
                        "{name}: halving offset {i} leaves the template"
                    );
                }
            }
        }
    }

    #[test]
    fn cone_charts_have_identically_zero_modulus() {
        for name in ["euclidean", "snowflake", "heisenberg"] {
            let z = zoom_for(name, 2);
            for (k, &m) in z.modulus().iter().enumerate() {
                assert_eq!(m, 0.0, "{name}: nonzero modulus at scale index {k}");
            }
            assert!(z.tangent_residual().converges());
        }
    }

    #[test]
    fn log_perturbed_modulus_decays_at_first_order() {
        let z = zoom_for("log_perturbed", 3);
        let report = z.report();
        assert!(report.modulus.converges());
        assert!(
            (report.modulus.fitted_order - 1.0).abs() < 0.2,
            "fitted order {}",
            report.modulus.fitted_order
        );
        // The modulus is positive at the coarsest scale: the chart metric
        // genuinely differs from its tangent limit.
        assert!(z.modulus()[0] > 1e-6);
    }

    #[test]
    fn zoom_quality_matches_the_stored_modulus_and_rejects_foreign_scales() {
        let z = zoom_for("log_perturbed", 2);
        let q = zoom_quality(&z, 0.5).unwrap();
        assert_eq!(q.accuracy, z.modulus()[0]);
        // Identity pairing: literal precision and resolution vanish.
        assert_eq!(q.precision, 0.0);
        assert_eq!(q.resolution, 0.0);
        assert!(zoom_quality(&z, 0.3).is_err());
    }

    #[test]
    fn modulus_at_agrees_with_the_scheduled_table() {
        let z = zoom_for("log_perturbed", 2);
        for (k, &eps) in z.schedule().iter().enumerate() {
            assert_eq!(z.modulus_at(eps).unwrap(), z.modulus()[k]);
        }
        assert!(z.modulus_at(0.0).is_err());
        assert!(z.modulus_at(1.5).is_err());
    }

    #[test]
    fn too_demanding_resolution_is_a_precondition_error() {
        let s = structure_by_name("euclidean", 1, 0.5).unwrap();
        let cfg = ZoomConfig {
            schedule: vec![0.5],
            ball_resolution: 100_000,
            max_step_bits: 2,
        };
        match build_zoom(&s, &s.origin(), &cfg) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("template")),
            Err(other) => panic!("expected a precondition error, got {other:?}"),
            Ok(_) => panic!("expected a precondition error, got a zoom sequence"),
        }
    }
}
