//! Stability of zoom charts under composition of scales and change of
//! viewpoint.
//!
//! The composite map at scales `(eps, mu)` reads the fine chart at `eps*mu`
//! through the coarse chart at `eps`: a pixel `u_j` whose compressed offset
//! `delta_mu o_j` is itself a template offset appears in the coarse chart at
//! the position of that compressed pixel. Its accuracy obeys the cascade
//! inequality `acc <= (1/mu) F(eps) + F(eps*mu)` up to an explicit floating
//! point allowance, where `F` is the zoom modulus.
//!
//! Changing the viewpoint moves the base point to `x1 = dilate(x, eps, u')`.
//! Matching pixels through the offset translation `o -> o' * o` identifies
//! the two charts; on the shipped models the identification is an exact
//! isometry and every residual below is bitwise zero.

use std::sync::Arc;

use serde::Serialize;

use crate::convergence::ConvergenceEstimate;
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, PointId};
use crate::relation::Relation;

use super::ZoomSequence;

/// Floating point allowance added to the cascade bound.
pub const CASCADE_TOL: f64 = 1e-9;

/// One scale of [`cascade_check`].
#[derive(Clone, Debug, Serialize)]
pub struct CascadeRow {
    pub eps: f64,
    /// Accuracy of the composite map at `(eps, mu)`.
    pub measured: f64,
    /// `(1/mu) F(eps) + F(eps*mu) + CASCADE_TOL`.
    pub bound: f64,
    pub holds: bool,
}

/// Cascade inequality across the whole schedule.
#[derive(Clone, Debug, Serialize)]
pub struct CascadeReport {
    pub mu: f64,
    pub rows: Vec<CascadeRow>,
    pub ok: bool,
}

/// One scale of the stage-drift table of [`scale_stability`].
#[derive(Clone, Debug, Serialize)]
pub struct DriftRow {
    pub eps: f64,
    /// `max |D_eps - D_{eps*mu}|` over template pairs, where `D_s` is the
    /// rescaled chart metric at scale `s`.
    pub drift: f64,
    /// Sound bound `F(eps) + F(eps*mu) + CASCADE_TOL`.
    pub bound: f64,
    pub holds: bool,
}

/// Report of [`scale_stability`].
#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub mu: f64,
    /// Accuracy of the composite map per scheduled scale.
    pub composite_modulus: ConvergenceEstimate,
    /// Stage drift per scheduled scale.
    pub drift: ConvergenceEstimate,
    pub drift_rows: Vec<DriftRow>,
    /// Informational threshold `3 F(finest) + tangent residual(finest)`;
    /// models whose modulus genuinely decays with the scale exceed it at
    /// coarse scales, so it does not gate `ok`.
    pub reference_threshold: f64,
    pub within_reference: bool,
    /// Accuracy of the limit relation (compressed tangent pixels against
    /// plain pixels); exactly zero whenever the tangent dilations are exact
    /// homotheties.
    pub limit_accuracy: f64,
    /// Pixels whose compressed offset is again a template offset.
    pub surviving_pixels: usize,
    pub ok: bool,
}

/// Report of [`viewpoint_stability`].
#[derive(Clone, Debug, Serialize)]
pub struct ViewpointReport {
    /// Offset of the new viewpoint in the chart of the old one.
    pub offset: Vec<f64>,
    /// Pixels matched through the offset translation.
    pub matched_pixels: usize,
    /// Worst tangent-distance mismatch across matched pixel pairs.
    pub isometry_residual: f64,
    /// Worst rescaled-chart mismatch per scheduled scale.
    pub chart_residuals: ConvergenceEstimate,
    pub ok: bool,
}

pub(crate) fn validate_mu(mu: f64) -> Result<()> {
    if !(mu.is_finite() && mu > 0.0 && mu < 1.0) {
        return Err(Error::Argument(format!(
            "scale ratio {mu} must lie in (0, 1)"
        )));
    }
    Ok(())
}

/// Pixels surviving compression by `mu`: pairs `(j, i)` with
/// `delta_mu o_j = o_i` as exact bit patterns.
pub(crate) fn surviving_pixels(zoom: &ZoomSequence, mu: f64) -> Vec<(usize, usize)> {
    let origin = zoom.structure().origin();
    let mut matched = Vec::new();
    for (j, o) in zoom.offsets().iter().enumerate() {
        let compressed = zoom.structure().dilate(&origin, mu, o);
        if let Some(i) = zoom.lookup_offset(&compressed) {
            matched.push((j, i));
        }
    }
    matched
}

/// Builds the composite map at `(eps, mu)`: the fine chart at `eps*mu` read
/// through the coarse chart at `eps`. The source carries the doubly rescaled
/// metric `(1/(eps*mu)) d`; the target is the template. `eps` must be part
/// of the schedule.
pub fn composite_map(zoom: &ZoomSequence, eps: f64, mu: f64) -> Result<Relation> {
    validate_mu(mu)?;
    let k = zoom.scale_index(eps)?;
    let matched = surviving_pixels(zoom, mu);
    if matched.len() < 2 {
        return Err(Error::Precondition(format!(
            "only {} template pixels survive compression by {mu}",
            matched.len()
        )));
    }
    // Source points: stage-eps positions of the compressed pixels. The chart
    // relation at eps already carries (1/eps) d, so a further 1/mu rescale
    // yields (1/(eps*mu)) d on exactly those points.
    let coarse: Vec<PointId> = matched.iter().map(|&(_, i)| PointId(i)).collect();
    let src = zoom.relations()[k]
        .src()
        .rescale(1.0 / mu)?
        .restrict(&coarse)?;
    let pairs = matched
        .iter()
        .enumerate()
        .map(|(local, &(j, _))| (PointId(local), PointId(j)))
        .collect();
    Relation::new(Arc::new(src), zoom.map_space().clone(), pairs)
}

/// Verifies the cascade inequality at every scheduled scale.
pub fn cascade_check(zoom: &ZoomSequence, mu: f64) -> Result<CascadeReport> {
    validate_mu(mu)?;
    let mut rows = Vec::with_capacity(zoom.schedule().len());
    for (k, &eps) in zoom.schedule().iter().enumerate() {
        let measured = composite_map(zoom, eps, mu)?.quality().accuracy;
        let bound = zoom.modulus()[k] / mu + zoom.modulus_at(eps * mu)? + CASCADE_TOL;
        rows.push(CascadeRow {
            eps,
            measured,
            bound,
            holds: measured <= bound,
        });
    }
    let ok = rows.iter().all(|r| r.holds);
    Ok(CascadeReport { mu, rows, ok })
}

/// Hausdorff distance between two sets of related pairs, in the product
/// metric `(1/mu) d_src + d_dst`. Returns `+inf` when exactly one side is
/// empty and 0 when both are.
pub fn hausdorff_dmu(
    src: &FiniteMetricSpace,
    dst: &FiniteMetricSpace,
    a: &[(PointId, PointId)],
    b: &[(PointId, PointId)],
    mu: f64,
) -> Result<f64> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::Argument(format!(
            "scale ratio {mu} must be positive"
        )));
    }
    for &(p, q) in a.iter().chain(b) {
        if p.0 >= src.len() || q.0 >= dst.len() {
            return Err(Error::Argument(format!(
                "pair ({}, {}) outside the given spaces",
                p.0, q.0
            )));
        }
    }
    if a.is_empty() && b.is_empty() {
        return Ok(0.0);
    }
    if a.is_empty() || b.is_empty() {
        return Ok(f64::INFINITY);
    }
    let directed = |from: &[(PointId, PointId)], to: &[(PointId, PointId)]| -> f64 {
        from.iter()
            .map(|&(p, q)| {
                to.iter()
                    .map(|&(p2, q2)| src.dist(p, p2) / mu + dst.dist(q, q2))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// Measures how the chart metric drifts between consecutive stages `eps`
/// and `eps*mu`, alongside the composite modulus and its limit.
pub fn scale_stability(zoom: &ZoomSequence, mu: f64) -> Result<StabilityReport> {
    validate_mu(mu)?;
    let structure = zoom.structure();
    let x = zoom.base();
    let n = zoom.template_len();

    let mut composite = Vec::with_capacity(zoom.schedule().len());
    let mut drifts = Vec::with_capacity(zoom.schedule().len());
    let mut drift_rows = Vec::with_capacity(zoom.schedule().len());
    for (k, &eps) in zoom.schedule().iter().enumerate() {
        composite.push(composite_map(zoom, eps, mu)?.quality().accuracy);

        let fine: Vec<_> = zoom
            .points()
            .iter()
            .map(|u| structure.dilate(x, eps * mu, u))
            .collect();
        let coarse_chart = zoom.relations()[k].src();
        let mut drift = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let d_coarse = coarse_chart.dist(PointId(i), PointId(j));
                let d_fine = structure.distance(&fine[i], &fine[j]) / (eps * mu);
                drift = drift.max((d_coarse - d_fine).abs());
            }
        }
        drifts.push(drift);
        let bound = zoom.modulus()[k] + zoom.modulus_at(eps * mu)? + CASCADE_TOL;
        drift_rows.push(DriftRow {
            eps,
            drift,
            bound,
            holds: drift <= bound,
        });
    }

    // Limit of the composite as eps -> 0: compressed tangent pixels against
    // plain pixels, rescaled by 1/mu.
    let matched = surviving_pixels(zoom, mu);
    let map_space = zoom.map_space();
    let mut limit_accuracy = 0.0f64;
    for (a, &(j, i)) in matched.iter().enumerate() {
        for &(l, m) in matched.iter().skip(a + 1) {
            let compressed = map_space.dist(PointId(i), PointId(m)) / mu;
            let plain = map_space.dist(PointId(j), PointId(l));
            limit_accuracy = limit_accuracy.max((compressed - plain).abs());
        }
    }

    let finest = *zoom.modulus().last().expect("schedule is nonempty");
    let reference_threshold = 3.0 * finest + zoom.tangent_residual().finest_residual();
    let max_drift = drifts.iter().fold(0.0f64, |a, &b| a.max(b));
    let ok = drift_rows.iter().all(|r| r.holds) && limit_accuracy <= CASCADE_TOL;

    Ok(StabilityReport {
        mu,
        composite_modulus: ConvergenceEstimate::from_residuals(
            zoom.schedule().to_vec(),
            composite,
        )?,
        drift: ConvergenceEstimate::from_residuals(zoom.schedule().to_vec(), drifts)?,
        drift_rows,
        reference_threshold,
        within_reference: max_drift <= reference_threshold + CASCADE_TOL,
        limit_accuracy,
        surviving_pixels: matched.len(),
        ok,
    })
}

/// Pixels of the chart at `x1 = attach(x, o')` matched to pixels of the
/// chart at `x` through the offset translation `o_j -> o' * o_j`, by exact
/// bit comparison. Returns pairs `(j, i)` with `o' * o_j = o_i`.
fn viewpoint_matching(zoom: &ZoomSequence, offset_index: usize) -> Result<Vec<(usize, usize)>> {
    if offset_index >= zoom.template_len() {
        return Err(Error::Argument(format!(
            "offset index {offset_index} outside the template ({} offsets)",
            zoom.template_len()
        )));
    }
    let structure = zoom.structure();
    let x = zoom.base();
    let anchor = structure.attach(x, &zoom.offsets()[offset_index]);
    let mut matched = Vec::new();
    for (j, o) in zoom.offsets().iter().enumerate() {
        let translated = structure.detach(x, &structure.attach(&anchor, o));
        if let Some(i) = zoom.lookup_offset(&translated) {
            matched.push((j, i));
        }
    }
    if matched.len() < 2 {
        return Err(Error::Precondition(format!(
            "only {} template pixels match across the viewpoints",
            matched.len()
        )));
    }
    Ok(matched)
}

/// Identifies the chart at the shifted viewpoint with the chart at the base
/// point. The relation maps matched pixels of the shifted template (source,
/// tangent metric at the shifted point) onto template pixels (target); its
/// accuracy is the isometry residual of the identification.
pub fn viewpoint_difference(zoom: &ZoomSequence, offset_index: usize) -> Result<Relation> {
    let matched = viewpoint_matching(zoom, offset_index)?;
    let structure = zoom.structure();
    let x = zoom.base();
    let x1 = structure.attach(x, &zoom.offsets()[offset_index]);
    let shifted: Vec<_> = matched
        .iter()
        .map(|&(j, _)| structure.attach(&x1, &zoom.offsets()[j]))
        .collect();
    let labels = (0..shifted.len()).map(|i| format!("v{i}")).collect();
    let src = FiniteMetricSpace::from_points(labels, &shifted, |a, b| {
        structure.tangent_distance(&x1, a, b)
    });
    let pairs = matched
        .iter()
        .enumerate()
        .map(|(local, &(_, i))| (PointId(local), PointId(i)))
        .collect();
    Relation::new(Arc::new(src), zoom.map_space().clone(), pairs)
}

/// Tracks the viewpoint identification across the schedule. The shifted
/// viewpoint at scale `eps` is `dilate(x, eps, attach(x, o'))`, so it slides
/// towards `x` together with the charts; on the shipped models every chart
/// residual is exactly zero.
pub fn viewpoint_stability(zoom: &ZoomSequence, offset_index: usize) -> Result<ViewpointReport> {
    let matched = viewpoint_matching(zoom, offset_index)?;
    let structure = zoom.structure();
    let x = zoom.base();
    let offset = &zoom.offsets()[offset_index];
    let anchor = structure.attach(x, offset);

    let isometry_residual = viewpoint_difference(zoom, offset_index)?.quality().accuracy;

    let mut residuals = Vec::with_capacity(zoom.schedule().len());
    for (k, &eps) in zoom.schedule().iter().enumerate() {
        let x1 = structure.dilate(x, eps, &anchor);
        let shifted: Vec<_> = matched
            .iter()
            .map(|&(j, _)| {
                let v = structure.attach(&x1, &zoom.offsets()[j]);
                structure.dilate(&x1, eps, &v)
            })
            .collect();
        let base_chart = zoom.relations()[k].src();
        let mut worst = 0.0f64;
        for (a, &(_, i)) in matched.iter().enumerate() {
            for (b, &(_, m)) in matched.iter().enumerate().skip(a + 1) {
                let through_base = base_chart.dist(PointId(i), PointId(m));
                let through_shifted = structure.distance(&shifted[a], &shifted[b]) / eps;
                worst = worst.max((through_base - through_shifted).abs());
            }
        }
        residuals.push(worst);
    }

    let chart_residuals =
        ConvergenceEstimate::from_residuals(zoom.schedule().to_vec(), residuals)?;
    let ok = isometry_residual <= 1e-12 && chart_residuals.converges();
    Ok(ViewpointReport {
        offset: offset.to_vec(),
        matched_pixels: matched.len(),
        isometry_residual,
        chart_residuals,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::structure_by_name;
    use crate::zoom::{build_zoom, ZoomConfig};

    fn zoom_for(name: &str) -> ZoomSequence {
        let s = structure_by_name(name, 2, 0.5).unwrap();
        let cfg = ZoomConfig {
            schedule: crate::convergence::dyadic_schedule(1, 6),
            ball_resolution: 20,
            max_step_bits: 2,
        };
        build_zoom(&s, &s.origin(), &cfg).unwrap()
    }

    #[test]
    fn composite_maps_of_cones_are_exact() {
        for name in ["euclidean", "snowflake", "heisenberg"] {
            let z = zoom_for(name);
            let rel = composite_map(&z, 0.5, 0.5).unwrap();
            assert!(rel.pairs().len() >= 2);
            assert_eq!(rel.quality().accuracy, 0.0, "{name}");
        }
    }

    #[test]
    fn cascade_inequality_holds_on_every_model() {
        for name in ["euclidean", "snowflake", "heisenberg", "log_perturbed"] {
            let z = zoom_for(name);
            for mu in [0.5, 0.25] {
                let report = cascade_check(&z, mu).unwrap();
                assert!(report.ok, "{name} mu={mu}: {:?}", report.rows);
            }
        }
    }

    #[test]
    fn log_perturbed_composite_modulus_is_positive_yet_bounded() {
        let z = zoom_for("log_perturbed");
        let report = cascade_check(&z, 0.5).unwrap();
        assert!(report.rows[0].measured > 0.0);
        assert!(report.ok);
    }

    #[test]
    fn stage_drift_vanishes_on_cones_and_decays_on_the_log_model() {
        for name in ["euclidean", "heisenberg"] {
            let report = scale_stability(&zoom_for(name), 0.5).unwrap();
            assert!(report.ok, "{name}");
            assert!(report.within_reference, "{name}");
            for row in &report.drift_rows {
                assert_eq!(row.drift, 0.0, "{name} at eps={}", row.eps);
            }
            assert_eq!(report.limit_accuracy, 0.0, "{name}");
        }
        // Fit the drift order over scales where `eps * diameter` is small;
        // at coarser scales the curve has not reached its asymptotic slope.
        let s = structure_by_name("log_perturbed", 2, 0.5).unwrap();
        let cfg = ZoomConfig {
            schedule: crate::convergence::dyadic_schedule(3, 10),
            ball_resolution: 20,
            max_step_bits: 2,
        };
        let z = build_zoom(&s, &s.origin(), &cfg).unwrap();
        let report = scale_stability(&z, 0.5).unwrap();
        assert!(report.ok);
        assert!(report.drift.residuals[0] > 0.0);
        assert!(
            (report.drift.fitted_order - 1.0).abs() < 0.2,
            "fitted order {}",
            report.drift.fitted_order
        );
        // The limit identification stays exact even though the charts drift.
        assert_eq!(report.limit_accuracy, 0.0);
    }

    #[test]
    fn hausdorff_dmu_handles_hand_checked_sets() {
        let space = FiniteMetricSpace::from_points_auto(&[0.0f64, 1.0], |a, b| (a - b).abs());
        let a = vec![(PointId(0), PointId(0))];
        let b = vec![(PointId(1), PointId(0))];
        // Single pairs at src distance 1: D_mu = (1/mu) * 1 + 0.
        let d = hausdorff_dmu(&space, &space, &a, &b, 0.5).unwrap();
        assert!((d - 2.0).abs() < 1e-15);
        assert_eq!(
            hausdorff_dmu(&space, &space, &a, &[], 0.5).unwrap(),
            f64::INFINITY
        );
        assert_eq!(hausdorff_dmu(&space, &space, &[], &[], 0.5).unwrap(), 0.0);
        assert!(hausdorff_dmu(&space, &space, &a, &b, 0.0).is_err());
    }

    #[test]
    fn viewpoint_change_is_an_exact_isometry_on_all_models() {
        for name in ["euclidean", "snowflake", "heisenberg", "log_perturbed"] {
            let z = zoom_for(name);
            // Pick a nonzero offset: index 0 is the origin.
            let report = viewpoint_stability(&z, 1).unwrap();
            assert_eq!(report.isometry_residual, 0.0, "{name}");
            assert!(report.matched_pixels >= 2, "{name}");
            for (k, &r) in report.chart_residuals.residuals.iter().enumerate() {
                assert_eq!(r, 0.0, "{name}: chart residual at scale index {k}");
            }
            assert!(report.ok, "{name}");
        }
    }

    #[test]
    fn viewpoint_arguments_are_validated() {
        let z = zoom_for("euclidean");
        assert!(viewpoint_stability(&z, usize::MAX).is_err());
        assert!(composite_map(&z, 0.3, 0.5).is_err());
        assert!(composite_map(&z, 0.5, 1.5).is_err());
    }
}
