//! Foveal charts: full resolution near the base point, coarse elsewhere.
//!
//! The foveal map at scale `eps` with fovea ratio `mu` keeps the chart pairs
//! of the plain zoom outside the metric ball of radius `eps*mu`, and inside
//! it re-reads each sample through the finer chart at `eps*mu`, compressing
//! the fine pixel back by `delta_mu`. On the shipped templates the
//! compression returns exactly the original pixel, so the construction is a
//! sub-relation of the plain chart (bit-identical to it whenever every inner
//! sample matches a fine pixel); samples without a fine pixel are dropped
//! and counted rather than approximated.
//!
//! Two quality statements are checked per scale: the accuracy restricted to
//! the fovea is at most `mu` times the fine modulus, and the accuracy of the
//! whole foveal chart is at most the coarse modulus plus `mu` times the fine
//! one. Re-reading the fovea through the fine chart and compressing once
//! more must reproduce the chart at `eps*mu` exactly; the fixed point check
//! measures the Hausdorff gap between those two relations in the product
//! metric of [`hausdorff_dmu`](super::hausdorff_dmu).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::PointId;
use crate::relation::Relation;

use super::stability::{surviving_pixels, validate_mu, CASCADE_TOL};
use super::ZoomSequence;

/// One scale of a foveal quality table.
#[derive(Clone, Debug, Serialize)]
pub struct FovealRow {
    pub eps: f64,
    pub measured: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Quality tables of a foveal sequence.
#[derive(Clone, Debug, Serialize)]
pub struct FovealReport {
    pub mu: f64,
    /// Accuracy restricted to the fovea against `mu * F(eps*mu) + tol`.
    pub inner_rows: Vec<FovealRow>,
    /// Accuracy of the whole chart against `F(eps) + mu * F(eps*mu) + tol`.
    pub global_rows: Vec<FovealRow>,
    /// Inner samples without a fine pixel, per scale.
    pub dropped: Vec<usize>,
    /// Inner samples whose compressed fine pixel differs from the original
    /// one; zero on templates closed under the dyadic dilations.
    pub rebinding_warnings: usize,
    pub ok: bool,
}

/// Foveal chart relations for every scale of the schedule.
pub struct FovealSequence {
    pub mu: f64,
    pub relations: Vec<Relation>,
    pub report: FovealReport,
}

/// One scale of [`foveal_fixedpoint_check`].
#[derive(Clone, Debug, Serialize)]
pub struct FixedpointRow {
    pub eps: f64,
    /// Pixels whose compressed offset is again a template offset.
    pub surviving: usize,
    /// Hausdorff gap between the re-read fovea and the fine chart.
    pub hausdorff: f64,
}

/// Report of [`foveal_fixedpoint_check`].
#[derive(Clone, Debug, Serialize)]
pub struct FixedpointReport {
    pub mu: f64,
    pub rows: Vec<FixedpointRow>,
    pub max_hausdorff: f64,
    pub ok: bool,
}

/// Builds the foveal sequence of `zoom` with fovea ratio `mu` and checks
/// both quality tables.
pub fn foveal(zoom: &ZoomSequence, mu: f64) -> Result<FovealSequence> {
    validate_mu(mu)?;
    let structure = zoom.structure();
    let x = zoom.base();
    let origin = structure.origin();
    let n = zoom.template_len();

    let mut relations = Vec::with_capacity(zoom.schedule().len());
    let mut inner_rows = Vec::with_capacity(zoom.schedule().len());
    let mut global_rows = Vec::with_capacity(zoom.schedule().len());
    let mut dropped = Vec::with_capacity(zoom.schedule().len());
    let mut rebinding_warnings = 0usize;

    for (k, &eps) in zoom.schedule().iter().enumerate() {
        let chart = &zoom.relations()[k];
        let src = chart.src().clone();
        let fine_modulus = zoom.modulus_at(eps * mu)?;

        let mut pairs: Vec<(PointId, PointId)> = Vec::with_capacity(n);
        let mut inner: Vec<(usize, usize)> = Vec::new();
        let mut dropped_here = 0usize;
        for (i, u) in zoom.points().iter().enumerate() {
            let sample = structure.dilate(x, eps, u);
            // Closed inequality, no tolerance: on dyadic grids the compare
            // is exact, and a sample on the rim belongs to the fovea.
            let is_inner = structure.distance(x, &sample) <= eps * mu;
            if !is_inner {
                pairs.push((PointId(i), PointId(i)));
                continue;
            }
            let fine = structure.dilate(&origin, 1.0 / mu, &zoom.offsets()[i]);
            let Some(j) = zoom.lookup_offset(&fine) else {
                dropped_here += 1;
                continue;
            };
            let compressed = structure.dilate(&origin, mu, &zoom.offsets()[j]);
            let Some(back) = zoom.lookup_offset(&compressed) else {
                dropped_here += 1;
                continue;
            };
            if back != i {
                rebinding_warnings += 1;
            }
            pairs.push((PointId(i), PointId(back)));
            inner.push((i, back));
        }
        let relation = Relation::new(src, zoom.map_space().clone(), pairs)?;

        let mut inner_acc = 0.0f64;
        for (a, &(i, bi)) in inner.iter().enumerate() {
            for &(l, bl) in inner.iter().skip(a + 1) {
                let chart_d = relation.src().dist(PointId(i), PointId(l));
                let pixel_d = zoom.map_space().dist(PointId(bi), PointId(bl));
                inner_acc = inner_acc.max((chart_d - pixel_d).abs());
            }
        }
        let inner_bound = mu * fine_modulus + CASCADE_TOL;
        inner_rows.push(FovealRow {
            eps,
            measured: inner_acc,
            bound: inner_bound,
            holds: inner_acc <= inner_bound,
        });

        let global_acc = relation.quality().accuracy;
        let global_bound = zoom.modulus()[k] + mu * fine_modulus + CASCADE_TOL;
        global_rows.push(FovealRow {
            eps,
            measured: global_acc,
            bound: global_bound,
            holds: global_acc <= global_bound,
        });

        dropped.push(dropped_here);
        relations.push(relation);
    }

    let ok = inner_rows.iter().all(|r| r.holds) && global_rows.iter().all(|r| r.holds);
    Ok(FovealSequence {
        mu,
        relations,
        report: FovealReport {
            mu,
            inner_rows,
            global_rows,
            dropped,
            rebinding_warnings,
            ok,
        },
    })
}

/// Re-reads the fovea of the foveal chart through the fine chart and
/// compresses once more; the result must coincide with the chart at
/// `eps*mu` restricted to the surviving pixels. Exact templates give a
/// bitwise-zero Hausdorff gap.
pub fn foveal_fixedpoint_check(zoom: &ZoomSequence, mu: f64) -> Result<FixedpointReport> {
    validate_mu(mu)?;
    let fov = foveal(zoom, mu)?;
    let matched = surviving_pixels(zoom, mu);
    if matched.len() < 2 {
        return Err(Error::Precondition(format!(
            "only {} template pixels survive compression by {mu}",
            matched.len()
        )));
    }

    let mut rows = Vec::with_capacity(zoom.schedule().len());
    let mut max_hausdorff = 0.0f64;
    for (k, &eps) in zoom.schedule().iter().enumerate() {
        // Shared physical points: the stage-eps positions of the compressed
        // pixels, which are bitwise the stage-(eps*mu) positions of the
        // surviving pixels.
        let coarse: Vec<PointId> = matched.iter().map(|&(_, i)| PointId(i)).collect();
        let src = zoom.relations()[k].src().restrict(&coarse)?;
        let local_of: std::collections::HashMap<usize, usize> = matched
            .iter()
            .enumerate()
            .map(|(local, &(_, i))| (i, local))
            .collect();

        let phi: std::collections::HashMap<usize, usize> = fov.relations[k]
            .pairs()
            .iter()
            .map(|&(p, q)| (p.0, q.0))
            .collect();
        let mut reread: Vec<(PointId, PointId)> = Vec::new();
        for &(j, i) in &matched {
            if let Some(&pixel) = phi.get(&i) {
                // The fine pixel of the compressed offset `o_pixel`.
                let fine = zoom
                    .structure()
                    .dilate(&zoom.structure().origin(), 1.0 / mu, &zoom.offsets()[pixel]);
                if let Some(jj) = zoom.lookup_offset(&fine) {
                    reread.push((PointId(local_of[&i]), PointId(jj)));
                }
            }
            let _ = j;
        }
        let fine_chart: Vec<(PointId, PointId)> = matched
            .iter()
            .map(|&(j, i)| (PointId(local_of[&i]), PointId(j)))
            .collect();

        let gap = super::hausdorff_dmu(&src, zoom.map_space(), &reread, &fine_chart, mu)?;
        max_hausdorff = max_hausdorff.max(gap);
        rows.push(FixedpointRow {
            eps,
            surviving: matched.len(),
            hausdorff: gap,
        });
    }

    Ok(FixedpointReport {
        mu,
        rows,
        max_hausdorff,
        ok: max_hausdorff <= 1e-9,
    })
}
