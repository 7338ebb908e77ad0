//! Verification that a normed group with dilations really is one.
//!
//! Checks the cone property of the induced distance, left-invariance,
//! the morphism property of dilations, and the norm laws (finiteness,
//! separation, symmetry, subadditivity, homogeneity).

use serde::{Deserialize, Serialize};

use super::models::NormedGroupWithDilations;
use crate::convergence::ConvergenceEstimate;
use crate::error::{Error, Result};
use crate::sampling;

/// Tolerance for the exact group laws (left-invariance, morphism,
/// separation, symmetry, subadditivity).
pub const GROUP_LAW_TOL: f64 = 1e-12;

/// Tolerance for norm homogeneity under dyadic dilations.
pub const HOMOGENEITY_TOL: f64 = 1e-14;

/// Worst-case residuals of the norm laws.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NormChecks {
    /// True when every sampled norm was finite and nonnegative.
    pub finite_nonnegative: bool,
    /// Norm of the identity element (should be exactly zero).
    pub identity_norm: f64,
    /// Smallest norm seen on sampled non-identity elements.
    pub min_nonidentity_norm: f64,
    /// Largest `| |p^-1| - |p| |`.
    pub symmetry: f64,
    /// Largest violation of `|p q| <= |p| + |q|` (zero when none).
    pub subadditivity_violation: f64,
    /// Largest `| |delta_eps p| - eps |p| |` over dyadic scales.
    pub homogeneity: f64,
}

/// Outcome of the full battery for one group.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConicalReport {
    pub group: String,
    /// Residuals of `d(delta_eps p, delta_eps q) = eps d(p, q)` per scale.
    pub cone_property: ConvergenceEstimate,
    /// Largest `| d(r p, r q) - d(p, q) |` over sampled triples.
    pub left_invariance: f64,
    /// Largest `d(delta_eps (p q), (delta_eps p)(delta_eps q))` over
    /// sampled pairs and dyadic scales.
    pub morphism: f64,
    pub norm: NormChecks,
    pub ok: bool,
}

/// Runs every check with `samples` draws for the structural laws and
/// `subadditivity_pairs` draws for the triangle law of the norm.
pub fn conical_checks(
    group: &dyn NormedGroupWithDilations,
    schedule: &[f64],
    samples: usize,
    subadditivity_pairs: usize,
    seed: u64,
) -> Result<ConicalReport> {
    if schedule.is_empty() {
        return Err(Error::Argument("empty scale schedule".into()));
    }
    if samples == 0 || subadditivity_pairs == 0 {
        return Err(Error::Argument("sample counts must be positive".into()));
    }
    let mut rng = sampling::seeded(seed);
    let dist =
        |p: &super::ModelPoint, q: &super::ModelPoint| group.norm(&group.mul(&group.inv(p), q));

    let pairs: Vec<(super::ModelPoint, super::ModelPoint)> = (0..samples)
        .map(|_| {
            (
                group.random_element(&mut rng, 1.0),
                group.random_element(&mut rng, 1.0),
            )
        })
        .collect();

    // Cone property of the induced left-invariant distance.
    let mut cone_residuals = Vec::with_capacity(schedule.len());
    for &eps in schedule {
        let mut worst = 0.0f64;
        for (p, q) in &pairs {
            let lhs = dist(&group.group_dilate(eps, p), &group.group_dilate(eps, q));
            worst = worst.max((lhs - eps * dist(p, q)).abs());
        }
        cone_residuals.push(worst);
    }
    let cone_property = ConvergenceEstimate::from_residuals(schedule.to_vec(), cone_residuals)?;

    // Left-invariance and the dilation morphism law.
    let mut left_invariance = 0.0f64;
    let mut morphism = 0.0f64;
    for (p, q) in &pairs {
        let r = group.random_element(&mut rng, 1.0);
        let translated = dist(&group.mul(&r, p), &group.mul(&r, q));
        left_invariance = left_invariance.max((translated - dist(p, q)).abs());
        for &eps in schedule {
            let lhs = group.group_dilate(eps, &group.mul(p, q));
            let rhs = group.mul(&group.group_dilate(eps, p), &group.group_dilate(eps, q));
            morphism = morphism.max(dist(&lhs, &rhs).abs());
        }
    }

    // Norm laws.
    let identity = group.identity();
    let identity_norm = group.norm(&identity);
    let mut finite_nonnegative = identity_norm.is_finite() && identity_norm >= 0.0;
    let mut min_nonidentity = f64::INFINITY;
    let mut symmetry = 0.0f64;
    let mut homogeneity = 0.0f64;
    for (p, _) in &pairs {
        let n = group.norm(p);
        finite_nonnegative &= n.is_finite() && n >= 0.0;
        if p != &identity {
            min_nonidentity = min_nonidentity.min(n);
        }
        symmetry = symmetry.max((group.norm(&group.inv(p)) - n).abs());
        for &eps in schedule {
            homogeneity =
                homogeneity.max((group.norm(&group.group_dilate(eps, p)) - eps * n).abs());
        }
    }
    let mut subadditivity_violation = 0.0f64;
    for _ in 0..subadditivity_pairs {
        let p = group.random_element(&mut rng, 1.0);
        let q = group.random_element(&mut rng, 1.0);
        let slack = group.norm(&p) + group.norm(&q) - group.norm(&group.mul(&p, &q));
        subadditivity_violation = subadditivity_violation.max(-slack);
    }

    let norm = NormChecks {
        finite_nonnegative,
        identity_norm,
        min_nonidentity_norm: min_nonidentity,
        symmetry,
        subadditivity_violation,
        homogeneity,
    };
    let ok = cone_property
        .residuals
        .iter()
        .all(|&r| r <= GROUP_LAW_TOL)
        && left_invariance <= GROUP_LAW_TOL
        && morphism <= GROUP_LAW_TOL
        && norm.finite_nonnegative
        && norm.identity_norm <= HOMOGENEITY_TOL
        && norm.min_nonidentity_norm > 0.0
        && norm.symmetry <= GROUP_LAW_TOL
        && norm.subadditivity_violation <= GROUP_LAW_TOL
        && norm.homogeneity <= HOMOGENEITY_TOL;

    Ok(ConicalReport {
        group: group.name().to_string(),
        cone_property,
        left_invariance,
        morphism,
        norm,
        ok,
    })
}
