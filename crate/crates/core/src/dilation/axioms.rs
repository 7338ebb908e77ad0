//! Numerical verification of the dilation-structure axioms and the
//! tangent operations they induce.
//!
//! Each check turns an axiom into a residual-versus-scale table: exact
//! models produce all-zero tables, perturbed models produce tables whose
//! fitted decay order certifies the limit.

use serde::{Deserialize, Serialize};

use super::{DilationStructure, ModelPoint};
use crate::convergence::ConvergenceEstimate;
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::sampling;

pub(crate) fn validate_scales(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::Argument("empty scale schedule".into()));
    }
    for &e in schedule {
        if !(e.is_finite() && e > 0.0 && e <= 1.0) {
            return Err(Error::Argument(format!(
                "dilation coefficient {e} must lie in (0, 1]"
            )));
        }
    }
    for w in schedule.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Argument(
                "scale schedule must be strictly decreasing".into(),
            ));
        }
    }
    Ok(())
}

pub(crate) fn validate_base(structure: &dyn DilationStructure, x: &ModelPoint) -> Result<()> {
    if x.len() != structure.dim() {
        return Err(Error::Argument(format!(
            "base point has {} coordinates, structure '{}' expects {}",
            x.len(),
            structure.name(),
            structure.dim()
        )));
    }
    if x.iter().any(|a| !a.is_finite()) {
        return Err(Error::Argument("base point has non-finite coordinates".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Domain inclusions
// ---------------------------------------------------------------------------

/// Sampled verification that dilation domains nest correctly.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct A0Report {
    pub scales: Vec<f64>,
    /// Every sampled point of the radius-`eps` ball at `x` pulls back under
    /// `dilate(x, 1/eps, .)` into the radius-`A` ball.
    pub ball_inclusion_holds: bool,
    /// Dilated unit-ball pairs remain within reach `B` of each other's
    /// dilation domains: `dilate(w, 1/eps, dilate(x, eps, v))` stays within
    /// distance `B` of `w = dilate(x, eps, u)`.
    pub reach_inclusion_holds: bool,
    /// Largest pullback distance observed, relative to `A`.
    pub max_pullback_ratio: f64,
    /// Largest reach observed, relative to `B`.
    pub max_reach_ratio: f64,
    pub samples_per_scale: usize,
}

/// Checks the domain-inclusion axiom by sampling.
pub fn check_a0(
    structure: &dyn DilationStructure,
    x: &ModelPoint,
    schedule: &[f64],
    samples_per_scale: usize,
    seed: u64,
) -> Result<A0Report> {
    validate_base(structure, x)?;
    validate_scales(schedule)?;
    let (a, b) = structure.inclusion_constants();
    let radius = structure.domain_radius();
    let mut rng = sampling::seeded(seed);
    let mut max_pullback = 0.0f64;
    let mut max_reach = 0.0f64;
    for &eps in schedule {
        for _ in 0..samples_per_scale {
            let v = structure.random_in_metric_ball(&mut rng, x, eps);
            let pulled = structure.dilate(x, 1.0 / eps, &v);
            max_pullback = max_pullback.max(structure.distance(x, &pulled));

            let u = structure.random_in_metric_ball(&mut rng, x, radius);
            let v2 = structure.random_in_metric_ball(&mut rng, x, radius);
            let w = structure.dilate(x, eps, &u);
            let p = structure.dilate(x, eps, &v2);
            let z = structure.dilate(&w, 1.0 / eps, &p);
            max_reach = max_reach.max(structure.distance(&w, &z));
        }
    }
    Ok(A0Report {
        scales: schedule.to_vec(),
        ball_inclusion_holds: max_pullback <= a + 1e-9,
        reach_inclusion_holds: max_reach <= b + 1e-9,
        max_pullback_ratio: max_pullback / a,
        max_reach_ratio: max_reach / b,
        samples_per_scale,
    })
}

// ---------------------------------------------------------------------------
// Identity at the base and semigroup law
// ---------------------------------------------------------------------------

/// Residual tables for the base-identity law `dilate(x, eps, x) = x` and
/// the semigroup law `dilate(x, eps, dilate(x, mu, u)) = dilate(x, eps*mu, u)`.
///
/// The identity residual is maximized over freshly sampled base points at
/// each scale; the semigroup residual over sampled `u` in the domain ball
/// and all `mu` from the schedule.
pub fn check_a1_a2(
    structure: &dyn DilationStructure,
    x: &ModelPoint,
    schedule: &[f64],
    samples: usize,
    seed: u64,
) -> Result<(ConvergenceEstimate, ConvergenceEstimate)> {
    validate_base(structure, x)?;
    validate_scales(schedule)?;
    if samples == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    let radius = structure.domain_radius();
    let mut rng = sampling::seeded(seed);

    let bases: Vec<ModelPoint> = std::iter::once(x.clone())
        .chain((1..samples).map(|_| structure.random_base(&mut rng)))
        .collect();
    let probes: Vec<ModelPoint> = (0..samples)
        .map(|_| structure.attach(x, &structure.random_offset(&mut rng, radius)))
        .collect();

    let mut identity_residuals = Vec::with_capacity(schedule.len());
    let mut semigroup_residuals = Vec::with_capacity(schedule.len());
    for &eps in schedule {
        let mut worst_id = 0.0f64;
        for base in &bases {
            let moved = structure.dilate(base, eps, base);
            worst_id = worst_id.max(structure.distance(base, &moved));
        }
        identity_residuals.push(worst_id);

        let mut worst_sg = 0.0f64;
        for u in &probes {
            for &mu in schedule {
                let nested = structure.dilate(x, eps, &structure.dilate(x, mu, u));
                let flat = structure.dilate(x, eps * mu, u);
                worst_sg = worst_sg.max(structure.distance(&nested, &flat));
            }
        }
        semigroup_residuals.push(worst_sg);
    }
    Ok((
        ConvergenceEstimate::from_residuals(schedule.to_vec(), identity_residuals)?,
        ConvergenceEstimate::from_residuals(schedule.to_vec(), semigroup_residuals)?,
    ))
}

// ---------------------------------------------------------------------------
// Tangent metric
// ---------------------------------------------------------------------------

/// Outcome of the rescaled-distance limit check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct A3Result {
    pub estimate: ConvergenceEstimate,
    /// Rescaled probe distances at the finest scale, packaged as a finite
    /// metric space on the probes (the empirical tangent space).
    pub empirical_tangent: FiniteMetricSpace,
    /// True when residuals were measured against the structure's declared
    /// tangent distance; false for the self-consistency (Cauchy) mode.
    pub against_guess: bool,
}

/// Verifies that `(1/eps) d(dilate(x, eps, u), dilate(x, eps, v))`
/// converges on the probe pairs, either against the declared tangent
/// distance (`use_guess`) or by comparing consecutive scales.
pub fn check_a3(
    structure: &dyn DilationStructure,
    x: &ModelPoint,
    probes: &[ModelPoint],
    schedule: &[f64],
    use_guess: bool,
) -> Result<A3Result> {
    validate_base(structure, x)?;
    validate_scales(schedule)?;
    if probes.len() < 2 {
        return Err(Error::Argument(format!(
            "need at least two probe points, got {}",
            probes.len()
        )));
    }
    if !use_guess && schedule.len() < 2 {
        return Err(Error::Argument(
            "self-consistency mode needs at least two scales".into(),
        ));
    }

    let n = probes.len();
    let rescaled: Vec<Vec<f64>> = schedule
        .iter()
        .map(|&eps| {
            let images: Vec<ModelPoint> =
                probes.iter().map(|u| structure.dilate(x, eps, u)).collect();
            let mut table = vec![0.0; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = structure.distance(&images[i], &images[j]) / eps;
                    table[i * n + j] = d;
                    table[j * n + i] = d;
                }
            }
            table
        })
        .collect();

    let estimate = if use_guess {
        let mut residuals = Vec::with_capacity(schedule.len());
        for table in &rescaled {
            let mut worst = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    let target = structure.tangent_distance(x, &probes[i], &probes[j]);
                    worst = worst.max((table[i * n + j] - target).abs());
                }
            }
            residuals.push(worst);
        }
        ConvergenceEstimate::from_residuals(schedule.to_vec(), residuals)?
    } else {
        let mut gaps = Vec::with_capacity(schedule.len() - 1);
        for pair in rescaled.windows(2) {
            let worst = pair[0]
                .iter()
                .zip(&pair[1])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            gaps.push(worst);
        }
        ConvergenceEstimate::from_cauchy(schedule, gaps)?
    };

    let finest = rescaled.last().expect("schedule is nonempty");
    let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let empirical_tangent = FiniteMetricSpace::from_flat(labels, finest.clone())?;

    Ok(A3Result {
        estimate,
        empirical_tangent,
        against_guess: use_guess,
    })
}

// ---------------------------------------------------------------------------
// Finite-scale difference and the induced operations
// ---------------------------------------------------------------------------

fn require_in_domain(
    structure: &dyn DilationStructure,
    x: &ModelPoint,
    p: &ModelPoint,
    role: &str,
) -> Result<()> {
    let d = structure.distance(x, p);
    let radius = structure.domain_radius();
    if d > radius * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "{role} lies at distance {d:.6} from the base, outside the domain ball of radius {radius}"
        )));
    }
    Ok(())
}

/// The finite-scale difference
/// `dilate(dilate(x, eps, u), 1/eps, dilate(x, eps, v))`.
///
/// Rejects arguments outside the domain ball at `x` and results outside
/// the stated reach of the intermediate base point.
pub fn difference(
    structure: &dyn DilationStructure,
    x: &ModelPoint,
    eps: f64,
    u: &ModelPoint,
    v: &ModelPoint,
) -> Result<ModelPoint> {
    validate_base(structure, x)?;
    if !(eps.is_finite() && eps > 0.0 && eps <= 1.0) {
        return Err(Error::Argument(format!(
            "dilation coefficient {eps} must lie in (0, 1]"
        )));
    }
    require_in_domain(structure, x, u, "first argument")?;
    require_in_domain(structure, x, v, "second argument")?;
    let w = structure.dilate(x, eps, u);
    let p = structure.dilate(x, eps, v);
    let out = structure.dilate(&w, 1.0 / eps, &p);
    let (_, b) = structure.inclusion_constants();
    let reach = structure.distance(&w, &out);
    if reach > b * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "difference landed at reach {reach:.6} from its base, past the inclusion bound {b}"
        )));
    }
    Ok(out)
}

/// The finite-scale sum
/// `dilate(x, 1/eps, dilate(dilate(x, eps, u), eps, v))`: the approximate
/// inverse of [`difference`] in its second slot.
pub fn tangent_sum(
    structure: &dyn DilationStructure,
    x: &ModelPoint,
    eps: f64,
    u: &ModelPoint,
    v: &ModelPoint,
) -> Result<ModelPoint> {
    validate_base(structure, x)?;
    if !(eps.is_finite() && eps > 0.0 && eps <= 1.0) {
        return Err(Error::Argument(format!(
            "dilation coefficient {eps} must lie in (0, 1]"
        )));
    }
    require_in_domain(structure, x, u, "first argument")?;
    let w = structure.dilate(x, eps, u);
    let (_, b) = structure.inclusion_constants();
    let reach_v = structure.distance(&w, v);
    if reach_v > b * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "second argument lies at reach {reach_v:.6} from the dilated base, past the inclusion bound {b}"
        )));
    }
    Ok(structure.dilate(x, 1.0 / eps, &structure.dilate(&w, eps, v)))
}

/// The finite-scale inverse `difference(x, eps, u, x)`.
pub fn tangent_inverse(
    structure: &dyn DilationStructure,
    x: &ModelPoint,
    eps: f64,
    u: &ModelPoint,
) -> Result<ModelPoint> {
    difference(structure, x, eps, u, x)
}

/// Outcome of the difference-map limit check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct A4Result {
    /// Cauchy comparison of difference maps at consecutive scales.
    pub estimate: ConvergenceEstimate,
    /// Per-scale residual of the cone identity
    /// `d(difference(x, eps, u, v), dilate(x, eps, u)) = d(u, v)`,
    /// which exact models satisfy bitwise.
    pub cone_identity: ConvergenceEstimate,
}

/// Verifies that the finite-scale difference maps converge as the scale
/// shrinks, and measures the cone identity along the way.
pub fn check_a4(
    structure: &dyn DilationStructure,
    x: &ModelPoint,
    schedule: &[f64],
    sample_pairs: usize,
    seed: u64,
) -> Result<A4Result> {
    validate_base(structure, x)?;
    validate_scales(schedule)?;
    if schedule.len() < 2 {
        return Err(Error::Argument(
            "difference-map comparison needs at least two scales".into(),
        ));
    }
    if sample_pairs == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    let radius = structure.domain_radius();
    let mut rng = sampling::seeded(seed);
    let pairs: Vec<(ModelPoint, ModelPoint)> = (0..sample_pairs)
        .map(|_| {
            (
                structure.attach(x, &structure.random_offset(&mut rng, radius)),
                structure.attach(x, &structure.random_offset(&mut rng, radius)),
            )
        })
        .collect();

    let per_scale: Vec<Vec<ModelPoint>> = schedule
        .iter()
        .map(|&eps| {
            pairs
                .iter()
                .map(|(u, v)| difference(structure, x, eps, u, v))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut gaps = Vec::with_capacity(schedule.len() - 1);
    for window in per_scale.windows(2) {
        let worst = window[0]
            .iter()
            .zip(&window[1])
            .map(|(p, q)| structure.distance(p, q))
            .fold(0.0, f64::max);
        gaps.push(worst);
    }
    let estimate = ConvergenceEstimate::from_cauchy(schedule, gaps)?;

    let mut identity_residuals = Vec::with_capacity(schedule.len());
    for (points, &eps) in per_scale.iter().zip(schedule) {
        let mut worst = 0.0f64;
        for ((u, v), delta) in pairs.iter().zip(points) {
            let w = structure.dilate(x, eps, u);
            let measured = structure.distance(delta, &w);
            worst = worst.max((measured - structure.distance(u, v)).abs());
        }
        identity_residuals.push(worst);
    }
    let cone_identity = ConvergenceEstimate::from_residuals(schedule.to_vec(), identity_residuals)?;

    Ok(A4Result {
        estimate,
        cone_identity,
    })
}

// ---------------------------------------------------------------------------
// Combined report
// ---------------------------------------------------------------------------

/// All axiom checks for one structure at one base point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxiomReport {
    pub structure: String,
    pub base: Vec<f64>,
    pub a0: A0Report,
    pub a1: ConvergenceEstimate,
    pub a2: ConvergenceEstimate,
    pub a3: A3Result,
    pub a4: A4Result,
    /// True when the inclusions hold and every residual table converges.
    pub ok: bool,
}

/// Runs the full axiom battery. `samples` controls each check's sampling
/// effort; probes for the tangent check are drawn from the domain ball.
pub fn axiom_report(
    structure: &dyn DilationStructure,
    x: &ModelPoint,
    schedule: &[f64],
    samples: usize,
    seed: u64,
) -> Result<AxiomReport> {
    validate_base(structure, x)?;
    validate_scales(schedule)?;
    if samples < 2 {
        return Err(Error::Argument("need at least two samples".into()));
    }
    let a0 = check_a0(structure, x, schedule, samples.min(200), seed ^ 0xA0)?;
    let (a1, a2) = check_a1_a2(structure, x, schedule, samples, seed ^ 0xA1)?;

    let mut rng = sampling::seeded(seed ^ 0xA3);
    let probe_count = samples.clamp(2, 64);
    let probes: Vec<ModelPoint> = (0..probe_count)
        .map(|_| structure.attach(x, &structure.random_offset(&mut rng, structure.domain_radius())))
        .collect();
    let a3 = check_a3(structure, x, &probes, schedule, true)?;
    let a4 = check_a4(structure, x, schedule, samples.min(256), seed ^ 0xA4)?;

    let ok = a0.ball_inclusion_holds
        && a0.reach_inclusion_holds
        && a1.converges()
        && a2.converges()
        && a3.estimate.converges()
        && a4.estimate.converges();

    Ok(AxiomReport {
        structure: structure.name().to_string(),
        base: x.to_vec(),
        a0,
        a1,
        a2,
        a3,
        a4,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::{dyadic_schedule, Verdict};
    use crate::dilation::models::{
        ConicalDilation, EuclideanDilation, HeisenbergGroup, LogPerturbedEuclidean,
        SnowflakeDilation,
    };
    use crate::dilation::point;

    fn exact_models() -> Vec<Box<dyn DilationStructure>> {
        vec![
            Box::new(EuclideanDilation::new(2).unwrap()),
            Box::new(SnowflakeDilation::new(2, 0.5).unwrap()),
            Box::new(ConicalDilation::new(HeisenbergGroup)),
        ]
    }

    fn base_for(structure: &dyn DilationStructure) -> ModelPoint {
        let mut rng = sampling::seeded(99);
        structure.random_base(&mut rng)
    }

    #[test]
    fn exact_models_have_zero_identity_and_semigroup_residuals() {
        let schedule = dyadic_schedule(3, 10);
        for m in exact_models() {
            let x = base_for(m.as_ref());
            let (a1, a2) = check_a1_a2(m.as_ref(), &x, &schedule, 50, 5).unwrap();
            assert_eq!(a1.residuals.iter().cloned().fold(0.0, f64::max), 0.0, "{}", m.name());
            assert_eq!(a2.residuals.iter().cloned().fold(0.0, f64::max), 0.0, "{}", m.name());
        }
    }

    #[test]
    fn log_perturbed_dilations_still_satisfy_the_semigroup_law() {
        let m = LogPerturbedEuclidean::new(2).unwrap();
        let x = base_for(&m);
        let schedule = dyadic_schedule(3, 10);
        let (a1, a2) = check_a1_a2(&m, &x, &schedule, 50, 5).unwrap();
        assert!(a1.converges());
        assert_eq!(a2.residuals.iter().cloned().fold(0.0, f64::max), 0.0);
    }

    #[test]
    fn rescaled_distances_match_the_declared_tangent_exactly_on_cones() {
        let schedule = dyadic_schedule(3, 10);
        for m in exact_models() {
            let x = base_for(m.as_ref());
            let mut rng = sampling::seeded(7);
            let probes: Vec<ModelPoint> = (0..12)
                .map(|_| m.attach(&x, &m.random_offset(&mut rng, 1.0)))
                .collect();
            let res = check_a3(m.as_ref(), &x, &probes, &schedule, true).unwrap();
            assert_eq!(
                res.estimate.residuals.iter().cloned().fold(0.0, f64::max),
                0.0,
                "{}",
                m.name()
            );
        }
    }

    #[test]
    fn log_perturbed_tangent_error_decays_at_first_order() {
        let m = LogPerturbedEuclidean::new(2).unwrap();
        let x = base_for(&m);
        let mut rng = sampling::seeded(8);
        let probes: Vec<ModelPoint> = (0..12)
            .map(|_| m.attach(&x, &m.random_offset(&mut rng, 1.0)))
            .collect();
        let schedule = dyadic_schedule(3, 10);
        let res = check_a3(&m, &x, &probes, &schedule, true).unwrap();
        assert_eq!(res.estimate.verdict, Verdict::Converges);
        assert!(
            (res.estimate.fitted_order - 1.0).abs() < 0.2,
            "order {}",
            res.estimate.fitted_order
        );
    }

    #[test]
    fn self_consistency_mode_agrees_with_guess_mode_for_cones() {
        let m = EuclideanDilation::new(2).unwrap();
        let x = base_for(&m);
        let mut rng = sampling::seeded(9);
        let probes: Vec<ModelPoint> = (0..8)
            .map(|_| m.attach(&x, &m.random_offset(&mut rng, 1.0)))
            .collect();
        let schedule = dyadic_schedule(3, 8);
        let res = check_a3(&m, &x, &probes, &schedule, false).unwrap();
        assert!(!res.against_guess);
        assert_eq!(res.estimate.schedule.len(), schedule.len() - 1);
        assert_eq!(res.estimate.residuals.iter().cloned().fold(0.0, f64::max), 0.0);
    }

    #[test]
    fn difference_maps_satisfy_the_cone_identity_bitwise_on_exact_models() {
        let schedule = dyadic_schedule(3, 10);
        for m in exact_models() {
            let x = base_for(m.as_ref());
            let res = check_a4(m.as_ref(), &x, &schedule, 100, 21).unwrap();
            assert_eq!(
                res.cone_identity.residuals.iter().cloned().fold(0.0, f64::max),
                0.0,
                "{}",
                m.name()
            );
            // The maps themselves still move with the scale (the
            // intermediate base point does), so the Cauchy table decays
            // instead of vanishing.
            assert_eq!(res.estimate.verdict, Verdict::Converges, "{}", m.name());
            assert!(
                res.estimate.fitted_order > 0.3,
                "{}: order {}",
                m.name(),
                res.estimate.fitted_order
            );
        }
    }

    #[test]
    fn log_perturbed_difference_maps_converge_at_first_order() {
        let m = LogPerturbedEuclidean::new(2).unwrap();
        let x = base_for(&m);
        let schedule = dyadic_schedule(3, 10);
        let res = check_a4(&m, &x, &schedule, 100, 22).unwrap();
        assert_eq!(res.estimate.verdict, Verdict::Converges);
        assert!(
            (res.estimate.fitted_order - 1.0).abs() < 0.2,
            "order {}",
            res.estimate.fitted_order
        );
    }

    #[test]
    fn sum_undoes_difference_bitwise_on_exact_models() {
        for m in exact_models() {
            let x = base_for(m.as_ref());
            let mut rng = sampling::seeded(33);
            for _ in 0..50 {
                let u = m.attach(&x, &m.random_offset(&mut rng, 1.0));
                let v = m.attach(&x, &m.random_offset(&mut rng, 1.0));
                let eps = 0.125;
                let delta = difference(m.as_ref(), &x, eps, &u, &v).unwrap();
                let back = tangent_sum(m.as_ref(), &x, eps, &u, &delta).unwrap();
                assert_eq!(back, v, "{}", m.name());
            }
        }
    }

    #[test]
    fn inverse_composes_to_the_base_point() {
        let m = EuclideanDilation::new(2).unwrap();
        let x = point(&[0.25, -0.5]);
        let mut rng = sampling::seeded(34);
        for _ in 0..20 {
            let u = m.attach(&x, &m.random_offset(&mut rng, 1.0));
            let eps = 0.0625;
            let inv = tangent_inverse(&m, &x, eps, &u).unwrap();
            let back = tangent_sum(&m, &x, eps, &u, &inv).unwrap();
            // Sum(u, Inverse(u)) recovers the base exactly on the grid.
            assert_eq!(back, x);
        }
    }

    #[test]
    fn difference_rejects_points_outside_the_domain() {
        let m = EuclideanDilation::new(2).unwrap();
        let x = point(&[0.0, 0.0]);
        let far = point(&[5.0, 0.0]);
        let near = point(&[0.25, 0.0]);
        let err = difference(&m, &x, 0.5, &far, &near).unwrap_err();
        assert!(matches!(err, Error::Domain(_)), "{err}");
        let err = difference(&m, &x, 0.0, &near, &near).unwrap_err();
        assert!(matches!(err, Error::Argument(_)), "{err}");
    }

    #[test]
    fn inclusion_constants_hold_for_every_model() {
        let schedule = dyadic_schedule(1, 6);
        let mut all: Vec<Box<dyn DilationStructure>> = exact_models();
        all.push(Box::new(LogPerturbedEuclidean::new(2).unwrap()));
        for m in all {
            let x = base_for(m.as_ref());
            let rep = check_a0(m.as_ref(), &x, &schedule, 200, 77).unwrap();
            assert!(rep.ball_inclusion_holds, "{} pullback", m.name());
            assert!(rep.reach_inclusion_holds, "{} reach", m.name());
            assert!(rep.max_pullback_ratio <= 1.0 + 1e-9);
            assert!(rep.max_reach_ratio <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn combined_report_is_ok_for_all_shipped_models() {
        let schedule = dyadic_schedule(3, 10);
        let mut all: Vec<Box<dyn DilationStructure>> = exact_models();
        all.push(Box::new(LogPerturbedEuclidean::new(2).unwrap()));
        for m in all {
            let x = base_for(m.as_ref());
            let rep = axiom_report(m.as_ref(), &x, &schedule, 40, 123).unwrap();
            assert!(rep.ok, "{} failed its axiom battery", m.name());
            let json = serde_json::to_string(&rep).unwrap();
            assert!(json.contains("\"a3\""));
        }
    }
}
