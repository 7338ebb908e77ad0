//! Release gates for the toolkit. Each test evaluates one gate end to end,
//! prints a single `gate N (...): PASS|FAIL` line (visible with
//! `--nocapture`, and always on failure), and then asserts it. The
//! tolerances are pinned here on purpose — they are the contract.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mc_core::{
    axiom_report, build_zoom, cascade_check, check_a1_a2, check_a3, check_a4,
    check_generalization_bounds, conical_checks, dyadic_schedule, foveal,
    foveal_fixedpoint_check, gh_exact, gh_oracle, linearity_residual, pansu_map_by_name,
    pansu_residual, scale_stability, structure_by_name, FiniteMetricSpace, PointId, Relation,
    SharedSpace, SharedStructure, Verdict, ZoomConfig,
};

/// Universal inequality rows may undershoot by at most this much.
const UNIVERSAL_SLACK: f64 = -1e-9;
/// Residuals that exact arithmetic should drive to zero.
const EXACT_TOL: f64 = 1e-12;
/// Gauge homogeneity on dyadic scales.
const GAUGE_TOL: f64 = 1e-14;
/// Linearity laws of the tangent operations.
const LINEARITY_TOL: f64 = 1e-9;
/// Fovea fixed-point identification.
const FIXEDPOINT_TOL: f64 = 1e-9;
/// Acceptable window around a first-order decay fit.
const ORDER_LO: f64 = 0.8;
const ORDER_HI: f64 = 1.2;

fn gate(id: u32, name: &str, pass: bool) {
    println!(
        "gate {id} ({name}): {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "gate {id} ({name}) failed");
}

fn max_residual(residuals: &[f64]) -> f64 {
    residuals.iter().cloned().fold(0.0, f64::max)
}

// ------------------------------------------------------- random inputs --

/// Random point cloud on the line or in the plane.
fn random_cloud_space(rng: &mut ChaCha8Rng, n: usize) -> SharedSpace {
    if rng.random_range(0..2) == 0 {
        let pts: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..4.0)).collect();
        Arc::new(FiniteMetricSpace::from_points_auto(&pts, |a, b| {
            (a - b).abs()
        }))
    } else {
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|_| [rng.random_range(0.0..4.0), rng.random_range(0.0..4.0)])
            .collect();
        Arc::new(FiniteMetricSpace::from_points_auto(&pts, |a, b| {
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
        }))
    }
}

/// Shortest-path closure of a random positive symmetric matrix: a metric
/// that is usually not embeddable in any Euclidean space.
fn random_path_space(rng: &mut ChaCha8Rng, n: usize) -> SharedSpace {
    let mut d = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.random_range(0.1..1.1);
            d[i * n + j] = w;
            d[j * n + i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + k] + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                    d[j * n + i] = via;
                }
            }
        }
    }
    let rows: Vec<Vec<f64>> = (0..n).map(|i| d[i * n..(i + 1) * n].to_vec()).collect();
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    Arc::new(FiniteMetricSpace::new(labels, rows).expect("square symmetric matrix"))
}

fn random_space(rng: &mut ChaCha8Rng, max_n: usize) -> SharedSpace {
    let n = rng.random_range(2..=max_n);
    let space = if rng.random_range(0..3) == 0 {
        random_path_space(rng, n)
    } else {
        random_cloud_space(rng, n)
    };
    assert!(space.validate().ok, "generator must produce valid metrics");
    space
}

fn one_point_space() -> SharedSpace {
    Arc::new(FiniteMetricSpace::from_points_auto(&[0.0], |a: &f64, b| {
        (a - b).abs()
    }))
}

fn line_space(n: usize, step: f64) -> SharedSpace {
    let pts: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
    Arc::new(FiniteMetricSpace::from_points_auto(&pts, |a, b| {
        (a - b).abs()
    }))
}

/// Nonempty random relation between two spaces.
fn random_relation(rng: &mut ChaCha8Rng, x: &SharedSpace, y: &SharedSpace) -> Relation {
    let mut pairs = Vec::new();
    for i in 0..x.len() {
        for j in 0..y.len() {
            if rng.random_range(0.0..1.0) < 0.35 {
                pairs.push((PointId(i), PointId(j)));
            }
        }
    }
    if pairs.is_empty() {
        pairs.push((
            PointId(rng.random_range(0..x.len())),
            PointId(rng.random_range(0..y.len())),
        ));
    }
    Relation::new(x.clone(), y.clone(), pairs).expect("indices are in range")
}

/// Smallest radii making the domain/image dense, plus a random surplus.
fn admissible_radii(rng: &mut ChaCha8Rng, rho: &Relation) -> (f64, f64) {
    let eps0 = rho
        .src()
        .points()
        .map(|x| {
            rho.pairs()
                .iter()
                .map(|&(a, _)| rho.src().dist(x, a))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let mu0 = rho
        .dst()
        .points()
        .map(|y| {
            rho.pairs()
                .iter()
                .map(|&(_, b)| rho.dst().dist(y, b))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let eps = eps0 + rng.random_range(0.0..0.5) * rho.src().diameter();
    let mu = mu0 + rng.random_range(0.0..0.5) * rho.dst().diameter();
    (eps, mu)
}

// --------------------------------------------------------------- gates --

#[test]
fn gate_1_generalization_bound_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut pass = true;

    for round in 0..500 {
        let x = random_space(&mut rng, 12);
        let y = random_space(&mut rng, 12);
        let rho = random_relation(&mut rng, &x, &y);
        let (eps, mu) = admissible_radii(&mut rng, &rho);
        let bar = rho
            .generalize(eps, mu)
            .expect("radii are chosen to satisfy the density preconditions");
        let report = check_generalization_bounds(&rho, &bar, eps, mu).unwrap();
        for row in report.rows.iter().filter(|r| !r.witness_dependent) {
            if row.slack < UNIVERSAL_SLACK {
                eprintln!("round {round}: rule {} slack {}", row.rule, row.slack);
                pass = false;
            }
        }
    }

    // Constructed grids where the thickening radii are multiples of the
    // grid step, so the boundary witnesses for the lower rows exist.
    let h = 0.125;
    for t in 0..20usize {
        let n = 17 + t;
        let k = 1.0 + (t % 4) as f64;
        let l = 1.0 + ((t / 4) % 4) as f64;
        let rho = Relation::identity(line_space(n, h));
        let (eps, mu) = (k * h, l * h);
        let bar = rho.generalize(eps, mu).unwrap();
        let report = check_generalization_bounds(&rho, &bar, eps, mu).unwrap();
        for row in &report.rows {
            if !row.holds {
                eprintln!("grid {t}: rule {} slack {}", row.rule, row.slack);
                pass = false;
            }
        }
    }

    gate(1, "generalization bounds", pass);
}

#[test]
fn gate_2_correspondence_distance_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut pass = true;

    for round in 0..200 {
        let x = random_space(&mut rng, 4);
        let y = random_space(&mut rng, 4);
        let solved = gh_exact(&x, &y, 1_000_000).unwrap();
        let oracle = gh_oracle(&x, &y).unwrap();
        if !solved.exact || (solved.value - oracle).abs() > EXACT_TOL {
            eprintln!(
                "round {round}: solver {} vs oracle {oracle}",
                solved.value
            );
            pass = false;
        }
    }

    for _ in 0..50 {
        let x = random_space(&mut rng, 10);
        let self_dist = gh_exact(&x, &x, 10_000_000).unwrap();
        if !(self_dist.exact && self_dist.value == 0.0) {
            eprintln!("self distance {} is not exactly zero", self_dist.value);
            pass = false;
        }
        let single = one_point_space();
        let against_point = gh_exact(&single, &x, 10_000_000).unwrap();
        if (against_point.value - x.diameter()).abs() > EXACT_TOL {
            eprintln!(
                "one-point distance {} vs diameter {}",
                against_point.value,
                x.diameter()
            );
            pass = false;
        }
    }

    for round in 0..50 {
        let a = random_space(&mut rng, 4);
        let b = random_space(&mut rng, 4);
        let c = random_space(&mut rng, 4);
        let ab = gh_exact(&a, &b, 1_000_000).unwrap().value;
        let ba = gh_exact(&b, &a, 1_000_000).unwrap().value;
        let bc = gh_exact(&b, &c, 1_000_000).unwrap().value;
        let ac = gh_exact(&a, &c, 1_000_000).unwrap().value;
        if (ab - ba).abs() > EXACT_TOL {
            eprintln!("round {round}: asymmetry {ab} vs {ba}");
            pass = false;
        }
        if ac > ab + bc + 1e-9 {
            eprintln!("round {round}: triangle failure {ac} > {ab} + {bc}");
            pass = false;
        }
    }

    gate(2, "correspondence distance vs oracle", pass);
}

#[test]
fn gate_3_dilation_axiom_residuals() {
    let schedule = dyadic_schedule(3, 10);
    let mut pass = true;

    // Structures whose rescaled distances should match their tangent
    // distances to machine precision at every dyadic scale.
    for name in ["euclid", "snowflake", "heis"] {
        let s: SharedStructure = structure_by_name(name, 2, 0.5).unwrap();
        let x = s.origin();

        let (a1, a2) = check_a1_a2(s.as_ref(), &x, &schedule, 10_000, 313).unwrap();
        if max_residual(&a1.residuals) > EXACT_TOL || max_residual(&a2.residuals) > EXACT_TOL {
            eprintln!("{name}: base-identity residuals too large");
            pass = false;
        }

        // 10^4 probe points, batched to keep the pairwise tangent
        // comparison quadratic only within each batch.
        let mut rng = ChaCha8Rng::seed_from_u64(314);
        let mut seen = 0usize;
        let mut worst_tangent = 0.0f64;
        while seen < 10_000 {
            let probes: Vec<_> = (0..64)
                .map(|_| s.attach(&x, &s.random_offset(&mut rng, s.domain_radius())))
                .collect();
            seen += probes.len();
            let a3 = check_a3(s.as_ref(), &x, &probes, &schedule, true).unwrap();
            worst_tangent = worst_tangent.max(max_residual(&a3.estimate.residuals));
        }
        if worst_tangent > EXACT_TOL {
            eprintln!("{name}: tangent residual {worst_tangent}");
            pass = false;
        }

        // 10^4 sampled pairs through the difference maps; the cone identity
        // is the per-scale comparison against the structure's own distance.
        let mut worst_cone = 0.0f64;
        for batch in 0..40u64 {
            let a4 = check_a4(s.as_ref(), &x, &schedule, 250, 315 + batch).unwrap();
            worst_cone = worst_cone.max(max_residual(&a4.cone_identity.residuals));
        }
        if worst_cone > EXACT_TOL {
            eprintln!("{name}: difference-map cone residual {worst_cone}");
            pass = false;
        }
    }

    let lp = structure_by_name("logpe", 2, 0.5).unwrap();
    let report = axiom_report(lp.as_ref(), &lp.origin(), &schedule, 10_000, 316).unwrap();
    for (check, order) in [
        ("a3", report.a3.estimate.fitted_order),
        ("a4", report.a4.estimate.fitted_order),
    ] {
        if !(ORDER_LO..=ORDER_HI).contains(&order) {
            eprintln!("log-perturbed {check} fitted order {order}");
            pass = false;
        }
    }

    gate(3, "dilation axiom residuals", pass);
}

#[test]
fn gate_4_conical_group_laws() {
    let schedule = dyadic_schedule(3, 10);
    let report = conical_checks(&mc_core::HeisenbergGroup, &schedule, 10_000, 100_000, 404).unwrap();
    let mut pass = report.ok;
    if report.norm.homogeneity > GAUGE_TOL {
        eprintln!("gauge homogeneity {}", report.norm.homogeneity);
        pass = false;
    }
    if report.norm.subadditivity_violation != 0.0 {
        eprintln!(
            "subadditivity violation {}",
            report.norm.subadditivity_violation
        );
        pass = false;
    }
    if report.morphism > EXACT_TOL {
        eprintln!("dilation morphism residual {}", report.morphism);
        pass = false;
    }

    let heis = structure_by_name("heis", 3, 0.5).unwrap();
    let lin = linearity_residual(heis.as_ref(), &heis.origin(), 0.5, 0.25, 2_048, 405).unwrap();
    if lin.max() > LINEARITY_TOL {
        eprintln!("linearity residual {}", lin.max());
        pass = false;
    }

    gate(4, "conical group laws", pass);
}

#[test]
fn gate_5_cascade_and_self_similarity() {
    let config = ZoomConfig::default();
    let mut pass = true;

    for name in ["euclid", "snowflake", "logpe", "heis"] {
        let s = structure_by_name(name, 2, 0.5).unwrap();
        let z = build_zoom(&s, &s.origin(), &config).unwrap();
        for mu in [0.5, 0.25] {
            let cascade = cascade_check(&z, mu).unwrap();
            if !cascade.ok || cascade.rows.iter().any(|r| !r.holds) {
                eprintln!("{name}: cascade row failed at mu {mu}");
                pass = false;
            }
        }
        let stability = scale_stability(&z, 0.5).unwrap();
        match name {
            "euclid" | "heis" => {
                let worst = stability
                    .drift_rows
                    .iter()
                    .map(|r| r.drift)
                    .fold(0.0, f64::max);
                if worst > EXACT_TOL {
                    eprintln!("{name}: stage drift {worst}");
                    pass = false;
                }
            }
            "logpe" => {
                let order = stability.drift.fitted_order;
                if !(ORDER_LO..=ORDER_HI).contains(&order) {
                    eprintln!("{name}: drift fitted order {order}");
                    pass = false;
                }
            }
            _ => {}
        }
    }

    gate(5, "cascade inequality and self-similarity", pass);
}

#[test]
fn gate_6_foveal_charts() {
    let config = ZoomConfig::default();
    let mut pass = true;

    let lp = structure_by_name("logpe", 2, 0.5).unwrap();
    let z_lp = build_zoom(&lp, &lp.origin(), &config).unwrap();
    for mu in [0.5, 0.25] {
        let sequence = foveal(&z_lp, mu).unwrap();
        if !sequence.report.ok {
            eprintln!("log-perturbed foveal tables failed at mu {mu}");
            pass = false;
        }
    }

    let eu = structure_by_name("euclid", 2, 0.5).unwrap();
    let z_eu = build_zoom(&eu, &eu.origin(), &config).unwrap();
    let fov = foveal(&z_eu, 0.5).unwrap();
    for (k, &eps) in z_eu.schedule().to_vec().iter().enumerate() {
        let chart = z_eu.relation_at(eps).unwrap();
        let identical = fov.relations[k].pairs() == chart.pairs()
            && Arc::ptr_eq(fov.relations[k].src(), chart.src())
            && Arc::ptr_eq(fov.relations[k].dst(), chart.dst());
        if !identical {
            eprintln!("euclidean foveal chart differs from its source at {eps}");
            pass = false;
        }
    }

    let heis = structure_by_name("heis", 3, 0.5).unwrap();
    let z_heis = build_zoom(&heis, &heis.origin(), &config).unwrap();
    for z in [&z_eu, &z_heis] {
        for mu in [0.5, 0.25] {
            let fixedpoint = foveal_fixedpoint_check(z, mu).unwrap();
            if fixedpoint.max_hausdorff > FIXEDPOINT_TOL {
                eprintln!("fixed-point gap {}", fixedpoint.max_hausdorff);
                pass = false;
            }
        }
    }

    gate(6, "foveal charts", pass);
}

#[test]
fn gate_7_derivative_residuals() {
    let schedule = dyadic_schedule(3, 10);
    let mut pass = true;

    let linear = pansu_map_by_name("linear", None).unwrap();
    let report = pansu_residual(&linear, &schedule, 256, 707).unwrap();
    if max_residual(&report.estimate.residuals) > EXACT_TOL {
        eprintln!(
            "linear residual {}",
            max_residual(&report.estimate.residuals)
        );
        pass = false;
    }

    let smooth = pansu_map_by_name("smooth", None).unwrap();
    let report = pansu_residual(&smooth, &schedule, 256, 708).unwrap();
    if report.estimate.fitted_order < 1.0 {
        eprintln!("smooth fitted order {}", report.estimate.fitted_order);
        pass = false;
    }

    let shear = pansu_map_by_name("shear", None).unwrap();
    let report = pansu_residual(&shear, &schedule, 256, 709).unwrap();
    // schedule[1] = 2^-4, schedule[7] = 2^-10.
    let growing = report.estimate.residuals[7] > report.estimate.residuals[1];
    if !matches!(report.estimate.verdict, Verdict::Diverges) || !growing {
        eprintln!(
            "shear verdict {:?}, residuals {:?}",
            report.estimate.verdict, report.estimate.residuals
        );
        pass = false;
    }

    gate(7, "derivative residuals", pass);
}
