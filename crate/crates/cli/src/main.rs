//! Command-line front door for the metric cartography toolkit: space and
//! relation I/O, quality reports, correspondence-distance solving, axiom
//! suites, zoom and foveal experiments, and reproducible run manifests.
//!
//! Exit codes: 0 success (including solver runs that return `exact: false`
//! after exhausting their budget), 2 unusable input (unreadable files,
//! schema violations, bad flags), 3 domain violations (invalid metrics,
//! failed preconditions).

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use mc_core::dilation::{pansu_map_by_name, structure_by_name, SharedStructure};
use mc_core::zoom::{
    build_zoom, cascade_check, foveal, foveal_fixedpoint_check, scale_stability,
    viewpoint_stability, ZoomConfig,
};
use mc_core::{
    axiom_report, check_generalization_bounds, dyadic_schedule, gh_exact, pansu_residual,
    FiniteMetricSpace, ModelPoint, Relation,
};

use config::{pick, pick_opt, require, FileConfig};
use output::{cell, emit, CmdOutput, CsvTable};

/// A failed run: exit code plus a one-line message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: String) -> Self {
        Self { code, message }
    }

    pub fn input(message: String) -> Self {
        Self::new(2, message)
    }

    pub fn domain(message: String) -> Self {
        Self::new(3, message)
    }
}

impl From<mc_core::Error> for Failure {
    fn from(e: mc_core::Error) -> Self {
        use mc_core::Error::*;
        let code = match &e {
            Argument(_) | Parse(_) | Io(_) | Structural(_) => 2,
            Precondition(_) | Domain(_) => 3,
        };
        Self::new(code, e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "mc",
    version,
    about = "Quality functionals, correspondence distances, dilation structures, \
             and multi-scale charts over finite metric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker pool size; defaults to the available parallelism. Any value
    /// yields the same numeric output.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Seed for every randomized sampler.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the JSON report here (and a run manifest alongside) instead of
    /// printing it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Also emit the report's main table as CSV (to stdout when no --out,
    /// else next to the JSON file).
    #[arg(long, global = true)]
    csv: bool,

    /// TOML or JSON file supplying defaults for any flag; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a space file against the metric axioms.
    Validate(ValidateArgs),
    /// Accuracy, resolution, and precision of a relation.
    Quality(QualityArgs),
    /// Thicken a relation into a total surjective one and check the
    /// accuracy/resolution/precision bounds.
    Generalize(GeneralizeArgs),
    /// Correspondence distance between two spaces (branch and bound).
    Gh(GhArgs),
    /// Dilation-structure axiom battery for a model structure.
    Axioms(AxiomsArgs),
    /// Multi-scale chart: modulus, cascade inequality, scale stability.
    Zoom(ZoomArgs),
    /// Foveal charts and their fixed-point check.
    Foveal(FovealArgs),
    /// Derivative residual of a map between model structures.
    Pansu(PansuArgs),
}

#[derive(Args)]
struct ValidateArgs {
    /// Space file, JSON or CSV.
    #[arg(value_name = "SPACE")]
    space: Option<PathBuf>,
}

#[derive(Args)]
struct QualityArgs {
    /// Relation file referencing its two space files.
    #[arg(long)]
    relation: Option<PathBuf>,
}

#[derive(Args)]
struct GeneralizeArgs {
    #[arg(long)]
    relation: Option<PathBuf>,
    /// Territory-side thickening radius.
    #[arg(long)]
    eps: Option<f64>,
    /// Map-side thickening radius.
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Args)]
struct GhArgs {
    /// First space file.
    #[arg(long)]
    x: Option<String>,
    /// Second space file.
    #[arg(long)]
    y: Option<String>,
    /// Node budget for the exact search; exceeding it returns bounds with
    /// `exact: false` and exit code 0.
    #[arg(long)]
    budget: Option<u64>,
    /// Report half the correspondence distance (the classical convention).
    #[arg(long)]
    classical: bool,
}

#[derive(Args)]
struct AxiomsArgs {
    /// euclid | snowflake | logpe | heis.
    #[arg(long)]
    structure: Option<String>,
    /// Snowflake exponent.
    #[arg(long)]
    alpha: Option<f64>,
    /// Model dimension (euclid/snowflake/logpe; heis is always 3).
    #[arg(long)]
    dim: Option<usize>,
    /// Base point as comma-separated coordinates; defaults to the origin.
    #[arg(long)]
    x: Option<String>,
    /// Dyadic scale window "lo:hi" meaning 2^-lo .. 2^-hi.
    #[arg(long)]
    schedule: Option<String>,
    /// Sample count per check.
    #[arg(long)]
    samples: Option<usize>,
    /// Report path (synonym for --out).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ZoomArgs {
    #[arg(long)]
    structure: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    /// Base point as comma-separated coordinates; defaults to the origin.
    #[arg(long)]
    x: Option<String>,
    /// Scale ratio between consecutive stages.
    #[arg(long)]
    mu: Option<f64>,
    /// Dyadic scale window "lo:hi".
    #[arg(long)]
    schedule: Option<String>,
    /// Minimum template size.
    #[arg(long)]
    resolution: Option<usize>,
    /// Also report the viewpoint change to this template offset index.
    #[arg(long)]
    viewpoint: Option<usize>,
}

#[derive(Args)]
struct FovealArgs {
    #[arg(long)]
    structure: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    x: Option<String>,
    /// Fovea ratio.
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Args)]
struct PansuArgs {
    /// linear | smooth | shear.
    #[arg(long)]
    map: Option<String>,
    /// Expected source structure; rejected if it disagrees with the map.
    #[arg(long)]
    structure: Option<String>,
    /// Base point override for the differentiation.
    #[arg(long)]
    base: Option<String>,
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
}

/// What a command hands back to `main` for emission.
struct CmdResult {
    output: CmdOutput,
    /// Effective merged settings, hashed into the manifest.
    effective: serde_json::Value,
    code: u8,
    /// Command-specific output path (e.g. `axioms --report`).
    out_override: Option<PathBuf>,
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = Cli::parse();
    match run(cli, started) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("mc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli, started: Instant) -> Result<u8, Failure> {
    let file_cfg = match &cli.config {
        Some(path) => FileConfig::read(path)?,
        None => FileConfig::default(),
    };
    let jobs = pick(cli.jobs, file_cfg.jobs, 0);
    // num_threads(0) means "available parallelism" for the pool builder.
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .map_err(|e| Failure::input(format!("worker pool: {e}")))?;
    let seed = pick(cli.seed, file_cfg.seed, 0);
    let want_csv = cli.csv || file_cfg.csv.unwrap_or(false);

    let result = match &cli.command {
        Command::Validate(args) => cmd_validate(args, &file_cfg)?,
        Command::Quality(args) => cmd_quality(args, &file_cfg)?,
        Command::Generalize(args) => cmd_generalize(args, &file_cfg)?,
        Command::Gh(args) => cmd_gh(args, &file_cfg)?,
        Command::Axioms(args) => cmd_axioms(args, &file_cfg, seed)?,
        Command::Zoom(args) => cmd_zoom(args, &file_cfg)?,
        Command::Foveal(args) => cmd_foveal(args, &file_cfg)?,
        Command::Pansu(args) => cmd_pansu(args, &file_cfg, seed)?,
    };

    let out = result
        .out_override
        .or(pick_opt(cli.out, file_cfg.out.clone()));
    emit(
        out.as_deref(),
        want_csv,
        &result.output,
        seed,
        &result.effective,
        started,
    )?;
    Ok(result.code)
}

// ------------------------------------------------------------- helpers --

fn parse_coords(text: &str) -> Result<ModelPoint, Failure> {
    text.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|e| Failure::input(format!("coordinate '{c}': {e}")))
        })
        .collect()
}

fn parse_schedule(text: &str) -> Result<Vec<f64>, Failure> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| Failure::input(format!("schedule '{text}' must look like lo:hi")))?;
    let lo: u32 = lo
        .trim()
        .parse()
        .map_err(|e| Failure::input(format!("schedule bound '{lo}': {e}")))?;
    let hi: u32 = hi
        .trim()
        .parse()
        .map_err(|e| Failure::input(format!("schedule bound '{hi}': {e}")))?;
    if lo > hi || hi > 40 {
        return Err(Failure::input(format!(
            "schedule {lo}:{hi} must satisfy lo <= hi <= 40"
        )));
    }
    Ok(dyadic_schedule(lo, hi))
}

fn resolve_structure(
    name: Option<String>,
    dim: Option<usize>,
    alpha: Option<f64>,
) -> Result<(SharedStructure, serde_json::Value), Failure> {
    let name = name.ok_or_else(|| Failure::input("missing required flag --structure".into()))?;
    let dim = dim.unwrap_or(2);
    let alpha = alpha.unwrap_or(0.5);
    let structure = structure_by_name(&name, dim, alpha)?;
    let effective = json!({
        "structure": structure.name(),
        "dim": structure.dim(),
        "alpha": alpha,
    });
    Ok((structure, effective))
}

fn read_space(path: &std::path::Path) -> Result<FiniteMetricSpace, Failure> {
    Ok(FiniteMetricSpace::read_auto(path)?)
}

/// Metric violations are domain errors (exit 3), reported with the first
/// offending triple.
fn require_valid_metric(space: &FiniteMetricSpace, role: &str) -> Result<(), Failure> {
    let report = space.validate();
    if report.ok {
        return Ok(());
    }
    let first = &report.violations[0];
    Err(Failure::domain(format!(
        "{role} space violates the metric axioms: {:?} at points {:?} (slack {:.3e}), {} violation(s) total",
        first.kind,
        first.points.map(|p| p.0),
        first.slack,
        report.violations.len()
    )))
}

// ------------------------------------------------------------ commands --

fn cmd_validate(args: &ValidateArgs, cfg: &FileConfig) -> Result<CmdResult, Failure> {
    let path = require(args.space.clone(), cfg.space.clone(), "space (positional)")?;
    let space = read_space(&path)?;
    let report = space.validate();
    let code = if report.ok { 0 } else { 3 };

    let mut table = CsvTable::new(vec!["kind", "i", "j", "k", "slack"]);
    for v in &report.violations {
        table.push(vec![
            format!("{:?}", v.kind),
            v.points[0].0.to_string(),
            v.points[1].0.to_string(),
            v.points[2].0.to_string(),
            cell(v.slack),
        ]);
    }
    Ok(CmdResult {
        output: CmdOutput {
            json: serde_json::to_value(&report)
                .map_err(|e| Failure::input(format!("report serialization: {e}")))?,
            table,
        },
        effective: json!({"command": "validate", "space": path.display().to_string()}),
        code,
        out_override: None,
    })
}

fn cmd_quality(args: &QualityArgs, cfg: &FileConfig) -> Result<CmdResult, Failure> {
    let path = require(args.relation.clone(), cfg.relation.clone(), "relation")?;
    let relation = Relation::read_json(&path)?;
    require_valid_metric(relation.src(), "source")?;
    require_valid_metric(relation.dst(), "destination")?;
    let quality = relation.quality();

    let mut table = CsvTable::new(vec!["quantity", "point", "value"]);
    table.push(vec!["accuracy".to_string(), String::new(), cell(quality.accuracy)]);
    table.push(vec!["resolution".to_string(), String::new(), cell(quality.resolution)]);
    table.push(vec!["precision".to_string(), String::new(), cell(quality.precision)]);
    for (p, v) in &quality.resolution_at {
        table.push(vec![
            "resolution_at".to_string(),
            relation.dst().label(*p).to_string(),
            cell(*v),
        ]);
    }
    for (p, v) in &quality.precision_at {
        table.push(vec![
            "precision_at".to_string(),
            relation.src().label(*p).to_string(),
            cell(*v),
        ]);
    }
    Ok(CmdResult {
        output: CmdOutput {
            json: serde_json::to_value(&quality)
                .map_err(|e| Failure::input(format!("report serialization: {e}")))?,
            table,
        },
        effective: json!({"command": "quality", "relation": path.display().to_string()}),
        code: 0,
        out_override: None,
    })
}

fn cmd_generalize(args: &GeneralizeArgs, cfg: &FileConfig) -> Result<CmdResult, Failure> {
    let path = require(args.relation.clone(), cfg.relation.clone(), "relation")?;
    let eps = require(args.eps, cfg.eps, "eps")?;
    let mu = require(args.mu, cfg.mu, "mu")?;
    let relation = Relation::read_json(&path)?;
    require_valid_metric(relation.src(), "source")?;
    require_valid_metric(relation.dst(), "destination")?;
    let thickened = relation.generalize(eps, mu)?;
    let bounds = check_generalization_bounds(&relation, &thickened, eps, mu)?;
    let quality = thickened.quality();
    let pairs: Vec<(usize, usize)> = thickened.pairs().iter().map(|&(a, b)| (a.0, b.0)).collect();

    let mut table = CsvTable::new(vec!["rule", "lhs", "rhs", "slack", "holds", "witness_dependent"]);
    for row in &bounds.rows {
        table.push(vec![
            row.rule.clone(),
            cell(row.lhs),
            cell(row.rhs),
            cell(row.slack),
            row.holds.to_string(),
            row.witness_dependent.to_string(),
        ]);
    }
    Ok(CmdResult {
        output: CmdOutput {
            json: json!({
                "eps": eps,
                "mu": mu,
                "pairs": pairs,
                "quality": quality,
                "bounds": bounds,
            }),
            table,
        },
        effective: json!({
            "command": "generalize",
            "relation": path.display().to_string(),
            "eps": eps,
            "mu": mu,
        }),
        code: 0,
        out_override: None,
    })
}

fn cmd_gh(args: &GhArgs, cfg: &FileConfig) -> Result<CmdResult, Failure> {
    let x_path = PathBuf::from(require(args.x.clone(), cfg.x.clone(), "x")?);
    let y_path = PathBuf::from(require(args.y.clone(), cfg.y.clone(), "y")?);
    let budget = pick(args.budget, cfg.budget, 10_000_000);
    let classical = args.classical || cfg.classical.unwrap_or(false);

    let x = read_space(&x_path)?;
    let y = read_space(&y_path)?;
    require_valid_metric(&x, "first")?;
    require_valid_metric(&y, "second")?;
    let result = gh_exact(&Arc::new(x), &Arc::new(y), budget)?;
    let mut report = result.report();
    if classical {
        report.value /= 2.0;
        report.lower_bound /= 2.0;
        report.upper_bound /= 2.0;
    }

    let mut json = serde_json::to_value(&report)
        .map_err(|e| Failure::input(format!("report serialization: {e}")))?;
    json["classical"] = json!(classical);

    let mut table = CsvTable::new(vec!["value", "exact", "lower_bound", "upper_bound", "nodes"]);
    table.push(vec![
        cell(report.value),
        report.exact.to_string(),
        cell(report.lower_bound),
        cell(report.upper_bound),
        report.nodes_explored.to_string(),
    ]);
    Ok(CmdResult {
        output: CmdOutput { json, table },
        effective: json!({
            "command": "gh",
            "x": x_path.display().to_string(),
            "y": y_path.display().to_string(),
            "budget": budget,
            "classical": classical,
        }),
        code: 0,
        out_override: None,
    })
}

fn cmd_axioms(args: &AxiomsArgs, cfg: &FileConfig, seed: u64) -> Result<CmdResult, Failure> {
    let (structure, mut effective) = resolve_structure(
        pick_opt(args.structure.clone(), cfg.structure.clone()),
        pick_opt(args.dim, cfg.dim),
        pick_opt(args.alpha, cfg.alpha),
    )?;
    let schedule = parse_schedule(&pick(
        args.schedule.clone(),
        cfg.schedule.clone(),
        "3:10".into(),
    ))?;
    let samples = pick(args.samples, cfg.samples, 256);
    let x = match pick_opt(args.x.clone(), cfg.x.clone()) {
        Some(text) => parse_coords(&text)?,
        None => structure.origin(),
    };
    let report = axiom_report(structure.as_ref(), &x, &schedule, samples, seed)?;

    let mut table = CsvTable::new(vec!["eps", "a1", "a2", "a3", "a4"]);
    for (k, &eps) in schedule.iter().enumerate() {
        table.push(vec![
            cell(eps),
            cell(report.a1.residuals[k]),
            cell(report.a2.residuals[k]),
            cell(report.a3.estimate.residuals[k]),
            report
                .a4
                .estimate
                .residuals
                .get(k)
                .map(|&r| cell(r))
                .unwrap_or_default(),
        ]);
    }
    effective["command"] = json!("axioms");
    effective["samples"] = json!(samples);
    effective["seed"] = json!(seed);
    effective["schedule"] = json!(schedule);
    Ok(CmdResult {
        output: CmdOutput {
            json: serde_json::to_value(&report)
                .map_err(|e| Failure::input(format!("report serialization: {e}")))?,
            table,
        },
        effective,
        code: 0,
        out_override: pick_opt(args.report.clone(), cfg.report.clone()),
    })
}

fn cmd_zoom(args: &ZoomArgs, cfg: &FileConfig) -> Result<CmdResult, Failure> {
    let (structure, mut effective) = resolve_structure(
        pick_opt(args.structure.clone(), cfg.structure.clone()),
        pick_opt(args.dim, cfg.dim),
        pick_opt(args.alpha, cfg.alpha),
    )?;
    let schedule = parse_schedule(&pick(
        args.schedule.clone(),
        cfg.schedule.clone(),
        "3:10".into(),
    ))?;
    let mu = pick(args.mu, cfg.mu, 0.5);
    let resolution = pick(args.resolution, cfg.resolution, 20);
    let x = match pick_opt(args.x.clone(), cfg.x.clone()) {
        Some(text) => parse_coords(&text)?,
        None => structure.origin(),
    };
    let zoom_cfg = ZoomConfig {
        schedule: schedule.clone(),
        ball_resolution: resolution,
        max_step_bits: 6,
    };
    let zoom = build_zoom(&structure, &x, &zoom_cfg)?;
    let cascade = cascade_check(&zoom, mu)?;
    let stability = scale_stability(&zoom, mu)?;
    let viewpoint = match pick_opt(args.viewpoint, cfg.viewpoint) {
        Some(idx) => Some(viewpoint_stability(&zoom, idx)?),
        None => None,
    };

    let mut table = CsvTable::new(vec![
        "eps",
        "modulus",
        "cascade_measured",
        "cascade_bound",
        "cascade_holds",
        "drift",
        "drift_bound",
        "drift_holds",
    ]);
    for (k, &eps) in schedule.iter().enumerate() {
        table.push(vec![
            cell(eps),
            cell(zoom.modulus()[k]),
            cell(cascade.rows[k].measured),
            cell(cascade.rows[k].bound),
            cascade.rows[k].holds.to_string(),
            cell(stability.drift_rows[k].drift),
            cell(stability.drift_rows[k].bound),
            stability.drift_rows[k].holds.to_string(),
        ]);
    }
    effective["command"] = json!("zoom");
    effective["mu"] = json!(mu);
    effective["schedule"] = json!(schedule);
    effective["resolution"] = json!(resolution);
    effective["x"] = json!(x.to_vec());
    Ok(CmdResult {
        output: CmdOutput {
            json: json!({
                "chart": zoom.report(),
                "cascade": cascade,
                "stability": stability,
                "viewpoint": viewpoint,
            }),
            table,
        },
        effective,
        code: 0,
        out_override: None,
    })
}

fn cmd_foveal(args: &FovealArgs, cfg: &FileConfig) -> Result<CmdResult, Failure> {
    let (structure, mut effective) = resolve_structure(
        pick_opt(args.structure.clone(), cfg.structure.clone()),
        pick_opt(args.dim, cfg.dim),
        pick_opt(args.alpha, cfg.alpha),
    )?;
    let schedule = parse_schedule(&pick(
        args.schedule.clone(),
        cfg.schedule.clone(),
        "3:10".into(),
    ))?;
    let mu = pick(args.mu, cfg.mu, 0.5);
    let resolution = pick(args.resolution, cfg.resolution, 20);
    let x = match pick_opt(args.x.clone(), cfg.x.clone()) {
        Some(text) => parse_coords(&text)?,
        None => structure.origin(),
    };
    let zoom_cfg = ZoomConfig {
        schedule: schedule.clone(),
        ball_resolution: resolution,
        max_step_bits: 6,
    };
    let zoom = build_zoom(&structure, &x, &zoom_cfg)?;
    let sequence = foveal(&zoom, mu)?;
    let fixedpoint = foveal_fixedpoint_check(&zoom, mu)?;

    let mut table = CsvTable::new(vec![
        "eps",
        "inner_measured",
        "inner_bound",
        "inner_holds",
        "global_measured",
        "global_bound",
        "global_holds",
        "fixedpoint_gap",
    ]);
    for (k, &eps) in schedule.iter().enumerate() {
        let inner = &sequence.report.inner_rows[k];
        let global = &sequence.report.global_rows[k];
        table.push(vec![
            cell(eps),
            cell(inner.measured),
            cell(inner.bound),
            inner.holds.to_string(),
            cell(global.measured),
            cell(global.bound),
            global.holds.to_string(),
            cell(fixedpoint.rows[k].hausdorff),
        ]);
    }
    effective["command"] = json!("foveal");
    effective["mu"] = json!(mu);
    effective["schedule"] = json!(schedule);
    effective["resolution"] = json!(resolution);
    effective["x"] = json!(x.to_vec());
    Ok(CmdResult {
        output: CmdOutput {
            json: json!({
                "chart": zoom.report(),
                "foveal": sequence.report,
                "fixedpoint": fixedpoint,
            }),
            table,
        },
        effective,
        code: 0,
        out_override: None,
    })
}

fn cmd_pansu(args: &PansuArgs, cfg: &FileConfig, seed: u64) -> Result<CmdResult, Failure> {
    let map_name = require(args.map.clone(), cfg.map.clone(), "map")?;
    let base = match pick_opt(args.base.clone(), cfg.base.clone()) {
        Some(text) => Some(parse_coords(&text)?),
        None => None,
    };
    let map = pansu_map_by_name(&map_name, base)?;
    if let Some(expected) = pick_opt(args.structure.clone(), cfg.structure.clone()) {
        let resolved = structure_by_name(&expected, map.source.dim(), 0.5)?;
        if resolved.name() != map.source.name() {
            return Err(Failure::input(format!(
                "map '{map_name}' differentiates on {}, not {}",
                map.source.name(),
                resolved.name()
            )));
        }
    }
    let schedule = parse_schedule(&pick(
        args.schedule.clone(),
        cfg.schedule.clone(),
        "3:10".into(),
    ))?;
    let samples = pick(args.samples, cfg.samples, 64);
    let report = pansu_residual(&map, &schedule, samples, seed)?;

    let mut table = CsvTable::new(vec!["eps", "residual"]);
    for (k, &eps) in schedule.iter().enumerate() {
        table.push(vec![cell(eps), cell(report.estimate.residuals[k])]);
    }
    Ok(CmdResult {
        output: CmdOutput {
            json: serde_json::to_value(&report)
                .map_err(|e| Failure::input(format!("report serialization: {e}")))?,
            table,
        },
        effective: json!({
            "command": "pansu",
            "map": map_name,
            "schedule": schedule,
            "samples": samples,
            "seed": seed,
        }),
        code: 0,
        out_override: None,
    })
}
