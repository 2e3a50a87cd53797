//! Command implementation behind the `qflow` binary. Everything is
//! reachable as a library call so tests can drive the exact surface the
//! binary exposes.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use quiver_flow::error::Error;
use quiver_flow::flow::{
    classify_critical, hn_type_algebraic, integrate_flow, FlowOpts, FlowStatus,
};
use quiver_flow::io::{
    alpha_from_json, dims_from_list, quiver_from_json, rep_from_json,
    rep_to_json, trajectory_csv,
};
use quiver_flow::ledger::build_ledger;
use quiver_flow::quiver::{
    canonical_central, dims_and_forms, relation_set_checks, CentralElement, DimensionVector,
    Quiver, RelationSet,
};
use quiver_flow::rep::{GradedLinearMap, Representation};
use quiver_flow::rng::{complex_normal, trial_rng};
use quiver_flow::slice::{
    adjacent_fibre, euler_data, hecke_tangent_report, negative_slice_at, AdjacentPair,
};
use quiver_flow::verify::{run_all, run_verify_suite, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_STALL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser)]
#[command(name = "qflow", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural checks of a relation set (quadratic, complete,
    /// homogeneous, loop condition)
    Check(CheckArgs),
    /// Dimension bookkeeping of the graded homomorphism spaces
    Dims(DimsArgs),
    /// Downward gradient flow from a representation, with classification
    Flow(FlowArgs),
    /// Algebraic two-step type for the framed stability parameter
    Hn(HnArgs),
    /// Deformation complex and negative-slice basis at a split point
    Slice(SliceArgs),
    /// Tangent/normal report at a sampled flow-line point
    Hecke(HeckeArgs),
    /// Integer degree/rank ledger of an adjacent pair
    Ledger(LedgerArgs),
    /// Seeded verification suites
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    quiver: PathBuf,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct DimsArgs {
    #[arg(long)]
    quiver: PathBuf,
    /// target grading, comma separated in vertex order
    #[arg(long)]
    v: String,
    /// source grading; defaults to --v
    #[arg(long)]
    v2: Option<String>,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    #[arg(long)]
    quiver: PathBuf,
    #[arg(long)]
    rep: PathBuf,
    /// `canonical` or a path to a central element file
    #[arg(long, default_value = "canonical")]
    alpha: String,
    /// ambient dimensions; defaults to the representation's
    #[arg(long)]
    v: Option<String>,
    #[arg(long)]
    grad_tol: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    h0: Option<f64>,
    #[arg(long)]
    trace_len: Option<usize>,
    #[arg(long)]
    json_out: Option<PathBuf>,
    #[arg(long)]
    csv_out: Option<PathBuf>,
}

#[derive(Args)]
struct HnArgs {
    #[arg(long)]
    quiver: PathBuf,
    #[arg(long)]
    rep: PathBuf,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct SliceArgs {
    #[arg(long)]
    quiver: PathBuf,
    #[arg(long)]
    rep: PathBuf,
    /// second-summand dimensions of the block split
    #[arg(long)]
    v2: String,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct HeckeArgs {
    #[arg(long)]
    quiver: PathBuf,
    /// stable upper representation over v_u
    #[arg(long)]
    rep: PathBuf,
    /// adjacency vertex id
    #[arg(long)]
    vertex: String,
    /// ambient dimensions
    #[arg(long)]
    v: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct LedgerArgs {
    #[arg(long)]
    quiver: PathBuf,
    #[arg(long)]
    rep: PathBuf,
    #[arg(long)]
    vertex: String,
    #[arg(long)]
    v: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// suite name, or `all`
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trials: Option<usize>,
    /// tolerance overrides as key=value, repeatable
    #[arg(long = "tol")]
    tol: Vec<String>,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

/// Runs the command line with explicit arguments and output sink; returns
/// the process exit code.
pub fn run(args: &[String], out: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = writeln!(out, "{e}");
            return EXIT_USAGE;
        }
    };
    let result = match cli.command {
        Command::Check(a) => cmd_check(a, out),
        Command::Dims(a) => cmd_dims(a, out),
        Command::Flow(a) => cmd_flow(a, out),
        Command::Hn(a) => cmd_hn(a, out),
        Command::Slice(a) => cmd_slice(a, out),
        Command::Hecke(a) => cmd_hecke(a, out),
        Command::Ledger(a) => cmd_ledger(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NumericalStall(_) => EXIT_STALL,
        Error::InvalidParameter(_) => EXIT_USAGE,
        Error::Io(_) | Error::Json(_) => EXIT_USAGE,
        _ => EXIT_PRECONDITION,
    }
}

type CmdResult = std::result::Result<i32, Error>;

fn load_quiver(path: &PathBuf) -> std::result::Result<(Arc<Quiver>, RelationSet), Error> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    quiver_from_json(&value)
}

fn load_rep(q: &Arc<Quiver>, path: &PathBuf) -> std::result::Result<Representation, Error> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    rep_from_json(q, &value)
}

fn load_alpha(
    q: &Quiver,
    spec: &str,
    dims: &DimensionVector,
) -> std::result::Result<CentralElement, Error> {
    if spec == "canonical" {
        canonical_central(q, dims)
    } else {
        let text = std::fs::read_to_string(spec)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        alpha_from_json(q, &value)
    }
}

fn emit(
    out: &mut dyn Write,
    json_out: &Option<PathBuf>,
    value: &serde_json::Value,
) -> std::result::Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    if let Some(path) = json_out {
        std::fs::write(path, &text)?;
    }
    writeln!(out, "{text}")?;
    Ok(())
}

fn cmd_check(a: CheckArgs, out: &mut dyn Write) -> CmdResult {
    let (q, rels) = load_quiver(&a.quiver)?;
    let checks = relation_set_checks(&q, &rels);
    let witnesses: Vec<serde_json::Value> = checks
        .witnesses
        .iter()
        .map(|w| {
            serde_json::json!({
                "check": w.check,
                "edge": w.edge,
                "relation": w.relation,
                "path": w.path,
                "detail": w.detail,
            })
        })
        .collect();
    let value = serde_json::json!({
        "quadratic": checks.quadratic,
        "complete": checks.complete,
        "homogeneous": checks.homogeneous,
        "loop_condition": checks.loop_condition,
        "witnesses": witnesses,
    });
    emit(out, &a.json_out, &value)?;
    Ok(EXIT_OK)
}

fn cmd_dims(a: DimsArgs, out: &mut dyn Write) -> CmdResult {
    let (q, rels) = load_quiver(&a.quiver)?;
    let v1 = dims_from_list(&q, &a.v)?;
    let v2 = match &a.v2 {
        Some(s) => dims_from_list(&q, s)?,
        None => v1.clone(),
    };
    let d = dims_and_forms(&q, &rels, &v1, &v2)?;
    let value = serde_json::json!({
        "hom0": d.hom0,
        "hom1": d.hom1,
        "rel": d.rel,
        "ringel": d.ringel,
        "ringel_R": d.ringel_r,
    });
    emit(out, &a.json_out, &value)?;
    Ok(EXIT_OK)
}

fn cmd_flow(a: FlowArgs, out: &mut dyn Write) -> CmdResult {
    let (q, _rels) = load_quiver(&a.quiver)?;
    let x0 = load_rep(&q, &a.rep)?;
    let dims = match &a.v {
        Some(s) => dims_from_list(&q, s)?,
        None => x0.dims().clone(),
    };
    if &dims != x0.dims() {
        return Err(Error::InvalidDimensionVector(
            "representation dimensions disagree with --v".into(),
        ));
    }
    let alpha = load_alpha(&q, &a.alpha, &dims)?;
    let mut opts = FlowOpts::default();
    if let Some(g) = a.grad_tol {
        opts.grad_tol = g;
    }
    if let Some(m) = a.max_steps {
        opts.max_steps = m;
    }
    if let Some(h) = a.h0 {
        opts.h0 = h;
    }
    if let Some(t) = a.trace_len {
        opts.trace_len = t;
    }
    let result = integrate_flow(&x0, &alpha, &opts)?;
    if let Some(path) = &a.csv_out {
        std::fs::write(path, trajectory_csv(&result.samples))?;
    }
    let classification = if result.status == FlowStatus::Converged {
        match classify_critical(&result.limit, &alpha, &opts) {
            Ok(cls) => serde_json::json!({
                "blocks": cls.hn.blocks.iter().map(|b| b.dims().to_vec()).collect::<Vec<_>>(),
                "slopes": cls.hn.slopes.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                "label": cls.hn.label(&q).dims().to_vec(),
            }),
            Err(e) => serde_json::json!({ "error": e.to_string() }),
        }
    } else {
        serde_json::Value::Null
    };
    let value = serde_json::json!({
        "status": result.status,
        "f_limit": result.f_limit,
        "grad_norm": result.grad_norm_limit,
        "steps_accepted": result.steps_accepted,
        "steps_rejected": result.steps_rejected,
        "invariant_drift": result.invariant_drift,
        "classification": classification,
        "limit": rep_to_json(&result.limit),
    });
    emit(out, &a.json_out, &value)?;
    Ok(match result.status {
        FlowStatus::NumericalStall => EXIT_STALL,
        _ => EXIT_OK,
    })
}

fn cmd_hn(a: HnArgs, out: &mut dyn Write) -> CmdResult {
    let (q, _) = load_quiver(&a.quiver)?;
    let x = load_rep(&q, &a.rep)?;
    let alpha = canonical_central(&q, x.dims())?;
    let t = hn_type_algebraic(&x, &alpha)?;
    let stable = t.blocks.len() == 1;
    let value = serde_json::json!({
        "blocks": t.blocks.iter().map(|b| b.dims().to_vec()).collect::<Vec<_>>(),
        "slopes": t.slopes.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "label": t.label(&q).dims().to_vec(),
        "stable": stable,
    });
    emit(out, &a.json_out, &value)?;
    Ok(EXIT_OK)
}

fn cmd_slice(a: SliceArgs, out: &mut dyn Write) -> CmdResult {
    let (q, rels) = load_quiver(&a.quiver)?;
    let x = load_rep(&q, &a.rep)?;
    let v2 = dims_from_list(&q, &a.v2)?;
    let v1 = x.dims().sub(&v2)?;
    let (x1, x2, _, _) = x.block_split(&v1, &v2)?;
    let report = quiver_flow::deform::deformation_complex(&q, &rels, &x1, &x2)?;
    let basis = negative_slice_at(&x, &rels, &v2)?;
    let value = serde_json::json!({
        "h0": report.h0,
        "h1": report.h1,
        "h2": report.h2,
        "ringel_R": report.ringel_r,
        "index_matches": report.index() == report.ringel_r,
        "slice_dim": basis.len(),
        "min_margin": report.min_margin(),
    });
    emit(out, &a.json_out, &value)?;
    Ok(EXIT_OK)
}

fn build_pair(
    q: &Arc<Quiver>,
    x_u: Representation,
    vertex: &str,
    v: &str,
) -> std::result::Result<AdjacentPair, Error> {
    let v = dims_from_list(q, v)?;
    let k = q.vertex_index(vertex)?;
    AdjacentPair::new(q, v, x_u.dims().clone(), k, x_u)
}

fn cmd_hecke(a: HeckeArgs, out: &mut dyn Write) -> CmdResult {
    let (q, rels) = load_quiver(&a.quiver)?;
    let x_u = load_rep(&q, &a.rep)?;
    let pair = build_pair(&q, x_u, &a.vertex, &a.v)?;
    // draw a slice direction at (x_u, e_k)
    let ambient = Representation::block_embed(
        &pair.x_u,
        &Representation::zero(&q, pair.e_k()),
        None,
    )?;
    let basis = negative_slice_at(&ambient, &rels, &pair.e_k())?;
    if basis.is_empty() {
        return Err(Error::PreconditionFailed(
            "the slice at the upper point is zero; no Hecke point exists".into(),
        ));
    }
    let mut rng = trial_rng(a.seed, "hecke-cli", 0);
    let mut y = GradedLinearMap::zero(&q, pair.e_k(), pair.v_u.clone());
    for b in &basis {
        y = y.add(&b.scale(complex_normal(&mut rng)));
    }
    let fibre = adjacent_fibre(&pair)?;
    let euler = euler_data(&pair)?;
    let report = hecke_tangent_report(&pair, &rels, &y)?;
    let value = serde_json::json!({
        "membership": { "N": report.in_n, "T": report.in_t, "B": report.in_b },
        "ranks": {
            "n_in_f": report.rank_n_in_f,
            "b_in_f": report.rank_b_in_f,
            "b_in_t": report.rank_b_in_t,
            "tilde": report.rank_tilde,
        },
        "d": report.d,
        "d_numeric": report.d_numeric,
        "d_matches": report.d_matches,
        "loop_condition": report.loop_condition,
        "normal_angle": report.normal_angle,
        "fibre_coker_dim": fibre.coker_dim,
        "euler": { "n": euler.n, "degree": euler.degree },
        "margins": report.margins,
        "seed": a.seed,
    });
    emit(out, &a.json_out, &value)?;
    Ok(EXIT_OK)
}

fn cmd_ledger(a: LedgerArgs, out: &mut dyn Write) -> CmdResult {
    let (q, rels) = load_quiver(&a.quiver)?;
    let x_u = load_rep(&q, &a.rep)?;
    let pair = build_pair(&q, x_u, &a.vertex, &a.v)?;
    let ledger = build_ledger(&pair, &rels, a.trials, a.seed)?;
    let value = serde_json::to_value(&ledger)?;
    emit(out, &a.json_out, &value)?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let mut tolerances = BTreeMap::new();
    for kv in &a.tol {
        let Some((k, v)) = kv.split_once('=') else {
            return Err(Error::InvalidParameter(format!(
                "tolerance override {kv:?} is not key=value"
            )));
        };
        let v: f64 = v
            .parse()
            .map_err(|e| Error::InvalidParameter(format!("tolerance {kv:?}: {e}")))?;
        tolerances.insert(k.to_string(), v);
    }
    let reports = if a.suite == "all" {
        run_all(a.seed, a.trials)?
    } else {
        let mut cfg = VerifyConfig::new(&a.suite, a.seed);
        cfg.trials = a.trials;
        cfg.tolerances = tolerances.clone();
        vec![run_verify_suite(&cfg)?]
    };
    let ok = reports.iter().all(|r| r.ok());
    let value = serde_json::to_value(&reports)?;
    emit(out, &a.json_out, &value)?;
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

/// Convenience for integration tests: run with string args, capture stdout.
pub fn run_captured(args: &[&str]) -> (i32, String) {
    let argv: Vec<String> = std::iter::once("qflow".to_string())
        .chain(args.iter().map(|s| s.to_string()))
        .collect();
    let mut buf = Vec::new();
    let code = run(&argv, &mut buf);
    (code, String::from_utf8_lossy(&buf).into_owned())
}
