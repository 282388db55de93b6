//! `fraclab`: apply fractional-order operators to stored fields, evaluate
//! function-space norms, solve capacity problems, and run the verification
//! suites with JSON reports.

mod config;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::Config;
use fraclab_core::capacity::DyadicSet;
use fraclab_core::fracops::{self, FracOrder, OperatorMethod, Side};
use fraclab_core::grid::{Grid, ScalarField};
use fraclab_core::norms::{self, HardyVariant, NormKind, SeminormKind};
use fraclab_core::solver::{variational_capacity, CapacityKind, CapacityProblem, SolveSummary};
use fraclab_core::verify::{Suite, SuiteReport};
use fraclab_core::{io, Error};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fraclab",
    version,
    about = "fractional operators, seminorms, capacities"
)]
struct Cli {
    /// key=value configuration file overriding solver knobs and thresholds
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply an operator to a stored field
    Op {
        #[command(subcommand)]
        action: OpAction,
    },
    /// Evaluate a norm or seminorm of a stored field
    Norm(NormArgs),
    /// Solve a capacity problem or evaluate dyadic content
    Capacity(CapacityArgs),
    /// Run a verification suite and write its JSON report
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum OpAction {
    Apply(OpArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OpName {
    FracLaplacian,
    RieszPotential,
    RieszTransform,
    FracGradient,
    Liouville,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodName {
    Spectral,
    Singular,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideName {
    Plus,
    Minus,
}

#[derive(Args)]
struct OpArgs {
    #[arg(long = "op", value_enum)]
    op: OpName,
    #[arg(long, value_enum, default_value = "spectral")]
    method: MethodName,
    /// fractional order in (0,1)
    #[arg(long)]
    s: Option<f64>,
    /// axis for the riesz transform (0-based)
    #[arg(long)]
    axis: Option<usize>,
    /// side for the one-sided derivative
    #[arg(long, value_enum)]
    side: Option<SideName>,
    #[arg(long)]
    input: PathBuf,
    /// one output per produced component
    #[arg(long, num_args = 1.., required = true)]
    output: Vec<PathBuf>,
}

#[derive(Args)]
struct NormArgs {
    /// lp | weak-lp | lorentz | gagliardo | hardy-h1 | bmo | hs1 | hs1p | hs1m
    #[arg(long)]
    kind: String,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    /// riesz | maximal (hardy-h1 only)
    #[arg(long, default_value = "riesz")]
    variant: String,
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct CapacityArgs {
    /// ws1 | hs1 | hs1p | hs1m | content
    #[arg(long)]
    kind: String,
    #[arg(long)]
    s: f64,
    /// ball:r=<r> | cube:l=<l> | cells:<file>
    #[arg(long)]
    set: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 64)]
    npts: usize,
    #[arg(long, default_value_t = 4.0)]
    half_extent: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// identity | stein-weiss | weak-type | capacitary | trace | fs | divergence | all
    #[arg(long)]
    suite: String,
    #[arg(long)]
    s: Option<f64>,
    /// override grid as n,N,L[,periodic]
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    report: PathBuf,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("FRACLAB_THREADS") {
        match threads.parse::<usize>() {
            Ok(k) if k > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build_global();
            }
            _ => {
                eprintln!("fraclab: FRACLAB_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(path) => match Config::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("fraclab: config: {e}");
                return ExitCode::from(2);
            }
        },
        None => Config::default(),
    };
    let outcome = match cli.command {
        Command::Op {
            action: OpAction::Apply(args),
        } => run_op(args),
        Command::Norm(args) => run_norm(args),
        Command::Capacity(args) => run_capacity(args, &cfg),
        Command::Verify(args) => return run_verify(args, &cfg),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fraclab: {e}");
            ExitCode::from(2)
        }
    }
}

fn need_s(s: Option<f64>) -> Result<f64, Error> {
    s.ok_or_else(|| Error::Op("this operator needs --s".into()))
}

fn run_op(args: OpArgs) -> Result<(), Error> {
    let field = io::read_field(&args.input)?;
    let method = match args.method {
        MethodName::Spectral => OperatorMethod::Spectral,
        MethodName::Singular => OperatorMethod::Singular,
    };
    let outputs: Vec<ScalarField> = match args.op {
        OpName::FracLaplacian => {
            let ord = FracOrder::new(field.grid.n, need_s(args.s)?)?;
            vec![fracops::frac_laplacian(&field, &ord, method)?]
        }
        OpName::RieszPotential => {
            let ord = FracOrder::new(field.grid.n, need_s(args.s)?)?;
            vec![fracops::riesz_potential(&field, &ord, method)?]
        }
        OpName::RieszTransform => {
            if matches!(args.method, MethodName::Singular) {
                return Err(Error::Op(
                    "the riesz transform is realized spectrally only".into(),
                ));
            }
            let axis = args.axis.unwrap_or(0);
            vec![fracops::riesz_transform(&field, axis)?]
        }
        OpName::FracGradient => {
            let ord = FracOrder::new(field.grid.n, need_s(args.s)?)?;
            fracops::frac_gradient(&field, &ord, method)?.components
        }
        OpName::Liouville => {
            let side = match args.side {
                Some(SideName::Plus) | None => Side::Plus,
                Some(SideName::Minus) => Side::Minus,
            };
            vec![fracops::liouville_one_sided(&field, need_s(args.s)?, side)?]
        }
    };
    if outputs.len() != args.output.len() {
        return Err(Error::Op(format!(
            "operator produces {} component(s) but {} output path(s) given",
            outputs.len(),
            args.output.len()
        )));
    }
    for (field, path) in outputs.iter().zip(&args.output) {
        io::write_field(path, field)?;
    }
    Ok(())
}

fn run_norm(args: NormArgs) -> Result<(), Error> {
    let field = io::read_field(&args.input)?;
    let kind = match args.kind.as_str() {
        "lp" => NormKind::Lp(args.p.ok_or_else(|| Error::Norm("lp needs --p".into()))?),
        "weak-lp" => NormKind::WeakLp(
            args.p
                .ok_or_else(|| Error::Norm("weak-lp needs --p".into()))?,
        ),
        "lorentz" => NormKind::Lorentz {
            s: args
                .s
                .ok_or_else(|| Error::Norm("lorentz needs --s".into()))?,
        },
        "gagliardo" => NormKind::Gagliardo {
            s: args
                .s
                .ok_or_else(|| Error::Norm("gagliardo needs --s".into()))?,
        },
        "hardy-h1" => NormKind::HardyH1(match args.variant.as_str() {
            "riesz" => HardyVariant::Riesz,
            "maximal" => HardyVariant::Maximal,
            other => return Err(Error::Norm(format!("unknown variant `{other}`"))),
        }),
        "bmo" => NormKind::Bmo,
        "hs1" | "hs1p" | "hs1m" => NormKind::Seminorm {
            kind: match args.kind.as_str() {
                "hs1" => SeminormKind::Hs1,
                "hs1p" => SeminormKind::Hs1Plus,
                _ => SeminormKind::Hs1Minus,
            },
            s: args
                .s
                .ok_or_else(|| Error::Norm("seminorms need --s".into()))?,
        },
        other => return Err(Error::Norm(format!("unknown norm kind `{other}`"))),
    };
    let value = norms::evaluate(&field, &kind)?;
    let skipped = if let NormKind::Gagliardo { s } = kind {
        Some(norms::gagliardo_seminorm_detailed(&field, s)?.1)
    } else {
        None
    };
    println!("{value}");
    let detail = json!({
        "kind": args.kind,
        "value": value,
        "grid": field.grid,
        "truncation_report": norms::truncation_report(&field, skipped),
    });
    println!("{detail}");
    Ok(())
}

fn parse_set(spec: &str, grid: Grid) -> Result<DyadicSet, Error> {
    if let Some(rest) = spec.strip_prefix("ball:r=") {
        let r: f64 = rest
            .parse()
            .map_err(|e| Error::Capacity(format!("bad radius `{rest}`: {e}")))?;
        DyadicSet::ball(grid, &vec![0.0; grid.n], r)
    } else if let Some(rest) = spec.strip_prefix("cube:l=") {
        let l: f64 = rest
            .parse()
            .map_err(|e| Error::Capacity(format!("bad side `{rest}`: {e}")))?;
        DyadicSet::cube(grid, l)
    } else if let Some(path) = spec.strip_prefix("cells:") {
        io::read_cells(std::path::Path::new(path))
    } else {
        Err(Error::Capacity(format!(
            "set spec `{spec}` is not ball:r=<r>, cube:l=<l>, or cells:<file>"
        )))
    }
}

fn run_capacity(args: CapacityArgs, cfg: &Config) -> Result<(), Error> {
    let grid = Grid::new(args.n, args.npts, args.half_extent, true)?;
    let set = parse_set(&args.set, grid)?;
    let grid = set.grid;
    if args.kind == "content" {
        let alpha = grid.n as f64 - args.s;
        let value = fraclab_core::capacity::hausdorff_content(&set, alpha)?;
        let out = json!({
            "kind": "content",
            "alpha": alpha,
            "value": value,
            "grid": grid,
            "set_cells": set.len(),
        });
        println!("{out}");
        return Ok(());
    }
    let kind = match args.kind.as_str() {
        "ws1" => CapacityKind::Ws1,
        "hs1" => CapacityKind::Hs1,
        "hs1p" => CapacityKind::Hs1Plus,
        "hs1m" => CapacityKind::Hs1Minus,
        other => return Err(Error::Capacity(format!("unknown capacity kind `{other}`"))),
    };
    let ord = FracOrder::new(grid.n, args.s)?;
    let report = variational_capacity(&CapacityProblem {
        set: set.clone(),
        kind,
        ord,
        params: cfg.suite.solver.clone(),
    })?;
    let summary = SolveSummary::new(kind, &set, &report);
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).expect("summaries serialize")
    );
    Ok(())
}

fn parse_grid(spec: &str) -> Result<Grid, Error> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() < 3 || parts.len() > 4 {
        return Err(Error::Grid(format!(
            "grid spec `{spec}` is not n,N,L[,periodic]"
        )));
    }
    let n = parts[0]
        .parse::<usize>()
        .map_err(|e| Error::Grid(format!("bad n: {e}")))?;
    let npts = parts[1]
        .parse::<usize>()
        .map_err(|e| Error::Grid(format!("bad N: {e}")))?;
    let l = parts[2]
        .parse::<f64>()
        .map_err(|e| Error::Grid(format!("bad L: {e}")))?;
    let periodic = parts.get(3).map(|v| *v == "1").unwrap_or(true);
    Grid::new(n, npts, l, periodic)
}

fn run_verify(args: VerifyArgs, cfg: &Config) -> ExitCode {
    let suites = match Suite::parse(&args.suite) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("fraclab: {e}");
            return ExitCode::from(2);
        }
    };
    let grid = match args.grid.as_deref().map(parse_grid).transpose() {
        Ok(g) => g,
        Err(e) => {
            eprintln!("fraclab: {e}");
            return ExitCode::from(2);
        }
    };
    let mut reports: Vec<SuiteReport> = Vec::new();
    for suite in suites {
        match suite.run(grid, args.s, &cfg.suite) {
            Ok(report) => {
                let verdict = if report.all_pass() { "pass" } else { "FAIL" };
                println!(
                    "{}: {} ({} checks)",
                    report.suite,
                    verdict,
                    report.checks.len()
                );
                reports.push(report);
            }
            Err(e) => {
                eprintln!("fraclab: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let all_pass = reports.iter().all(SuiteReport::all_pass);
    let body = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(&reports)
    }
    .expect("reports serialize");
    if let Err(e) = std::fs::write(&args.report, body) {
        eprintln!("fraclab: writing {}: {e}", args.report.display());
        return ExitCode::from(2);
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
