use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use num_complex::Complex64;
use serde_json::json;

use wavespec_core::inverse::solve_inverse;
use wavespec_core::io::{c12_grid_csv, to_json, GridSpec, InverseDoc, ProblemDoc, SpectralDataDoc, SpectrumDoc, VTableDoc};
use wavespec_core::spectral::{find_eigenvalues, Region, ResolventKernel, SearchOptions, Sector};
use wavespec_core::validation::{run_round_trip, run_validation, ValidateConfig};
use wavespec_core::{Error, SolutionContext};

#[derive(Parser, Debug)]
#[command(name = "wavespec", version, about = "Spectral analysis of -y'' + q y = λ²ρ y with a jump in wave speed")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues, singularities and optional C12 grid for a problem file.
    Forward(ForwardArgs),
    /// Recover β and the potential from a spectral-data file.
    Inverse(InverseArgs),
    /// Forward then inverse on a problem file; prints a pass/fail table.
    Roundtrip(RoundtripArgs),
    /// Resolvent kernel on an (x, t) grid.
    Resolvent(ResolventArgs),
    /// Seeded self-checks; prints a pass/fail table.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct ForwardArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Truncation order A (default max(2N, 24)).
    #[arg(long)]
    truncation: Option<usize>,
    /// Singularities n/2, n/(2β) are listed for n ≤ cutoff.
    #[arg(long, default_value_t = 10)]
    cutoff: usize,
    /// Search rectangle re0,re1,im0,im1.
    #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
    region: Option<Region>,
    /// C12 grid re0,re1,im0,im1,nx,ny.
    #[arg(long, value_parser = parse_grid, requires = "grid_output", allow_hyphen_values = true)]
    grid: Option<GridSpec>,
    #[arg(long)]
    grid_output: Option<PathBuf>,
    #[arg(long)]
    dump_vtable: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InverseArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RoundtripArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    truncation: Option<usize>,
}

#[derive(Args, Debug)]
struct ResolventArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    truncation: Option<usize>,
    /// Spectral parameter re,im (Im λ ≠ 0; the sector follows its sign).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    lambda: Complex64,
    /// Grid a,b,n for both x and t.
    #[arg(long, value_parser = parse_span, default_value = "-1,1,5", allow_hyphen_values = true)]
    span: (f64, f64, usize),
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long, default_value_t = 5)]
    instances: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_floats(s: &str, count: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != count {
        return Err(format!("expected {count} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_region(s: &str) -> Result<Region, String> {
    let v = parse_floats(s, 4)?;
    Region::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let v = parse_floats(s, 6)?;
    let steps = |x: f64| if x.fract() == 0.0 && x >= 0.0 { Ok(x as usize) } else { Err(format!("grid steps must be integers, got {x}")) };
    GridSpec::new(v[0], v[1], v[2], v[3], steps(v[4])?, steps(v[5])?).map_err(|e| e.to_string())
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let v = parse_floats(s, 2)?;
    Ok(Complex64::new(v[0], v[1]))
}

fn parse_span(s: &str) -> Result<(f64, f64, usize), String> {
    let v = parse_floats(s, 3)?;
    if v[2] < 1.0 || v[2].fract() != 0.0 {
        return Err("span count must be a positive integer".into());
    }
    Ok((v[0], v[1], v[2] as usize))
}

/// Failure classes mapped to exit statuses.
enum Failure {
    Suite,
    Input(String),
    Numerical(String),
}

impl Failure {
    fn numerical(op: &str, e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::InvalidMedium(_) => Failure::Input(format!("{op}: {e}")),
            _ => Failure::Numerical(format!("{op}: {e}")),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("reading {}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("writing {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_problem(path: &Path, truncation: Option<usize>) -> Result<(ProblemDoc, SolutionContext), Failure> {
    let doc = ProblemDoc::parse(&read(path)?).map_err(|e| Failure::Input(format!("parsing {}: {e}", path.display())))?;
    let potential = doc.potential().map_err(|e| Failure::Input(e.to_string()))?;
    let medium = doc.medium().map_err(|e| Failure::Input(e.to_string()))?;
    let order = truncation.unwrap_or_else(|| potential.default_truncation());
    let ctx = SolutionContext::new(&potential, medium, order).map_err(|e| Failure::numerical("build_vtable", e))?;
    Ok((doc, ctx))
}

fn forward(args: ForwardArgs) -> Result<(), Failure> {
    let (_, ctx) = load_problem(&args.input, args.truncation)?;
    let region = args.region.unwrap_or_else(|| Region::default_for(&ctx));
    let report = find_eigenvalues(&ctx, region, args.cutoff, SearchOptions::default())
        .map_err(|e| Failure::numerical("find_eigenvalues", e))?;
    info!("{} eigenvalues in {:?}", report.eigenvalues.len(), report.region);
    let grid_csv = args.grid.map(|g| c12_grid_csv(&ctx, &g));
    emit(args.output.as_deref(), &to_json(&SpectrumDoc::from(&report)))?;
    if let (Some(csv), Some(path)) = (grid_csv, args.grid_output.as_deref()) {
        emit(Some(path), &csv)?;
    }
    if let Some(path) = args.dump_vtable.as_deref() {
        emit(Some(path), &to_json(&VTableDoc::from(ctx.table())))?;
    }
    Ok(())
}

fn inverse(args: InverseArgs) -> Result<(), Failure> {
    let text = read(&args.input)?;
    let doc = SpectralDataDoc::parse(&text).map_err(|e| Failure::Input(format!("parsing {}: {e}", args.input.display())))?;
    let data = doc.to_data().map_err(|e| Failure::Input(e.to_string()))?;
    let result = solve_inverse(&data).map_err(|e| Failure::numerical("solve_inverse", e))?;
    emit(args.output.as_deref(), &to_json(&InverseDoc::from(&result)))
}

fn roundtrip(args: RoundtripArgs) -> Result<(), Failure> {
    let (doc, ctx) = load_problem(&args.input, args.truncation)?;
    let potential = doc.potential().map_err(|e| Failure::Input(e.to_string()))?;
    let report = run_round_trip(&potential, ctx.medium(), ctx.order());
    emit(args.output.as_deref(), &report.render())?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Suite)
    }
}

fn resolvent(args: ResolventArgs) -> Result<(), Failure> {
    let (_, ctx) = load_problem(&args.input, args.truncation)?;
    let sector = Sector::of(args.lambda).ok_or_else(|| Failure::Input("λ must not be real".into()))?;
    let kernel = ResolventKernel::new(&ctx, args.lambda, sector).map_err(|e| Failure::numerical("resolvent_kernel", e))?;
    let (a, b, n) = args.span;
    let points: Vec<f64> = if n == 1 {
        vec![a]
    } else {
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    };
    let mut rows = Vec::with_capacity(points.len());
    for &x in &points {
        let mut row = Vec::with_capacity(points.len());
        for &t in &points {
            let v = kernel.eval(x, t).map_err(|e| Failure::numerical("resolvent_kernel", e))?;
            row.push(json!({ "re": v.re, "im": v.im }));
        }
        rows.push(row);
    }
    let doc = json!({
        "lambda": { "re": args.lambda.re, "im": args.lambda.im },
        "sector": sector,
        "denominator": { "re": kernel.denominator().re, "im": kernel.denominator().im },
        "points": points,
        "kernel": rows,
    });
    emit(args.output.as_deref(), &to_json(&doc))
}

fn validate(args: ValidateArgs) -> Result<(), Failure> {
    let cfg = ValidateConfig { seed: args.seed, truncation: args.truncation, instances: args.instances };
    let report = run_validation(&cfg);
    emit(args.output.as_deref(), &report.render())?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Suite)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Forward(a) => forward(a),
        Command::Inverse(a) => inverse(a),
        Command::Roundtrip(a) => roundtrip(a),
        Command::Resolvent(a) => resolvent(a),
        Command::Validate(a) => validate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Suite) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
