//! Command-line front end. Exit codes: 0 success, 2 input error, 3 runtime
//! error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use massaction_core::automaton::ParticleAutomaton;
use massaction_core::meanfield::{derive_polynomial, MeanFieldParams, Monomial, PolynomialSystem, DEFAULT_C_BIN};
use massaction_core::scenario::{builtin_automaton, AlphaSpec, FiveSpeciesVariant, ModelKind};
use massaction_core::spatial::alpha_from_geometry;

use crate::automaton_format::parse_automaton;
use crate::runner::{run_experiment, run_scenario, write_experiment, RunError, RunOptions};
use crate::scenario_format::{load_scenario, ScenarioFileError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "massaction", version, about = "Mass-action simulation of probabilistic-automaton particles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the mean-field update of an automaton as explicit polynomials.
    Derive(DeriveArgs),
    /// Run a scenario file or bundled scenario and write CSV output.
    Run(RunArgs),
    /// Density parameter implied by an interaction radius and an arena.
    Alpha(AlphaArgs),
    /// Run the five-species placement experiment in all three models.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
struct DeriveArgs {
    /// Automaton file, or a built-in name (three_species, five_species).
    automaton: String,
    #[arg(long)]
    alpha: f64,
    #[arg(long = "c-bin", default_value_t = DEFAULT_C_BIN)]
    c_bin: f64,
    /// Decimal places for coefficients.
    #[arg(long, default_value_t = 2)]
    precision: usize,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario file, or a bundled scenario name.
    scenario: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelKind>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "c-bin")]
    c_bin: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    /// Number of steps.
    #[arg(long)]
    horizon: Option<usize>,
    /// Worker threads for replicates.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Dump spatial position frames of replicate 0 every this many steps.
    #[arg(long)]
    frames: Option<usize>,
}

#[derive(Debug, Args)]
struct AlphaArgs {
    #[arg(long)]
    r: f64,
    #[arg(long)]
    width: f64,
    #[arg(long)]
    height: f64,
    /// Number of particles.
    #[arg(long)]
    m: u64,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// a: A and B uniform; b: both in the central unit square; c: in distant squares.
    #[arg(value_parser = parse_variant)]
    variant: FiveSpeciesVariant,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    replicates: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: massaction_core::scenario::ScenarioError| e.to_string())
}

fn parse_variant(s: &str) -> Result<FiveSpeciesVariant, String> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => FiveSpeciesVariant::from_letter(c),
        _ => None,
    }
    .ok_or_else(|| format!("`{s}` is not one of a, b, c"))
}

/// A failed command: exit code plus message for the error stream.
#[derive(Debug)]
struct Failure(i32, String);

fn input(e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_INPUT, e.to_string())
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        let code = if e.is_input_error() { EXIT_INPUT } else { EXIT_RUNTIME };
        Failure(code, e.to_string())
    }
}

impl From<ScenarioFileError> for Failure {
    fn from(e: ScenarioFileError) -> Self {
        input(e)
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Normal output goes to `out`, diagnostics to `err`.
pub fn main_with<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Derive(a) => cmd_derive(a),
        Command::Run(a) => cmd_run(a),
        Command::Alpha(a) => cmd_alpha(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

fn load_automaton(spec: &str) -> Result<ParticleAutomaton, Failure> {
    let path = Path::new(spec);
    if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| input(format!("cannot read {spec}: {e}")))?;
        parse_automaton(&text).map_err(|e| input(format!("{spec}: {e}")))
    } else {
        builtin_automaton(spec).ok_or_else(|| input(format!("no automaton file or built-in named `{spec}`")))
    }
}

fn cmd_derive(args: DeriveArgs) -> Result<String, Failure> {
    let a = load_automaton(&args.automaton)?;
    let params = MeanFieldParams::new(args.alpha, args.c_bin).map_err(input)?;
    Ok(format_system(&derive_polynomial(&a, params), args.precision))
}

/// `x'_k = x_k <terms>` per species, one line each, with coefficients rounded
/// half-to-even at `precision` decimals. Terms that round to zero are left
/// out. Species are numbered from 1 in automaton order.
pub fn format_system(poly: &PolynomialSystem, precision: usize) -> String {
    let mut out = String::new();
    for k in 0..poly.len() {
        write!(out, "x'_{0} = x_{0}", k + 1).unwrap();
        for (mono, c) in poly.terms(k) {
            let rounded = format!("{:.*}", precision, c.abs());
            if rounded.bytes().all(|b| b == b'0' || b == b'.') {
                continue;
            }
            let sign = if c < 0.0 { '-' } else { '+' };
            let var = match mono {
                Monomial::Linear(i) => format!("x_{}", i + 1),
                Monomial::Bilinear(i, j) if i == j => format!("x_{}^2", i + 1),
                Monomial::Bilinear(i, j) => format!("x_{} x_{}", i + 1, j + 1),
            };
            write!(out, " {sign} {rounded} {var}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn cmd_run(args: RunArgs) -> Result<String, Failure> {
    let (mut config, a) = load_scenario(&args.scenario)?;
    if let Some(m) = args.model {
        config.model = m;
    }
    if let Some(v) = args.alpha {
        config.alpha = Some(AlphaSpec::Value(v));
    }
    if let Some(c) = args.c_bin {
        config.c_bin = c;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(r) = args.replicates {
        config.replicates = r;
    }
    if let Some(t) = args.horizon {
        config.horizon = t;
    }
    if args.frames == Some(0) {
        return Err(input("--frames must be at least 1"));
    }
    config.validate(&a).map_err(input)?;
    let opts = RunOptions {
        jobs: args.jobs,
        frames: args.frames,
    };
    let files = run_scenario(&config, &a, &args.out, opts)?;
    Ok(listing(&files))
}

fn listing(files: &[PathBuf]) -> String {
    let mut out = String::new();
    for f in files {
        writeln!(out, "{}", f.display()).unwrap();
    }
    out
}

/// `v` with six significant digits; zero prints as `0`.
pub fn six_significant(v: f64) -> String {
    if v == 0.0 {
        return "0".to_owned();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let text = format!("{v:.decimals$}");
    // rounding may carry into a new digit, e.g. 0.9999996 -> 1.000000
    let carried: f64 = text.parse().unwrap_or(v);
    if carried != 0.0 && (carried.abs().log10().floor() as i32) > magnitude && decimals > 0 {
        format!("{v:.0$}", decimals - 1)
    } else {
        text
    }
}

fn cmd_alpha(args: AlphaArgs) -> Result<String, Failure> {
    if !(args.width > 0.0 && args.height > 0.0 && args.width.is_finite() && args.height.is_finite()) {
        return Err(input("width and height must be positive"));
    }
    let alpha = alpha_from_geometry(args.r, args.width * args.height, args.m).map_err(input)?;
    Ok(format!("{}\n", six_significant(alpha.get())))
}

fn cmd_experiment(args: ExperimentArgs) -> Result<String, Failure> {
    if args.replicates < 2 {
        return Err(input("--replicates must be at least 2"));
    }
    let dir = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("experiment_{}", args.variant.letter())));
    let report = run_experiment(args.variant, args.seed, args.replicates, args.jobs)?;
    let files = write_experiment(&report, &dir)?;
    Ok(listing(&files))
}
