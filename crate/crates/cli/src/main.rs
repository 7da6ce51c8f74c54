//! `cfree`: cumulants, transforms, Jacobi parameters and verification
//! suites over exact rational functionals stored as JSON documents.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 bad input or
//! configuration.

mod document;
mod error;
mod report;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use cfree_core::cumulants::{boolean_from_moments, free_from_moments, two_state_from_pair};
use cfree_core::meixner::{boolean_shift_jacobi, jacobi_from_moments, moments_from_jacobi, JacobiParams};
use cfree_core::transforms::{fermi_image, MapDescriptor};
use cfree_core::{q, Functional, Rational};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use document::{format_rational, parse_rational, parse_rational_list, StateDocument};
use error::{config, CliError, CliResult};
use verify::{Suite, VerifyConfig};

/// Default cap on truncation degrees, overridable with `CFREE_MAX_N`.
const DEFAULT_MAX_N: usize = 10;

#[derive(Parser)]
#[command(name = "cfree", version, about = "Conditionally free cumulants, transforms and checks on exact functionals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Boolean, free or two-state cumulants of a state document.
    Cumulants(CumulantsArgs),
    /// Applies a transform to state documents.
    Map(MapArgs),
    /// Runs seeded verification suites and writes a report.
    Verify(VerifyArgs),
    /// Jacobi parameters of a one-variable state or a free Meixner law.
    Jacobi(JacobiArgs),
}

#[derive(Args)]
struct Io {
    /// Input state document.
    #[arg(short, long)]
    input: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Boolean,
    Free,
    TwoState,
}

#[derive(Args)]
struct CumulantsArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Second state, required for two-state cumulants.
    #[arg(long)]
    psi: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapKind {
    /// `Phi[rho, psi]`; `rho` from `--rho` or the input.
    Phi,
    /// `B_{a,t}`.
    B,
    /// The Boolean-to-Fermi map `B_{mean,0}`.
    Fermi,
    BooleanPower,
    FreePower,
    /// Translation `f ⊞ delta_a`.
    DeltaShift,
}

#[derive(Args)]
struct MapArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long, value_enum)]
    map: MapKind,
    /// Shift vector, comma separated; a single value is used for every variable.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Time or power parameter.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    psi: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "N", default_value_t = 6)]
    order: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Exact rational arithmetic in the operator suite (N <= 6).
    #[arg(long, conflicts_with = "float")]
    exact: bool,
    /// Floating-point operator suite (default).
    #[arg(long)]
    float: bool,
    #[arg(short, long)]
    output: Option<String>,
}

#[derive(Args)]
struct JacobiArgs {
    #[command(flatten)]
    io: Io,
    /// Free Meixner law `mu_{b,c}` instead of an input document.
    #[arg(long, num_args = 2, value_names = ["B", "C"], allow_hyphen_values = true)]
    meixner: Option<Vec<String>>,
    /// Boolean shift `delta_alpha ⊎ mu^{⊎t}` applied to the parameters.
    #[arg(long, num_args = 2, value_names = ["ALPHA", "T"], allow_hyphen_values = true)]
    shift: Option<Vec<String>>,
    /// Truncation degree of the emitted moments.
    #[arg(long = "N", default_value_t = 10)]
    order: usize,
}

#[derive(Serialize)]
struct JacobiDocument {
    beta: Vec<String>,
    gamma: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    moments: Option<StateDocument>,
}

fn max_order() -> CliResult<usize> {
    match std::env::var("CFREE_MAX_N") {
        Ok(v) => v.trim().parse().map_err(|_| config(format!("CFREE_MAX_N must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_MAX_N),
    }
}

fn emit<T: Serialize>(value: &T, output: Option<&str>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn read_state(path: &str) -> CliResult<(Functional<Rational>, Option<String>)> {
    let doc = StateDocument::read(path)?;
    Ok((doc.to_functional(max_order()?)?, doc.name))
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> CliResult<&'a str> {
    v.as_deref().ok_or_else(|| config(format!("missing {flag}")))
}

fn cmd_cumulants(args: &CumulantsArgs) -> CliResult<()> {
    let (phi, name) = read_state(required(&args.io.input, "--input")?)?;
    let c = match args.kind {
        Kind::Boolean => boolean_from_moments(&phi),
        Kind::Free => free_from_moments(&phi),
        Kind::TwoState => {
            let (psi, _) = read_state(required(&args.psi, "--psi (required for two-state cumulants)")?)?;
            two_state_from_pair(&phi, &psi)?
        }
    };
    emit(&StateDocument::from_cumulants(&c).with_name(name), args.io.output.as_deref())
}

fn shift_vector(a: &Option<String>, d: usize) -> CliResult<Vec<Rational>> {
    let v = parse_rational_list(required(a, "--a")?)?;
    match v.len() {
        1 => Ok(vec![v[0].clone(); d]),
        n if n == d => Ok(v),
        n => Err(config(format!("--a has {n} entries, expected 1 or {d}"))),
    }
}

fn cmd_map(args: &MapArgs) -> CliResult<()> {
    let input = args.io.input.as_deref();
    let time = || parse_rational(required(&args.t, "--t")?);
    let out = if args.map == MapKind::Phi {
        let rho_path = args.rho.as_deref().or(input).ok_or_else(|| config("missing --rho"))?;
        let (rho, _) = read_state(rho_path)?;
        let (psi, _) = read_state(required(&args.psi, "--psi")?)?;
        MapDescriptor::PhiMap.apply(&[&rho, &psi])?
    } else {
        let (f, _) = read_state(input.ok_or_else(|| config("missing --input"))?)?;
        match args.map {
            MapKind::Fermi => fermi_image(&f),
            MapKind::B => {
                let t = time()?;
                if t == q(-1, 1) {
                    return Err(CliError::Core(cfree_core::Error::TimeMinusOne));
                }
                let a = if args.a.is_some() { shift_vector(&args.a, f.d())? } else { vec![q(0, 1); f.d()] };
                MapDescriptor::BMap { a, t }.apply(&[&f])?
            }
            MapKind::BooleanPower => MapDescriptor::BooleanPower(time()?).apply(&[&f])?,
            MapKind::FreePower => MapDescriptor::FreePower(time()?).apply(&[&f])?,
            MapKind::DeltaShift => MapDescriptor::Delta(shift_vector(&args.a, f.d())?).apply(&[&f])?,
            MapKind::Phi => unreachable!("handled above"),
        }
    };
    emit(&StateDocument::from_functional(&out), args.io.output.as_deref())
}

fn cmd_jacobi(args: &JacobiArgs) -> CliResult<()> {
    let cap = max_order()?;
    if args.order > cap {
        return Err(config(format!("N = {} exceeds the cap {cap} (CFREE_MAX_N)", args.order)));
    }
    // Moments recoverable from the parameters: all of degree <= N for a
    // Meixner law, the even part of the input truncation otherwise.
    let (params, order): (JacobiParams<Rational>, usize) = match (&args.meixner, &args.io.input) {
        (Some(bc), None) => {
            (JacobiParams::meixner(parse_rational(&bc[0])?, parse_rational(&bc[1])?, args.order / 2 + 1), args.order)
        }
        (None, Some(path)) => {
            let (f, _) = read_state(path)?;
            (jacobi_from_moments(&f, f.order() / 2)?, 2 * (f.order() / 2))
        }
        _ => return Err(config("give exactly one of --input and --meixner")),
    };
    let (params, moments) = match &args.shift {
        Some(at) => {
            let shifted = boolean_shift_jacobi(&params, &parse_rational(&at[0])?, &parse_rational(&at[1])?);
            let m = moments_from_jacobi(&shifted, order)?;
            (shifted, Some(StateDocument::from_functional(&m)))
        }
        None => (params, None),
    };
    let doc = JacobiDocument {
        beta: params.beta.iter().map(format_rational).collect(),
        gamma: params.gamma.iter().map(format_rational).collect(),
        moments,
    };
    emit(&doc, args.io.output.as_deref())
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<bool> {
    let cap = max_order()?;
    if args.order > cap {
        return Err(config(format!("N = {} exceeds the cap {cap} (CFREE_MAX_N)", args.order)));
    }
    if args.order < 2 || args.d == 0 || args.trials == 0 {
        return Err(config("need N >= 2, d >= 1 and trials >= 1"));
    }
    if args.exact && args.order > 6 && matches!(args.suite, Suite::Fock | Suite::All) {
        return Err(config("exact operator checks are limited to N <= 6"));
    }
    if !(args.tolerance > 0.0) {
        return Err(config("--tolerance must be positive"));
    }
    let cfg = VerifyConfig {
        suite: args.suite,
        seed: args.seed,
        order: args.order,
        d: args.d,
        trials: args.trials,
        tolerance: args.tolerance,
        exact: args.exact,
    };
    let report = verify::run(&cfg);
    emit(&report, args.output.as_deref())?;
    eprintln!("{}: {} passed, {} failed, {} skipped", report.suite, report.passed, report.failed, report.skipped);
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Cumulants(a) => cmd_cumulants(a).map(|_| true),
        Command::Map(a) => cmd_map(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Jacobi(a) => cmd_jacobi(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
