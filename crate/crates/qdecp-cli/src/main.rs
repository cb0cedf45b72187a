//! Command-line front end: parameter sweeps, exact and sampled simulation
//! runs, the invariant-suite verifier, and scattering-coefficient queries.
//!
//! Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O
//! error.

mod config;
mod emit;

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use qdecp::analytics::{self, DegradationModel};
use qdecp::protocol::{self, CavityModel, EntangledPair};
use qdecp::qdcavity::{scattering_coeffs, CavityParams};
use qdecp::verify::{run_suites, Fault};

use config::RunConfig;

const EXIT_USAGE: i32 = 1;
const EXIT_VERIFY: i32 = 2;
const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qdecp",
    about = "Entanglement-concentration simulator for quantum-dot spins in optical microcavities",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate per-round and cumulative success probabilities over an alpha grid.
    Sweep(SweepArgs),
    /// Run the protocol at one alpha: exact branch enumeration or Monte Carlo.
    Simulate(SimulateArgs),
    /// Run the invariant suites and report per-suite maximum errors.
    Verify(VerifyArgs),
    /// Print the cavity scattering coefficients for the given parameters.
    Coeffs(CoeffsArgs),
}

/// Cavity rates and detuning, in units of the cavity decay rate κ.
/// Defaults reproduce the leaky-cavity reference curve
/// (κ_s = 0.5κ, γ = 0.1κ, g = 0.5κ, resonant probe).
#[derive(Debug, Args)]
struct CavityArgs {
    /// Side-leakage rate κ_s.
    #[arg(long = "kappa-s", default_value_t = 0.5)]
    kappa_s: f64,
    /// Trion dipole decay rate γ.
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    /// Dot–cavity coupling g.
    #[arg(long, default_value_t = 0.5)]
    g: f64,
    /// Common detuning of cavity and trion from the probe.
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Ideal,
    Ratio,
    Squared,
    ExactSim,
    MonteCarlo,
}

impl ModelArg {
    fn label(self) -> &'static str {
        match self {
            ModelArg::Ideal => "ideal",
            ModelArg::Ratio => "ratio",
            ModelArg::Squared => "squared",
            ModelArg::ExactSim => "exact-sim",
            ModelArg::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Single evaluation point, strictly inside (0, 1).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "alpha-min")]
    alpha_min: Option<f64>,
    #[arg(long = "alpha-max")]
    alpha_max: Option<f64>,
    /// Number of grid points across [alpha-min, alpha-max].
    #[arg(long, default_value_t = 99)]
    steps: u32,
    /// Round budget K.
    #[arg(long, default_value_t = 5)]
    rounds: u32,
    #[command(flatten)]
    cavity: CavityArgs,
    /// Degradation model for the probabilities.
    #[arg(long, value_enum, default_value_t = ModelArg::Ideal)]
    model: ModelArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Initial pair amplitude, strictly inside (0, 1).
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 5)]
    rounds: u32,
    #[command(flatten)]
    cavity: CavityArgs,
    /// ideal | exact-sim | monte-carlo.
    #[arg(long, value_enum, default_value_t = ModelArg::ExactSim)]
    model: ModelArg,
    /// Trial count; required by monte-carlo.
    #[arg(long)]
    trials: Option<u64>,
    /// Sampler seed, echoed in the report.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Override every suite's tolerance with one value.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Deliberately perturb a checked object (test hook).
    #[arg(long = "inject-fault", value_enum, hide = true)]
    inject_fault: Option<FaultArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FaultArg {
    FlipIdealSign,
}

#[derive(Debug, Args)]
struct CoeffsArgs {
    #[command(flatten)]
    cavity: CavityArgs,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl From<qdecp::Error> for Failure {
    fn from(e: qdecp::Error) -> Failure {
        Failure::usage(e.to_string())
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{e}");
                std::process::exit(0);
            }
            _ => {
                eprint!("{e}");
                std::process::exit(EXIT_USAGE);
            }
        },
    };

    let outcome = match cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Coeffs(args) => cmd_coeffs(args),
    };

    if let Err(failure) = outcome {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}

fn cavity_params(args: &CavityArgs) -> Result<CavityParams, Failure> {
    CavityParams::detuned(args.kappa_s, args.gamma, args.g, args.delta).map_err(Failure::from)
}

fn emit_output(out: Option<&PathBuf>, body: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| Failure::io(format!("cannot write to standard output: {e}"))),
    }
}

fn validated(cfg: RunConfig) -> Result<RunConfig, Failure> {
    cfg.validate().map_err(Failure::usage)?;
    Ok(cfg)
}

impl FormatArg {
    fn label(self) -> &'static str {
        match self {
            FormatArg::Csv => "csv",
            FormatArg::Json => "json",
        }
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let model = match args.model {
        ModelArg::Ideal => DegradationModel::Ideal,
        ModelArg::Ratio => DegradationModel::NormalizedRatio,
        ModelArg::Squared => DegradationModel::SquaredMagnitude,
        ModelArg::ExactSim => DegradationModel::ExactSim,
        ModelArg::MonteCarlo => {
            return Err(Failure::usage(
                "sweep supports ideal, ratio, squared and exact-sim; use `simulate` for monte-carlo",
            ));
        }
    };
    let cfg = validated(RunConfig {
        alpha: args.alpha,
        alpha_min: args.alpha_min,
        alpha_max: args.alpha_max,
        steps: args.steps,
        rounds: args.rounds,
        kappa_s: args.cavity.kappa_s,
        gamma: args.cavity.gamma,
        g: args.cavity.g,
        delta: args.cavity.delta,
        model: args.model.label().to_string(),
        trials: None,
        seed: 0,
        format: args.format.label().to_string(),
        out: args.out,
    })?;

    let params = (model != DegradationModel::Ideal)
        .then(|| cavity_params(&args.cavity))
        .transpose()?;
    let reports = analytics::sweep_alpha(&cfg.grid(), cfg.rounds, params.as_ref(), model)?;
    let rows = emit::sweep_records(&reports);

    let body = match args.format {
        FormatArg::Csv => emit::sweep_csv(&rows),
        FormatArg::Json => emit::to_json_pretty(&rows),
    };
    emit_output(cfg.out.as_ref(), &body)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    if args.model == ModelArg::MonteCarlo && args.trials.is_none() {
        return Err(Failure::usage("--trials is required in monte-carlo mode"));
    }
    let cfg = validated(RunConfig {
        alpha: Some(args.alpha),
        alpha_min: None,
        alpha_max: None,
        steps: 1,
        rounds: args.rounds,
        kappa_s: args.cavity.kappa_s,
        gamma: args.cavity.gamma,
        g: args.cavity.g,
        delta: args.cavity.delta,
        model: args.model.label().to_string(),
        trials: args.trials,
        seed: args.seed,
        format: args.format.label().to_string(),
        out: args.out,
    })?;
    let pair = EntangledPair::from_alpha(args.alpha)?;

    let body = match args.model {
        ModelArg::Ideal | ModelArg::ExactSim => {
            let (cavity, params) = match args.model {
                ModelArg::Ideal => (CavityModel::Ideal, None),
                _ => {
                    let params = cavity_params(&args.cavity)?;
                    (
                        CavityModel::Scattering(scattering_coeffs(&params)?),
                        Some(params),
                    )
                }
            };
            let tree = protocol::branch_tree_exact(&pair, cfg.rounds, &cavity)?;
            let report = emit::simulate_report(&tree, args.model.label(), params);
            match args.format {
                FormatArg::Csv => emit::simulate_csv(&report),
                FormatArg::Json => emit::to_json_pretty(&report),
            }
        }
        ModelArg::MonteCarlo => {
            let params = cavity_params(&args.cavity)?;
            let cavity = CavityModel::Scattering(scattering_coeffs(&params)?);
            let trials = args.trials.expect("checked above");
            let report = protocol::monte_carlo(&pair, cfg.rounds, &cavity, trials, args.seed)?;
            match args.format {
                FormatArg::Csv => emit::monte_carlo_csv(&report),
                FormatArg::Json => emit::to_json_pretty(&report),
            }
        }
        ModelArg::Ratio | ModelArg::Squared => {
            return Err(Failure::usage(
                "simulate supports ideal, exact-sim and monte-carlo; use `sweep` for closed forms",
            ));
        }
    };
    emit_output(cfg.out.as_ref(), &body)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    if let Some(tol) = args.tolerance {
        if !tol.is_finite() || tol <= 0.0 {
            return Err(Failure::usage(format!(
                "--tolerance must be positive, got {tol}"
            )));
        }
    }
    let fault = args
        .inject_fault
        .map(|FaultArg::FlipIdealSign| Fault::FlipIdealSign);
    let results = run_suites(args.tolerance, fault);

    for r in &results {
        println!(
            "{:<26} max|err| {:>12.5e}  tol {:>8.1e}  {}",
            r.name,
            r.max_abs_error,
            r.tolerance,
            if r.passed { "pass" } else { "FAIL" }
        );
    }
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERIFY,
            message: format!("verification failed: {}", failed.join(", ")),
        })
    }
}

fn cmd_coeffs(args: CoeffsArgs) -> Result<(), Failure> {
    let params = cavity_params(&args.cavity)?;
    let coeffs = scattering_coeffs(&params)?;
    let report = emit::coeffs_report(params, &coeffs);
    let body = match args.format {
        FormatArg::Csv => emit::coeffs_csv(&report),
        FormatArg::Json => emit::to_json_pretty(&report),
    };
    emit_output(args.out.as_ref(), &body)
}
