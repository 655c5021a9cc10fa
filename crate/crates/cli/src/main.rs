//! Batch front-end: theory sweeps (`phase`, `kl-curve`) and simulation
//! drivers (`simulate`, `rem`) writing plot-ready CSV tables plus a
//! replayable manifest per run.
//!
//! Exit codes: 0 success, 1 usage/schema error, 2 solver failure,
//! 3 resource cap.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;
use hdkde::SpectralDensity;

#[derive(Parser)]
#[command(
    name = "hdkde",
    version,
    about = "Phase diagram, KL curves and Monte-Carlo experiments for kernel density estimation in large dimensions"
)]
struct Cli {
    /// Size of the rayon thread pool (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep α and tabulate h_CLT, h_G and h_opt (plus their squares).
    Phase(PhaseArgs),
    /// Tabulate theory KL curves over a bandwidth grid, one column
    /// block per kernel exponent.
    KlCurve(KlCurveArgs),
    /// Run a Monte-Carlo experiment described by a JSON config.
    Simulate(SimulateArgs),
    /// Analyze and simulate a Gaussian Random Energy Model.
    Rem(RemArgs),
}

#[derive(Args)]
struct PhaseArgs {
    /// Comma-separated α values, e.g. "0.05,0.1,0.5".
    #[arg(long, value_delimiter = ',', required = true)]
    alphas: Vec<f64>,
    /// Kernel exponent γ ≥ 1.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Also classify every α at this bandwidth and append the
    /// regime/m*/D/f columns.
    #[arg(long)]
    h: Option<f64>,
    /// Spectrum file ("λ weight" per line); identity when omitted.
    #[arg(long)]
    spectrum: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct KlCurveArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    h_min: f64,
    #[arg(long, default_value_t = 2.5)]
    h_max: f64,
    #[arg(long, default_value_t = 41)]
    h_count: usize,
    /// Comma-separated kernel exponents.
    #[arg(long, value_delimiter = ',', required = true)]
    gammas: Vec<f64>,
    #[arg(long)]
    spectrum: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SimulateMode {
    Fluctuations,
    #[value(name = "empirical-kl")]
    EmpiricalKl,
    Dmin,
    Rem,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON experiment configuration (a manifest from a previous run is
    /// accepted too and replays its embedded config).
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    mode: SimulateMode,
    /// Output directory for the data files and the manifest.
    #[arg(long)]
    out: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RemArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap would exit with its own code; usage errors are 1 here
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            std::process::exit(if is_help { 0 } else { 1 });
        }
    };
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn load_spectrum(path: &Option<PathBuf>) -> Result<SpectralDensity, CliError> {
    match path {
        Some(p) => SpectralDensity::from_path(p).map_err(CliError::Core),
        None => Ok(SpectralDensity::identity()),
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Phase(args) => {
            let spectrum = load_spectrum(&args.spectrum)?;
            commands::cmd_phase(&args.alphas, args.gamma, args.h, &spectrum, &args.out)
        }
        Command::KlCurve(args) => {
            if args.h_count == 0 {
                return Err(CliError::Usage("kl-curve: h-count must be >= 1".into()));
            }
            if !(args.h_min > 0.0) || args.h_max < args.h_min {
                return Err(CliError::Usage(
                    "kl-curve: need 0 < h-min <= h-max".into(),
                ));
            }
            let grid = config::GridSpec {
                min: args.h_min,
                max: args.h_max,
                count: args.h_count,
            };
            let spectrum = load_spectrum(&args.spectrum)?;
            commands::cmd_kl_curve(args.alpha, &grid.points(), &args.gammas, &spectrum, &args.out)
        }
        Command::Simulate(args) => {
            let raw = config::load(args.config.to_str().unwrap_or_default())?;
            match args.mode {
                SimulateMode::Rem => {
                    let rem_config = raw.rem.clone().ok_or_else(|| {
                        CliError::Usage("config is missing required fields:\n  rem: missing".into())
                    })?;
                    let seed = args.seed.or(raw.seed).unwrap_or(0);
                    commands::cmd_rem(&raw, &rem_config, seed, &args.out)
                }
                mode => {
                    let needs_bandwidth = mode != SimulateMode::EmpiricalKl;
                    let (experiment, seed) =
                        config::to_experiment(&raw, args.seed, needs_bandwidth)?;
                    match mode {
                        SimulateMode::Fluctuations => {
                            commands::cmd_simulate_fluctuations(&raw, &experiment, seed, &args.out)
                        }
                        SimulateMode::EmpiricalKl => {
                            commands::cmd_simulate_empirical_kl(&raw, &experiment, seed, &args.out)
                        }
                        SimulateMode::Dmin => {
                            commands::cmd_simulate_dmin(&raw, &experiment, seed, &args.out)
                        }
                        SimulateMode::Rem => unreachable!(),
                    }
                }
            }
        }
        Command::Rem(args) => {
            let raw = config::load(args.config.to_str().unwrap_or_default())?;
            let rem_config = raw.rem.clone().ok_or_else(|| {
                CliError::Usage("config is missing required fields:\n  rem: missing".into())
            })?;
            let seed = args.seed.or(raw.seed).unwrap_or(0);
            commands::cmd_rem(&raw, &rem_config, seed, &args.out)
        }
    }
}
