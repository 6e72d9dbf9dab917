//! Command-line front end: parameter sweeps to CSV, the validation
//! battery, and the standalone identity check.
//!
//! Exit codes: 0 success, 1 a validation check failed, 2 bad configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use noma_mec_cli::{
    criteria, identity_report, run_sweep, FixedParams, McParams, Mode, SweepAxis, SweepConfig,
    Target,
};

#[derive(Parser)]
#[command(
    name = "noma-mec",
    version,
    about = "Offloading probabilities for NOMA-assisted edge computing: sweeps, validation, identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Sweep one parameter axis and emit one CSV row per grid point
    Sweep(SweepArgs),
    /// Run the analytic-vs-simulation validation battery
    Validate(ValidateArgs),
    /// Check the ordered-statistics binomial identity over a population range
    IdentityCheck(IdentityArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Quantity evaluated at each grid point
    #[arg(long, value_enum)]
    mode: Mode,

    /// Population size M (number of paired devices)
    #[arg(long = "M", visible_alias = "K", default_value_t = 5)]
    population: u32,

    /// Weak selection index m
    #[arg(long, default_value_t = 1)]
    m: u32,

    /// Strong selection index n
    #[arg(long, default_value_t = 2)]
    n: u32,

    /// Weak transmit SNR in dB (uplink modes)
    #[arg(long)]
    rho_m_db: Option<f64>,

    /// Strong transmit SNR in dB (uplink modes)
    #[arg(long)]
    rho_n_db: Option<f64>,

    /// SNR ratio rho_n / rho_m (alternative to --rho-n-db)
    #[arg(long)]
    eta: Option<f64>,

    /// Uplink energy split, in (0, 1/2)
    #[arg(long)]
    beta: Option<f64>,

    /// Downlink second-slot power fraction, in (0, 1)
    #[arg(long)]
    beta_tilde: Option<f64>,

    /// Base-station SNR in dB (downlink modes)
    #[arg(long)]
    rho_db: Option<f64>,

    /// Fixed strong-signal power share (downlink latency)
    #[arg(long)]
    alpha_n_sq: Option<f64>,

    /// Task size in bits per slot (downlink energy)
    #[arg(long)]
    bits: Option<f64>,

    /// Slot duration in seconds
    #[arg(long)]
    slot: Option<f64>,

    /// Weak server's bit target (downlink latency)
    #[arg(long)]
    bits_m: Option<f64>,

    /// Strong server's bit target (downlink latency)
    #[arg(long)]
    bits_n: Option<f64>,

    /// Which server's completion probability to report (downlink latency)
    #[arg(long, value_enum)]
    target: Option<Target>,

    /// Chebyshev-Gauss node count for the downlink closed form
    #[arg(long)]
    quad_points: Option<u32>,

    /// Axis specification, param:start:stop:step (SNR axes in dB)
    #[arg(long)]
    sweep: SweepAxis,

    /// Monte Carlo trials per grid point (omit to skip simulation columns)
    #[arg(long)]
    mc_trials: Option<u64>,

    /// Base seed; each row derives its own stream from it
    #[arg(long, default_value_t = 12345)]
    seed: u64,

    /// Trials per simulation chunk (defaults to min(trials, 65536))
    #[arg(long)]
    chunk: Option<u64>,

    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format; csv is the only supported value
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct ValidateArgs {
    /// Run a single criterion by number (1..=12) instead of the full set
    #[arg(long)]
    only: Option<u32>,
}

#[derive(Args)]
struct IdentityArgs {
    /// Largest population M to check
    #[arg(long, default_value_t = 12)]
    max_population: u32,

    /// Allowed deviation from 1
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Sweep(args) => sweep_cmd(args),
        Command::Validate(args) => validate_cmd(args),
        Command::IdentityCheck(args) => identity_cmd(args),
    };
    std::process::exit(code);
}

fn sweep_cmd(args: SweepArgs) -> i32 {
    if args.format != "csv" {
        eprintln!(
            "configuration error: {:?} is not a supported format (only csv)",
            args.format
        );
        return 2;
    }
    let cfg = SweepConfig {
        mode: args.mode,
        axis: args.sweep,
        fixed: FixedParams {
            population: args.population,
            weak: args.m,
            strong: args.n,
            rho_m_db: args.rho_m_db,
            rho_n_db: args.rho_n_db,
            eta: args.eta,
            beta: args.beta,
            beta_tilde: args.beta_tilde,
            rho_db: args.rho_db,
            alpha_n_sq: args.alpha_n_sq,
            bits: args.bits,
            slot: args.slot,
            bits_m: args.bits_m,
            bits_n: args.bits_n,
            target: args.target,
        },
        mc: args.mc_trials.map(|trials| McParams {
            trials,
            seed: args.seed,
            chunk: args.chunk,
        }),
        quad_points: args.quad_points,
    };
    let csv = match run_sweep(&cfg) {
        Ok(csv) => csv,
        Err(err) => {
            eprintln!("{err}");
            return 2;
        }
    };
    match args.out {
        Some(path) => {
            if let Err(err) = std::fs::write(&path, csv) {
                eprintln!(
                    "configuration error: cannot write {}: {err}",
                    path.display()
                );
                return 2;
            }
        }
        None => print!("{csv}"),
    }
    0
}

fn validate_cmd(args: ValidateArgs) -> i32 {
    let results = match criteria::run(args.only) {
        Ok(results) => results,
        Err(err) => {
            eprintln!("{err}");
            return 2;
        }
    };
    let mut failures = 0usize;
    for result in &results {
        println!("{}", result.line());
        if !result.passed {
            failures += 1;
        }
    }
    if failures == 0 {
        println!("validation: all {} criteria passed", results.len());
        0
    } else {
        println!(
            "validation: {failures} of {} criteria failed",
            results.len()
        );
        1
    }
}

fn identity_cmd(args: IdentityArgs) -> i32 {
    match identity_report(args.max_population, args.tol) {
        Ok((report, ok)) => {
            print!("{report}");
            if ok {
                0
            } else {
                1
            }
        }
        Err(err) => {
            eprintln!("{err}");
            2
        }
    }
}
