//! Command-line front end: evaluates the CHSH correlators, runs the
//! optimizers and the kernel/duality check batteries, and emits
//! machine-readable result envelopes (JSON, or CSV for surface grids).

mod commands;
mod envelope;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Errors surfaced to the exit code: configuration and domain problems exit
/// with 1, numerical non-convergence with 2.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
}

#[derive(Parser)]
#[command(
    name = "modular-bell",
    version,
    about = "Bell-CHSH correlators for free scalar and Proca fields in 1+1 dimensions"
)]
struct Cli {
    /// Output file; a relative path resolves against MODULAR_BELL_OUT_DIR
    /// when that variable is set. Standard output otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Result format. JSON is the default everywhere; CSV is available only
    /// for surface grids, where it is the default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldKind {
    Scalar,
    Proca,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Base,
    Unitary,
}

#[derive(Subcommand)]
enum Command {
    /// Spin-singlet CHSH value at four analyzer angles.
    QmChsh(QmChshArgs),
    /// Field-theory CHSH correlator at one parameter point.
    QftChsh(QftChshArgs),
    /// Multistart simplex maximization of the CHSH correlator.
    Optimize(OptimizeArgs),
    /// Position-space pairing battery: wedge causality, antisymmetry of the
    /// commutator kernel, symmetry of the anticommutator kernel.
    KernelsCheck(KernelsCheckArgs),
    /// Proca/scalar duality battery on transverse test functions.
    ProcaCheck(ProcaCheckArgs),
    /// CHSH over a rectangular grid in two of the base parameters.
    Surface(SurfaceArgs),
}

#[derive(Args)]
pub struct QmChshArgs {
    /// Four comma-separated angles: alpha,alpha',beta,beta'.
    #[arg(long, allow_hyphen_values = true)]
    angles: String,
}

#[derive(Args)]
pub struct QftChshArgs {
    /// Spectral parameter, strictly inside (0, 1).
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    /// Amplitude of Alice's first test function.
    #[arg(long, allow_hyphen_values = true)]
    eta: f64,
    /// Amplitude of Alice's second test function.
    #[arg(long, allow_hyphen_values = true)]
    eta_prime: f64,
    /// Dressing coefficients; all zero reproduces the bare correlator.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha_prime: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta_prime: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    tau: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    sigma_prime: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    tau_prime: f64,
    /// Field content tag. The transverse Proca correlator coincides with the
    /// scalar one, so this changes the envelope, not the number.
    #[arg(long, value_enum, default_value_t = FieldKind::Scalar)]
    field: FieldKind,
}

#[derive(Args)]
pub struct OptimizeArgs {
    #[arg(long, value_enum, default_value_t = Target::Base)]
    target: Target,
    /// Simplex restarts; defaults to 64 for base, 256 for unitary.
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long, default_value_t = modular_bell::optimizer::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
pub struct KernelsCheckArgs {
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Quadrature tolerance for each pairing.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Number of wedge-separated bump pairs.
    #[arg(long, default_value_t = 5)]
    pairs: usize,
    #[arg(long, default_value_t = modular_bell::optimizer::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
pub struct ProcaCheckArgs {
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Tolerance passed to the momentum-space inner products.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Number of random bump pairs for the duality comparison.
    #[arg(long, default_value_t = 3)]
    pairs: usize,
    #[arg(long, default_value_t = modular_bell::optimizer::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
pub struct SurfaceArgs {
    /// First swept axis as name:lo:hi:n, e.g. lambda:0.5:0.9999:50.
    /// Axis names: lambda, eta, eta-prime.
    #[arg(long)]
    param1: String,
    /// Second swept axis, same syntax; must differ from param1.
    #[arg(long)]
    param2: String,
    /// Held value for whichever parameter neither axis sweeps.
    #[arg(long, default_value_t = 0.998634, allow_hyphen_values = true)]
    lambda: f64,
    #[arg(long, default_value_t = 0.00100492, allow_hyphen_values = true)]
    eta: f64,
    #[arg(long, default_value_t = 0.318599, allow_hyphen_values = true)]
    eta_prime: f64,
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}

/// Parses the arguments, runs the subcommand, writes the result, and maps
/// the outcome to the exit-code contract: 0 success, 1 configuration or
/// domain error, 2 numerical non-convergence or a failed check battery.
fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            return 1;
        }
    };
    let started = Instant::now();
    let body = match commands::dispatch(&cli.command) {
        Ok(body) => body,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            return 1;
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let wall_time = started.elapsed().as_secs_f64();
    match envelope::emit(cli.format, cli.out.as_deref(), &body, wall_time) {
        Ok(code) => code,
        Err(Failure::Config(msg)) | Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}
