//! `shg` — spectra, accuracy comparisons, and population dynamics of the
//! two-mode second-harmonic-generation model, written as plot-ready CSV
//! (with optional JSON mirrors).
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 solver convergence
//! failure, 4 capacity exceeded.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shg_core::{Error as CoreError, ModelParams};

#[derive(Parser)]
#[command(
    name = "shg",
    version,
    about = "Exact and quasiclassical spectra and dynamics of the second-harmonic-generation model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues (and optionally amplitudes) of one invariant block.
    Spectrum(SpectrumArgs),
    /// Exact vs cluster mean-field spectra with accuracy measures.
    Compare(CompareArgs),
    /// Time evolution of ⟨Y0⟩, ⟨N0⟩, ⟨N1⟩.
    Dynamics(DynamicsArgs),
}

#[derive(Args)]
struct PhysicsArgs {
    /// Coupling magnitude |g|
    #[arg(long = "g", value_name = "G")]
    g_abs: f64,
    /// Coupling phase in radians
    #[arg(long, default_value_t = 0.0)]
    g_phase: f64,
    /// Exact resonance (Δ = 0)
    #[arg(long, conflicts_with_all = ["delta", "omega0", "omega1"])]
    resonance: bool,
    /// Detuning Δ = 2ω1 − ω0
    #[arg(long, conflicts_with_all = ["omega0", "omega1"])]
    delta: Option<f64>,
    /// Pump-mode frequency ω0 (requires --omega1)
    #[arg(long, requires = "omega1")]
    omega0: Option<f64>,
    /// Harmonic-mode frequency ω1 (requires --omega0)
    #[arg(long, requires = "omega0")]
    omega1: Option<f64>,
}

impl PhysicsArgs {
    fn params(&self) -> Result<ModelParams, CliError> {
        let params = if self.resonance {
            ModelParams::resonant(self.g_abs, self.g_phase)
        } else if let Some(delta) = self.delta {
            ModelParams::with_delta(delta, self.g_abs, self.g_phase)
        } else if let (Some(w0), Some(w1)) = (self.omega0, self.omega1) {
            ModelParams::new(w0, w1, self.g_abs, self.g_phase)
        } else {
            return Err(CliError::Usage(
                "specify the frequencies explicitly: --resonance, --delta, or --omega0/--omega1"
                    .into(),
            ));
        };
        Ok(params?)
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Sturm,
    Oracle,
    Both,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output directory (default: $SHG_OUT_DIR or the working directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv writes CSV files only; json adds JSON mirrors
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

impl OutputArgs {
    fn dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os("SHG_OUT_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

#[derive(Args)]
struct SpectrumArgs {
    /// Harmonic parity k of the block (0 or 1)
    #[arg(long)]
    k: usize,
    /// Block size parameter s (dimension s+1)
    #[arg(long)]
    s: usize,
    #[command(flatten)]
    physics: PhysicsArgs,
    /// Eigensolver route; `both` cross-checks and writes the sturm result
    #[arg(long, value_enum, default_value_t = MethodArg::Sturm)]
    method: MethodArg,
    /// Also write amplitudes.csv (all eigenvector components)
    #[arg(long)]
    amplitudes: bool,
    /// Relative tolerance of the eigenvalue bisection
    #[arg(long)]
    tol: Option<f64>,
    /// Print a one-decimal table to stdout
    #[arg(long)]
    table1: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Harmonic parity k of the block (0 or 1)
    #[arg(long)]
    k: usize,
    /// Block size parameter s (dimension s+1)
    #[arg(long)]
    s: usize,
    #[command(flatten)]
    physics: PhysicsArgs,
    /// Level step between emitted rows
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Print a one-decimal table to stdout
    #[arg(long)]
    table1: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DynamicsArgs {
    /// Initial state: cluster | fock:N1,N0 | coherent:RE1,IM1,RE0,IM0
    #[arg(long)]
    init: String,
    /// Block parity for --init cluster
    #[arg(long)]
    k: Option<usize>,
    /// Block size for --init cluster
    #[arg(long)]
    s: Option<usize>,
    #[command(flatten)]
    physics: PhysicsArgs,
    /// Coherent-state truncation tolerance
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    /// Largest admissible block size
    #[arg(long = "s-cap", default_value_t = 4096)]
    s_cap: usize,
    /// Grid end in dimensionless time τ = g·t·√(2s̄)
    #[arg(long, conflicts_with = "t_max")]
    tau_max: Option<f64>,
    /// Grid end in physical time
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid steps (rows = steps + 1)
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Add the closed-form quasiclassical columns (cluster init, s ≥ 2)
    #[arg(long)]
    qc: bool,
    /// Divide the population columns by s̄
    #[arg(long)]
    normalize: bool,
    #[command(flatten)]
    output: OutputArgs,
}

/// Errors carrying process exit codes.
enum CliError {
    Usage(String),
    Core(CoreError),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(CoreError::InvalidArgument(_)) => 2,
            CliError::Core(CoreError::UndefinedMeasure(_)) => 2,
            CliError::Core(CoreError::Convergence(_)) => 3,
            CliError::Core(CoreError::Capacity { .. }) => 4,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
            CliError::Io(e) => e.to_string(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn configure_workers() {
    if let Ok(val) = std::env::var("SHG_WORKERS") {
        if let Ok(n) = val.parse::<usize>() {
            if n >= 1 {
                // ignore the error if a pool already exists
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    configure_workers();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum(args) => commands::spectrum(&args),
        Command::Compare(args) => commands::compare(&args),
        Command::Dynamics(args) => commands::dynamics(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
