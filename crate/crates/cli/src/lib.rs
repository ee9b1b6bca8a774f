//! Command-line front end for `rod-flat`.
//!
//! [`dispatch`] parses arguments, runs one subcommand and returns the process
//! exit code; machine-readable output goes to `out`, diagnostics to `err`.

pub mod bench;
mod commands;
pub mod format;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rod_flat::{Error, NumericMode};

pub use bench::{bench, BenchConfig, BenchMode, BenchReport, BenchRow};

/// Environment variable overriding the default float precision (bits).
pub const PRECISION_ENV: &str = "ROD_FLAT_PRECISION";

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const BOTH_ODD: i32 = 2;
    pub const COMMON_FACTOR: i32 = 3;
    pub const NUMERIC: i32 = 4;
    pub const CHECK_FAILED: i32 = 5;
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(std::io::Error),
    Precision(String),
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Io(_) => exit::USAGE,
            Self::Precision(_) => exit::NUMERIC,
            Self::CheckFailed(_) => exit::CHECK_FAILED,
            Self::Core(e) => match e {
                Error::BothOdd(..) => exit::BOTH_ODD,
                Error::CommonFactor(_) => exit::COMMON_FACTOR,
                Error::InvalidPrecision(_)
                | Error::ModeMismatch(_)
                | Error::OrderMismatch { .. }
                | Error::UnstableStep { .. } => exit::NUMERIC,
                Error::InvalidInput(_) | Error::NonQuadraticIrrationalUnsupported(_) => exit::USAGE,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) | Self::Precision(m) | Self::CheckFailed(m) => write!(f, "{m}"),
            Self::Core(e) => write!(f, "{e}"),
            Self::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Io(e.into())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "rod-flat",
    version,
    about = "Bézout identities for Chebyshev polynomials in the cosh basis and flatness tools for a heated rod"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cofactors L1, L2 with L1 cosh(ax) + L2 cosh(bx) = 1.
    Bezout(BezoutArgs),
    /// Check the identity exactly and against extended Euclid (a+b <= 120).
    Verify(PairArgs),
    /// Power series of the cofactors under x -> x/a.
    Series(SeriesArgs),
    /// Series for the continued-fraction convergents of a target ratio.
    Approx(ApproxArgs),
    /// Degree-2J coefficient of normalized L1 for each convergent.
    Table(TableArgs),
    /// Flat-output weights of the discretized rod.
    FlatOutput(FlatArgs),
    /// Paper-tape folding simulation.
    Fold(FoldArgs),
    /// Controllability rank of the discretized rod.
    Rank(RankArgs),
    /// Open-loop rest-to-rest motion planning and simulation.
    Plan(PlanArgs),
    /// Timing of the Bézout construction on (2i, 2i+1).
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    pub a: u64,
    pub b: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BezoutArgs {
    pub a: u64,
    pub b: u64,
    /// Print the step sequence.
    #[arg(long)]
    pub trace: bool,
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// One row per nonzero coefficient: side,frequency,coeff.
    #[arg(long)]
    pub csv: bool,
    /// Write output to a file instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct PrecisionArgs {
    /// Exact rational arithmetic.
    #[arg(long, conflicts_with = "digits")]
    pub exact: bool,
    /// Binary float precision holding this many decimal digits.
    #[arg(long)]
    pub digits: Option<u32>,
}

impl PrecisionArgs {
    pub fn mode(&self) -> CliResult<NumericMode> {
        if self.exact {
            return Ok(NumericMode::Exact);
        }
        if let Some(d) = self.digits {
            return Ok(NumericMode::from_digits(d)?);
        }
        default_mode()
    }
}

/// Float mode at `ROD_FLAT_PRECISION` bits, or 64 when unset.
pub fn default_mode() -> CliResult<NumericMode> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) => {
            let bits: u32 = v.trim().parse().map_err(|_| {
                CliError::Precision(format!("{PRECISION_ENV}={v:?} is not a bit count"))
            })?;
            Ok(NumericMode::float(bits)?)
        }
        Err(_) => Ok(NumericMode::default()),
    }
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    pub a: u64,
    pub b: u64,
    /// Truncation J: keep powers up to x^(2J).
    #[arg(long, default_value_t = 10)]
    pub order: usize,
    #[command(flatten)]
    pub precision: PrecisionArgs,
    /// Remove the constant term of L2 with the trivial relation.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long, conflicts_with = "json")]
    pub csv: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Clone)]
#[group(required = true, multiple = false)]
pub struct TargetArgs {
    /// Target sqrt(N).
    #[arg(long)]
    pub sqrt: Option<u64>,
    /// Target given as a decimal literal.
    #[arg(long)]
    pub value: Option<String>,
}

impl TargetArgs {
    pub fn target(&self) -> CliResult<rod_flat::TargetValue> {
        match (&self.sqrt, &self.value) {
            (Some(n), _) => Ok(rod_flat::TargetValue::sqrt(*n)?),
            (_, Some(v)) => Ok(rod_flat::TargetValue::parse(v)?),
            _ => Err(CliError::Usage(
                "one of --sqrt or --value is required".into(),
            )),
        }
    }
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// Number of convergents kept after the parity filter.
    #[arg(long, default_value_t = 7)]
    pub count: usize,
    #[arg(long, default_value_t = 10)]
    pub order: usize,
    #[command(flatten)]
    pub precision: PrecisionArgs,
    /// Report raw series instead of normalized ones.
    #[arg(long)]
    pub raw: bool,
    /// Worker threads for independent rows.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Write CSV (a,b,power,L1_coeff,L2_coeff) to this file.
    #[arg(long)]
    pub csv: Option<std::path::PathBuf>,
    /// Print JSON instead of CSV on stdout.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long, default_value_t = 7)]
    pub count: usize,
    #[arg(long, default_value_t = 10)]
    pub order: usize,
    #[command(flatten)]
    pub precision: PrecisionArgs,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairingArg {
    Derived,
    Printed,
}

#[derive(Debug, Args)]
pub struct FlatArgs {
    pub a: u64,
    pub b: u64,
    #[arg(long, default_value_t = 1)]
    pub q: u64,
    /// Run the exact dual controllability test.
    #[arg(long)]
    pub check: bool,
    #[arg(long, value_enum, default_value_t = PairingArg::Derived)]
    pub pairing: PairingArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct FoldArgs {
    pub a: u64,
    pub b: u64,
    /// Print the fold / cut event sequence.
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Laplacian,
    Paper,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    pub a: u64,
    pub b: u64,
    #[arg(long, default_value_t = 1)]
    pub q: u64,
    #[arg(long, value_enum, default_value_t = SignArg::Laplacian)]
    pub sign: SignArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Distance from the flat-output end to the heated point.
    #[arg(long)]
    pub a: u64,
    /// Length beyond the heated point (two-sided rod); omit for a rod heated at its end.
    #[arg(long)]
    pub b: Option<u64>,
    #[arg(long, default_value_t = 2.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 15)]
    pub order: usize,
    #[arg(long, default_value_t = 1.0)]
    pub time: f64,
    #[arg(long, default_value_t = 20)]
    pub q: u64,
    /// Integrator step; defaults to the stability bound 0.25/q^2.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta_start: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub theta_end: f64,
    /// Write t,u,theta_0..theta_N to this file.
    #[arg(long)]
    pub csv: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Largest a+b.
    #[arg(long, default_value_t = 1 << 20)]
    pub max_size: u64,
    /// Smallest a+b.
    #[arg(long, default_value_t = 1 << 10)]
    pub min_size: u64,
    #[arg(long, value_delimiter = ',', default_values_t = [BenchMode::Arrays, BenchMode::Series])]
    pub modes: Vec<BenchMode>,
    /// Series truncation J in with-series mode.
    #[arg(long, default_value_t = 10)]
    pub order: usize,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long)]
    pub csv: Option<std::path::PathBuf>,
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match commands::run(cli.command, out, err) {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
