//! Command-line driver: constellation and quantizer configuration, sweep
//! execution, and CSV/JSON emission.
//!
//! Exit codes: 0 on success, 2 on invalid arguments or mismatched inputs,
//! 3 on numerical or solver failure (the error name goes to standard error).

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use pcshape::Family;
use serde::Serialize;

/// Errors split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or malformed inputs: exit 2.
    Usage(String),
    /// Numerical or solver failure: exit 3.
    Numerical(pcshape::Error),
}

impl From<pcshape::Error> for CliError {
    fn from(e: pcshape::Error) -> Self {
        use pcshape::Error::*;
        match e {
            UnsupportedSize { .. } | DimensionMismatch(_) | InvalidDimension(_)
            | InvalidDistribution(_) | InvalidParameter(_) | GridMismatch => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Numerical(e),
        }
    }
}

/// Distribution selector: `uniform`, `mb:LAMBDA`, or `file:PATH`.
#[derive(Debug, Clone)]
pub enum DistSpec {
    Uniform,
    MaxwellBoltzmann(f64),
    File(PathBuf),
}

impl Serialize for DistSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

impl DistSpec {
    pub fn label(&self) -> String {
        match self {
            DistSpec::Uniform => "uniform".into(),
            DistSpec::MaxwellBoltzmann(l) => format!("mb:{l}"),
            DistSpec::File(p) => format!("file:{}", p.display()),
        }
    }
}

impl FromStr for DistSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "uniform" {
            return Ok(DistSpec::Uniform);
        }
        if let Some(lambda) = s.strip_prefix("mb:") {
            return lambda
                .parse()
                .map(DistSpec::MaxwellBoltzmann)
                .map_err(|_| format!("invalid lambda in '{s}'"));
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(DistSpec::File(PathBuf::from(path)));
        }
        Err(format!("unknown distribution '{s}', expected uniform | mb:LAMBDA | file:PATH"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Discrete,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Pam,
    Qam,
    Psk,
    Ampm,
    Custom,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Pam => Family::Pam,
            FamilyArg::Qam => Family::Qam,
            FamilyArg::Psk => Family::Psk,
            FamilyArg::Ampm => Family::Ampm,
            FamilyArg::Custom => Family::Custom,
        }
    }
}

/// Constellation and quantizer options shared by every computing command.
#[derive(Debug, Args, Serialize)]
pub struct CommonArgs {
    /// Constellation family.
    #[arg(long, value_enum)]
    pub family: FamilyArg,

    /// Number of symbols (standard families).
    #[arg(long)]
    pub size: Option<usize>,

    /// JSON point file (required for --family custom).
    #[arg(long)]
    pub points_file: Option<PathBuf>,

    /// Keep the raw layout instead of normalizing to unit energy under the
    /// uniform distribution.
    #[arg(long)]
    pub no_normalize: bool,

    /// Sigma grid: VALUE or START:STOP:STEP.
    #[arg(long)]
    pub sigma: Option<String>,

    /// Quantizer bits per dimension (default picked by family).
    #[arg(long)]
    pub bits: Option<u32>,

    /// Quantizer shift in multiples of sigma.
    #[arg(long, default_value_t = 2.0)]
    pub shift_mult: f64,

    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MiCurveArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// MI estimator.
    #[arg(long, value_enum, default_value_t = Estimator::Discrete)]
    pub estimator: Estimator,

    /// SNR grid in dB (alternative to --sigma): VALUE or START:STOP:STEP.
    #[arg(long)]
    pub snr_db: Option<String>,

    /// Input distribution.
    #[arg(long, default_value = "uniform")]
    pub dist: DistSpec,

    /// Monte-Carlo samples per point.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,

    /// Base RNG seed; point k of a sweep uses seed + k.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct MbEnvelopeArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Lambda grid: VALUE, START:STOP:STEP (either direction), or
    /// neg-exp:COUNT:VMAX.
    #[arg(long)]
    pub lambdas: String,

    /// Rescale each lambda's system to unit average power.
    #[arg(long)]
    pub unit_energy: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct BaArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Convergence threshold in bits.
    #[arg(long, default_value_t = pcshape::DEFAULT_BA_EPSILON)]
    pub eps: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CbaArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Gain interval LO:HI.
    #[arg(long, default_value = "0.5:4")]
    pub alpha_range: String,

    /// Gain-search depth.
    #[arg(long, default_value_t = 20)]
    pub depth: usize,

    /// Gains evaluated per depth.
    #[arg(long, default_value_t = 50)]
    pub points_per_depth: usize,

    /// Inner-loop convergence threshold in bits.
    #[arg(long, default_value_t = 1e-7)]
    pub inner_eps: f64,

    /// Average-power target.
    #[arg(long, default_value_t = 1.0)]
    pub power: f64,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum OptimizeArgs {
    /// Best Maxwell–Boltzmann parameter per sigma.
    MbEnvelope(MbEnvelopeArgs),
    /// Unconstrained capacity iteration per sigma.
    Ba(BaArgs),
    /// Power-constrained capacity with gain search per sigma.
    Cba(CbaArgs),
}

impl OptimizeArgs {
    pub fn common(&self) -> &CommonArgs {
        match self {
            OptimizeArgs::MbEnvelope(a) => &a.common,
            OptimizeArgs::Ba(a) => &a.common,
            OptimizeArgs::Cba(a) => &a.common,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    /// First result file (.jsonl from optimize, or a curve .csv).
    pub file_a: PathBuf,

    /// Second result file on the same sigma grid.
    pub file_b: PathBuf,

    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Parser)]
#[command(
    name = "pcshape",
    version,
    about = "Mutual information and input shaping for constellations on the AWGN channel"
)]
enum Cli {
    /// Mutual information curve of a fixed input distribution.
    MiCurve(MiCurveArgs),
    /// Optimized input distributions per sigma.
    #[command(subcommand)]
    Optimize(OptimizeArgs),
    /// Per-sigma difference and divergence of two result files.
    Compare(CompareArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli {
        Cli::MiCurve(args) => commands::cmd_mi_curve(args),
        Cli::Optimize(args) => commands::cmd_optimize(args),
        Cli::Compare(args) => commands::cmd_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(3)
        }
    }
}
