//! Command-line front end: one subcommand per harness, CSV/JSON output,
//! reproducible given the full configuration (including the seed).

mod run;
mod table;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Exit codes: 0 success, 2 usage/config error, 3 resource error,
/// 4 internal invariant violation.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Resource(String),
    Invariant(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Resource(m) | CliError::Invariant(m) => m,
        }
    }
}

impl From<moebius_expsum::Error> for CliError {
    fn from(e: moebius_expsum::Error) -> Self {
        use moebius_expsum::Error::*;
        match e {
            CapacityExceeded { .. } | PrecisionExceeded { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Resource(format!("io error: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaVariantArg {
    Exact,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeqArg {
    /// mu(m), mu(n) coefficient sequences.
    Mobius,
    /// All-ones sequences.
    Ones,
    /// Seeded random unit complexes.
    Random,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CommonOpts {
    /// Alpha: quad:D, quad:P,D,Q, cf:a0,a1,..., liouville:ETA, or golden.
    #[arg(long)]
    pub alpha: String,

    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,

    /// Output path (stdout when absent).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub output: Option<String>,

    /// Sieve limit (defaults to the largest x needed).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sieve_limit: Option<u64>,

    /// Fixed-point fractional bits for alpha (64..=256).
    #[arg(long, default_value_t = 256)]
    pub frac_bits: u32,

    /// Seed for randomized coefficient sequences.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for the parallel sums (library default otherwise).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct XSelection {
    /// A single x.
    #[arg(long, conflicts_with = "x_range")]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<u64>,

    /// Geometric range start:stop:xK, e.g. 1e4:1e7:x10.
    #[arg(long = "x-range")]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x_range: Option<String>,
}

#[derive(Debug, Parser)]
#[command(
    name = "moebius-expsum",
    about = "Möbius exponential sums S(x) = sum mu(n) e(alpha n): evaluation, \
             Type I/II decomposition, continued-fraction diagnostics, and \
             growth-exponent sweeps",
    long_about = None,
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate S(x) with compensated summation.
    Sum {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        xs: XSelection,
    },
    /// Decompose S(x) into Type I/II sums plus boundary sums; the residual
    /// of the identity is reported and checked against the error budget.
    Decompose {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        xs: XSelection,
        /// Override M (default ceil(x^(2/5))).
        #[arg(long)]
        m: Option<u64>,
        /// Override N (default ceil(x^(2/5))).
        #[arg(long)]
        n: Option<u64>,
        /// Type-I coefficient constraint set.
        #[arg(long, value_enum, default_value = "exact")]
        gamma_variant: GammaVariantArg,
    },
    /// Emit partial quotients and convergents.
    Convergents {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        count: usize,
    },
    /// Select the convergent denominator straddling x^(1/tau).
    SelectQ {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        x: u64,
        /// Rational tau > 2, e.g. 21/10.
        #[arg(long)]
        tau: Option<String>,
    },
    /// Sweep x, comparing log|S(x)|/log x against the predicted exponent.
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        #[command(flatten)]
        xs: XSelection,
        #[arg(long)]
        tau: Option<String>,
        /// Rational epsilon added to the predicted exponent.
        #[arg(long, default_value = "1/20")]
        epsilon: String,
        /// Also write (log10 x, log10 |S|, pred * log10 x) triples here.
        #[arg(long)]
        emit_plot_data: Option<String>,
    },
    /// Ratio check of the averaged linear sums against (M + x/q + q) log(2qx).
    Lemma1 {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        x: u64,
        /// Override M (default ceil(x^(2/5))).
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        tau: Option<String>,
    },
    /// Ratio check of the bilinear sum against its mean-value bound.
    Lemma2 {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        tau: Option<String>,
        #[arg(long, value_enum, default_value = "mobius")]
        seq: SeqArg,
    },
}

fn main() {
    let cli = Cli::parse();
    match run::dispatch(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("moebius-expsum: {}", e.message());
            std::process::exit(e.code());
        }
    }
}
