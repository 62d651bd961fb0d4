//! Batch experiment runner: average-time tables, block-error curves,
//! asymptotic comparisons, condition-number studies, and straggler
//! simulations, emitted as plot-ready CSV or JSON.
//!
//! Every run is fully determined by its printed config and seed; rerunning
//! the same invocation reproduces the output byte for byte.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use codedc::analytics::{RuntimeModel, Scheme};
use codedc::codes::MdsKind;

mod cache;
mod cmd_analyze;
mod cmd_asymptotic;
mod cmd_bler;
mod cmd_simulate;
mod cmd_stability;
mod output;

use cache::CacheDir;
use output::CliResult;

#[derive(Debug, Parser)]
#[command(
    name = "codedc",
    version,
    about = "Erasure-coded distributed computing experiments",
    after_help = "Seeds resolve as --seed, then CODEDC_SEED, then 0. \
                  Exit codes: 0 ok, 2 usage, 3 numeric or budget failure, 4 internal fault."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Average execution time and the optimal dimension k per scheme.
    Analyze(cmd_analyze::AnalyzeArgs),
    /// Block-error-rate curves for Reed-Muller decoders.
    Bler(cmd_bler::BlerArgs),
    /// Normalized times n*T at the asymptotically optimal rate R*.
    Asymptotic(cmd_asymptotic::AsymptoticArgs),
    /// Condition-number studies of decoding matrices.
    Stability(cmd_stability::StabilityArgs),
    /// Straggler simulation, optionally computing a real matrix product.
    Simulate(cmd_simulate::SimulateArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Master seed; falls back to CODEDC_SEED, then 0.
    #[arg(long, global = false)]
    pub seed: Option<u64>,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Directory for generator and projection-plan JSON caches.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl FormatArg {
    pub fn name(self) -> &'static str {
        match self {
            FormatArg::Csv => "csv",
            FormatArg::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Exp,
    Weibull,
}

impl DistArg {
    pub fn name(self) -> &'static str {
        match self {
            DistArg::Exp => "exp",
            DistArg::Weibull => "weibull",
        }
    }

    pub fn model(self, mu: f64, alpha: f64) -> codedc::Result<RuntimeModel> {
        match self {
            DistArg::Exp => RuntimeModel::exponential(mu),
            DistArg::Weibull => RuntimeModel::weibull(mu, alpha),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Uncoded,
    Mds,
    BrcBound,
    PolarSc,
    RmMap,
    RmProjective,
}

impl SchemeArg {
    pub fn to_scheme(self) -> Scheme {
        match self {
            SchemeArg::Uncoded => Scheme::Uncoded,
            SchemeArg::Mds => Scheme::Mds,
            SchemeArg::BrcBound => Scheme::BrcBound,
            SchemeArg::PolarSc => Scheme::PolarSc,
            SchemeArg::RmMap => Scheme::RmMap,
            SchemeArg::RmProjective => Scheme::RmProjective,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AsymptoticSchemeArg {
    Mds,
    BrcBound,
    PolarSc,
    RmMap,
}

impl AsymptoticSchemeArg {
    pub fn name(self) -> &'static str {
        match self {
            AsymptoticSchemeArg::Mds => "mds",
            AsymptoticSchemeArg::BrcBound => "brc-bound",
            AsymptoticSchemeArg::PolarSc => "polar-sc",
            AsymptoticSchemeArg::RmMap => "rm-map",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RmDecoderArg {
    Map,
    Projective,
}

impl RmDecoderArg {
    pub fn name(self) -> &'static str {
        match self {
            RmDecoderArg::Map => "map",
            RmDecoderArg::Projective => "projective",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimSchemeArg {
    Uncoded,
    Mds,
    Rm,
    Polar,
    Random,
}

impl SimSchemeArg {
    pub fn name(self) -> &'static str {
        match self {
            SimSchemeArg::Uncoded => "uncoded",
            SimSchemeArg::Mds => "mds",
            SimSchemeArg::Rm => "rm",
            SimSchemeArg::Polar => "polar",
            SimSchemeArg::Random => "random",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimDecoderArg {
    Auto,
    Map,
    Projective,
    Sc,
}

impl SimDecoderArg {
    pub fn name(self) -> &'static str {
        match self {
            SimDecoderArg::Auto => "auto",
            SimDecoderArg::Map => "map",
            SimDecoderArg::Projective => "projective",
            SimDecoderArg::Sc => "sc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MdsKindArg {
    Vandermonde,
    Gaussian,
}

impl MdsKindArg {
    pub fn name(self) -> &'static str {
        match self {
            MdsKindArg::Vandermonde => "vandermonde",
            MdsKindArg::Gaussian => "gaussian",
        }
    }

    pub fn to_kind(self) -> MdsKind {
        match self {
            MdsKindArg::Vandermonde => MdsKind::Vandermonde,
            MdsKindArg::Gaussian => MdsKind::Gaussian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StudyArg {
    Projection,
    Submatrix,
}

impl StudyArg {
    pub fn name(self) -> &'static str {
        match self {
            StudyArg::Projection => "projection",
            StudyArg::Submatrix => "submatrix",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StabilityCodeArg {
    Rm,
    Random,
    MdsVandermonde,
    MdsGaussian,
    Uncoded,
}

impl StabilityCodeArg {
    pub fn name(self) -> &'static str {
        match self {
            StabilityCodeArg::Rm => "rm",
            StabilityCodeArg::Random => "random",
            StabilityCodeArg::MdsVandermonde => "mds-vandermonde",
            StabilityCodeArg::MdsGaussian => "mds-gaussian",
            StabilityCodeArg::Uncoded => "uncoded",
        }
    }
}

fn open_cache(common: &CommonArgs) -> CliResult<Option<CacheDir>> {
    match &common.cache_dir {
        Some(dir) => Ok(Some(CacheDir::new(dir)?)),
        None => Ok(None),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Analyze(args) => {
            let seed = output::resolve_seed(args.common.seed)?;
            let cfg = cmd_analyze::config(&args, seed);
            let table = cmd_analyze::run(&args, seed)?;
            output::emit(&cfg, &table)
        }
        Command::Bler(args) => {
            let seed = output::resolve_seed(args.common.seed)?;
            let cache = open_cache(&args.common)?;
            let cfg = cmd_bler::config(&args, seed);
            let table = cmd_bler::run(&args, seed, &cache)?;
            output::emit(&cfg, &table)
        }
        Command::Asymptotic(args) => {
            let seed = output::resolve_seed(args.common.seed)?;
            let cfg = cmd_asymptotic::config(&args, seed);
            let table = cmd_asymptotic::run(&args, seed)?;
            output::emit(&cfg, &table)
        }
        Command::Stability(args) => {
            let seed = output::resolve_seed(args.common.seed)?;
            let cfg = cmd_stability::config(&args, seed);
            cmd_stability::run(&args, seed, &cfg)
        }
        Command::Simulate(args) => {
            let seed = output::resolve_seed(args.common.seed)?;
            let cache = open_cache(&args.common)?;
            let cfg = cmd_simulate::config(&args, seed);
            let table = cmd_simulate::run(&args, seed, &cache)?;
            output::emit(&cfg, &table)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
