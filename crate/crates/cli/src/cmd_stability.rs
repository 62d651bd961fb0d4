use clap::Args;
use serde_json::Value;

use codedc::codes;
use codedc::rng;
use codedc::stability::{self, ConditionStudy, ProjectionStudy};

use crate::output::{num, parse_grid, CliError, CliResult, ExperimentConfig, Table};
use crate::{CommonArgs, StabilityCodeArg, StudyArg};

#[derive(Debug, Args)]
pub struct StabilityArgs {
    /// Experiment: leaf Gram matrices of projected decoding, or random
    /// square submatrices of a generator.
    #[arg(long, value_enum, default_value_t = StudyArg::Projection)]
    pub study: StudyArg,
    /// Code under study.
    #[arg(long, value_enum, default_value_t = StabilityCodeArg::Rm)]
    pub code: StabilityCodeArg,
    /// Reed-Muller parameter m (projection study and rm submatrices).
    #[arg(long)]
    pub m: Option<usize>,
    /// Reed-Muller order r.
    #[arg(long)]
    pub r: Option<usize>,
    /// Code length for random/mds/uncoded generators.
    #[arg(long)]
    pub n: Option<usize>,
    /// Code dimension for random/mds generators.
    #[arg(long)]
    pub k: Option<usize>,
    /// Erasure-probability grid of the projection study.
    #[arg(long, default_value = "0.01:0.6:60")]
    pub eps: String,
    /// Random erasure patterns per grid point.
    #[arg(long, default_value_t = 1000)]
    pub patterns: usize,
    /// Enumerate every erasure pattern instead of sampling (small codes).
    #[arg(long)]
    pub exhaustive: bool,
    /// Submatrix order for the submatrix study.
    #[arg(long)]
    pub sub_k: Option<usize>,
    /// Random submatrices drawn by the submatrix study.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn config(args: &StabilityArgs, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new("stability", seed, args.common.format.name());
    cfg.study = Some(args.study.name().to_string());
    cfg.scheme = Some(args.code.name().to_string());
    cfg.m = args.m;
    cfg.r = args.r;
    cfg.n = args.n.map(|n| vec![n]);
    cfg.k = args.k;
    match args.study {
        StudyArg::Projection => {
            if args.exhaustive {
                cfg.exhaustive = Some(true);
            } else {
                cfg.eps_grid = Some(args.eps.clone());
                cfg.patterns = Some(args.patterns);
            }
        }
        StudyArg::Submatrix => {
            cfg.sub_k = args.sub_k;
            cfg.trials = Some(args.trials);
        }
    }
    cfg.out = crate::output::out_string(&args.common.out);
    cfg
}

fn require(name: &str, v: Option<usize>) -> CliResult<usize> {
    v.ok_or_else(|| CliError::usage(format!("--{name} is required here")))
}

fn summary_extras(table: &mut Table, study: &ConditionStudy) {
    table.extra("context", Value::String(study.context.clone()));
    table.extra("samples", Value::from(study.samples));
    table.extra("singular_count", Value::from(study.singular_count));
    table.extra("kappa_max", num(study.kappa_max));
    table.extra("kappa_mean", num(study.kappa_mean));
}

fn projection_table(study: &ProjectionStudy) -> Table {
    let mut table = Table::new("codedc/stability/v1", vec!["context", "eps", "plan", "kappa"]);
    summary_extras(&mut table, &study.study);
    for record in &study.records {
        table.push(vec![
            Value::String(study.study.context.clone()),
            num(record.eps),
            Value::from(record.plan),
            num(record.kappa),
        ]);
    }
    table
}

/// JSON gets the summary instead of the per-draw dump: quantiles, per-ε
/// means, per-cell statistics, and the worst recorded draws.
fn projection_summary(cfg: &ExperimentConfig, study: &ProjectionStudy) -> CliResult<()> {
    let mut table = Table::new(
        "codedc/stability-summary/v1",
        vec!["eps", "plan", "recorded", "deficient", "kappa_mean", "kappa_max"],
    );
    summary_extras(&mut table, &study.study);
    table.extra("kappa_p50", num(study.study.kappa_quantiles[0]));
    table.extra("kappa_p90", num(study.study.kappa_quantiles[1]));
    table.extra("kappa_p99", num(study.study.kappa_quantiles[2]));
    let means: Vec<Value> = study
        .per_eps_means()
        .into_iter()
        .map(|(eps, mean)| {
            let mut obj = serde_json::Map::new();
            obj.insert("eps".into(), num(eps));
            obj.insert("kappa_mean".into(), num(mean));
            Value::Object(obj)
        })
        .collect();
    table.extra("per_eps_means", Value::Array(means));
    let worst: Vec<Value> = study
        .worst_draws
        .iter()
        .map(|w| {
            let mut obj = serde_json::Map::new();
            obj.insert("kappa".into(), num(w.kappa));
            obj.insert("eps".into(), num(w.eps));
            obj.insert("plan".into(), Value::from(w.plan));
            obj.insert(
                "erased".into(),
                Value::Array(w.erased.iter().map(|&i| Value::from(i)).collect()),
            );
            Value::Object(obj)
        })
        .collect();
    table.extra("worst_draws", Value::Array(worst));
    for cell in &study.cells {
        table.push(vec![
            num(cell.eps),
            Value::from(cell.plan),
            Value::from(cell.recorded),
            Value::from(cell.deficient),
            num(cell.kappa_mean),
            num(cell.kappa_max),
        ]);
    }
    crate::output::emit(cfg, &table)
}

fn study_row(study: &ConditionStudy) -> Vec<Value> {
    vec![
        Value::String(study.context.clone()),
        Value::from(study.samples),
        num(study.kappa_max),
        num(study.kappa_mean),
        num(study.kappa_quantiles[0]),
        num(study.kappa_quantiles[1]),
        num(study.kappa_quantiles[2]),
        Value::from(study.singular_count),
    ]
}

pub fn run(args: &StabilityArgs, seed: u64, cfg: &ExperimentConfig) -> CliResult<()> {
    match args.study {
        StudyArg::Projection => {
            if !matches!(args.code, StabilityCodeArg::Rm) {
                return Err(CliError::usage("the projection study is defined for --code rm"));
            }
            let m = require("m", args.m)?;
            let r = require("r", args.r)?;
            let study = if args.exhaustive {
                stability::projection_condition_exhaustive(m, r)?
            } else {
                let grid = parse_grid(&args.eps)?;
                let mut rng = rng::derive(seed, &[rng::tag::STABILITY]);
                stability::projection_condition_study(m, r, &grid, args.patterns, &mut rng)?
            };
            // CSV carries the raw per-draw records; JSON carries the summary.
            match cfg.format.as_str() {
                "csv" => crate::output::emit(cfg, &projection_table(&study)),
                _ => projection_summary(cfg, &study),
            }
        }
        StudyArg::Submatrix => {
            let g = match args.code {
                StabilityCodeArg::Rm => {
                    codes::rm_generator(require("m", args.m)?, require("r", args.r)?)?
                }
                StabilityCodeArg::Random => codes::random_binary_generator(
                    require("n", args.n)?,
                    require("k", args.k)?,
                    seed,
                )?,
                StabilityCodeArg::MdsVandermonde => codes::mds_real_generator(
                    require("n", args.n)?,
                    require("k", args.k)?,
                    codes::MdsKind::Vandermonde,
                    seed,
                )?,
                StabilityCodeArg::MdsGaussian => codes::mds_real_generator(
                    require("n", args.n)?,
                    require("k", args.k)?,
                    codes::MdsKind::Gaussian,
                    seed,
                )?,
                StabilityCodeArg::Uncoded => codes::uncoded_generator(require("n", args.n)?)?,
            };
            let sub_k = require("sub-k", args.sub_k)?;
            let mut rng = rng::derive(seed, &[rng::tag::STABILITY]);
            let result = stability::submatrix_condition_study(&g, sub_k, args.trials, &mut rng)?;
            let mut table = Table::new(
                "codedc/stability-submatrix/v1",
                vec![
                    "context",
                    "samples",
                    "kappa_max",
                    "kappa_mean",
                    "kappa_p50",
                    "kappa_p90",
                    "kappa_p99",
                    "singular_count",
                ],
            );
            table.push(study_row(&result.code));
            table.push(study_row(&result.gaussian));
            crate::output::emit(cfg, &table)
        }
    }
}
