use clap::Args;
use serde_json::Value;

use codedc::analytics::{self, Scheme, SweepOptions, SweepResult};
use codedc::channel::EstimationBudget;

use crate::output::{num, opt_num, CliResult, ExperimentConfig, Table};
use crate::{CommonArgs, DistArg, SchemeArg};

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Coding scheme to sweep.
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,
    /// Code lengths, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Straggling rate of the worker runtime law.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Worker runtime law.
    #[arg(long, value_enum, default_value_t = DistArg::Exp)]
    pub dist: DistArg,
    /// Weibull shape; only read when --dist weibull.
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Design erasure probability for polar bit-channel selection.
    #[arg(long, default_value_t = 0.1)]
    pub eps_design: f64,
    /// Enumerate all C(n,i) patterns exhaustively up to this count.
    #[arg(long)]
    pub enum_limit: Option<u64>,
    /// Monte-Carlo trials per erasure count above the enumeration limit.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Abort a sweep once it would evaluate more patterns than this.
    #[arg(long)]
    pub max_pattern_evals: Option<u64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn config(args: &AnalyzeArgs, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new("analyze", seed, args.common.format.name());
    cfg.scheme = Some(args.scheme.to_scheme().name().to_string());
    cfg.n = Some(args.n.clone());
    cfg.mu = Some(args.mu);
    cfg.dist = Some(args.dist.name().to_string());
    if matches!(args.dist, DistArg::Weibull) {
        cfg.alpha = Some(args.alpha);
    }
    if matches!(args.scheme.to_scheme(), Scheme::PolarSc) {
        cfg.eps_design = Some(args.eps_design);
    }
    cfg.enum_limit = args.enum_limit;
    cfg.trials = args.trials;
    cfg.max_pattern_evals = args.max_pattern_evals;
    cfg.out = crate::output::out_string(&args.common.out);
    cfg
}

fn best_time(sweep: &SweepResult) -> CliResult<(usize, f64, &'static str, Option<f64>)> {
    let entry = sweep.best().ok_or_else(|| {
        crate::output::CliError::Lib(codedc::Error::Numeric(format!(
            "sweep of {} at n = {} produced no entries",
            sweep.scheme.name(),
            sweep.n
        )))
    })?;
    let method = match entry.result.method {
        codedc::analytics::TimeMethod::ClosedForm => "closed-form",
        codedc::analytics::TimeMethod::Series => "series",
        codedc::analytics::TimeMethod::Bound => "bound",
        codedc::analytics::TimeMethod::Quadrature => "quadrature",
    };
    Ok((entry.k, entry.result.t_avg, method, entry.result.ci_half_width))
}

pub fn run(args: &AnalyzeArgs, seed: u64) -> CliResult<Table> {
    let model = args.dist.model(args.mu, args.alpha)?;
    let mut opts = SweepOptions::new(model);
    opts.seed = seed;
    opts.eps_design = args.eps_design;
    opts.max_pattern_evals = args.max_pattern_evals;
    let defaults = EstimationBudget::default();
    opts.budget = EstimationBudget {
        enum_limit: args.enum_limit.unwrap_or(defaults.enum_limit),
        trials: args.trials.unwrap_or(defaults.trials),
    };
    let scheme = args.scheme.to_scheme();

    let mut table = Table::new(
        "codedc/analyze/v1",
        vec!["scheme", "n", "k_star", "t_avg", "method", "ci_half_width", "g_opt", "g_cod"],
    );
    for &n in &args.n {
        let sweep = analytics::sweep_k(n, scheme, &opts)?;
        let (k_star, t_avg, method, ci) = best_time(&sweep)?;
        // Reference optima for the gain columns; both are cheap closed
        // forms under the exponential law and short sweeps otherwise.
        let (_, t_mds, _, _) = best_time(&analytics::sweep_k(n, Scheme::Mds, &opts)?)?;
        let (_, t_uncoded, _, _) = best_time(&analytics::sweep_k(n, Scheme::Uncoded, &opts)?)?;
        table.push(vec![
            Value::String(scheme.name().to_string()),
            Value::from(n),
            Value::from(k_star),
            num(t_avg),
            Value::String(method.to_string()),
            opt_num(ci),
            num(analytics::optimality_gap(t_avg, t_mds)),
            num(analytics::coding_gain(t_avg, t_uncoded)),
        ]);
    }
    Ok(table)
}
