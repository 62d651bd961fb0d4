use clap::Args;
use serde_json::Value;

use codedc::analytics::{self, RuntimeModel};
use codedc::channel::{self, EstimationBudget};
use codedc::codes;
use codedc::map::MapDecoder;

use crate::output::{num, opt_num, CliError, CliResult, ExperimentConfig, Table};
use crate::{AsymptoticSchemeArg, CommonArgs};

#[derive(Debug, Args)]
pub struct AsymptoticArgs {
    /// Straggling rate fixing the optimal rate R*.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Code lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1024usize, 2048, 4096, 8192])]
    pub n: Vec<usize>,
    /// Schemes evaluated at rate R*.
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_values_t = [
            AsymptoticSchemeArg::Mds,
            AsymptoticSchemeArg::BrcBound,
            AsymptoticSchemeArg::PolarSc,
        ]
    )]
    pub schemes: Vec<AsymptoticSchemeArg>,
    /// Design erasure probability for polar bit-channel selection.
    #[arg(long, default_value_t = 0.1)]
    pub eps_design: f64,
    /// Pattern-evaluation budget gating each rm-map row.
    #[arg(long, default_value_t = 1_000_000)]
    pub mc_budget: u64,
    /// Enumerate all C(n,i) patterns exhaustively up to this count.
    #[arg(long, default_value_t = 100_000)]
    pub enum_limit: u64,
    /// Monte-Carlo trials per erasure count above the enumeration limit.
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn config(args: &AsymptoticArgs, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new("asymptotic", seed, args.common.format.name());
    cfg.schemes = Some(args.schemes.iter().map(|s| s.name().to_string()).collect());
    cfg.n = Some(args.n.clone());
    cfg.mu = Some(args.mu);
    if args.schemes.contains(&AsymptoticSchemeArg::PolarSc) {
        cfg.eps_design = Some(args.eps_design);
    }
    if args.schemes.contains(&AsymptoticSchemeArg::RmMap) {
        cfg.mc_budget = Some(args.mc_budget);
        cfg.enum_limit = Some(args.enum_limit);
        cfg.mc_trials = Some(args.trials);
    }
    cfg.out = crate::output::out_string(&args.common.out);
    cfg
}

/// min(C(n, i), cap + 1) without overflow; saturates once past the cap.
fn binom_capped(n: usize, i: usize, cap: u128) -> u128 {
    let i = i.min(n - i);
    let mut acc: u128 = 1;
    for j in 0..i {
        acc = acc.saturating_mul((n - j) as u128);
        acc /= (j + 1) as u128;
        if acc > cap {
            return cap + 1;
        }
    }
    acc
}

/// Pattern evaluations a full conditional-failure profile would cost.
fn planned_patterns(n: usize, budget: &EstimationBudget) -> u128 {
    (1..=n)
        .map(|i| {
            let c = binom_capped(n, i, budget.enum_limit as u128);
            if c <= budget.enum_limit as u128 {
                c
            } else {
                budget.trials as u128
            }
        })
        .sum()
}

fn power_of_two_m(n: usize) -> CliResult<usize> {
    if n.is_power_of_two() && n > 1 {
        Ok(n.trailing_zeros() as usize)
    } else {
        Err(CliError::usage(format!("scheme needs n to be a power of two, got {n}")))
    }
}

pub fn run(args: &AsymptoticArgs, seed: u64) -> CliResult<Table> {
    let model = RuntimeModel::exponential(args.mu)?;
    let r_star = analytics::optimal_rate(args.mu)?;
    let budget = EstimationBudget { enum_limit: args.enum_limit, trials: args.trials };

    let mut table = Table::new(
        "codedc/asymptotic/v1",
        vec!["scheme", "n", "k", "rate", "t_avg", "n_t_avg", "ci_half_width", "status"],
    );
    table.extra("r_star", num(r_star));
    for &scheme in &args.schemes {
        for &n in &args.n {
            let k = ((r_star * n as f64).ceil() as usize).clamp(1, n);
            let mut status = "ok";
            let mut ci = None;
            let t_avg = match scheme {
                AsymptoticSchemeArg::Mds => Some(analytics::avg_time_mds(n, k, args.mu)?.t_avg),
                AsymptoticSchemeArg::BrcBound => {
                    Some(analytics::avg_time_brc_bound(n, k, args.mu)?.t_avg)
                }
                AsymptoticSchemeArg::PolarSc => {
                    let m = power_of_two_m(n)?;
                    let rows = codes::polar_row_selection(m, k, args.eps_design)?;
                    let result = analytics::avg_time_quadrature(n, k, &model, |eps| {
                        let profile =
                            codes::bec_bit_channels(m, eps).expect("eps stays within [0,1]");
                        codedc::polar::sc_failure_prob(&profile, &rows)
                            .expect("selection is valid")
                    })?;
                    Some(result.t_avg)
                }
                AsymptoticSchemeArg::RmMap => {
                    let m = power_of_two_m(n)?;
                    if planned_patterns(n, &budget) > args.mc_budget as u128 {
                        status = "budget-exceeded";
                        None
                    } else {
                        let g = codes::rm_subcode_generator(m, k)?;
                        let decoder = MapDecoder::new(g.clone());
                        let profile = channel::failure_profile(&g, &decoder, &budget, seed)?;
                        let result = analytics::avg_time_series(n, k, args.mu, &profile)?;
                        ci = result.ci_half_width;
                        Some(result.t_avg)
                    }
                }
            };
            table.push(vec![
                Value::String(scheme.name().to_string()),
                Value::from(n),
                Value::from(k),
                num(k as f64 / n as f64),
                opt_num(t_avg),
                opt_num(t_avg.map(|t| n as f64 * t)),
                opt_num(ci),
                Value::String(status.to_string()),
            ]);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_capping_matches_exact_small_values() {
        assert_eq!(binom_capped(8, 3, 1000), 56);
        assert_eq!(binom_capped(8, 0, 1000), 1);
        assert_eq!(binom_capped(64, 32, 100), 101);
        assert_eq!(binom_capped(10, 5, 252), 252);
        assert_eq!(binom_capped(10, 5, 251), 252);
    }

    #[test]
    fn planned_patterns_counts_both_regimes() {
        // n = 8: every C(8, i) is under the limit, so the plan is exhaustive:
        // sum_{i=1..8} C(8,i) = 2^8 - 1.
        let b = EstimationBudget { enum_limit: 100, trials: 7 };
        assert_eq!(planned_patterns(8, &b), 255);
        // Tiny limit: i = 1, 7, 8 (C = 8, 8, 1) stay exhaustive; the other
        // five counts fall back to the trial budget.
        let tight = EstimationBudget { enum_limit: 8, trials: 7 };
        assert_eq!(planned_patterns(8, &tight), 8 + 8 + 1 + 5 * 7);
    }
}
