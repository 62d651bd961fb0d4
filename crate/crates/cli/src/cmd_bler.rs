use clap::Args;
use serde_json::Value;

use codedc::channel;
use codedc::codes;
use codedc::decoder::ErasureDecoder;
use codedc::map::MapDecoder;
use codedc::projective::ProjectiveDecoder;

use crate::cache::CacheDir;
use crate::output::{num, parse_grid, CliResult, ExperimentConfig, Table};
use crate::{CommonArgs, RmDecoderArg};

#[derive(Debug, Args)]
pub struct BlerArgs {
    /// Reed-Muller parameter m (code length 2^m).
    #[arg(long)]
    pub m: usize,
    /// Reed-Muller order r.
    #[arg(long)]
    pub r: usize,
    /// Decoder whose block-error curve is measured.
    #[arg(long, value_enum, default_value_t = RmDecoderArg::Map)]
    pub decoder: RmDecoderArg,
    /// Erasure-probability grid, start:stop:count inclusive.
    #[arg(long, default_value = "0.05:0.5:10")]
    pub eps: String,
    /// Monte-Carlo trials per grid point.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn config(args: &BlerArgs, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new("bler", seed, args.common.format.name());
    cfg.m = Some(args.m);
    cfg.r = Some(args.r);
    cfg.decoder = Some(args.decoder.name().to_string());
    cfg.eps_grid = Some(args.eps.clone());
    cfg.trials = Some(args.trials);
    cfg.out = crate::output::out_string(&args.common.out);
    cfg
}

pub fn run(args: &BlerArgs, seed: u64, cache: &Option<CacheDir>) -> CliResult<Table> {
    let grid = parse_grid(&args.eps)?;
    let g = crate::cache::generator_via(cache, &format!("rm-m{}-r{}", args.m, args.r), || {
        codes::rm_generator(args.m, args.r)
    })?;
    let decoder: Box<dyn ErasureDecoder> = match args.decoder {
        RmDecoderArg::Map => Box::new(MapDecoder::new(g.clone())),
        RmDecoderArg::Projective => match cache {
            Some(dir) => {
                let set = dir.plan_set(args.m, args.r)?;
                Box::new(ProjectiveDecoder::from_plan_set(&g, &set, None)?)
            }
            None => Box::new(ProjectiveDecoder::new(&g)?),
        },
    };
    let curve = channel::block_error_curve(&g, decoder.as_ref(), &grid, args.trials, seed)?;
    let mut table =
        Table::new("codedc/bler/v1", vec!["eps", "bler", "trials", "ci_low", "ci_high"]);
    for point in curve {
        table.push(vec![
            num(point.eps),
            num(point.bler),
            Value::from(point.trials),
            num(point.ci_low),
            num(point.ci_high),
        ]);
    }
    Ok(table)
}
