use clap::Args;
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

use codedc::codes::{self, GeneratorMatrix};
use codedc::decoder::ErasureDecoder;
use codedc::map::MapDecoder;
use codedc::matrix::FloatMatrix;
use codedc::polar::ScDecoder;
use codedc::projective::ProjectiveDecoder;
use codedc::rng;
use codedc::sim;

use crate::cache::{generator_via, CacheDir};
use crate::output::{num, parse_payload, CliError, CliResult, ExperimentConfig, Table};
use crate::{CommonArgs, DistArg, MdsKindArg, SimDecoderArg, SimSchemeArg};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Code family run on the simulated workers.
    #[arg(long, value_enum)]
    pub scheme: SimSchemeArg,
    /// Code length (uncoded, mds, random).
    #[arg(long)]
    pub n: Option<usize>,
    /// Code dimension (mds, random, rm subcodes, polar).
    #[arg(long)]
    pub k: Option<usize>,
    /// Kronecker levels for rm/polar codes (length 2^m).
    #[arg(long)]
    pub m: Option<usize>,
    /// Reed-Muller order.
    #[arg(long)]
    pub r: Option<usize>,
    /// Real MDS construction.
    #[arg(long, value_enum, default_value_t = MdsKindArg::Vandermonde)]
    pub mds_kind: MdsKindArg,
    /// Design erasure probability for polar bit-channel selection.
    #[arg(long, default_value_t = 0.1)]
    pub eps_design: f64,
    /// Decoder gating job completion; auto pairs the family's own decoder.
    #[arg(long, value_enum, default_value_t = SimDecoderArg::Auto)]
    pub decoder: SimDecoderArg,
    /// Worker runtime law.
    #[arg(long, value_enum, default_value_t = DistArg::Exp)]
    pub dist: DistArg,
    /// Straggling rate of the worker runtime law.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Weibull shape; only read when --dist weibull.
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// Jobs to simulate; defaults to 100000, or 1 with a payload.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Run real matrix products A(PxQ) B(QxS) instead of timing alone.
    #[arg(long)]
    pub payload: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn config(args: &SimulateArgs, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new("simulate", seed, args.common.format.name());
    cfg.scheme = Some(args.scheme.name().to_string());
    cfg.n = args.n.map(|n| vec![n]);
    cfg.k = args.k;
    cfg.m = args.m;
    cfg.r = args.r;
    if matches!(args.scheme, SimSchemeArg::Mds) {
        cfg.mds_kind = Some(args.mds_kind.name().to_string());
    }
    if matches!(args.scheme, SimSchemeArg::Polar) {
        cfg.eps_design = Some(args.eps_design);
    }
    cfg.decoder = Some(args.decoder.name().to_string());
    cfg.dist = Some(args.dist.name().to_string());
    cfg.mu = Some(args.mu);
    if matches!(args.dist, DistArg::Weibull) {
        cfg.alpha = Some(args.alpha);
    }
    cfg.jobs = Some(effective_jobs(args));
    cfg.payload = args.payload.clone();
    cfg.out = crate::output::out_string(&args.common.out);
    cfg
}

fn effective_jobs(args: &SimulateArgs) -> usize {
    args.jobs.unwrap_or(if args.payload.is_some() { 1 } else { 100_000 })
}

fn require(name: &str, v: Option<usize>) -> CliResult<usize> {
    v.ok_or_else(|| CliError::usage(format!("--{name} is required for this scheme")))
}

fn build_generator(
    args: &SimulateArgs,
    seed: u64,
    cache: &Option<CacheDir>,
) -> CliResult<GeneratorMatrix> {
    match args.scheme {
        SimSchemeArg::Uncoded => {
            let n = require("n", args.n)?;
            generator_via(cache, &format!("uncoded-k{n}"), || codes::uncoded_generator(n))
        }
        SimSchemeArg::Mds => {
            let n = require("n", args.n)?;
            let k = require("k", args.k)?;
            let kind = args.mds_kind.to_kind();
            let key = match kind {
                codes::MdsKind::Vandermonde => format!("mds-vandermonde-n{n}-k{k}"),
                codes::MdsKind::Gaussian => format!("mds-gaussian-n{n}-k{k}-s{seed}"),
            };
            generator_via(cache, &key, || codes::mds_real_generator(n, k, kind, seed))
        }
        SimSchemeArg::Random => {
            let n = require("n", args.n)?;
            let k = require("k", args.k)?;
            generator_via(cache, &format!("random-n{n}-k{k}-s{seed}"), || {
                codes::random_binary_generator(n, k, seed)
            })
        }
        SimSchemeArg::Rm => {
            let m = require("m", args.m)?;
            match (args.r, args.k) {
                (Some(_), Some(_)) => {
                    Err(CliError::usage("give --r or --k for rm codes, not both"))
                }
                (Some(r), None) => generator_via(cache, &format!("rm-m{m}-r{r}"), || {
                    codes::rm_generator(m, r)
                }),
                (None, Some(k)) => generator_via(cache, &format!("rm-m{m}-k{k}"), || {
                    codes::rm_subcode_generator(m, k)
                }),
                (None, None) => Err(CliError::usage("rm codes need --r or --k")),
            }
        }
        SimSchemeArg::Polar => {
            let m = require("m", args.m)?;
            let k = require("k", args.k)?;
            let eps = args.eps_design;
            generator_via(cache, &format!("polar-m{m}-k{k}-e{eps}"), || {
                codes::polar_generator(m, k, eps)
            })
        }
    }
}

fn build_decoder(
    args: &SimulateArgs,
    g: &GeneratorMatrix,
    cache: &Option<CacheDir>,
) -> CliResult<Box<dyn ErasureDecoder>> {
    let choice = match args.decoder {
        SimDecoderArg::Auto => match args.scheme {
            SimSchemeArg::Polar => SimDecoderArg::Sc,
            _ => SimDecoderArg::Map,
        },
        other => other,
    };
    Ok(match choice {
        SimDecoderArg::Map => Box::new(MapDecoder::new(g.clone())),
        SimDecoderArg::Projective => {
            let (m, r) = match (g.meta.m, g.meta.r) {
                (Some(m), Some(r)) => (m, r),
                _ => {
                    return Err(CliError::usage(
                        "the projective decoder needs a full rm(m, r) code",
                    ))
                }
            };
            match cache {
                Some(dir) => {
                    let set = dir.plan_set(m, r)?;
                    Box::new(ProjectiveDecoder::from_plan_set(g, &set, None)?)
                }
                None => Box::new(ProjectiveDecoder::new(g)?),
            }
        }
        SimDecoderArg::Sc => Box::new(ScDecoder::new(g.clone())?),
        SimDecoderArg::Auto => unreachable!("resolved above"),
    })
}

fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> FloatMatrix {
    let data: Vec<Vec<f64>> =
        (0..rows).map(|_| (0..cols).map(|_| rng.sample(StandardNormal)).collect()).collect();
    FloatMatrix::from_rows(&data).expect("rectangular rows")
}

pub fn run(args: &SimulateArgs, seed: u64, cache: &Option<CacheDir>) -> CliResult<Table> {
    let model = args.dist.model(args.mu, args.alpha)?;
    let g = build_generator(args, seed, cache)?;
    let decoder = build_decoder(args, &g, cache)?;
    let jobs = effective_jobs(args);

    match &args.payload {
        None => {
            let mut rng = rng::derive(seed, &[rng::tag::RUNTIME]);
            let est = sim::empirical_avg_time(&g, decoder.as_ref(), &model, jobs, &mut rng)?;
            let mut table = Table::new(
                "codedc/simulate/v1",
                vec![
                    "scheme",
                    "n",
                    "k",
                    "decoder",
                    "jobs",
                    "mean_time",
                    "ci_half_width",
                    "failures",
                ],
            );
            table.push(vec![
                Value::String(args.scheme.name().to_string()),
                Value::from(g.n),
                Value::from(g.k),
                Value::String(decoder.id().to_string()),
                Value::from(est.jobs),
                num(est.mean),
                num(est.ci_half_width),
                Value::from(est.failures),
            ]);
            Ok(table)
        }
        Some(spec) => {
            let (p, q, s) = parse_payload(spec)?;
            let mut pay_rng = rng::derive(seed, &[rng::tag::PAYLOAD]);
            let a = gaussian_matrix(p, q, &mut pay_rng);
            let b = gaussian_matrix(q, s, &mut pay_rng);
            let mut table = Table::new(
                "codedc/simulate-payload/v1",
                vec![
                    "job",
                    "completion_time",
                    "success",
                    "decode_tests",
                    "workers_used",
                    "max_rel_error",
                    "padded_rows",
                    "block_rows",
                    "solver_workers",
                ],
            );
            for job in 0..jobs {
                let mut rng = rng::derive(seed, &[rng::tag::RUNTIME, job as u64]);
                let result = sim::run_matmul_job(&a, &b, &g, decoder.as_ref(), &model, &mut rng)?;
                let payload = result.payload.as_ref().expect("matmul jobs carry a payload");
                table.push(vec![
                    Value::from(job),
                    num(result.completion_time),
                    Value::from(result.report.success),
                    Value::from(result.report.iterations),
                    join_ids(&result.workers_used),
                    num(payload.max_rel_error),
                    Value::from(payload.padded_rows),
                    Value::from(payload.block_rows),
                    join_ids(&payload.solver_workers),
                ]);
            }
            Ok(table)
        }
    }
}

/// Index list as one CSV-safe cell.
fn join_ids(ids: &[usize]) -> Value {
    Value::String(ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";"))
}
