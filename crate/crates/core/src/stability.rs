//! Numerical-stability experiments: condition statistics of random generator
//! submatrices, of the projected leaf solves, and end-to-end precision loss
//! through a decoder.

use rand::seq::index::sample as index_sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::channel::{sample_pattern, ErasurePattern};
use crate::codes::{Entries, GeneratorMatrix};
use crate::decoder::ErasureDecoder;
use crate::error::Error;
use crate::matrix::FloatMatrix;
use crate::projective::{build_projection_plan, independent_row_prefix};
use crate::Result;

/// Injected relative perturbation standing in for worst-case rounding; the
/// fixed floor keeps "digits lost" independent of any concrete arithmetic.
pub const PRECISION_FLOOR: f64 = 1e-15;

/// Condition numbers above this are counted as singular draws rather than
/// samples: an exactly rank-deficient matrix surfaces through the SVD as a
/// condition number at the rounding-noise scale of 1e16 or beyond.
const SINGULAR_KAPPA: f64 = 1e13;

/// How many extreme draws a projection study retains with their patterns.
const WORST_KEEP: usize = 64;

/// Condition-number statistics for one experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionStudy {
    /// What was sampled: code, submatrix size, grid.
    pub context: String,
    /// Condition numbers recorded (singular draws excluded).
    pub samples: usize,
    pub kappa_max: f64,
    pub kappa_mean: f64,
    /// 50th, 90th and 99th percentiles (nearest rank).
    pub kappa_quantiles: [f64; 3],
    /// Draws with no usable condition number: a singular submatrix, or a
    /// projection without a full-rank row basis.
    pub singular_count: usize,
    /// All recorded condition numbers, sorted ascending.
    pub kappas: Vec<f64>,
}

impl ConditionStudy {
    fn from_kappas(context: String, mut kappas: Vec<f64>, singular_count: usize) -> Self {
        kappas.sort_by(f64::total_cmp);
        let samples = kappas.len();
        let quantile = |p: f64| {
            if samples == 0 {
                return f64::NAN;
            }
            kappas[((p * samples as f64).ceil() as usize).clamp(1, samples) - 1]
        };
        let (kappa_max, kappa_mean) = if samples == 0 {
            (f64::NAN, f64::NAN)
        } else {
            (kappas[samples - 1], kappas.iter().sum::<f64>() / samples as f64)
        };
        ConditionStudy {
            context,
            samples,
            kappa_max,
            kappa_mean,
            kappa_quantiles: [quantile(0.5), quantile(0.9), quantile(0.99)],
            singular_count,
            kappas,
        }
    }
}

/// Paired condition studies: submatrices of the code's generator next to an
/// i.i.d. standard-normal ensemble of the same size.
#[derive(Debug, Clone, Serialize)]
pub struct SubmatrixStudy {
    pub code: ConditionStudy,
    pub gaussian: ConditionStudy,
}

/// Condition statistics of random sub_k x sub_k submatrices of the
/// generator (random row and column subsets), with a Gaussian-ensemble
/// baseline drawn alongside for comparison.
pub fn submatrix_condition_study<R: Rng>(
    g: &GeneratorMatrix,
    sub_k: usize,
    trials: usize,
    rng: &mut R,
) -> Result<SubmatrixStudy> {
    if sub_k == 0 || sub_k > g.k.min(g.n) {
        return Err(Error::input(format!(
            "need 1 <= sub_k <= min(k, n) = {}, got {sub_k}",
            g.k.min(g.n)
        )));
    }
    if trials == 0 {
        return Err(Error::input("submatrix_condition_study needs trials >= 1"));
    }
    let mut code_kappas = Vec::with_capacity(trials);
    let mut code_singular = 0usize;
    let mut gauss_kappas = Vec::with_capacity(trials);
    let mut gauss_singular = 0usize;
    for _ in 0..trials {
        let mut rows = index_sample(rng, g.k, sub_k).into_vec();
        let mut cols = index_sample(rng, g.n, sub_k).into_vec();
        rows.sort_unstable();
        cols.sort_unstable();
        let sub = match &g.entries {
            Entries::Binary(m) => m.select_rows(&rows).select_columns(&cols).to_float(),
            Entries::Real(m) => m.select_rows(&rows).select_columns(&cols),
        };
        tally(sub.condition_number()?, &mut code_kappas, &mut code_singular);

        let data: Vec<f64> = (0..sub_k * sub_k).map(|_| StandardNormal.sample(rng)).collect();
        let gauss = FloatMatrix::new(sub_k, sub_k, data)?;
        tally(gauss.condition_number()?, &mut gauss_kappas, &mut gauss_singular);
    }
    Ok(SubmatrixStudy {
        code: ConditionStudy::from_kappas(
            format!("submatrix {} sub_k={sub_k} trials={trials}", g.family),
            code_kappas,
            code_singular,
        ),
        gaussian: ConditionStudy::from_kappas(
            format!("submatrix gaussian-baseline sub_k={sub_k} trials={trials}"),
            gauss_kappas,
            gauss_singular,
        ),
    })
}

fn tally(kappa: f64, kappas: &mut Vec<f64>, singular: &mut usize) {
    if kappa.is_finite() && kappa < SINGULAR_KAPPA {
        kappas.push(kappa);
    } else {
        *singular += 1;
    }
}

/// One recorded draw of a projection study, for CSV export.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConditionRecord {
    pub eps: f64,
    pub plan: usize,
    pub kappa: f64,
}

/// Aggregate over the draws of one (eps, plan) grid cell.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProjectionCell {
    pub eps: f64,
    pub plan: usize,
    /// Draws whose restricted projected generator kept full row rank.
    pub recorded: usize,
    /// Draws left without a full-rank row basis by their erasures.
    pub deficient: usize,
    pub kappa_mean: f64,
    pub kappa_max: f64,
}

/// An extreme draw kept with its erasure pattern so the worst case can be
/// replayed through a decoder afterwards.
#[derive(Debug, Clone, Serialize)]
pub struct WorstDraw {
    pub kappa: f64,
    pub eps: f64,
    pub plan: usize,
    pub erased: Vec<usize>,
}

/// Condition statistics of the leaf solve matrices met while projecting
/// erasure patterns, per grid cell and overall.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionStudy {
    pub study: ConditionStudy,
    pub cells: Vec<ProjectionCell>,
    /// Highest-condition draws, descending, capped.
    pub worst_draws: Vec<WorstDraw>,
    pub records: Vec<ConditionRecord>,
}

impl ProjectionStudy {
    /// Mean recorded condition number per grid epsilon, across plans.
    pub fn per_eps_means(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64, usize)> = Vec::new();
        for cell in &self.cells {
            match out.last_mut() {
                Some(last) if last.0 == cell.eps => {
                    last.1 += cell.kappa_mean * cell.recorded as f64;
                    last.2 += cell.recorded;
                }
                _ => out.push((cell.eps, cell.kappa_mean * cell.recorded as f64, cell.recorded)),
            }
        }
        out.into_iter()
            .map(|(eps, sum, count)| (eps, if count == 0 { f64::NAN } else { sum / count as f64 }))
            .collect()
    }
}

/// The grid of the reference replication: 60 equidistant erasure
/// probabilities covering [0.01, 0.6].
pub fn default_eps_grid() -> Vec<f64> {
    (0..60).map(|i| 0.01 + i as f64 * (0.6 - 0.01) / 59.0).collect()
}

/// For each grid epsilon and random pattern, projects the erasures onto
/// every plan of RM(m, r), extracts the first m-r+2 linearly independent
/// rows of the unerased projected generator, and records the condition
/// number of that submatrix's Gram. Draws whose erasures leave no full-rank
/// row basis count as singular.
pub fn projection_condition_study<R: Rng>(
    m: usize,
    r: usize,
    eps_grid: &[f64],
    patterns_per_eps: usize,
    rng: &mut R,
) -> Result<ProjectionStudy> {
    if eps_grid.is_empty() || patterns_per_eps == 0 {
        return Err(Error::input("projection study needs a nonempty grid and patterns >= 1"));
    }
    let plans = build_projection_plan(m, r)?;
    let n = 1usize << m;
    let want = m - r + 2;
    let mut acc = ProjectionAccumulator::new(want);
    for &eps in eps_grid {
        let mut cells: Vec<CellAcc> = (0..plans.len()).map(|_| CellAcc::default()).collect();
        for _ in 0..patterns_per_eps {
            let pattern = sample_pattern(n, eps, rng)?;
            let mut erased_flags = vec![false; n];
            for &e in pattern.erased() {
                erased_flags[e] = true;
            }
            for (pi, plan) in plans.iter().enumerate() {
                acc.draw(eps, pi, plan, &erased_flags, pattern.erased(), &mut cells[pi]);
            }
        }
        acc.close_eps(eps, &mut cells);
    }
    Ok(acc.finish(format!(
        "projection rm(m={m}, r={r}) grid={}x{patterns_per_eps}",
        eps_grid.len()
    )))
}

/// Exhaustive variant over all 2^n erasure patterns; the record `eps` field
/// carries the erased fraction of each pattern. Practical for m <= 4.
pub fn projection_condition_exhaustive(m: usize, r: usize) -> Result<ProjectionStudy> {
    let plans = build_projection_plan(m, r)?;
    let n = 1usize << m;
    if n > 16 {
        return Err(Error::Capacity(format!(
            "exhaustive study enumerates 2^{n} patterns; practical only for n <= 16"
        )));
    }
    let want = m - r + 2;
    let mut acc = ProjectionAccumulator::new(want);
    let mut cells: Vec<CellAcc> = (0..plans.len()).map(|_| CellAcc::default()).collect();
    for bits in 0..(1u32 << n) {
        let erased: Vec<usize> = (0..n).filter(|&i| bits >> i & 1 == 1).collect();
        let mut erased_flags = vec![false; n];
        for &e in &erased {
            erased_flags[e] = true;
        }
        let eps = erased.len() as f64 / n as f64;
        for (pi, plan) in plans.iter().enumerate() {
            acc.draw(eps, pi, plan, &erased_flags, &erased, &mut cells[pi]);
        }
    }
    // The exhaustive sweep has no grid; fold everything into one cell row
    // per plan under the mean erased fraction of 1/2.
    acc.close_eps(0.5, &mut cells);
    Ok(acc.finish(format!("projection rm(m={m}, r={r}) exhaustive")))
}

#[derive(Default)]
struct CellAcc {
    recorded: usize,
    deficient: usize,
    sum: f64,
    max: f64,
}

struct ProjectionAccumulator {
    want: usize,
    kappas: Vec<f64>,
    singular: usize,
    records: Vec<ConditionRecord>,
    cells: Vec<ProjectionCell>,
    worst: Vec<WorstDraw>,
}

impl ProjectionAccumulator {
    fn new(want: usize) -> Self {
        ProjectionAccumulator {
            want,
            kappas: Vec::new(),
            singular: 0,
            records: Vec::new(),
            cells: Vec::new(),
            worst: Vec::new(),
        }
    }

    fn draw(
        &mut self,
        eps: f64,
        plan_index: usize,
        plan: &crate::projective::ProjectionPlan,
        erased_flags: &[bool],
        erased: &[usize],
        cell: &mut CellAcc,
    ) {
        // A projected coordinate survives only when its whole coset does.
        let avail: Vec<usize> = plan
            .cosets
            .iter()
            .enumerate()
            .filter(|(_, members)| members.iter().all(|&z| !erased_flags[z]))
            .map(|(t, _)| t)
            .collect();
        if avail.len() < self.want {
            self.singular += 1;
            cell.deficient += 1;
            return;
        }
        let restricted = plan.projected_generator.select_columns(&avail);
        let basis = independent_row_prefix(&restricted, self.want);
        if basis.len() < self.want {
            self.singular += 1;
            cell.deficient += 1;
            return;
        }
        let gt = restricted.select_rows(&basis).to_float();
        let kappa = match gt.gram_condition_number() {
            Ok(k) if k.is_finite() && k < SINGULAR_KAPPA => k,
            // Unreachable for an exactly full-rank basis; kept as a guard.
            _ => {
                self.singular += 1;
                cell.deficient += 1;
                return;
            }
        };
        self.kappas.push(kappa);
        self.records.push(ConditionRecord { eps, plan: plan_index, kappa });
        cell.recorded += 1;
        cell.sum += kappa;
        cell.max = cell.max.max(kappa);
        let floor = self.worst.last().map_or(0.0, |w| w.kappa);
        if self.worst.len() < WORST_KEEP || kappa > floor {
            let at = self.worst.partition_point(|w| w.kappa > kappa);
            self.worst.insert(
                at,
                WorstDraw { kappa, eps, plan: plan_index, erased: erased.to_vec() },
            );
            self.worst.truncate(WORST_KEEP);
        }
    }

    fn close_eps(&mut self, eps: f64, cells: &mut [CellAcc]) {
        for (pi, cell) in cells.iter().enumerate() {
            self.cells.push(ProjectionCell {
                eps,
                plan: pi,
                recorded: cell.recorded,
                deficient: cell.deficient,
                kappa_mean: if cell.recorded == 0 { f64::NAN } else { cell.sum / cell.recorded as f64 },
                kappa_max: if cell.recorded == 0 { f64::NAN } else { cell.max },
            });
        }
        cells.iter_mut().for_each(|c| *c = CellAcc::default());
    }

    fn finish(self, context: String) -> ProjectionStudy {
        ProjectionStudy {
            study: ConditionStudy::from_kappas(context, self.kappas, self.singular),
            cells: self.cells,
            worst_draws: self.worst,
            records: self.records,
        }
    }
}

/// What the workers' outputs carry in a precision experiment.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum PayloadKind {
    /// Uniform integers in [lo, hi]: exactly representable, so an exact
    /// decode path must return them untouched.
    Integers { lo: i64, hi: i64 },
    /// Standard normal reals.
    Gaussian,
}

/// Payload and perturbation of one end-to-end precision run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PayloadSpec {
    pub kind: PayloadKind,
    /// Relative noise injected into every unerased observation.
    pub perturbation: f64,
}

impl PayloadSpec {
    pub fn gaussian() -> Self {
        PayloadSpec { kind: PayloadKind::Gaussian, perturbation: PRECISION_FLOOR }
    }

    pub fn integers(lo: i64, hi: i64) -> Self {
        PayloadSpec { kind: PayloadKind::Integers { lo, hi }, perturbation: PRECISION_FLOOR }
    }

    pub fn unperturbed(mut self) -> Self {
        self.perturbation = 0.0;
        self
    }
}

/// Outcome of one end-to-end precision run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PrecisionReport {
    /// Worst recovered-coordinate error relative to the codeword's largest
    /// magnitude.
    pub max_rel_error: f64,
    /// log10(max_rel_error / 1e-15), clamped at zero: how many decimal
    /// digits the decode lost beyond the injected rounding floor.
    pub digits_lost: f64,
    pub perturbation: f64,
    pub recovered: usize,
}

/// Encodes a random payload, perturbs the unerased observations with
/// relative noise, decodes, and reports the worst recovered-value error and
/// the decimal digits lost against the 1e-15 floor.
pub fn end_to_end_precision<R: Rng>(
    g: &GeneratorMatrix,
    decoder: &dyn ErasureDecoder,
    payload: &PayloadSpec,
    pattern: &ErasurePattern,
    rng: &mut R,
) -> Result<PrecisionReport> {
    if !decoder.block_decodable(pattern)? {
        return Err(Error::input(format!(
            "pattern with {} erasures is not decodable by {}",
            pattern.count(),
            decoder.id()
        )));
    }
    let x: Vec<f64> = (0..g.k)
        .map(|_| match payload.kind {
            PayloadKind::Integers { lo, hi } => rng.gen_range(lo..=hi) as f64,
            PayloadKind::Gaussian => StandardNormal.sample(rng),
        })
        .collect();
    let truth = encode(g, &x);
    let mut observed = truth.clone();
    for j in pattern.unerased() {
        observed[j] *= 1.0 + payload.perturbation * rng.gen_range(-1.0..=1.0);
    }
    let report = decoder.decode(&observed, pattern)?;
    if !report.success {
        return Err(Error::Numeric(format!(
            "{} failed on a pattern it declared decodable",
            decoder.id()
        )));
    }
    let scale = truth.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let max_rel_error = report
        .recovered
        .iter()
        .zip(&report.values)
        .fold(0.0f64, |a, (&e, &v)| a.max((v - truth[e]).abs() / scale));
    let digits_lost = if max_rel_error <= 0.0 {
        0.0
    } else {
        (max_rel_error / PRECISION_FLOOR).log10().max(0.0)
    };
    Ok(PrecisionReport {
        max_rel_error,
        digits_lost,
        perturbation: payload.perturbation,
        recovered: report.recovered.len(),
    })
}

fn encode(g: &GeneratorMatrix, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; g.n];
    match &g.entries {
        Entries::Binary(m) => {
            for (j, slot) in y.iter_mut().enumerate() {
                *slot = (0..g.k).map(|i| x[i] * m.get(i, j) as f64).sum();
            }
        }
        Entries::Real(m) => {
            for (j, slot) in y.iter_mut().enumerate() {
                *slot = (0..g.k).map(|i| x[i] * m.get(i, j)).sum();
            }
        }
    }
    y
}
