//! Straggler simulation: sampled worker completion times, a forward arrival
//! scan for the job completion instant, Monte-Carlo average execution time,
//! and end-to-end encoded matrix-multiplication jobs.

use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::analytics::RuntimeModel;
use crate::channel::{ErasurePattern, Z95};
use crate::codes::{Entries, GeneratorMatrix};
use crate::decoder::{DecodeReport, ErasureDecoder};
use crate::error::Error;
use crate::matrix::{rational_to_f64, ColumnEliminator, FloatMatrix};
use crate::Result;

/// Outcome of one simulated job.
#[derive(Debug, Clone, Serialize)]
pub struct JobResult {
    /// First instant at which the finished workers form a decodable set,
    /// normalized so the uncoded single-machine run takes time 1. When even
    /// the full worker set is undecodable this is the last arrival and the
    /// report carries success = false.
    pub completion_time: f64,
    /// Workers finished by `completion_time`, ascending. Simultaneous
    /// finishes are broken by worker index.
    pub workers_used: Vec<usize>,
    /// Decodability verdict for the final worker set. The timing scan moves
    /// no payload values, so `recovered`/`values` stay empty and
    /// `iterations` counts the decodability tests the scan performed.
    pub report: DecodeReport,
    /// Present when the job carried a real matrix payload.
    pub payload: Option<PayloadReport>,
}

/// Error metrics for an encoded matrix-multiplication payload.
#[derive(Debug, Clone, Serialize)]
pub struct PayloadReport {
    /// max |reconstructed - direct| over all product entries, relative to
    /// the largest direct-product magnitude. Infinite when the job never
    /// became decodable.
    pub max_rel_error: f64,
    /// Zero rows appended so the left factor splits into k equal blocks.
    pub padded_rows: usize,
    /// Rows per block after padding.
    pub block_rows: usize,
    /// Workers whose outputs entered the reconstruction solve, ascending.
    pub solver_workers: Vec<usize>,
}

/// Monte-Carlo estimate of the average job completion time.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EmpiricalTime {
    pub mean: f64,
    /// 95% confidence half-width under the normal approximation.
    pub ci_half_width: f64,
    pub jobs: usize,
    /// Jobs whose full worker set was still undecodable.
    pub failures: usize,
}

/// Draws i.i.d. completion times for n parallel workers, each holding a 1/k
/// share of the job, by inverting Pr(T <= t) = 1 - exp(-[mu(kt-1)]^alpha):
/// t = (1 + (-ln u)^(1/alpha) / mu) / k for uniform u.
pub fn sample_runtimes<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    model: &RuntimeModel,
    rng: &mut R,
) -> Vec<f64> {
    assert!(k >= 1, "sample_runtimes needs k >= 1");
    let kf = k as f64;
    (0..n)
        .map(|_| {
            // gen::<f64>() covers [0, 1); flipping makes the survival draw
            // (0, 1] so the logarithm stays finite.
            let u = 1.0 - rng.gen::<f64>();
            (1.0 + (-u.ln()).powf(1.0 / model.alpha) / model.mu) / kf
        })
        .collect()
}

/// Completion time of one job: workers finish at `times`, and the job ends
/// at the first arrival whose finished set the decoder can decode.
///
/// The scan starts at the k-th arrival, since no smaller set can span k
/// message dimensions. The binary MAP path appends one generator column per
/// arrival to a single modular elimination state, so rank grows monotonely
/// by construction and the scan can stop at the first full-rank instant; a
/// spurious modular dependence (probability < n/2^61 per job) can only delay
/// completion by an arrival, far beneath Monte-Carlo resolution. Every other
/// decoder is re-asked per prefix, and the scan then keeps testing through
/// the remaining arrivals: decodability regressing along the prefix order
/// would make "first success" meaningless, so a regression aborts loudly
/// instead of returning a silently wrong time.
pub fn job_completion_time(
    g: &GeneratorMatrix,
    decoder: &dyn ErasureDecoder,
    times: &[f64],
) -> Result<JobResult> {
    if times.len() != g.n {
        return Err(Error::input(format!(
            "need one completion time per worker: got {}, blocklength {}",
            times.len(),
            g.n
        )));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::input("worker completion times must be finite"));
    }
    let (n, k) = (g.n, g.k);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    let map_fast_path = decoder.id() == "map" && matches!(g.entries, Entries::Binary(_));
    let mut first_ok = None;
    let mut tests = 0;
    if map_fast_path {
        let m = g.binary()?;
        let mut elim = ColumnEliminator::new(k);
        for (pos, &w) in order.iter().enumerate() {
            elim.feed(&m.col(w));
            if pos + 1 >= k {
                tests += 1;
                if elim.rank() == k {
                    first_ok = Some(pos);
                    break;
                }
            }
        }
    } else {
        for pos in (k - 1)..n {
            let pattern = ErasurePattern::new(n, order[pos + 1..].to_vec())?;
            tests += 1;
            let ok = decoder.block_decodable_stat(&pattern)?;
            match (first_ok, ok) {
                (None, true) => first_ok = Some(pos),
                (Some(fp), false) => {
                    return Err(Error::Numeric(format!(
                        "decoder {} regressed along the arrival order: decodable \
                         after {} arrivals but not after {}; the forward \
                         completion scan is unsound for such a decoder",
                        decoder.id(),
                        fp + 1,
                        pos + 1
                    )));
                }
                _ => {}
            }
        }
    }

    let (success, last_pos) = match first_ok {
        Some(p) => (true, p),
        None => (false, n - 1),
    };
    let mut workers_used = order[..=last_pos].to_vec();
    workers_used.sort_unstable();
    Ok(JobResult {
        completion_time: times[order[last_pos]],
        workers_used,
        report: DecodeReport {
            success,
            recovered: Vec::new(),
            values: Vec::new(),
            iterations: tests,
            decoder: decoder.id(),
        },
        payload: None,
    })
}

/// Monte-Carlo mean of [`job_completion_time`] over freshly sampled worker
/// times, with a 95% confidence half-width.
pub fn empirical_avg_time<R: Rng + ?Sized>(
    g: &GeneratorMatrix,
    decoder: &dyn ErasureDecoder,
    model: &RuntimeModel,
    jobs: usize,
    rng: &mut R,
) -> Result<EmpiricalTime> {
    if jobs == 0 {
        return Err(Error::input("empirical_avg_time needs jobs >= 1"));
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut failures = 0usize;
    for j in 0..jobs {
        let times = sample_runtimes(g.n, g.k, model, rng);
        let job = job_completion_time(g, decoder, &times)?;
        if !job.report.success {
            failures += 1;
        }
        // Welford running moments.
        let delta = job.completion_time - mean;
        mean += delta / (j + 1) as f64;
        m2 += delta * (job.completion_time - mean);
    }
    let ci_half_width = if jobs > 1 {
        Z95 * (m2 / (jobs - 1) as f64 / jobs as f64).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(EmpiricalTime { mean, ci_half_width, jobs, failures })
}

/// Runs one encoded matrix-multiplication job end to end: splits `a` into k
/// row blocks (zero-padded to equal height), encodes them into n worker
/// tasks through the generator's columns, multiplies each encoded block by
/// `b`, samples straggler times, and reconstructs the true block products
/// from the workers finished at the completion instant. The payload report
/// carries the worst entry error against the directly computed product.
pub fn run_matmul_job<R: Rng + ?Sized>(
    a: &FloatMatrix,
    b: &FloatMatrix,
    g: &GeneratorMatrix,
    decoder: &dyn ErasureDecoder,
    model: &RuntimeModel,
    rng: &mut R,
) -> Result<JobResult> {
    if a.cols() != b.rows() {
        return Err(Error::input(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let (n, k) = (g.n, g.k);
    let (p, q, s) = (a.rows(), a.cols(), b.cols());
    let block_rows = p.div_ceil(k);
    let padded_rows = block_rows * k - p;
    let gf = match &g.entries {
        Entries::Binary(m) => m.to_float(),
        Entries::Real(m) => m.clone(),
    };

    // Worker j computes (sum_i G[i][j] A_i) x B on its encoded block.
    let mut apad = vec![0.0; block_rows * k * q];
    for r in 0..p {
        apad[r * q..(r + 1) * q].copy_from_slice(a.row(r));
    }
    let mut outputs = Vec::with_capacity(n);
    for j in 0..n {
        let mut enc = vec![0.0; block_rows * q];
        for i in 0..k {
            let c = gf.get(i, j);
            if c == 0.0 {
                continue;
            }
            let blk = &apad[i * block_rows * q..(i + 1) * block_rows * q];
            for (e, &v) in enc.iter_mut().zip(blk) {
                *e += c * v;
            }
        }
        outputs.push(FloatMatrix::new(block_rows, q, enc)?.matmul(b)?);
    }

    let times = sample_runtimes(n, k, model, rng);
    let mut job = job_completion_time(g, decoder, &times)?;
    if !job.report.success {
        job.payload = Some(PayloadReport {
            max_rel_error: f64::INFINITY,
            padded_rows,
            block_rows,
            solver_workers: Vec::new(),
        });
        return Ok(job);
    }

    // Any decoder's success certifies that the finished workers' generator
    // columns span all k dimensions (each decoder only succeeds where MAP
    // does), so the solve below is well posed no matter which decoder gated
    // completion. Coefficients come from an exact rational inverse of the
    // first k independent finished columns; only the final combination of
    // worker outputs runs in binary64.
    let solver_workers = solver_columns(g, &job.workers_used)?;
    let inv = invert_columns(g, &solver_workers)?;
    let direct = a.matmul(b)?;
    let mut worst_abs = 0.0f64;
    let mut scale = 0.0f64;
    let mut block = vec![0.0; block_rows * s];
    for i in 0..k {
        block.iter_mut().for_each(|x| *x = 0.0);
        for (jj, &w) in solver_workers.iter().enumerate() {
            // Block i of the product is sum_j inv[j][i] W_j: inv columns
            // hold the reconstruction coefficients.
            let c = rational_to_f64(&inv[jj][i]);
            if c == 0.0 {
                continue;
            }
            let out = &outputs[w];
            for r in 0..block_rows {
                for t in 0..s {
                    block[r * s + t] += c * out.get(r, t);
                }
            }
        }
        for r in 0..block_rows {
            let global_row = i * block_rows + r;
            if global_row >= p {
                break;
            }
            for t in 0..s {
                let d = direct.get(global_row, t);
                worst_abs = worst_abs.max((block[r * s + t] - d).abs());
                scale = scale.max(d.abs());
            }
        }
    }
    let max_rel_error = if worst_abs == 0.0 { 0.0 } else { worst_abs / scale.max(f64::MIN_POSITIVE) };
    job.payload = Some(PayloadReport { max_rel_error, padded_rows, block_rows, solver_workers });
    Ok(job)
}

/// First k generator columns among `arrived` (ascending) that are linearly
/// independent, certified exactly.
fn solver_columns(g: &GeneratorMatrix, arrived: &[usize]) -> Result<Vec<usize>> {
    match &g.entries {
        Entries::Binary(m) => {
            // Modular accepts are exact independence certificates (rank mod
            // p never exceeds rational rank); only a spurious rejection is
            // possible, in which case the exact path below re-decides.
            let mut elim = ColumnEliminator::new(g.k);
            let mut chosen = Vec::with_capacity(g.k);
            for &j in arrived {
                if elim.feed(&m.col(j)) {
                    chosen.push(j);
                    if chosen.len() == g.k {
                        return Ok(chosen);
                    }
                }
            }
            solver_columns_exact(g, arrived)
        }
        Entries::Real(_) => solver_columns_exact(g, arrived),
    }
}

fn solver_columns_exact(g: &GeneratorMatrix, arrived: &[usize]) -> Result<Vec<usize>> {
    let mut elim = RationalEliminator::new(g.k);
    let mut chosen = Vec::with_capacity(g.k);
    for &j in arrived {
        if elim.feed(rational_column(g, j)?) {
            chosen.push(j);
            if chosen.len() == g.k {
                return Ok(chosen);
            }
        }
    }
    Err(Error::Numeric(format!(
        "finished workers span only {} of {} dimensions despite a decodable verdict",
        chosen.len(),
        g.k
    )))
}

fn rational_column(g: &GeneratorMatrix, j: usize) -> Result<Vec<BigRational>> {
    Ok(match &g.entries {
        Entries::Binary(m) => m.col(j).iter().map(|&v| BigRational::from_integer(v.into())).collect(),
        Entries::Real(m) => m
            .col(j)
            .iter()
            .map(|&v| {
                BigRational::from_f64(v)
                    .ok_or_else(|| Error::input("generator entries must be finite"))
            })
            .collect::<Result<_>>()?,
    })
}

/// Exact inverse of the k x k submatrix formed by the chosen generator
/// columns.
fn invert_columns(g: &GeneratorMatrix, chosen: &[usize]) -> Result<Vec<Vec<BigRational>>> {
    match &g.entries {
        Entries::Binary(m) => m.select_columns(chosen).inverse_exact(),
        Entries::Real(_) => {
            let k = g.k;
            let cols: Vec<Vec<BigRational>> =
                chosen.iter().map(|&j| rational_column(g, j)).collect::<Result<_>>()?;
            // Gauss-Jordan on [M | I] over the rationals.
            let mut aug: Vec<Vec<BigRational>> = (0..k)
                .map(|r| {
                    let mut row: Vec<BigRational> =
                        cols.iter().map(|col| col[r].clone()).collect();
                    for c in 0..k {
                        row.push(if c == r { BigRational::one() } else { BigRational::zero() });
                    }
                    row
                })
                .collect();
            for col in 0..k {
                let pivot = (col..k)
                    .find(|&r| !aug[r][col].is_zero())
                    .ok_or_else(|| Error::Numeric("chosen solver columns are singular".into()))?;
                aug.swap(col, pivot);
                let inv = aug[col][col].clone();
                for x in aug[col].iter_mut() {
                    *x = &*x / &inv;
                }
                for r in 0..k {
                    if r == col || aug[r][col].is_zero() {
                        continue;
                    }
                    let f = aug[r][col].clone();
                    let (head, tail) = aug.split_at_mut(r.max(col));
                    let (src, dst) = if r > col {
                        (&head[col], &mut tail[0])
                    } else {
                        (&tail[0], &mut head[r])
                    };
                    for (x, y) in dst.iter_mut().zip(src.iter()) {
                        *x = &*x - &f * y;
                    }
                }
            }
            Ok(aug.into_iter().map(|row| row[k..].to_vec()).collect())
        }
    }
}

/// Incremental exact Gaussian elimination over the rationals; each stored
/// basis vector is fully reduced against the earlier ones, so feeds reduce
/// to zero iff the candidate is dependent.
struct RationalEliminator {
    dim: usize,
    basis: Vec<(usize, Vec<BigRational>)>,
}

impl RationalEliminator {
    fn new(dim: usize) -> Self {
        RationalEliminator { dim, basis: Vec::new() }
    }

    fn feed(&mut self, mut v: Vec<BigRational>) -> bool {
        assert_eq!(v.len(), self.dim);
        for (p, b) in &self.basis {
            let c = v[*p].clone();
            if c.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(b) {
                *x = &*x - &c * y;
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(p) => {
                let inv = v[p].clone();
                for x in v.iter_mut() {
                    *x = &*x / &inv;
                }
                self.basis.push((p, v));
                true
            }
        }
    }
}
