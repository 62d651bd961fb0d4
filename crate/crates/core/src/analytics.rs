//! Average execution-time analytics for erasure-coded distributed jobs:
//! exact series and closed forms under shifted-exponential workers,
//! quadrature for Weibull tails, the random-ensemble bound, and searches
//! for the time-optimal code dimension and rate.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::channel::{
    binomial_capped, failure_profile, pe_from_conditionals, prefix_failure_profiles,
    ConditionalFailureProfile, EstimateMethod, EstimationBudget, Z95,
};
use crate::codes;
use crate::error::Error;
use crate::matrix::IntMatrix;
use crate::projective::ProjectiveDecoder;
use crate::Result;

/// Tail family of the worker completion law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RuntimeFamily {
    ShiftedExponential,
    ShiftedWeibull,
}

/// Worker completion law Pr(T <= t) = 1 - exp(-[mu(kt-1)]^alpha) for
/// t >= 1/k, so a task still running at time t is an erasure with
/// probability eps(t) = exp(-[mu(kt-1)]^alpha). alpha = 1 is the shifted
/// exponential; the 1/k floor is the deterministic work share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuntimeModel {
    pub family: RuntimeFamily,
    pub mu: f64,
    pub alpha: f64,
}

impl RuntimeModel {
    pub fn exponential(mu: f64) -> Result<Self> {
        Self::weibull(mu, 1.0)
    }

    pub fn weibull(mu: f64, alpha: f64) -> Result<Self> {
        if !mu.is_finite() || mu <= 0.0 {
            return Err(Error::input(format!("straggling rate must be positive, got {mu}")));
        }
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::input(format!("Weibull shape must be positive, got {alpha}")));
        }
        let family = if alpha == 1.0 {
            RuntimeFamily::ShiftedExponential
        } else {
            RuntimeFamily::ShiftedWeibull
        };
        Ok(RuntimeModel { family, mu, alpha })
    }

    /// Probability that one of k parallel task slots is still unfinished
    /// at time t.
    pub fn erasure_prob(&self, k: usize, t: f64) -> f64 {
        let kf = k as f64;
        if t < 1.0 / kf {
            return 1.0;
        }
        (-(self.mu * (kf * t - 1.0)).powf(self.alpha)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TimeMethod {
    ClosedForm,
    Series,
    Bound,
    Quadrature,
}

/// Average execution time of one job, normalized so the uncoded single-run
/// work is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeResult {
    pub t_avg: f64,
    pub k: usize,
    pub method: TimeMethod,
    /// 95% half-width inherited from Monte-Carlo profile entries, when any
    /// contributed.
    pub ci_half_width: Option<f64>,
    /// Absolute error estimate of the adaptive quadrature, when used.
    pub quad_error: Option<f64>,
}

fn check_dims(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::input(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    Ok(())
}

fn check_mu(mu: f64) -> Result<()> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::input(format!("straggling rate must be positive, got {mu}")));
    }
    Ok(())
}

/// Closed-form average time of an (n, k) MDS-decodable job: the job ends at
/// the k-th order statistic of n shifted-exponential workers.
pub fn avg_time_mds(n: usize, k: usize, mu: f64) -> Result<TimeResult> {
    check_dims(n, k)?;
    check_mu(mu)?;
    let kf = k as f64;
    let tail: f64 = (n - k + 1..=n).map(|i| 1.0 / i as f64).sum();
    Ok(TimeResult {
        t_avg: 1.0 / kf + tail / (mu * kf),
        k,
        method: TimeMethod::ClosedForm,
        ci_half_width: None,
        quad_error: None,
    })
}

/// Average time from a conditional failure profile:
/// T = (1/k)(1 + sum_{i=n-k+1..n} 1/(i mu)) + (1/(mu k)) sum_{i=1..n-k} p(i)/i.
/// Monte-Carlo uncertainty in p propagates to a 95% half-width.
pub fn avg_time_series(
    n: usize,
    k: usize,
    mu: f64,
    profile: &ConditionalFailureProfile,
) -> Result<TimeResult> {
    check_dims(n, k)?;
    check_mu(mu)?;
    if profile.n != n || profile.k != k {
        return Err(Error::input(format!(
            "profile is for ({}, {}), requested ({n}, {k})",
            profile.n, profile.k
        )));
    }
    let kf = k as f64;
    let mut extra = 0.0;
    let mut var = 0.0;
    let mut any_mc = false;
    for i in 1..=(n - k) {
        extra += profile.p(i) / i as f64;
        if let EstimateMethod::MonteCarlo { trials } = profile.method(i) {
            any_mc = true;
            let p = profile.p(i);
            var += p * (1.0 - p) / (trials as f64 * (i * i) as f64);
        }
    }
    let base = avg_time_mds(n, k, mu)?.t_avg;
    Ok(TimeResult {
        t_avg: base + extra / (mu * kf),
        k,
        method: TimeMethod::Series,
        ci_half_width: any_mc.then(|| Z95 * var.sqrt() / (mu * kf)),
        quad_error: None,
    })
}

/// Ensemble bound on the conditional failure probability of a random binary
/// code: p(i) <= 1 - prod_{j=1..k}(1 - 2^{j-1-n+i}), and 1 past the
/// Singleton limit.
pub fn brc_conditional_bound(n: usize, k: usize, i: usize) -> f64 {
    debug_assert!(k >= 1 && k <= n && i <= n);
    if i + k > n {
        return 1.0;
    }
    // Exponents are <= -1 here, so every factor sits in [1/2, 1).
    let ln_prod: f64 = (1..=k)
        .map(|j| (-(2f64.powi(j as i32 - 1 - n as i32 + i as i32))).ln_1p())
        .sum();
    (-ln_prod.exp_m1()).clamp(0.0, 1.0)
}

/// Average-time upper bound for the random binary ensemble: the series with
/// the ensemble bound in place of the exact profile.
pub fn avg_time_brc_bound(n: usize, k: usize, mu: f64) -> Result<TimeResult> {
    check_dims(n, k)?;
    let profile =
        ConditionalFailureProfile::from_fn(n, k, "brc-bound", |i| brc_conditional_bound(n, k, i));
    let mut result = avg_time_series(n, k, mu, &profile)?;
    result.method = TimeMethod::Bound;
    Ok(result)
}

/// Grows W until the discarded tail of int_W^inf pe(exp(-w^alpha)) dw is
/// certified below 1e-16 via pe(eps) <= min(1, n eps) and the
/// incomplete-gamma bound int_x^inf e^-t t^c dt <= 2 x^c e^-x (x >= 2c).
fn weibull_truncation(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    let mut w = ((nf * 1e17).ln().max(1.0)).powf(1.0 / alpha);
    if alpha < 1.0 {
        w = w.max((2.0 * (1.0 / alpha - 1.0)).powf(1.0 / alpha));
    }
    for _ in 0..200 {
        let tail = nf * 1.0_f64.max((2.0 / alpha) * w.powf(1.0 - alpha)) * (-w.powf(alpha)).exp();
        if tail <= 1e-16 {
            break;
        }
        w *= 1.25;
    }
    w
}

fn simpson_split<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    err_acc: &mut f64,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a) < 1e-14 {
        *err_acc += delta.abs() / 15.0;
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numeric(format!(
            "quadrature failed to converge on [{a:.6e}, {b:.6e}]: local error {:.3e} at depth limit",
            delta.abs() / 15.0
        )));
    }
    let l = simpson_split(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err_acc)?;
    let r = simpson_split(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err_acc)?;
    Ok(l + r)
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut err = 0.0;
    let value = simpson_split(f, a, b, fa, fm, fb, whole, tol, 52, &mut err)?;
    Ok((value, err))
}

/// Average time by quadrature of the failure-probability mixture:
/// T = 1/k + (1/(mu k)) int_0^1 P_e(eps)/eps deps for the exponential law,
/// and its Weibull generalization with weight 1/(alpha eps ln(1/eps)^{1-1/alpha}).
///
/// Both reduce under w = ln(1/eps)^{1/alpha} to
/// T = 1/k + (1/(mu k)) int_0^inf P_e(exp(-w^alpha)) dw, whose integrand is
/// bounded and monotone, so one adaptive rule covers every alpha > 0.
pub fn avg_time_quadrature<F: Fn(f64) -> f64>(
    n: usize,
    k: usize,
    model: &RuntimeModel,
    pe: F,
) -> Result<TimeResult> {
    check_dims(n, k)?;
    check_mu(model.mu)?;
    if !model.alpha.is_finite() || model.alpha <= 0.0 {
        return Err(Error::input(format!("Weibull shape must be positive, got {}", model.alpha)));
    }
    let kf = k as f64;
    let alpha = model.alpha;
    let f = |w: f64| {
        let eps = (-w.powf(alpha)).exp();
        pe(eps).clamp(0.0, 1.0)
    };
    let w_end = weibull_truncation(n, alpha);
    // Target ~1e-9 absolute error on T itself.
    let tol = (1e-9 * model.mu * kf).max(1e-13);
    let (integral, err) = adaptive_simpson(&f, 0.0, w_end, tol)?;
    Ok(TimeResult {
        t_avg: 1.0 / kf + integral / (model.mu * kf),
        k,
        method: TimeMethod::Quadrature,
        ci_half_width: None,
        quad_error: Some((err + 1e-16) / (model.mu * kf)),
    })
}

/// Bound on the normalized time gap n(T_brc - T_mds) at dimension k:
/// (1/(mu R)) [v/(n-k-v+1) + nR(1+ln(n-k-v))/2^v], with the logarithm
/// dropped once n-k-v < 1 (its term is already at the 2^-v floor there).
pub fn gap_bound(n: usize, k: usize, mu: f64, v: f64) -> Result<f64> {
    check_dims(n, k)?;
    check_mu(mu)?;
    let d = (n - k) as f64;
    if !(0.0..=d).contains(&v) {
        return Err(Error::input(format!("need 0 <= v <= n-k = {d}, got {v}")));
    }
    let r = k as f64 / n as f64;
    let rem = d - v;
    let ln_term = if rem >= 1.0 { rem.ln() } else { 0.0 };
    let first = v / (d - v + 1.0);
    let second = n as f64 * r * (1.0 + ln_term) / 2f64.powf(v);
    Ok((first + second) / (mu * r))
}

/// The v choice that makes the gap bound decay like log(n)/n.
pub fn default_gap_v(n: usize) -> f64 {
    2.0 * (n as f64).log2()
}

/// Asymptotically optimal rate: the unique root of
/// (1-R) ln(1-R) = mu (1-R) - R in (0,1).
pub fn optimal_rate(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    let f = |r: f64| (1.0 - r) * (1.0 - r).ln() - mu * (1.0 - r) + r;
    const GRID: usize = 4096;
    let point = |i: usize| i as f64 / (GRID + 1) as f64;
    let mut bracket = None;
    let mut changes = 0;
    let mut prev = f(point(1));
    for i in 2..=GRID {
        let cur = f(point(i));
        if (prev >= 0.0) != (cur >= 0.0) {
            changes += 1;
            bracket = Some((point(i - 1), point(i)));
        }
        prev = cur;
    }
    if changes != 1 {
        return Err(Error::Numeric(format!(
            "expected one sign change of the rate criterion on (0,1), found {changes} \
             (grid resolution {})",
            1.0 / (GRID + 1) as f64
        )));
    }
    let (mut lo, mut hi) = bracket.expect("counted one change");
    if f(lo) >= 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }
    // Invariant: f(lo) < 0 <= f(hi).
    while (hi - lo).abs() > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Relative overhead against the MDS optimum at the same n.
pub fn optimality_gap(t: f64, t_mds: f64) -> f64 {
    t / t_mds - 1.0
}

/// Relative saving against running the job uncoded on n workers.
pub fn coding_gain(t: f64, t_uncoded: f64) -> f64 {
    1.0 - t / t_uncoded
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Uncoded,
    Mds,
    BrcBound,
    PolarSc,
    RmMap,
    RmProjective,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Uncoded => "uncoded",
            Scheme::Mds => "mds",
            Scheme::BrcBound => "brc-bound",
            Scheme::PolarSc => "polar-sc",
            Scheme::RmMap => "rm-map",
            Scheme::RmProjective => "rm-projective",
        }
    }

    pub const ALL: [Scheme; 6] = [
        Scheme::Uncoded,
        Scheme::Mds,
        Scheme::BrcBound,
        Scheme::PolarSc,
        Scheme::RmMap,
        Scheme::RmProjective,
    ];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uncoded" => Ok(Scheme::Uncoded),
            "mds" => Ok(Scheme::Mds),
            "brc-bound" => Ok(Scheme::BrcBound),
            "polar-sc" => Ok(Scheme::PolarSc),
            "rm-map" => Ok(Scheme::RmMap),
            "rm-projective" => Ok(Scheme::RmProjective),
            other => Err(Error::input(format!(
                "unknown scheme '{other}' (expected uncoded, mds, brc-bound, polar-sc, rm-map, \
                 or rm-projective)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepEntry {
    pub k: usize,
    pub result: TimeResult,
}

/// Full k-curve of a sweep, with the argmin (ties to the smaller k).
#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub scheme: Scheme,
    pub n: usize,
    /// Candidate dimensions planned; exceeds curve.len() when a pattern
    /// budget cut the sweep short.
    pub candidates: usize,
    /// Completed entries in ascending k.
    pub curve: Vec<SweepEntry>,
    best_index: usize,
}

impl SweepResult {
    pub fn best(&self) -> Option<&SweepEntry> {
        self.curve.get(self.best_index)
    }
}

fn finalize(scheme: Scheme, n: usize, candidates: usize, curve: Vec<SweepEntry>) -> SweepResult {
    let mut best_index = 0;
    for (idx, entry) in curve.iter().enumerate() {
        if entry.result.t_avg < curve[best_index].result.t_avg {
            best_index = idx;
        }
    }
    SweepResult { scheme, n, candidates, curve, best_index }
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub model: RuntimeModel,
    pub budget: EstimationBudget,
    /// Cap on total pattern evaluations across the whole sweep; exceeding it
    /// aborts with the completed entries attached.
    pub max_pattern_evals: Option<u64>,
    pub seed: u64,
    /// Design erasure probability for polar bit-channel selection.
    pub eps_design: f64,
}

impl SweepOptions {
    pub fn new(model: RuntimeModel) -> Self {
        SweepOptions {
            model,
            budget: EstimationBudget::default(),
            max_pattern_evals: None,
            seed: 0,
            eps_design: 0.1,
        }
    }
}

fn log2_exact(n: usize) -> Result<usize> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::input(format!("scheme needs n to be a power of two, got {n}")));
    }
    Ok(n.trailing_zeros() as usize)
}

/// Patterns a profile estimation will consume: exhaustive counts where
/// enumeration fits the budget, Monte-Carlo trial counts elsewhere, and
/// nothing past the Singleton limit (those are analytic).
fn planned_profile_patterns(n: usize, k: usize, budget: &EstimationBudget) -> u64 {
    (1..=(n - k))
        .map(|i| {
            let c = binomial_capped(n, i, budget.enum_limit);
            if c <= budget.enum_limit {
                c
            } else {
                budget.trials as u64
            }
        })
        .sum()
}

fn planned_staircase_patterns(n: usize, budget: &EstimationBudget) -> u64 {
    (1..=n)
        .map(|i| {
            let c = binomial_capped(n, i, budget.enum_limit);
            if c <= budget.enum_limit {
                c
            } else {
                budget.trials as u64
            }
        })
        .sum()
}

/// Series under the exponential law, quadrature of the mixture otherwise.
fn time_from_profile(
    model: &RuntimeModel,
    profile: &ConditionalFailureProfile,
) -> Result<TimeResult> {
    match model.family {
        RuntimeFamily::ShiftedExponential => {
            avg_time_series(profile.n, profile.k, model.mu, profile)
        }
        RuntimeFamily::ShiftedWeibull => {
            avg_time_quadrature(profile.n, profile.k, model, |eps| {
                pe_from_conditionals(profile, eps).expect("eps stays within [0,1]")
            })
        }
    }
}

fn sweep_uncoded(n: usize, opts: &SweepOptions) -> Result<SweepResult> {
    let result = match opts.model.family {
        RuntimeFamily::ShiftedExponential => avg_time_mds(n, n, opts.model.mu)?,
        RuntimeFamily::ShiftedWeibull => {
            time_from_profile(&opts.model, &ConditionalFailureProfile::mds(n, n))?
        }
    };
    Ok(finalize(Scheme::Uncoded, n, 1, vec![SweepEntry { k: n, result }]))
}

fn sweep_analytic(n: usize, scheme: Scheme, opts: &SweepOptions) -> Result<SweepResult> {
    let mut curve = Vec::with_capacity(n);
    for k in 1..=n {
        let result = match (scheme, opts.model.family) {
            (Scheme::Mds, RuntimeFamily::ShiftedExponential) => avg_time_mds(n, k, opts.model.mu)?,
            (Scheme::Mds, RuntimeFamily::ShiftedWeibull) => {
                time_from_profile(&opts.model, &ConditionalFailureProfile::mds(n, k))?
            }
            (Scheme::BrcBound, RuntimeFamily::ShiftedExponential) => {
                avg_time_brc_bound(n, k, opts.model.mu)?
            }
            (Scheme::BrcBound, RuntimeFamily::ShiftedWeibull) => {
                let profile = ConditionalFailureProfile::from_fn(n, k, "brc-bound", |i| {
                    brc_conditional_bound(n, k, i)
                });
                time_from_profile(&opts.model, &profile)?
            }
            _ => unreachable!("sweep_analytic only handles mds and brc-bound"),
        };
        curve.push(SweepEntry { k, result });
    }
    Ok(finalize(scheme, n, n, curve))
}

fn sweep_polar(n: usize, opts: &SweepOptions) -> Result<SweepResult> {
    let m = log2_exact(n)?;
    if !(opts.eps_design > 0.0 && opts.eps_design < 1.0) {
        return Err(Error::input(format!(
            "polar design point must lie in (0,1), got {}",
            opts.eps_design
        )));
    }
    let eval = |k: usize| -> Result<SweepEntry> {
        let rows = codes::polar_row_selection(m, k, opts.eps_design)?;
        let result = avg_time_quadrature(n, k, &opts.model, |eps| {
            let profile = codes::bec_bit_channels(m, eps).expect("eps stays within [0,1]");
            crate::polar::sc_failure_prob(&profile, &rows).expect("selection is valid")
        })?;
        Ok(SweepEntry { k, result })
    };
    // Quadrature per k is the whole cost; above n = 64 scan a coarse grid
    // and then refine unit steps around its argmin.
    let step = n.div_ceil(64);
    let mut ks: Vec<usize> = (1..=n).step_by(step).collect();
    if ks.last() != Some(&n) {
        ks.push(n);
    }
    let mut curve: Vec<SweepEntry> = ks.iter().map(|&k| eval(k)).collect::<Result<_>>()?;
    if step > 1 {
        let mut kc = curve[0].k;
        let mut tc = curve[0].result.t_avg;
        for entry in &curve[1..] {
            if entry.result.t_avg < tc {
                tc = entry.result.t_avg;
                kc = entry.k;
            }
        }
        let lo = kc.saturating_sub(step - 1).max(1);
        let hi = (kc + step - 1).min(n);
        for k in lo..=hi {
            if !curve.iter().any(|e| e.k == k) {
                curve.push(eval(k)?);
            }
        }
        curve.sort_by_key(|e| e.k);
    }
    let candidates = curve.len();
    Ok(finalize(Scheme::PolarSc, n, candidates, curve))
}

fn sweep_rm_map(n: usize, opts: &SweepOptions) -> Result<SweepResult> {
    let m = log2_exact(n)?;
    let cap = opts.max_pattern_evals.unwrap_or(u64::MAX);
    if planned_staircase_patterns(n, &opts.budget) > cap {
        return Err(Error::BudgetExhausted {
            partial: Box::new(finalize(Scheme::RmMap, n, n, Vec::new())),
        });
    }
    // One elimination pass per pattern covers every prefix dimension at
    // once, so the k-sweep costs no more than a single profile.
    let order = codes::rm_weight_order(m);
    let kron = codes::kronecker_matrix(m)?;
    let rows: Vec<Vec<i64>> = order
        .iter()
        .map(|&i| kron.row(i).iter().map(|&v| 2 * v - 1).collect())
        .collect();
    let ordered = IntMatrix::from_rows(&rows)?;
    let prefixes = prefix_failure_profiles(&ordered, &opts.budget, opts.seed)?;
    let mut curve = Vec::with_capacity(n);
    for k in 1..=n {
        let profile = prefixes.profile(k)?;
        let result = time_from_profile(&opts.model, &profile)?;
        curve.push(SweepEntry { k, result });
    }
    Ok(finalize(Scheme::RmMap, n, n, curve))
}

fn sweep_rm_projective(n: usize, opts: &SweepOptions) -> Result<SweepResult> {
    let m = log2_exact(n)?;
    let cap = opts.max_pattern_evals.unwrap_or(u64::MAX);
    let candidates = m;
    let mut used = 0u64;
    let mut curve = Vec::with_capacity(candidates);
    for r in 1..=m {
        let k = codes::rm_dimension(m, r);
        let planned = planned_profile_patterns(n, k, &opts.budget);
        if used + planned > cap {
            return Err(Error::BudgetExhausted {
                partial: Box::new(finalize(Scheme::RmProjective, n, candidates, curve)),
            });
        }
        used += planned;
        let g = codes::rm_generator(m, r)?;
        let decoder = ProjectiveDecoder::new(&g)?;
        let profile = failure_profile(&g, &decoder, &opts.budget, opts.seed)?;
        let result = time_from_profile(&opts.model, &profile)?;
        curve.push(SweepEntry { k, result });
    }
    Ok(finalize(Scheme::RmProjective, n, candidates, curve))
}

/// Evaluates T_avg over the feasible dimensions of a scheme and returns the
/// full curve with its argmin. Decoder schemes honor `max_pattern_evals` by
/// aborting with the completed entries attached.
pub fn sweep_k(n: usize, scheme: Scheme, opts: &SweepOptions) -> Result<SweepResult> {
    if n == 0 {
        return Err(Error::input("sweep needs n >= 1"));
    }
    match scheme {
        Scheme::Uncoded => sweep_uncoded(n, opts),
        Scheme::Mds | Scheme::BrcBound => sweep_analytic(n, scheme, opts),
        Scheme::PolarSc => sweep_polar(n, opts),
        Scheme::RmMap => sweep_rm_map(n, opts),
        Scheme::RmProjective => sweep_rm_projective(n, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(lo: usize, hi: usize) -> f64 {
        (lo..=hi).map(|i| 1.0 / i as f64).sum()
    }

    #[test]
    fn mds_closed_form_matches_hand_values() {
        let t = avg_time_mds(8, 6, 1.0).unwrap();
        assert!((t.t_avg - (1.0 + harmonic(3, 8)) / 6.0).abs() < 1e-15);
        assert!((t.t_avg - 0.370).abs() < 5e-4);
        let t16 = avg_time_mds(16, 11, 1.0).unwrap();
        assert!((t16.t_avg - 0.191).abs() < 5e-4);
        let single = avg_time_mds(1, 1, 0.5).unwrap();
        assert!((single.t_avg - 3.0).abs() < 1e-15);
    }

    #[test]
    fn uncoded_is_mds_at_full_dimension() {
        let t = avg_time_mds(8, 8, 1.0).unwrap();
        assert!((t.t_avg - 0.4647).abs() < 5e-4);
    }

    #[test]
    fn series_with_single_protected_erasure() {
        // p(1) = 0, p(i >= 2) = 1 is exactly the profile of a distance-2
        // code with one parity row.
        let profile =
            ConditionalFailureProfile::from_fn(8, 7, "map", |i| if i >= 2 { 1.0 } else { 0.0 });
        let t = avg_time_series(8, 7, 1.0, &profile).unwrap();
        assert!((t.t_avg - (1.0 + harmonic(2, 8)) / 7.0).abs() < 1e-15);
        assert!((t.t_avg - 0.389).abs() < 1e-3);
        assert!(t.ci_half_width.is_none());
    }

    #[test]
    fn series_reduces_to_mds_on_zero_profile() {
        for (n, k) in [(8, 5), (16, 11), (32, 22)] {
            let profile = ConditionalFailureProfile::mds(n, k);
            let series = avg_time_series(n, k, 1.3, &profile).unwrap();
            let closed = avg_time_mds(n, k, 1.3).unwrap();
            assert!((series.t_avg - closed.t_avg).abs() < 1e-15);
        }
    }

    #[test]
    fn series_rejects_mismatched_profile() {
        let profile = ConditionalFailureProfile::mds(8, 5);
        assert!(avg_time_series(8, 6, 1.0, &profile).is_err());
        assert!(avg_time_series(16, 5, 1.0, &profile).is_err());
    }

    #[test]
    fn series_exceeds_mds_under_positive_profile() {
        let ones = ConditionalFailureProfile::from_fn(8, 5, "worst", |_| 1.0);
        let t = avg_time_series(8, 5, 1.0, &ones).unwrap();
        assert!(t.t_avg > avg_time_mds(8, 5, 1.0).unwrap().t_avg + 1e-6);
    }

    #[test]
    fn series_propagates_monte_carlo_uncertainty() {
        let n = 8;
        let k = 5;
        let p = (0..=n).map(|i| if i > n - k { 1.0 } else { 0.02 * i as f64 }).collect();
        let methods = (0..=n)
            .map(|i| {
                if (1..=n - k).contains(&i) {
                    EstimateMethod::MonteCarlo { trials: 10_000 }
                } else {
                    EstimateMethod::Exact
                }
            })
            .collect();
        let profile =
            ConditionalFailureProfile::from_parts(n, k, "map".into(), p, methods).unwrap();
        let t = avg_time_series(n, k, 1.0, &profile).unwrap();
        let hw = t.ci_half_width.expect("Monte-Carlo entries present");
        assert!(hw > 0.0 && hw < 1e-2);
    }

    #[test]
    fn ensemble_bound_hand_values() {
        assert!((brc_conditional_bound(8, 7, 1) - 0.7089439444243908).abs() < 1e-12);
        assert!((brc_conditional_bound(4, 2, 2) - 0.625).abs() < 1e-12);
        assert_eq!(brc_conditional_bound(8, 7, 2), 1.0);
        assert!(brc_conditional_bound(100, 2, 1) < 1e-28);
    }

    #[test]
    fn ensemble_time_bound_dominates_mds() {
        for (n, k) in [(8, 7), (16, 11), (64, 43), (512, 349)] {
            let bound = avg_time_brc_bound(n, k, 1.0).unwrap();
            let mds = avg_time_mds(n, k, 1.0).unwrap();
            assert!(bound.t_avg >= mds.t_avg);
        }
        let t = avg_time_brc_bound(8, 7, 1.0).unwrap();
        assert!((t.t_avg - 0.4895430124687905).abs() < 1e-12);
    }

    #[test]
    fn ensemble_bound_near_mds_at_table_scale() {
        // One dimension below MDS costs under 0.5% at n = 512.
        let bound = avg_time_brc_bound(512, 349, 1.0).unwrap();
        let mds = avg_time_mds(512, 350, 1.0).unwrap();
        assert!(optimality_gap(bound.t_avg, mds.t_avg).abs() < 5e-3);
    }

    #[test]
    fn quadrature_matches_series_for_exponential() {
        let model = RuntimeModel::exponential(1.0).unwrap();
        for (n, k) in [(8, 7), (8, 5), (16, 11)] {
            let profile = ConditionalFailureProfile::mds(n, k);
            let series = avg_time_series(n, k, 1.0, &profile).unwrap();
            let quad = avg_time_quadrature(n, k, &model, |eps| {
                pe_from_conditionals(&profile, eps).unwrap()
            })
            .unwrap();
            assert!(
                (series.t_avg - quad.t_avg).abs() < 1e-8,
                "({n},{k}): series {} vs quadrature {}",
                series.t_avg,
                quad.t_avg
            );
        }
    }

    #[test]
    fn weibull_quadrature_matches_sampling_oracle() {
        // 0.32609 is a 10^7-sample Monte-Carlo mean of the (8,7) MDS
        // completion time under the alpha = 2 law.
        let model = RuntimeModel::weibull(1.0, 2.0).unwrap();
        let profile = ConditionalFailureProfile::mds(8, 7);
        let t = avg_time_quadrature(8, 7, &model, |eps| {
            pe_from_conditionals(&profile, eps).unwrap()
        })
        .unwrap();
        assert!((t.t_avg - 0.32609).abs() < 3e-4, "got {}", t.t_avg);
    }

    #[test]
    fn weibull_alpha_below_one_converges() {
        let model = RuntimeModel::weibull(1.0, 0.5).unwrap();
        let profile = ConditionalFailureProfile::mds(8, 6);
        let t = avg_time_quadrature(8, 6, &model, |eps| {
            pe_from_conditionals(&profile, eps).unwrap()
        })
        .unwrap();
        // Heavier tail than exponential costs more time.
        assert!(t.t_avg > avg_time_mds(8, 6, 1.0).unwrap().t_avg);
        assert!(t.quad_error.unwrap() < 1e-6);
    }

    #[test]
    fn gap_bound_hand_value_and_range_check() {
        // v = n-k: first term (n-k)/1, second collapses to nR/2^(n-k).
        let b = gap_bound(8, 6, 1.0, 2.0).unwrap();
        let expected = (2.0 / 1.0 + 8.0 * 0.75 / 4.0) / 0.75;
        assert!((b - expected).abs() < 1e-12);
        assert!(gap_bound(8, 6, 1.0, 2.5).is_err());
        assert!(gap_bound(8, 6, 1.0, -0.1).is_err());
    }

    #[test]
    fn gap_bound_covers_measured_gap() {
        for n in [64usize, 128, 256] {
            let k = (0.6822 * n as f64).ceil() as usize;
            let v = default_gap_v(n);
            let bound = gap_bound(n, k, 1.0, v).unwrap();
            let brc = avg_time_brc_bound(n, k, 1.0).unwrap().t_avg;
            let mds = avg_time_mds(n, k, 1.0).unwrap().t_avg;
            let gap = n as f64 * (brc - mds);
            assert!(bound >= gap, "n={n}: bound {bound} < gap {gap}");
        }
    }

    #[test]
    fn gap_bound_decays_with_n() {
        // At fixed rate the normalized gap bound shrinks like log(n)/n.
        let mut prev = f64::INFINITY;
        for n in [64usize, 128, 256, 512] {
            let k = n * 11 / 16;
            let bound = gap_bound(n, k, 1.0, default_gap_v(n)).unwrap();
            assert!(bound < prev, "n={n}: {bound} did not decrease from {prev}");
            prev = bound;
        }
    }

    #[test]
    fn optimal_rate_hand_values() {
        let r = optimal_rate(1.0).unwrap();
        assert!((r - 0.6822).abs() < 1e-4);
        let f = (1.0 - r) * (1.0 - r).ln() - (1.0 - r) + r;
        assert!(f.abs() < 1e-9);
        // Stragglers dominating (mu -> 0) pushes the optimum toward rate 0.
        let seq: Vec<f64> =
            [0.1, 0.01, 0.001].iter().map(|&mu| optimal_rate(mu).unwrap()).collect();
        assert!(seq[0] > seq[1] && seq[1] > seq[2]);
        assert!(seq[2] < 0.05);
    }

    #[test]
    fn profile_weighted_sum_orders_average_times() {
        // Of two profiles agreeing past the Singleton limit, the one with
        // the smaller sum of p(i)/i yields the smaller average time.
        let pa = ConditionalFailureProfile::from_fn(8, 5, "a", |i| if i == 3 { 0.3 } else { 0.0 });
        let pb = ConditionalFailureProfile::from_fn(8, 5, "b", |i| if i == 1 { 0.2 } else { 0.0 });
        let wa = 0.3 / 3.0;
        let wb = 0.2 / 1.0;
        assert!(wa < wb);
        let ta = avg_time_series(8, 5, 1.0, &pa).unwrap().t_avg;
        let tb = avg_time_series(8, 5, 1.0, &pb).unwrap().t_avg;
        assert!(ta < tb);
    }

    #[test]
    fn scheme_names_round_trip() {
        for scheme in Scheme::ALL {
            assert_eq!(scheme.name().parse::<Scheme>().unwrap(), scheme);
        }
        assert!("reed-solomon".parse::<Scheme>().is_err());
    }

    #[test]
    fn sweep_uncoded_single_candidate() {
        let opts = SweepOptions::new(RuntimeModel::exponential(1.0).unwrap());
        let sweep = sweep_k(8, Scheme::Uncoded, &opts).unwrap();
        assert_eq!(sweep.candidates, 1);
        let best = sweep.best().unwrap();
        assert_eq!(best.k, 8);
        assert!((best.result.t_avg - 0.4647).abs() < 5e-4);
    }

    #[test]
    fn sweep_mds_finds_table_optimum() {
        let opts = SweepOptions::new(RuntimeModel::exponential(1.0).unwrap());
        let sweep = sweep_k(8, Scheme::Mds, &opts).unwrap();
        assert_eq!(sweep.curve.len(), 8);
        let best = sweep.best().unwrap();
        assert_eq!(best.k, 6);
        assert!((best.result.t_avg - 0.370).abs() < 5e-4);
        let sweep16 = sweep_k(16, Scheme::Mds, &opts).unwrap();
        assert_eq!(sweep16.best().unwrap().k, 11);
    }

    #[test]
    fn sweep_polar_finds_table_optimum() {
        let opts = SweepOptions::new(RuntimeModel::exponential(1.0).unwrap());
        let sweep = sweep_k(8, Scheme::PolarSc, &opts).unwrap();
        let best = sweep.best().unwrap();
        assert_eq!(best.k, 7);
        assert!((best.result.t_avg - 0.40833).abs() < 5e-4, "got {}", best.result.t_avg);
    }

    #[test]
    fn sweep_rm_map_is_exact_at_desk_scale() {
        // n = 8 profiles enumerate exhaustively, so the sweep value is the
        // exact series of the distance-2 prefix code.
        let opts = SweepOptions::new(RuntimeModel::exponential(1.0).unwrap());
        let sweep = sweep_k(8, Scheme::RmMap, &opts).unwrap();
        let best = sweep.best().unwrap();
        assert_eq!(best.k, 7);
        assert!((best.result.t_avg - 0.38826530612244894).abs() < 1e-12);
    }

    #[test]
    fn sweep_budget_aborts_with_partial_results() {
        let model = RuntimeModel::exponential(1.0).unwrap();
        let mut opts = SweepOptions::new(model);
        opts.max_pattern_evals = Some(10);
        match sweep_k(16, Scheme::RmMap, &opts) {
            Err(Error::BudgetExhausted { partial }) => {
                assert_eq!(partial.candidates, 16);
                assert!(partial.curve.is_empty());
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
        // Enough for the r = 1 profile of RM(3,1) but not for r = 2.
        let mut opts = SweepOptions::new(model);
        opts.max_pattern_evals = Some(binomial_sum_up_to(8, 4));
        match sweep_k(8, Scheme::RmProjective, &opts) {
            Err(Error::BudgetExhausted { partial }) => {
                assert_eq!(partial.candidates, 3);
                assert!(!partial.curve.is_empty());
                assert_eq!(partial.curve[0].k, 4);
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    fn binomial_sum_up_to(n: usize, limit: usize) -> u64 {
        (1..=limit).map(|i| binomial_capped(n, i, 1 << 40)).sum()
    }

    #[test]
    fn gains_match_table_conventions() {
        let t_mds = avg_time_mds(8, 6, 1.0).unwrap().t_avg;
        let t_uncoded = avg_time_mds(8, 8, 1.0).unwrap().t_avg;
        assert!((coding_gain(t_mds, t_uncoded) - 0.20).abs() < 5e-3);
        assert!(optimality_gap(t_mds, t_mds).abs() < 1e-15);
    }

    #[test]
    fn erasure_prob_has_deterministic_floor() {
        let model = RuntimeModel::weibull(2.0, 1.5).unwrap();
        assert_eq!(model.erasure_prob(4, 0.2), 1.0);
        assert_eq!(model.erasure_prob(4, 0.25), 1.0);
        assert!(model.erasure_prob(4, 0.5) < 1.0);
        assert!(model.erasure_prob(4, 2.0) < model.erasure_prob(4, 1.0));
    }
}
