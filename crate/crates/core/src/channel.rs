//! Erasure patterns and failure-probability estimation.
//!
//! The conditional failure probabilities p(i) (failure given exactly i
//! erasures) are the bridge between decoders and the execution-time series:
//! estimate them once per (code, decoder), then every downstream quantity is
//! closed-form.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::GeneratorMatrix;
use crate::decoder::ErasureDecoder;
use crate::error::Error;
use crate::rng;
use crate::Result;

/// Subset of [n] marking erased coordinates; indices sorted and unique.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasurePattern {
    n: usize,
    erased: Vec<usize>,
}

impl ErasurePattern {
    pub fn new(n: usize, mut erased: Vec<usize>) -> Result<Self> {
        erased.sort_unstable();
        if erased.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::input("duplicate erased index"));
        }
        if erased.last().is_some_and(|&i| i >= n) {
            return Err(Error::input("erased index out of range"));
        }
        Ok(ErasurePattern { n, erased })
    }

    pub fn empty(n: usize) -> Self {
        ErasurePattern { n, erased: Vec::new() }
    }

    pub fn from_flags(flags: &[bool]) -> Self {
        let erased = flags.iter().enumerate().filter_map(|(i, &e)| e.then_some(i)).collect();
        ErasurePattern { n: flags.len(), erased }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn erased(&self) -> &[usize] {
        &self.erased
    }

    pub fn count(&self) -> usize {
        self.erased.len()
    }

    pub fn is_erased(&self, i: usize) -> bool {
        self.erased.binary_search(&i).is_ok()
    }

    pub fn unerased(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n - self.erased.len());
        let mut it = self.erased.iter().peekable();
        for i in 0..self.n {
            if it.peek() == Some(&&i) {
                it.next();
            } else {
                out.push(i);
            }
        }
        out
    }

    pub fn flags(&self) -> Vec<bool> {
        let mut f = vec![false; self.n];
        for &i in &self.erased {
            f[i] = true;
        }
        f
    }
}

/// Each coordinate erased independently with probability eps.
pub fn sample_pattern<R: Rng>(n: usize, eps: f64, rng: &mut R) -> Result<ErasurePattern> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::input(format!("erasure probability {eps} outside [0,1]")));
    }
    let erased = (0..n).filter(|_| rng.gen::<f64>() < eps).collect();
    Ok(ErasurePattern { n, erased })
}

#[derive(Debug, Clone, Copy)]
pub struct EstimationBudget {
    /// Enumerate all C(n,i) patterns exhaustively up to this count.
    pub enum_limit: u64,
    /// Monte-Carlo trials per erasure count above the enumeration limit.
    pub trials: usize,
}

impl Default for EstimationBudget {
    fn default() -> Self {
        EstimationBudget { enum_limit: 100_000, trials: 100_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    Exact,
    MonteCarlo { trials: usize },
}

/// Estimates of p(i) = Pr[decode fails | exactly i erasures] for i = 1..n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalFailureProfile {
    pub n: usize,
    pub k: usize,
    pub decoder: String,
    // Indexed directly by erasure count; p[0] = 0 by convention.
    p: Vec<f64>,
    methods: Vec<EstimateMethod>,
}

impl ConditionalFailureProfile {
    pub fn from_parts(
        n: usize,
        k: usize,
        decoder: String,
        p: Vec<f64>,
        methods: Vec<EstimateMethod>,
    ) -> Result<Self> {
        if p.len() != n + 1 || methods.len() != n + 1 {
            return Err(Error::input(format!("profile vectors must have length n+1 = {}", n + 1)));
        }
        if p.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::input("conditional probabilities must lie in [0,1]"));
        }
        Ok(ConditionalFailureProfile { n, k, decoder, p, methods })
    }

    /// The ideal profile every code is bounded below by: failures only past
    /// the Singleton limit.
    pub fn mds(n: usize, k: usize) -> Self {
        let p = (0..=n).map(|i| if i > n - k { 1.0 } else { 0.0 }).collect();
        ConditionalFailureProfile {
            n,
            k,
            decoder: "mds".to_string(),
            p,
            methods: vec![EstimateMethod::Exact; n + 1],
        }
    }

    /// Profile from a closed-form bound or formula f(i).
    pub fn from_fn(n: usize, k: usize, decoder: &str, f: impl Fn(usize) -> f64) -> Self {
        let p = (0..=n).map(|i| if i == 0 { 0.0 } else { f(i).clamp(0.0, 1.0) }).collect();
        ConditionalFailureProfile {
            n,
            k,
            decoder: decoder.to_string(),
            p,
            methods: vec![EstimateMethod::Exact; n + 1],
        }
    }

    pub fn p(&self, i: usize) -> f64 {
        self.p[i]
    }

    pub fn method(&self, i: usize) -> EstimateMethod {
        self.methods[i]
    }
}

/// C(n,k), saturating at cap+1 so callers can test "exceeds cap" safely.
pub fn binomial_capped(n: usize, k: usize, cap: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    let cap = cap as u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap {
            return cap as u64 + 1;
        }
    }
    acc as u64
}

/// Visits every k-subset of {0..n-1} in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        // Advance the rightmost index that still has headroom.
        let mut j = k;
        while j > 0 {
            j -= 1;
            if idx[j] != j + n - k {
                idx[j] += 1;
                for l in j + 1..k {
                    idx[l] = idx[l - 1] + 1;
                }
                break;
            }
            if j == 0 {
                return;
            }
        }
        if k == 0 {
            return;
        }
    }
}

/// Uniformly random i-subset of {0..n-1} (partial Fisher-Yates).
fn random_subset<R: Rng>(n: usize, i: usize, rng: &mut R) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    pool.partial_shuffle(rng, i);
    pool.truncate(i);
    pool
}

/// Failure probability of `decoder` given exactly i erasures, exhaustively
/// when C(n,i) fits the enumeration budget and by Monte Carlo otherwise.
///
/// Trials are keyed by (seed, i, trial) so estimates are reproducible and
/// independent of evaluation order.
pub fn conditional_failure_prob(
    g: &GeneratorMatrix,
    decoder: &dyn ErasureDecoder,
    i: usize,
    budget: &EstimationBudget,
    seed: u64,
) -> Result<(f64, EstimateMethod)> {
    let n = g.n;
    if i == 0 || i > n {
        return Err(Error::input(format!("erasure count {i} outside 1..={n}")));
    }
    if i > n - g.k {
        // Fewer than k symbols survive; no decoder can invert the encoding.
        return Ok((1.0, EstimateMethod::Exact));
    }
    let subsets = binomial_capped(n, i, budget.enum_limit);
    if subsets <= budget.enum_limit {
        let mut failures = 0u64;
        let mut err = None;
        for_each_combination(n, i, |idx| {
            if err.is_some() {
                return;
            }
            let pattern = ErasurePattern { n, erased: idx.to_vec() };
            match decoder.block_decodable_stat(&pattern) {
                Ok(ok) => {
                    if !ok {
                        failures += 1;
                    }
                }
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        Ok((failures as f64 / subsets as f64, EstimateMethod::Exact))
    } else {
        let mut failures = 0u64;
        for trial in 0..budget.trials {
            let mut r = rng::derive(seed, &[rng::tag::CONDITIONAL, i as u64, trial as u64]);
            let mut erased = random_subset(n, i, &mut r);
            erased.sort_unstable();
            let pattern = ErasurePattern { n, erased };
            if !decoder.block_decodable_stat(&pattern)? {
                failures += 1;
            }
        }
        Ok((
            failures as f64 / budget.trials as f64,
            EstimateMethod::MonteCarlo { trials: budget.trials },
        ))
    }
}

/// Full profile p(1..n) for one decoder.
pub fn failure_profile(
    g: &GeneratorMatrix,
    decoder: &dyn ErasureDecoder,
    budget: &EstimationBudget,
    seed: u64,
) -> Result<ConditionalFailureProfile> {
    let n = g.n;
    let mut p = vec![0.0; n + 1];
    let mut methods = vec![EstimateMethod::Exact; n + 1];
    for i in 1..=n {
        let (est, method) = conditional_failure_prob(g, decoder, i, budget, seed)?;
        p[i] = est;
        methods[i] = method;
    }
    ConditionalFailureProfile::from_parts(n, g.k, decoder.id(), p, methods)
}

/// P_e(eps) = sum_i C(n,i) eps^i (1-eps)^(n-i) p(i), evaluated in the log
/// domain so large-n binomial terms cannot overflow.
pub fn pe_from_conditionals(profile: &ConditionalFailureProfile, eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::input(format!("erasure probability {eps} outside [0,1]")));
    }
    let n = profile.n;
    if eps == 0.0 {
        return Ok(0.0);
    }
    if eps == 1.0 {
        return Ok(profile.p(n));
    }
    let ln_eps = eps.ln();
    let ln_comp = (1.0 - eps).ln();
    // Precompute ln-factorials once.
    let mut lf = vec![0.0; n + 1];
    for j in 1..=n {
        lf[j] = lf[j - 1] + (j as f64).ln();
    }
    let mut total = 0.0;
    for i in 1..=n {
        let pi = profile.p(i);
        if pi == 0.0 {
            continue;
        }
        let ln_term = lf[n] - lf[i] - lf[n - i] + i as f64 * ln_eps + (n - i) as f64 * ln_comp;
        total += pi * ln_term.exp();
    }
    Ok(total.min(1.0))
}

/// Failure statistics for a whole family of nested row-prefix codes from a
/// single pattern pass.
///
/// For an ordered full row set whose k-prefixes are the codes of interest
/// (Reed-Muller subcodes in weight order), a pattern makes the k-prefix code
/// fail exactly when the first row that is dependent on its predecessors
/// (restricted to unerased columns) appears at ordinal <= k. One elimination
/// per pattern therefore yields p(i) for every k simultaneously.
#[derive(Debug, Clone)]
pub struct PrefixFailureProfiles {
    n: usize,
    // cum[i][k] = Pr[first dependent ordinal <= k | i erasures], k = 0..=n.
    cum: Vec<Vec<f64>>,
    methods: Vec<EstimateMethod>,
    /// Patterns evaluated in total (budget accounting).
    pub patterns_evaluated: u64,
}

impl PrefixFailureProfiles {
    /// Profile of the k-prefix code, labeled as MAP (prefix failure is
    /// exactly the MAP rank condition).
    pub fn profile(&self, k: usize) -> Result<ConditionalFailureProfile> {
        if k == 0 || k > self.n {
            return Err(Error::input(format!("prefix dimension {k} outside 1..={}", self.n)));
        }
        let p = (0..=self.n).map(|i| self.cum[i][k]).collect();
        ConditionalFailureProfile::from_parts(
            self.n,
            k,
            "map".to_string(),
            p,
            self.methods.clone(),
        )
    }
}

/// First ordinal (1-based) at which a row of `ordered` restricted to
/// `keep` columns depends on its predecessors; rows.len()+1 if none.
fn first_dependent_ordinal(ordered: &crate::matrix::IntMatrix, keep: &[usize]) -> usize {
    let mut elim = crate::matrix::ColumnEliminator::new(keep.len());
    for j in 0..ordered.rows() {
        let full = ordered.row(j);
        let row: Vec<i64> = keep.iter().map(|&c| full[c]).collect();
        if !elim.feed(&row) {
            return j + 1;
        }
    }
    ordered.rows() + 1
}

/// Estimates prefix-failure profiles for the nested codes given by the row
/// order of `ordered` (a full n x n matrix). Dependence ordinals come from a
/// single-prime modular elimination per pattern; the per-pattern error
/// probability is below n^2/2^61, negligible against Monte-Carlo noise.
pub fn prefix_failure_profiles(
    ordered: &crate::matrix::IntMatrix,
    budget: &EstimationBudget,
    seed: u64,
) -> Result<PrefixFailureProfiles> {
    let n = ordered.rows();
    if ordered.cols() != n {
        return Err(Error::input("prefix profiles need the full square row-ordered matrix"));
    }
    let mut cum = vec![vec![0.0; n + 1]; n + 1];
    let mut methods = vec![EstimateMethod::Exact; n + 1];
    let mut patterns_evaluated = 0u64;
    for i in 1..=n {
        let mut counts = vec![0u64; n + 2];
        let subsets = binomial_capped(n, i, budget.enum_limit);
        let trials;
        if subsets <= budget.enum_limit {
            trials = subsets;
            for_each_combination(n, i, |idx| {
                let pattern = ErasurePattern { n, erased: idx.to_vec() };
                counts[first_dependent_ordinal(ordered, &pattern.unerased())] += 1;
            });
        } else {
            trials = budget.trials as u64;
            methods[i] = EstimateMethod::MonteCarlo { trials: budget.trials };
            for trial in 0..budget.trials {
                let mut r = rng::derive(seed, &[rng::tag::CONDITIONAL, i as u64, trial as u64]);
                let mut erased = random_subset(n, i, &mut r);
                erased.sort_unstable();
                let pattern = ErasurePattern { n, erased };
                counts[first_dependent_ordinal(ordered, &pattern.unerased())] += 1;
            }
        }
        patterns_evaluated += trials;
        let mut acc = 0u64;
        for k in 1..=n {
            acc += counts[k];
            cum[i][k] = acc as f64 / trials as f64;
        }
    }
    Ok(PrefixFailureProfiles { n, cum, methods, patterns_evaluated })
}

/// Standard-normal 97.5% quantile for Wilson 95% intervals.
pub(crate) const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // At the boundaries the interval endpoint is exactly the boundary; the
    // sqrt path leaves a ~1e-18 residue there, so pin it.
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlerPoint {
    pub eps: f64,
    pub bler: f64,
    pub trials: usize,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Monte-Carlo block error rate over an erasure-probability grid.
///
/// Pattern streams are keyed by (seed, grid index, trial) only, never by the
/// decoder, so curves taken with the same seed are trial-for-trial paired
/// across decoders and dominance comparisons are exact.
pub fn block_error_curve(
    g: &GeneratorMatrix,
    decoder: &dyn ErasureDecoder,
    eps_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<BlerPoint>> {
    if trials == 0 {
        return Err(Error::input("block_error_curve needs at least one trial"));
    }
    let mut out = Vec::with_capacity(eps_grid.len());
    for (gi, &eps) in eps_grid.iter().enumerate() {
        let mut failures = 0u64;
        for trial in 0..trials {
            let mut r = rng::derive(seed, &[rng::tag::BLER, gi as u64, trial as u64]);
            let pattern = sample_pattern(g.n, eps, &mut r)?;
            if !decoder.block_decodable_stat(&pattern)? {
                failures += 1;
            }
        }
        let (ci_low, ci_high) = wilson_interval(failures, trials as u64);
        out.push(BlerPoint {
            eps,
            bler: failures as f64 / trials as f64,
            trials,
            ci_low,
            ci_high,
        });
    }
    Ok(out)
}
