//! Iterative projection decoder for Reed-Muller codes on erasure channels.
//!
//! RM(m, r) evaluations live on the m-cube. Quotienting the cube by an
//! (r-1)-dimensional axis-aligned subspace, with a signed average over each
//! coset, carries the code onto a rank m-r+2 code on the quotient where
//! erasures are cheap to fill. Each filled quotient value then pins down any
//! original coordinate whose coset has a single remaining hole, and cycling
//! through all such subspaces a few times recovers far more patterns than a
//! bounded-distance decoder.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::channel::ErasurePattern;
use crate::codes::{rm_dimension, Family, GeneratorMatrix, MAX_KRONECKER_LEVELS};
use crate::decoder::{DecodeReport, ErasureDecoder};
use crate::error::Error;
use crate::matrix::{rational_to_f64, ColumnEliminator, IntMatrix};
use crate::Result;

/// One axis-aligned projection of the m-cube: the quotient by the span of
/// `dirs` together with the signed averaging that maps RM(m, r) onto a code
/// of rank m - r + 2 on the quotient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionPlan {
    pub m: usize,
    pub r: usize,
    /// 1-based axis labels spanning the subspace, ascending. Label j is
    /// coordinate bit m - j, so label 1 toggles the top bit.
    pub labels: Vec<usize>,
    /// Coordinate bit positions of `labels`, descending.
    pub dirs: Vec<usize>,
    /// OR of the direction bits.
    pub mask: usize,
    /// Cosets of the subspace: keyed by the representative with all `mask`
    /// bits clear, keys ascending, members ascending within each coset.
    pub cosets: Vec<Vec<usize>>,
    /// Projection sign for each of the 2^m coordinates: the product over
    /// directions of +1 when the coordinate has that bit set, else -1.
    pub coefficients: Vec<i8>,
    /// 2^(r-1); the signed coset sum is divided by this.
    pub normalizer: i64,
    /// ±1 generator of the projected code, one row per original generator
    /// row. Rows meeting the subspace collapse to the all-minus row; a
    /// surviving row i keeps +1 exactly at cosets whose key is covered by i.
    pub projected_generator: IntMatrix,
    /// Exact rank of `projected_generator`, always m - r + 2.
    pub projected_rank: usize,
    /// Indices of the first `projected_rank` independent rows of the
    /// projected generator, ascending.
    pub leaf_basis: Vec<usize>,
}

impl ProjectionPlan {
    /// Number of cosets (columns of the projected code).
    pub fn width(&self) -> usize {
        self.cosets.len()
    }

    /// Ordinal of the coset containing coordinate z: the rank of its key
    /// among all mask-free keys, i.e. z with the mask bits squeezed out.
    pub fn coset_ordinal(&self, z: usize) -> usize {
        let mut out = 0usize;
        let mut pos = 0;
        for b in 0..self.m {
            if self.mask >> b & 1 == 0 {
                out |= (z >> b & 1) << pos;
                pos += 1;
            }
        }
        out
    }

    fn labels_display(&self) -> String {
        let mut s = String::from("[");
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            let _ = write!(s, "e{l}");
        }
        s.push(']');
        s
    }
}

/// All distinct (r-1)-dimensional axis-aligned projections of RM(m, r),
/// ordered by their label sets lexicographically.
pub fn build_projection_plan(m: usize, r: usize) -> Result<Vec<ProjectionPlan>> {
    if r == 0 || r > m {
        return Err(Error::input(format!("rm order r={r} must satisfy 1 <= r <= m={m}")));
    }
    if m > MAX_KRONECKER_LEVELS {
        return Err(Error::Capacity(format!(
            "m={m} exceeds the supported {MAX_KRONECKER_LEVELS} Kronecker levels"
        )));
    }
    let n = 1usize << m;
    let s = r - 1;
    let gen_rows: Vec<usize> = (0..n).filter(|i| (i.count_ones() as usize) >= m - r).collect();
    let expected_rank = m - r + 2;
    let mut plans = Vec::new();
    for labels in label_subsets(m, s) {
        let dirs: Vec<usize> = labels.iter().map(|&j| m - j).collect();
        let mask: usize = dirs.iter().fold(0, |a, &d| a | (1 << d));
        let keys: Vec<usize> = (0..n).filter(|z| z & mask == 0).collect();
        let cosets: Vec<Vec<usize>> = keys
            .iter()
            .map(|&key| {
                let mut members = Vec::with_capacity(1 << s);
                let mut sub = 0usize;
                loop {
                    members.push(key | sub);
                    sub = sub.wrapping_sub(mask) & mask;
                    if sub == 0 {
                        break;
                    }
                }
                members
            })
            .collect();
        let coefficients: Vec<i8> = (0..n)
            .map(|z| {
                let neg = dirs.iter().filter(|&&d| z >> d & 1 == 0).count();
                if neg % 2 == 0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        let width = keys.len();
        let mut data = Vec::with_capacity(gen_rows.len() * width);
        for &i in &gen_rows {
            if i & mask != 0 {
                data.extend(std::iter::repeat(-1).take(width));
            } else {
                data.extend(keys.iter().map(|&key| if key & !i == 0 { 1 } else { -1 }));
            }
        }
        let projected_generator = IntMatrix::new(gen_rows.len(), width, data)?;
        let projected_rank = projected_generator.rank_exact();
        if projected_rank != expected_rank {
            return Err(Error::Construction(format!(
                "projection {labels:?} of rm(m={m}, r={r}) has rank {projected_rank}, expected {expected_rank}"
            )));
        }
        let leaf_basis = independent_row_prefix(&projected_generator, expected_rank);
        if leaf_basis.len() != expected_rank {
            return Err(Error::Construction(format!(
                "projection {labels:?} of rm(m={m}, r={r}): row basis came up short"
            )));
        }
        plans.push(ProjectionPlan {
            m,
            r,
            labels,
            dirs,
            mask,
            cosets,
            coefficients,
            normalizer: 1i64 << s,
            projected_generator,
            projected_rank,
            leaf_basis,
        });
    }
    Ok(plans)
}

/// Lexicographic s-subsets of {1, ..., m}.
fn label_subsets(m: usize, s: usize) -> Vec<Vec<usize>> {
    fn rec(next: usize, m: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for v in next..=m {
            if m - v + 1 < s - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, m, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, m, s, &mut Vec::with_capacity(s), &mut out);
    out
}

/// First `want` independent rows, ascending. Modular accepts are exact
/// independence certificates; if the single-prime pass ever under-collects
/// (a ~2^-61 event) the exact fallback settles it.
pub(crate) fn independent_row_prefix(mat: &IntMatrix, want: usize) -> Vec<usize> {
    let mut basis = Vec::with_capacity(want);
    let mut elim = ColumnEliminator::new(mat.cols());
    for idx in 0..mat.rows() {
        if basis.len() == want {
            return basis;
        }
        if elim.feed(mat.row(idx)) {
            basis.push(idx);
        }
    }
    if basis.len() < want {
        basis.clear();
        let mut sel: Vec<usize> = Vec::new();
        for idx in 0..mat.rows() {
            if basis.len() == want {
                break;
            }
            sel.push(idx);
            if mat.select_rows(&sel).rank_exact() == basis.len() + 1 {
                basis.push(idx);
            } else {
                sel.pop();
            }
        }
    }
    basis
}

pub const PLAN_SET_SCHEMA: &str = "codedc/plans/v1";

/// Serializable bundle of every projection plan for one (m, r), for on-disk
/// caching. Loading re-derives the plans and rejects any mismatch, so a stale
/// or edited cache cannot smuggle in a wrong projection; the cache buys
/// inspectability, not speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSet {
    pub schema: String,
    pub m: usize,
    pub r: usize,
    pub plans: Vec<ProjectionPlan>,
}

impl PlanSet {
    pub fn build(m: usize, r: usize) -> Result<PlanSet> {
        Ok(PlanSet {
            schema: PLAN_SET_SCHEMA.to_string(),
            m,
            r,
            plans: build_projection_plan(m, r)?,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan set serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<PlanSet> {
        let set: PlanSet = serde_json::from_str(text).map_err(|e| Error::input(format!("plan set JSON: {e}")))?;
        set.validate()?;
        Ok(set)
    }

    /// Full re-derivation check: schema marker, then plan-by-plan equality
    /// with a fresh build for this (m, r).
    pub fn validate(&self) -> Result<()> {
        if self.schema != PLAN_SET_SCHEMA {
            return Err(Error::input(format!(
                "unsupported plan set schema {:?}, expected {PLAN_SET_SCHEMA:?}",
                self.schema
            )));
        }
        let fresh = build_projection_plan(self.m, self.r)?;
        if self.plans != fresh {
            return Err(Error::input(format!(
                "plan set for rm(m={}, r={}) does not match its re-derivation; refusing stale or edited cache",
                self.m, self.r
            )));
        }
        Ok(())
    }
}

/// A received word pushed through one projection: one slot per coset, None
/// where any member of the coset was erased. `dirs` records which projection
/// produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedWord {
    pub entries: Vec<Option<f64>>,
    pub dirs: Vec<usize>,
}

/// Projects a partially known word onto the quotient cube of `plan`: slot t
/// receives the signed coset sum over members divided by the normalizer, and
/// is erased when any member is unknown.
pub fn project(plan: &ProjectionPlan, y: &[f64], known: &[bool]) -> Result<ProjectedWord> {
    let n = plan.coefficients.len();
    if y.len() != n || known.len() != n {
        return Err(Error::input(format!(
            "word length {} / flags length {} do not match code length {n}",
            y.len(),
            known.len()
        )));
    }
    for z in 0..n {
        if known[z] && !y[z].is_finite() {
            return Err(Error::input(format!("known coordinate {z} is not finite")));
        }
    }
    let entries = plan
        .cosets
        .iter()
        .map(|members| {
            members.iter().all(|&z| known[z]).then(|| {
                let s: f64 = members.iter().map(|&z| f64::from(plan.coefficients[z]) * y[z]).sum();
                s / plan.normalizer as f64
            })
        })
        .collect();
    Ok(ProjectedWord { entries, dirs: plan.dirs.clone() })
}

/// Fills erased quotient slots that are determined by the known ones.
///
/// A slot is recoverable exactly when its column of the projected generator
/// lies in the span of the known columns; the fill is the same rational
/// combination evaluated on the known entries, with no rounding until the
/// final conversion back to binary64.
pub fn decode_leaf(plan: &ProjectionPlan, word: &ProjectedWord) -> Result<ProjectedWord> {
    let width = plan.width();
    if word.entries.len() != width {
        return Err(Error::input(format!(
            "projected word length {} does not match plan width {width}",
            word.entries.len()
        )));
    }
    let mut known_ords = Vec::with_capacity(width);
    let mut erased_ords = Vec::new();
    for (t, e) in word.entries.iter().enumerate() {
        match e {
            Some(v) if !v.is_finite() => {
                return Err(Error::input(format!("projected entry {t} is not finite")));
            }
            Some(_) => known_ords.push(t),
            None => erased_ords.push(t),
        }
    }
    let mut out = word.clone();
    if erased_ords.is_empty() || known_ords.is_empty() {
        return Ok(out);
    }
    let basis = plan.projected_generator.select_rows(&plan.leaf_basis);
    let sub = basis.select_columns(&known_ords);
    let targets: Vec<Vec<i64>> = erased_ords.iter().map(|&e| basis.col(e)).collect();
    for (j, sol) in sub.solve_many_in_span(&targets).iter().enumerate() {
        let Some(w) = sol else { continue };
        let mut acc = BigRational::zero();
        for (u, &ord) in known_ords.iter().enumerate() {
            if w[u].is_zero() {
                continue;
            }
            let v = BigRational::from_float(word.entries[ord].expect("ord is known"))
                .expect("finiteness checked above");
            acc += &w[u] * v;
        }
        out.entries[erased_ords[j]] = Some(rational_to_f64(&acc));
    }
    Ok(out)
}

/// Pulls recovered quotient values back to original coordinates: any coset
/// with a known projection and exactly one unknown member determines that
/// member. Known coordinates are never overwritten, and fills become visible
/// to later cosets within the same call. Returns the filled indices,
/// ascending.
pub fn aggregate(
    plan: &ProjectionPlan,
    word: &ProjectedWord,
    y: &mut [f64],
    known: &mut [bool],
) -> Result<Vec<usize>> {
    let n = plan.coefficients.len();
    if y.len() != n || known.len() != n {
        return Err(Error::input(format!(
            "word length {} / flags length {} do not match code length {n}",
            y.len(),
            known.len()
        )));
    }
    if word.entries.len() != plan.width() {
        return Err(Error::input(format!(
            "projected word length {} does not match plan width {}",
            word.entries.len(),
            plan.width()
        )));
    }
    let mut filled = Vec::new();
    for (t, members) in plan.cosets.iter().enumerate() {
        let Some(pv) = word.entries[t] else { continue };
        let unknown: Vec<usize> = members.iter().copied().filter(|&z| !known[z]).collect();
        if unknown.len() != 1 {
            continue;
        }
        let z = unknown[0];
        let mut rest = 0.0;
        for &j in members {
            if j != z {
                rest += f64::from(plan.coefficients[j]) * y[j];
            }
        }
        y[z] = (plan.normalizer as f64 * pv - rest) * f64::from(plan.coefficients[z]);
        known[z] = true;
        filled.push(z);
    }
    filled.sort_unstable();
    Ok(filled)
}

/// Pass budgets that reach the decoder's fixpoint on the table codes; larger
/// codes default to 3 but any budget can be set explicitly.
pub fn default_n_max(m: usize, r: usize) -> usize {
    match (m, r) {
        (3, 2) => 1,
        (4, 2) => 2,
        (5, 3) => 2,
        (6, 3) => 3,
        _ => 3,
    }
}

/// Iterative projection decoder bound to one full RM(m, r) generator.
pub struct ProjectiveDecoder {
    m: usize,
    r: usize,
    n: usize,
    k: usize,
    n_max: usize,
    plans: Vec<ProjectionPlan>,
    /// Leaf-basis rows of each plan's projected generator.
    basis_mats: Vec<IntMatrix>,
    /// Per-plan memo of leaf decisions for the statistical path, keyed by
    /// the erased-coset bitmask while the quotient fits in 64 cosets.
    leaf_cache: Vec<Mutex<HashMap<u64, u64>>>,
}

impl ProjectiveDecoder {
    pub fn new(g: &GeneratorMatrix) -> Result<Self> {
        let (m, r) = Self::rm_params(g)?;
        Self::with_n_max(g, default_n_max(m, r))
    }

    pub fn with_n_max(g: &GeneratorMatrix, n_max: usize) -> Result<Self> {
        let (m, r) = Self::rm_params(g)?;
        Self::from_plans(g, build_projection_plan(m, r)?, n_max)
    }

    /// Builds from a cached plan set; the set is fully re-validated first.
    pub fn from_plan_set(g: &GeneratorMatrix, set: &PlanSet, n_max: Option<usize>) -> Result<Self> {
        let (m, r) = Self::rm_params(g)?;
        if set.m != m || set.r != r {
            return Err(Error::input(format!(
                "plan set is for rm(m={}, r={}) but the generator is rm(m={m}, r={r})",
                set.m, set.r
            )));
        }
        set.validate()?;
        Self::from_plans(g, set.plans.clone(), n_max.unwrap_or_else(|| default_n_max(m, r)))
    }

    fn from_plans(g: &GeneratorMatrix, plans: Vec<ProjectionPlan>, n_max: usize) -> Result<Self> {
        let (m, r) = Self::rm_params(g)?;
        if n_max == 0 {
            return Err(Error::input("pass budget must be at least 1"));
        }
        let basis_mats: Vec<IntMatrix> =
            plans.iter().map(|p| p.projected_generator.select_rows(&p.leaf_basis)).collect();
        let leaf_cache = plans.iter().map(|_| Mutex::new(HashMap::new())).collect();
        Ok(ProjectiveDecoder {
            m,
            r,
            n: g.n,
            k: g.k,
            n_max,
            plans,
            basis_mats,
            leaf_cache,
        })
    }

    fn rm_params(g: &GeneratorMatrix) -> Result<(usize, usize)> {
        if g.family != Family::Rm {
            return Err(Error::input(format!(
                "projection decoding requires a Reed-Muller generator, got family {}",
                g.family
            )));
        }
        let (Some(m), Some(r)) = (g.meta.m, g.meta.r) else {
            return Err(Error::input("Reed-Muller generator is missing its (m, r) metadata"));
        };
        if g.n != 1usize << m || g.k != rm_dimension(m, r) {
            return Err(Error::input(format!(
                "projection decoding requires the full rm(m={m}, r={r}) code ({}x{}), got {}x{}",
                rm_dimension(m, r),
                1usize << m,
                g.k,
                g.n
            )));
        }
        Ok((m, r))
    }

    pub fn plans(&self) -> &[ProjectionPlan] {
        &self.plans
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Decode with a deterministic line-by-line narration: the plan
    /// structures, every projected erasure, each leaf recovery and fill, and
    /// the stopping condition.
    pub fn decode_with_trace(&self, y: &[f64], pattern: &ErasurePattern) -> Result<(DecodeReport, String)> {
        let mut trace = String::new();
        let report = self.run_values(y, pattern, Some(&mut trace))?;
        Ok((report, trace))
    }

    /// (known ordinals, erased ordinals) of a plan's cosets under the
    /// current knowledge flags.
    fn coset_status(plan: &ProjectionPlan, known: &[bool]) -> (Vec<usize>, Vec<usize>) {
        let mut known_ords = Vec::with_capacity(plan.width());
        let mut erased_ords = Vec::new();
        for (t, members) in plan.cosets.iter().enumerate() {
            if members.iter().all(|&z| known[z]) {
                known_ords.push(t);
            } else {
                erased_ords.push(t);
            }
        }
        (known_ords, erased_ords)
    }

    /// Exact per-coset recoverability: erased ordinal e is recoverable iff
    /// its basis column lies in the span of the known basis columns.
    fn leaf_recover_exact(&self, pi: usize, known_ords: &[usize], erased_ords: &[usize]) -> Vec<bool> {
        if known_ords.is_empty() {
            return vec![false; erased_ords.len()];
        }
        let basis = &self.basis_mats[pi];
        let sub = basis.select_columns(known_ords);
        let base_rank = sub.rank_exact();
        if base_rank == basis.rows() {
            return vec![true; erased_ords.len()];
        }
        erased_ords
            .iter()
            .map(|&e| {
                let mut cols = known_ords.to_vec();
                cols.push(e);
                basis.select_columns(&cols).rank_exact() == base_rank
            })
            .collect()
    }

    /// Single-prime modular variant of [`Self::leaf_recover_exact`] with a
    /// per-plan memo; the memo key is the erased-coset bitmask, which also
    /// determines the known set.
    fn leaf_recover_stat(&self, pi: usize, known_ords: &[usize], erased_ords: &[usize]) -> Vec<bool> {
        if known_ords.is_empty() {
            return vec![false; erased_ords.len()];
        }
        let cacheable = self.plans[pi].width() <= 64;
        let key: u64 = if cacheable {
            erased_ords.iter().fold(0u64, |a, &t| a | 1u64 << t)
        } else {
            0
        };
        if cacheable {
            let memo = self.leaf_cache[pi].lock().expect("leaf memo lock");
            if let Some(&bits) = memo.get(&key) {
                return erased_ords.iter().map(|&t| bits >> t & 1 == 1).collect();
            }
        }
        let basis = &self.basis_mats[pi];
        let mut elim = ColumnEliminator::new(basis.rows());
        for &u in known_ords {
            elim.feed(&basis.col(u));
        }
        let rec: Vec<bool> = if elim.rank() == basis.rows() {
            vec![true; erased_ords.len()]
        } else {
            erased_ords.iter().map(|&e| elim.in_span(&basis.col(e))).collect()
        };
        if cacheable {
            let bits = erased_ords
                .iter()
                .zip(&rec)
                .fold(0u64, |a, (&t, &f)| if f { a | 1u64 << t } else { a });
            self.leaf_cache[pi].lock().expect("leaf memo lock").insert(key, bits);
        }
        rec
    }

    fn check_pattern(&self, pattern: &ErasurePattern) -> Result<()> {
        if pattern.n() != self.n {
            return Err(Error::input(format!(
                "pattern length {} does not match code length {}",
                pattern.n(),
                self.n
            )));
        }
        Ok(())
    }

    /// The boolean mirror of the value engine: same plan order, same leaf
    /// decisions, same fill rule and stopping conditions, no arithmetic.
    fn run_flags(&self, pattern: &ErasurePattern, exact: bool) -> Result<bool> {
        self.check_pattern(pattern)?;
        let mut known = vec![true; self.n];
        for &e in pattern.erased() {
            known[e] = false;
        }
        let mut missing = pattern.count();
        if missing == 0 {
            return Ok(true);
        }
        for _pass in 0..self.n_max {
            let mut progressed = false;
            for (pi, plan) in self.plans.iter().enumerate() {
                let (known_ords, erased_ords) = Self::coset_status(plan, &known);
                if erased_ords.is_empty() {
                    continue;
                }
                let rec = if exact {
                    self.leaf_recover_exact(pi, &known_ords, &erased_ords)
                } else {
                    self.leaf_recover_stat(pi, &known_ords, &erased_ords)
                };
                let mut proj_known: Vec<bool> = vec![false; plan.width()];
                for &t in &known_ords {
                    proj_known[t] = true;
                }
                for (j, &t) in erased_ords.iter().enumerate() {
                    if rec[j] {
                        proj_known[t] = true;
                    }
                }
                for (t, members) in plan.cosets.iter().enumerate() {
                    if !proj_known[t] {
                        continue;
                    }
                    let mut unknown = members.iter().copied().filter(|&z| !known[z]);
                    let (Some(z), None) = (unknown.next(), unknown.next()) else { continue };
                    known[z] = true;
                    missing -= 1;
                    progressed = true;
                }
                if missing == 0 {
                    return Ok(true);
                }
            }
            if !progressed {
                break;
            }
        }
        Ok(false)
    }

    /// Exact signed coset sum over known values, divided by the normalizer.
    fn project_exact(plan: &ProjectionPlan, t: usize, vals: &[Option<BigRational>]) -> BigRational {
        let mut acc = BigRational::zero();
        for &z in &plan.cosets[t] {
            let v = vals[z].as_ref().expect("coset fully known");
            if plan.coefficients[z] > 0 {
                acc += v;
            } else {
                acc -= v;
            }
        }
        acc / BigRational::from_integer(BigInt::from(plan.normalizer))
    }

    /// The value engine. All arithmetic is exact rational from the moment
    /// the known inputs are read until the report is written, so integer
    /// messages round-trip bit for bit and real messages lose nothing beyond
    /// their own representation.
    fn run_values(
        &self,
        y: &[f64],
        pattern: &ErasurePattern,
        mut trace: Option<&mut String>,
    ) -> Result<DecodeReport> {
        self.check_pattern(pattern)?;
        if y.len() != self.n {
            return Err(Error::input(format!(
                "word length {} does not match code length {}",
                y.len(),
                self.n
            )));
        }
        let mut known = vec![true; self.n];
        for &e in pattern.erased() {
            known[e] = false;
        }
        let mut vals: Vec<Option<BigRational>> = Vec::with_capacity(self.n);
        for z in 0..self.n {
            if known[z] {
                let v = BigRational::from_float(y[z])
                    .ok_or_else(|| Error::input(format!("known coordinate {z} is not finite")))?;
                vals.push(Some(v));
            } else {
                vals.push(None);
            }
        }
        if let Some(t) = trace.as_deref_mut() {
            let _ = writeln!(
                t,
                "rm(m={}, r={}) n={} k={} n_max={}",
                self.m, self.r, self.n, self.k, self.n_max
            );
            let _ = writeln!(t, "erased coordinates: {}", fmt_list(pattern.erased()));
            for (pi, plan) in self.plans.iter().enumerate() {
                let (_, erased_ords) = Self::coset_status(plan, &known);
                let _ = writeln!(
                    t,
                    "plan {}: dirs {}, cosets {}, projected erasures {}",
                    pi + 1,
                    plan.labels_display(),
                    fmt_cosets(&plan.cosets),
                    fmt_list(&erased_ords)
                );
            }
        }
        let mut missing = pattern.count();
        let mut iterations = 1;
        if missing > 0 {
            'outer: for pass in 1..=self.n_max {
                iterations = pass;
                if let Some(t) = trace.as_deref_mut() {
                    let _ = writeln!(t, "pass {pass}");
                }
                let mut progressed = false;
                for (pi, plan) in self.plans.iter().enumerate() {
                    let (known_ords, erased_ords) = Self::coset_status(plan, &known);
                    let mut line = format!(
                        "  plan {}: projected erasures {}",
                        pi + 1,
                        fmt_list(&erased_ords)
                    );
                    if erased_ords.is_empty() {
                        if let Some(t) = trace.as_deref_mut() {
                            line.push_str(", nothing to do");
                            let _ = writeln!(t, "{line}");
                        }
                        continue;
                    }
                    let mut proj: Vec<Option<BigRational>> = vec![None; plan.width()];
                    for &t in &known_ords {
                        proj[t] = Some(Self::project_exact(plan, t, &vals));
                    }
                    let mut rec_ords: Vec<usize> = Vec::new();
                    if !known_ords.is_empty() {
                        let basis = &self.basis_mats[pi];
                        let sub = basis.select_columns(&known_ords);
                        let targets: Vec<Vec<i64>> = erased_ords.iter().map(|&e| basis.col(e)).collect();
                        for (j, sol) in sub.solve_many_in_span(&targets).iter().enumerate() {
                            let Some(w) = sol else { continue };
                            let mut acc = BigRational::zero();
                            for (u, &ord) in known_ords.iter().enumerate() {
                                if !w[u].is_zero() {
                                    acc += &w[u] * proj[ord].as_ref().expect("known ordinal projected");
                                }
                            }
                            proj[erased_ords[j]] = Some(acc);
                            rec_ords.push(erased_ords[j]);
                        }
                    }
                    if trace.is_some() {
                        let _ = write!(line, ", leaf recovered {}", fmt_list(&rec_ords));
                    }
                    let mut fills: Vec<(usize, f64)> = Vec::new();
                    for (t, members) in plan.cosets.iter().enumerate() {
                        let Some(pv) = proj[t].as_ref() else { continue };
                        let mut unknown = members.iter().copied().filter(|&z| !known[z]);
                        let (Some(z), None) = (unknown.next(), unknown.next()) else { continue };
                        let mut cand = BigRational::from_integer(BigInt::from(plan.normalizer)) * pv;
                        for &j in members {
                            if j == z {
                                continue;
                            }
                            let vj = vals[j].as_ref().expect("only z is unknown");
                            if plan.coefficients[j] > 0 {
                                cand -= vj;
                            } else {
                                cand += vj;
                            }
                        }
                        if plan.coefficients[z] < 0 {
                            cand = -cand;
                        }
                        if trace.is_some() {
                            fills.push((z, rational_to_f64(&cand)));
                        }
                        vals[z] = Some(cand);
                        known[z] = true;
                        missing -= 1;
                        progressed = true;
                    }
                    if let Some(t) = trace.as_deref_mut() {
                        if fills.is_empty() {
                            line.push_str(", no new fills");
                        } else {
                            line.push_str(", filled ");
                            for (i, (z, v)) in fills.iter().enumerate() {
                                if i > 0 {
                                    line.push_str(", ");
                                }
                                let _ = write!(line, "y[{z}] = {v}");
                            }
                        }
                        let _ = writeln!(t, "{line}");
                    }
                    if missing == 0 {
                        if let Some(t) = trace.as_deref_mut() {
                            let _ = writeln!(t, "  all erasures recovered");
                        }
                        break 'outer;
                    }
                }
                if !progressed {
                    if let Some(t) = trace.as_deref_mut() {
                        let _ = writeln!(t, "  no progress in this pass");
                    }
                    break;
                }
            }
        }
        let recovered: Vec<usize> = pattern.erased().iter().copied().filter(|&z| known[z]).collect();
        if !recovered.is_empty() {
            self.verify_cross_plan(pattern, &known, &vals)?;
        }
        let values: Vec<f64> = recovered
            .iter()
            .map(|&z| rational_to_f64(vals[z].as_ref().expect("recovered implies value")))
            .collect();
        let success = missing == 0;
        if let Some(t) = trace.as_deref_mut() {
            let _ = writeln!(
                t,
                "success: {success}, iterations: {iterations}, recovered: {}",
                fmt_list(&recovered)
            );
        }
        Ok(DecodeReport {
            success,
            recovered,
            values,
            iterations,
            decoder: self.id(),
        })
    }

    /// Cross-plan agreement sweep over the completed word.
    ///
    /// Each fill satisfies the relation of the plan that produced it by
    /// construction, so it is checked here against every other plan instead:
    /// wherever a coset holding a recovered coordinate has its projection
    /// implied by the plan's remaining cosets, the implied and direct values
    /// must agree. A received word inconsistent with the code trips this.
    fn verify_cross_plan(
        &self,
        pattern: &ErasurePattern,
        known: &[bool],
        vals: &[Option<BigRational>],
    ) -> Result<()> {
        for (pi, plan) in self.plans.iter().enumerate() {
            let basis = &self.basis_mats[pi];
            let (known_ords, _) = Self::coset_status(plan, known);
            if known_ords.len() < 2 {
                continue;
            }
            let mut proj: Vec<Option<BigRational>> = vec![None; plan.width()];
            for &t in &known_ords {
                proj[t] = Some(Self::project_exact(plan, t, vals));
            }
            for &t in &known_ords {
                if !plan.cosets[t].iter().any(|&z| pattern.is_erased(z)) {
                    continue;
                }
                let others: Vec<usize> = known_ords.iter().copied().filter(|&u| u != t).collect();
                let sub = basis.select_columns(&others);
                let Some(w) = sub.solve_in_span(&basis.col(t))? else { continue };
                let mut implied = BigRational::zero();
                for (u, &ord) in others.iter().enumerate() {
                    if !w[u].is_zero() {
                        implied += &w[u] * proj[ord].as_ref().expect("known ordinal projected");
                    }
                }
                let direct = proj[t].as_ref().expect("known ordinal projected");
                if &implied != direct {
                    let a = rational_to_f64(&implied);
                    let b = rational_to_f64(direct);
                    if (a - b).abs() > 1e-6 * a.abs().max(b.abs()) {
                        return Err(Error::Numeric(format!(
                            "projections disagree: plan {} coset {t} projects to {b} directly but {a} \
                             through its siblings; the received word is not consistent with rm(m={}, r={})",
                            pi + 1,
                            self.m,
                            self.r
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

impl ErasureDecoder for ProjectiveDecoder {
    fn id(&self) -> String {
        "rm-projective".to_string()
    }

    fn block_decodable(&self, pattern: &ErasurePattern) -> Result<bool> {
        self.run_flags(pattern, true)
    }

    fn block_decodable_stat(&self, pattern: &ErasurePattern) -> Result<bool> {
        self.run_flags(pattern, false)
    }

    fn decode(&self, y: &[f64], pattern: &ErasurePattern) -> Result<DecodeReport> {
        self.run_values(y, pattern, None)
    }
}

fn fmt_list<T: std::fmt::Display>(items: &[T]) -> String {
    let mut s = String::from("[");
    for (i, v) in items.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{v}");
    }
    s.push(']');
    s
}

fn fmt_cosets(cosets: &[Vec<usize>]) -> String {
    let mut s = String::new();
    for (i, members) in cosets.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push('{');
        for (j, z) in members.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            let _ = write!(s, "{z}");
        }
        s.push('}');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{polar_generator, rm_generator, rm_subcode_generator};
    use crate::map::MapDecoder;
    use crate::rng;
    use rand::Rng;

    fn encode_int(g: &GeneratorMatrix, x: &[i64]) -> Vec<f64> {
        let gm = g.binary().expect("binary generator");
        (0..g.n)
            .map(|z| (0..g.k).map(|i| x[i] as f64 * gm.get(i, z) as f64).sum())
            .collect()
    }

    fn test_message(k: usize, seed: u64) -> Vec<i64> {
        let mut rng = rng::derive(seed, &[0x7e57, k as u64]);
        (0..k).map(|_| rng.gen_range(-9..=9)).collect()
    }

    #[test]
    fn plan_counts_match_label_subsets() {
        for (m, r, expect) in [(3, 2, 3), (4, 2, 4), (5, 3, 10), (6, 3, 15)] {
            assert_eq!(build_projection_plan(m, r).unwrap().len(), expect, "rm({m},{r})");
        }
    }

    #[test]
    fn m3_plans_have_the_narrated_coset_structure() {
        let plans = build_projection_plan(3, 2).unwrap();
        let cosets: Vec<Vec<Vec<usize>>> = plans.iter().map(|p| p.cosets.clone()).collect();
        assert_eq!(cosets[0], vec![vec![0, 4], vec![1, 5], vec![2, 6], vec![3, 7]]);
        assert_eq!(cosets[1], vec![vec![0, 2], vec![1, 3], vec![4, 6], vec![5, 7]]);
        assert_eq!(cosets[2], vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]]);
        assert_eq!(plans[0].labels, vec![1]);
        assert_eq!(plans[0].dirs, vec![2]);
        // The erasure at coordinate 4 lands in quotient slot 0 under the
        // first plan and slot 2 under the other two.
        assert_eq!(plans[0].coset_ordinal(4), 0);
        assert_eq!(plans[1].coset_ordinal(4), 2);
        assert_eq!(plans[2].coset_ordinal(4), 2);
    }

    #[test]
    fn projected_rank_is_quotient_dimension_for_all_small_codes() {
        for m in 1..=8 {
            for r in 1..=m {
                let plans = build_projection_plan(m, r).unwrap();
                for p in &plans {
                    assert_eq!(p.projected_rank, m - r + 2, "rm({m},{r}) labels {:?}", p.labels);
                    assert_eq!(p.leaf_basis.len(), m - r + 2);
                    assert_eq!(p.width(), 1 << (m - r + 1));
                }
            }
        }
    }

    #[test]
    fn first_order_plan_is_the_identity_projection() {
        let plans = build_projection_plan(4, 1).unwrap();
        assert_eq!(plans.len(), 1);
        let p = &plans[0];
        assert!(p.dirs.is_empty());
        assert_eq!(p.normalizer, 1);
        assert_eq!(p.width(), 16);
        assert!(p.coefficients.iter().all(|&c| c == 1));
        assert_eq!(p.projected_rank, 5);
        let y: Vec<f64> = (0..16).map(|z| z as f64).collect();
        let pw = project(p, &y, &vec![true; 16]).unwrap();
        assert_eq!(pw.entries, y.iter().map(|&v| Some(v)).collect::<Vec<_>>());
    }

    #[test]
    fn top_order_plans_have_two_cosets() {
        let plans = build_projection_plan(3, 3).unwrap();
        assert_eq!(plans.len(), 3);
        for p in &plans {
            assert_eq!(p.width(), 2);
            assert_eq!(p.projected_rank, 2);
            assert_eq!(p.normalizer, 4);
        }
    }

    #[test]
    fn projection_is_a_signed_difference_for_one_direction() {
        let plans = build_projection_plan(2, 2).unwrap();
        let p = &plans[0];
        assert_eq!(p.mask, 2);
        let y = [10.0, 20.0, 34.0, 48.0];
        let pw = project(p, &y, &[true; 4]).unwrap();
        assert_eq!(pw.entries, vec![Some(12.0), Some(14.0)]);
        let erased = project(p, &y, &[true, false, true, true]).unwrap();
        assert_eq!(erased.entries, vec![Some(12.0), None]);
    }

    #[test]
    fn leaf_fills_match_the_true_projection() {
        let g = rm_generator(4, 2).unwrap();
        let x = test_message(g.k, 11);
        let y = encode_int(&g, &x);
        for plan in &build_projection_plan(4, 2).unwrap() {
            let full = project(plan, &y, &vec![true; g.n]).unwrap();
            for t in 0..plan.width() {
                let mut holed = full.clone();
                holed.entries[t] = None;
                let fixed = decode_leaf(plan, &holed).unwrap();
                assert_eq!(fixed.entries[t], full.entries[t], "plan {:?} slot {t}", plan.labels);
            }
        }
    }

    #[test]
    fn leaf_with_nothing_known_is_a_no_op() {
        let plan = &build_projection_plan(3, 2).unwrap()[0];
        let word = ProjectedWord { entries: vec![None; 4], dirs: plan.dirs.clone() };
        assert_eq!(decode_leaf(plan, &word).unwrap(), word);
    }

    #[test]
    fn aggregate_fills_single_holes_and_never_overwrites() {
        let plan = &build_projection_plan(2, 2).unwrap()[0];
        let truth = [10.0, 20.0, 34.0, 48.0];
        let pw = project(plan, &truth, &[true; 4]).unwrap();
        let mut y = [10.0, 20.0, 0.0, 48.0];
        let mut known = [true, true, false, true];
        let filled = aggregate(plan, &pw, &mut y, &mut known).unwrap();
        assert_eq!(filled, vec![2]);
        assert_eq!(y[2], 34.0);
        // A second call sees no holes and must leave a planted wrong value.
        y[2] = -1.0;
        let again = aggregate(plan, &pw, &mut y, &mut known).unwrap();
        assert!(again.is_empty());
        assert_eq!(y[2], -1.0);
    }

    #[test]
    fn single_erasure_round_trip_matches_the_narration() {
        let g = rm_generator(3, 2).unwrap();
        let x = test_message(g.k, 1);
        let y = encode_int(&g, &x);
        let dec = ProjectiveDecoder::new(&g).unwrap();
        assert_eq!(dec.n_max(), 1);
        let pattern = ErasurePattern::new(8, vec![4]).unwrap();
        let report = dec.decode(&y, &pattern).unwrap();
        assert!(report.success);
        assert_eq!(report.iterations, 1);
        assert_eq!(report.recovered, vec![4]);
        assert_eq!(report.values, vec![y[4]]);
        assert_eq!(report.decoder, "rm-projective");
    }

    #[test]
    fn trace_narrates_structure_passes_and_outcome() {
        let g = rm_generator(3, 2).unwrap();
        let x = test_message(g.k, 1);
        let y = encode_int(&g, &x);
        let dec = ProjectiveDecoder::new(&g).unwrap();
        let pattern = ErasurePattern::new(8, vec![4]).unwrap();
        let (report, trace) = dec.decode_with_trace(&y, &pattern).unwrap();
        assert!(report.success);
        let expected = format!(
            "rm(m=3, r=2) n=8 k=7 n_max=1\n\
             erased coordinates: [4]\n\
             plan 1: dirs [e1], cosets {{0,4}} {{1,5}} {{2,6}} {{3,7}}, projected erasures [0]\n\
             plan 2: dirs [e2], cosets {{0,2}} {{1,3}} {{4,6}} {{5,7}}, projected erasures [2]\n\
             plan 3: dirs [e3], cosets {{0,1}} {{2,3}} {{4,5}} {{6,7}}, projected erasures [2]\n\
             pass 1\n\
             \x20 plan 1: projected erasures [0], leaf recovered [0], filled y[4] = {}\n\
             \x20 all erasures recovered\n\
             success: true, iterations: 1, recovered: [4]\n",
            y[4]
        );
        assert_eq!(trace, expected);
    }

    #[test]
    fn zero_erasures_succeed_in_one_pass() {
        let g = rm_generator(4, 2).unwrap();
        let y = encode_int(&g, &test_message(g.k, 3));
        let dec = ProjectiveDecoder::new(&g).unwrap();
        let report = dec.decode(&y, &ErasurePattern::empty(16)).unwrap();
        assert!(report.success);
        assert_eq!(report.iterations, 1);
        assert!(report.recovered.is_empty());
        assert!(dec.block_decodable(&ErasurePattern::empty(16)).unwrap());
    }

    #[test]
    fn erased_entries_of_the_input_are_ignored() {
        let g = rm_generator(3, 2).unwrap();
        let x = test_message(g.k, 5);
        let mut y = encode_int(&g, &x);
        let truth = y[4];
        y[4] = f64::NAN;
        let dec = ProjectiveDecoder::new(&g).unwrap();
        let pattern = ErasurePattern::new(8, vec![4]).unwrap();
        let report = dec.decode(&y, &pattern).unwrap();
        assert!(report.success);
        assert_eq!(report.recovered_value(4), Some(truth));
    }

    #[test]
    fn full_erasure_fails_without_recovering_anything() {
        let g = rm_generator(3, 2).unwrap();
        let y = vec![0.0; 8];
        let dec = ProjectiveDecoder::new(&g).unwrap();
        let pattern = ErasurePattern::new(8, (0..8).collect()).unwrap();
        let report = dec.decode(&y, &pattern).unwrap();
        assert!(!report.success);
        assert!(report.recovered.is_empty());
        assert!(!dec.block_decodable(&pattern).unwrap());
    }

    #[test]
    fn integer_messages_round_trip_exactly_on_rm42() {
        let g = rm_generator(4, 2).unwrap();
        let x = test_message(g.k, 7);
        let y = encode_int(&g, &x);
        let dec = ProjectiveDecoder::new(&g).unwrap();
        let mut rng = rng::derive(7, &[0x42]);
        let mut decodable = 0usize;
        for trial in 0..400 {
            let weight = rng.gen_range(0..=8);
            let mut flags = vec![false; 16];
            for _ in 0..weight {
                flags[rng.gen_range(0..16)] = true;
            }
            let pattern = ErasurePattern::from_flags(&flags);
            let report = dec.decode(&y, &pattern).unwrap();
            assert_eq!(
                report.success,
                dec.block_decodable(&pattern).unwrap(),
                "trial {trial} pattern {:?}",
                pattern.erased()
            );
            if report.success {
                decodable += 1;
                for (pos, &z) in report.recovered.iter().enumerate() {
                    assert_eq!(report.values[pos], y[z], "coordinate {z}");
                }
            }
        }
        assert!(decodable > 100, "sampled patterns were almost all undecodable: {decodable}");
    }

    #[test]
    fn real_messages_round_trip_to_relative_1e9() {
        let g = rm_generator(4, 2).unwrap();
        let mut rng = rng::derive(9, &[0x9e31]);
        let x: Vec<f64> = (0..g.k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let gm = g.binary().unwrap();
        let y: Vec<f64> =
            (0..g.n).map(|z| (0..g.k).map(|i| x[i] * gm.get(i, z) as f64).sum()).collect();
        let dec = ProjectiveDecoder::new(&g).unwrap();
        let pattern = ErasurePattern::new(16, vec![0, 7, 12]).unwrap();
        let report = dec.decode(&y, &pattern).unwrap();
        assert!(report.success);
        for (pos, &z) in report.recovered.iter().enumerate() {
            let err = (report.values[pos] - y[z]).abs();
            assert!(err <= 1e-9 * y[z].abs().max(1.0), "coordinate {z} err {err}");
        }
    }

    #[test]
    fn map_decoder_dominates_projection_decoding() {
        for (m, r) in [(3, 2), (4, 2)] {
            let g = rm_generator(m, r).unwrap();
            let dec = ProjectiveDecoder::new(&g).unwrap();
            let map = MapDecoder::new(g.clone());
            let n = g.n;
            if n <= 8 {
                for bits in 0..(1u32 << n) {
                    let flags: Vec<bool> = (0..n).map(|z| bits >> z & 1 == 1).collect();
                    let pattern = ErasurePattern::from_flags(&flags);
                    if dec.block_decodable(&pattern).unwrap() {
                        assert!(map.block_decodable(&pattern).unwrap(), "pattern {bits:b}");
                    }
                }
            } else {
                let mut rng = rng::derive(13, &[m as u64, r as u64]);
                for _ in 0..1500 {
                    let flags: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.3)).collect();
                    let pattern = ErasurePattern::from_flags(&flags);
                    if dec.block_decodable(&pattern).unwrap() {
                        assert!(
                            map.block_decodable(&pattern).unwrap(),
                            "pattern {:?}",
                            pattern.erased()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn more_information_never_hurts() {
        let g = rm_generator(4, 2).unwrap();
        let dec = ProjectiveDecoder::new(&g).unwrap();
        let mut rng = rng::derive(17, &[0x3000]);
        for _ in 0..300 {
            let flags: Vec<bool> = (0..16).map(|_| rng.gen_bool(0.35)).collect();
            let pattern = ErasurePattern::from_flags(&flags);
            if !dec.block_decodable(&pattern).unwrap() {
                continue;
            }
            for drop in pattern.erased() {
                let sub: Vec<usize> =
                    pattern.erased().iter().copied().filter(|z| z != drop).collect();
                let smaller = ErasurePattern::new(16, sub).unwrap();
                assert!(dec.block_decodable(&smaller).unwrap(), "removing {drop} broke decoding");
            }
        }
    }

    #[test]
    fn extra_passes_only_add_decodable_patterns() {
        let g = rm_generator(5, 3).unwrap();
        let one = ProjectiveDecoder::with_n_max(&g, 1).unwrap();
        let two = ProjectiveDecoder::with_n_max(&g, 2).unwrap();
        // A pattern where the second pass is what makes the difference.
        let witness = ErasurePattern::new(32, vec![3, 6, 17, 26, 27, 29]).unwrap();
        assert!(!one.block_decodable(&witness).unwrap());
        assert!(two.block_decodable(&witness).unwrap());
        let mut rng = rng::derive(19, &[0xa55]);
        for _ in 0..400 {
            let flags: Vec<bool> = (0..32).map(|_| rng.gen_bool(0.2)).collect();
            let pattern = ErasurePattern::from_flags(&flags);
            let a = one.block_decodable(&pattern).unwrap();
            let b = two.block_decodable(&pattern).unwrap();
            assert!(!a || b, "pattern {:?}", pattern.erased());
        }
    }

    #[test]
    fn statistical_and_exact_paths_agree() {
        let g = rm_generator(5, 3).unwrap();
        let dec = ProjectiveDecoder::new(&g).unwrap();
        let mut rng = rng::derive(23, &[0x57a7]);
        for _ in 0..500 {
            let flags: Vec<bool> = (0..32).map(|_| rng.gen_bool(0.35)).collect();
            let pattern = ErasurePattern::from_flags(&flags);
            assert_eq!(
                dec.block_decodable(&pattern).unwrap(),
                dec.block_decodable_stat(&pattern).unwrap(),
                "pattern {:?}",
                pattern.erased()
            );
        }
    }

    #[test]
    fn plan_set_round_trips_and_rejects_tampering() {
        let set = PlanSet::build(4, 2).unwrap();
        let text = set.to_json();
        assert_eq!(PlanSet::from_json(&text).unwrap(), set);
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["plans"][0]["cosets"][0][0] = serde_json::json!(1);
        assert!(matches!(
            PlanSet::from_json(&doc.to_string()),
            Err(Error::Input(_))
        ));
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["schema"] = serde_json::json!("codedc/plans/v0");
        assert!(matches!(
            PlanSet::from_json(&doc.to_string()),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn plan_set_from_the_wrong_code_is_rejected() {
        let g = rm_generator(4, 2).unwrap();
        let set = PlanSet::build(4, 3).unwrap();
        assert!(matches!(
            ProjectiveDecoder::from_plan_set(&g, &set, None),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn from_plan_set_matches_direct_construction() {
        let g = rm_generator(4, 2).unwrap();
        let set = PlanSet::build(4, 2).unwrap();
        let dec = ProjectiveDecoder::from_plan_set(&g, &set, None).unwrap();
        assert_eq!(dec.n_max(), default_n_max(4, 2));
        let y = encode_int(&g, &test_message(g.k, 29));
        let pattern = ErasurePattern::new(16, vec![1, 6]).unwrap();
        let report = dec.decode(&y, &pattern).unwrap();
        assert!(report.success);
    }

    #[test]
    fn non_rm_generators_are_rejected() {
        let polar = polar_generator(3, 4, 0.5).unwrap();
        assert!(matches!(ProjectiveDecoder::new(&polar), Err(Error::Input(_))));
        let sub = rm_subcode_generator(4, 9).unwrap();
        assert!(matches!(ProjectiveDecoder::new(&sub), Err(Error::Input(_))));
    }

    #[test]
    fn invalid_orders_are_rejected() {
        assert!(matches!(build_projection_plan(3, 0), Err(Error::Input(_))));
        assert!(matches!(build_projection_plan(3, 4), Err(Error::Input(_))));
    }

    #[test]
    fn corrupt_words_trip_the_cross_plan_check() {
        let g = rm_generator(4, 2).unwrap();
        let x = test_message(g.k, 31);
        let mut y = encode_int(&g, &x);
        y[5] += 3.0;
        let dec = ProjectiveDecoder::new(&g).unwrap();
        let pattern = ErasurePattern::new(16, vec![0]).unwrap();
        assert!(matches!(dec.decode(&y, &pattern), Err(Error::Numeric(_))));
    }
}
