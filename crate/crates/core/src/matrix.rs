//! Exact and floating linear algebra for small integer matrices.
//!
//! Decoding over an erasure channel succeeds or fails on a rank condition, so
//! rank and span membership must be decided exactly, never through a floating
//! tolerance. The integer path here guarantees that:
//!
//! * a fast modular elimination over p = 2^61 - 1 *certifies* full rank
//!   (rank mod p never exceeds the rational rank, so a full-rank verdict mod
//!   p is already exact);
//! * any deficient verdict is confirmed with fraction-free Bareiss
//!   elimination in checked i128, escalating to arbitrary precision if an
//!   intermediate minor overflows.
//!
//! Condition numbers are observables, not decisions, and use a one-sided
//! Jacobi singular value iteration in binary64.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::Result;

/// Mersenne prime modulus for the fast rank path.
pub(crate) const P: u64 = (1 << 61) - 1;

#[inline]
pub(crate) fn mod_p(x: i64) -> u64 {
    x.rem_euclid(P as i64) as u64
}

/// (a * b) mod (2^61 - 1) without division: fold the high 61 bits back in.
#[inline]
pub(crate) fn mul_p(a: u64, b: u64) -> u64 {
    let t = a as u128 * b as u128;
    let folded = (t & P as u128) + (t >> 61);
    let s = (folded & P as u128) + (folded >> 61);
    let s = s as u64;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_p(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

/// a^(p-2) mod p; p is prime so this is the inverse for a != 0.
pub(crate) fn inv_p(a: u64) -> u64 {
    debug_assert!(a != 0);
    let mut base = a;
    let mut exp = P - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_p(acc, base);
        }
        base = mul_p(base, base);
        exp >>= 1;
    }
    acc
}

/// Dense row-major matrix with exact integer entries.
///
/// Entries of interest are ±1 and small sums thereof; i64 storage is exact
/// for everything constructed here, and elimination intermediates that could
/// outgrow machine words are handled in i128 or arbitrary precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if rows == 0 {
            return Err(Error::input("IntMatrix requires at least one row"));
        }
        if data.len() != rows * cols {
            return Err(Error::input(format!(
                "entry storage length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::input("IntMatrix requires at least one row"));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::input("ragged rows"));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        Ok(IntMatrix { rows: r, cols: c, data })
    }

    pub fn identity(k: usize) -> Self {
        let mut data = vec![0; k * k];
        for i in 0..k {
            data[i * k + i] = 1;
        }
        IntMatrix { rows: k, cols: k, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<i64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut data = vec![0; self.rows * self.cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                data[c * self.rows + r] = self.get(r, c);
            }
        }
        IntMatrix { rows: self.cols, cols: self.rows, data }
    }

    /// Submatrix keeping `keep` columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(self.rows * keep.len());
        for r in 0..self.rows {
            let row = self.row(r);
            data.extend(keep.iter().map(|&c| row[c]));
        }
        IntMatrix { rows: self.rows, cols: keep.len(), data }
    }

    /// Submatrix keeping `keep` rows, in the given order.
    pub fn select_rows(&self, keep: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(keep.len() * self.cols);
        for &r in keep {
            data.extend_from_slice(self.row(r));
        }
        IntMatrix { rows: keep.len(), cols: self.cols, data }
    }

    pub fn to_float(&self) -> FloatMatrix {
        FloatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x as f64).collect(),
        }
    }

    /// Rank over the rationals, decided exactly.
    ///
    /// Full-rank verdicts come from the modular elimination alone (they are
    /// already certificates); deficient verdicts are re-derived with exact
    /// fraction-free elimination.
    pub fn rank_exact(&self) -> usize {
        if self.cols == 0 {
            return 0;
        }
        let full = self.rows.min(self.cols);
        if self.rank_mod_p() == full {
            return full;
        }
        self.rank_fraction_free()
    }

    pub(crate) fn rank_mod_p(&self) -> usize {
        let mut elim = ColumnEliminator::new(self.cols);
        let mut rank = 0;
        for r in 0..self.rows {
            let row: Vec<u64> = self.row(r).iter().map(|&x| mod_p(x)).collect();
            if elim.feed_residues(row) {
                rank += 1;
                if rank == self.cols {
                    break;
                }
            }
        }
        rank
    }

    /// Fraction-free (Bareiss) elimination: all intermediates are minors of
    /// the input, so every division is exact. i64 ±1-ish inputs stay within
    /// i128 up to ~40-dimensional minors (Hadamard bound); larger inputs fall
    /// back to arbitrary precision.
    pub(crate) fn rank_fraction_free(&self) -> usize {
        match self.rank_bareiss_i128() {
            Some(rank) => rank,
            None => self.rank_bareiss_big(),
        }
    }

    fn rank_bareiss_i128(&self) -> Option<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut m: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let at = |m: &Vec<i128>, r: usize, c: usize| m[r * cols + c];
        let mut prev: i128 = 1;
        let mut rank = 0;
        let mut row_of: Vec<usize> = (0..rows).collect();
        let mut col_of: Vec<usize> = (0..cols).collect();
        while rank < rows.min(cols) {
            // Pivot search over the remaining block.
            let mut pivot = None;
            'search: for i in rank..rows {
                for j in rank..cols {
                    if at(&m, row_of[i], col_of[j]) != 0 {
                        pivot = Some((i, j));
                        break 'search;
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            row_of.swap(rank, pi);
            col_of.swap(rank, pj);
            let pr = row_of[rank];
            let pc = col_of[rank];
            let piv = at(&m, pr, pc);
            for i in rank + 1..rows {
                let ri = row_of[i];
                let fac = at(&m, ri, pc);
                for j in rank + 1..cols {
                    let cj = col_of[j];
                    let a = piv.checked_mul(at(&m, ri, cj))?;
                    let b = fac.checked_mul(at(&m, pr, cj))?;
                    let num = a.checked_sub(b)?;
                    debug_assert_eq!(num % prev, 0, "Bareiss division must be exact");
                    m[ri * cols + cj] = num / prev;
                }
                m[ri * cols + pc] = 0;
            }
            prev = piv;
            rank += 1;
        }
        Some(rank)
    }

    fn rank_bareiss_big(&self) -> usize {
        let (rows, cols) = (self.rows, self.cols);
        let mut m: Vec<BigInt> = self.data.iter().map(|&x| BigInt::from(x)).collect();
        let mut prev = BigInt::one();
        let mut rank = 0;
        let mut row_of: Vec<usize> = (0..rows).collect();
        let mut col_of: Vec<usize> = (0..cols).collect();
        while rank < rows.min(cols) {
            let mut pivot = None;
            'search: for i in rank..rows {
                for j in rank..cols {
                    if !m[row_of[i] * cols + col_of[j]].is_zero() {
                        pivot = Some((i, j));
                        break 'search;
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            row_of.swap(rank, pi);
            col_of.swap(rank, pj);
            let pr = row_of[rank];
            let pc = col_of[rank];
            let piv = m[pr * cols + pc].clone();
            for i in rank + 1..rows {
                let ri = row_of[i];
                let fac = m[ri * cols + pc].clone();
                for j in rank + 1..cols {
                    let cj = col_of[j];
                    let num = &piv * &m[ri * cols + cj] - &fac * &m[pr * cols + cj];
                    m[ri * cols + cj] = num / &prev;
                }
                m[ri * cols + pc] = BigInt::zero();
            }
            prev = piv;
            rank += 1;
        }
        rank
    }

    /// Coefficients w with M w = target, exactly, when target lies in the
    /// column span of M; None otherwise.
    pub fn solve_in_span(&self, target: &[i64]) -> Result<Option<Vec<BigRational>>> {
        if target.len() != self.rows {
            return Err(Error::input(format!(
                "target length {} does not match row count {}",
                target.len(),
                self.rows
            )));
        }
        Ok(self.solve_many_in_span(&[target.to_vec()]).pop().unwrap())
    }

    /// Span test plus coefficient extraction for many targets at once.
    ///
    /// One exact row reduction of [M | T] with pivots restricted to the
    /// columns of M serves every target. Membership decisions are exact zero
    /// tests on rationals; no tolerance is involved.
    pub fn solve_many_in_span(&self, targets: &[Vec<i64>]) -> Vec<Option<Vec<BigRational>>> {
        let k = self.rows;
        let c = self.cols;
        let t = targets.len();
        let width = c + t;
        let mut m: Vec<BigRational> = Vec::with_capacity(k * width);
        for r in 0..k {
            for v in self.row(r) {
                m.push(BigRational::from(BigInt::from(*v)));
            }
            for tgt in targets {
                m.push(BigRational::from(BigInt::from(tgt[r])));
            }
        }
        // Forward elimination with pivots only in the first c columns.
        let mut pivot_cols: Vec<usize> = Vec::new();
        let mut rank = 0;
        for col in 0..c {
            let Some(pr) = (rank..k).find(|&r| !m[r * width + col].is_zero()) else {
                continue;
            };
            for j in 0..width {
                m.swap(rank * width + j, pr * width + j);
            }
            let inv = m[rank * width + col].recip();
            for j in col..width {
                let v = &m[rank * width + j] * &inv;
                m[rank * width + j] = v;
            }
            for r in 0..k {
                if r == rank || m[r * width + col].is_zero() {
                    continue;
                }
                let fac = m[r * width + col].clone();
                for j in col..width {
                    let v = &m[r * width + j] - &fac * &m[rank * width + j];
                    m[r * width + j] = v;
                }
            }
            pivot_cols.push(col);
            rank += 1;
            if rank == k {
                break;
            }
        }
        targets
            .iter()
            .enumerate()
            .map(|(ti, _)| {
                let tc = c + ti;
                // In span iff the target column vanishes on the pivot-free rows.
                if (rank..k).any(|r| !m[r * width + tc].is_zero()) {
                    return None;
                }
                let mut w = vec![BigRational::zero(); c];
                for (pr, &pc) in pivot_cols.iter().enumerate() {
                    w[pc] = m[pr * width + tc].clone();
                }
                Some(w)
            })
            .collect()
    }

    /// Inverse of a square nonsingular matrix, exactly.
    pub fn inverse_exact(&self) -> Result<Vec<Vec<BigRational>>> {
        if self.rows != self.cols {
            return Err(Error::input("inverse requires a square matrix"));
        }
        let k = self.rows;
        let width = 2 * k;
        let mut m: Vec<BigRational> = Vec::with_capacity(k * width);
        for r in 0..k {
            for v in self.row(r) {
                m.push(BigRational::from(BigInt::from(*v)));
            }
            for j in 0..k {
                m.push(if j == r { BigRational::one() } else { BigRational::zero() });
            }
        }
        for col in 0..k {
            let Some(pr) = (col..k).find(|&r| !m[r * width + col].is_zero()) else {
                return Err(Error::input("matrix is singular"));
            };
            for j in 0..width {
                m.swap(col * width + j, pr * width + j);
            }
            let inv = m[col * width + col].recip();
            for j in col..width {
                let v = &m[col * width + j] * &inv;
                m[col * width + j] = v;
            }
            for r in 0..k {
                if r == col || m[r * width + col].is_zero() {
                    continue;
                }
                let fac = m[r * width + col].clone();
                for j in col..width {
                    let v = &m[r * width + j] - &fac * &m[col * width + j];
                    m[r * width + j] = v;
                }
            }
        }
        Ok((0..k)
            .map(|r| (0..k).map(|j| m[r * width + k + j].clone()).collect())
            .collect())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[i64]> = (0..self.rows).map(|r| self.row(r)).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<i64>> = Vec::deserialize(d)?;
        IntMatrix::from_rows(&rows).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Incremental vector-set eliminator over GF(p), p = 2^61 - 1.
///
/// Feeds vectors one at a time and reports whether each is independent of
/// everything fed before. Independence verdicts are certificates (a vector
/// independent mod p is independent over the rationals); dependence verdicts
/// are heuristic with per-feed error probability below dim/2^61 and are
/// confirmed exactly by callers where the decision is not statistical.
pub struct ColumnEliminator {
    dim: usize,
    // (leading index, reduced vector normalized to leading entry 1)
    pivots: Vec<(usize, Vec<u64>)>,
}

impl ColumnEliminator {
    pub fn new(dim: usize) -> Self {
        ColumnEliminator { dim, pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Feeds one vector of plain integers; true = independent.
    pub fn feed(&mut self, v: &[i64]) -> bool {
        self.feed_residues(v.iter().map(|&x| mod_p(x)).collect())
    }

    /// Whether v lies in the span of the vectors fed so far, without
    /// inserting it. A nonzero residue certifies independence; a zero
    /// residue is the usual single-prime heuristic.
    pub fn in_span(&self, v: &[i64]) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let mut v: Vec<u64> = v.iter().map(|&x| mod_p(x)).collect();
        for (lead, pivot) in &self.pivots {
            let f = v[*lead];
            if f == 0 {
                continue;
            }
            for (x, pv) in v.iter_mut().zip(pivot.iter()) {
                *x = sub_p(*x, mul_p(f, *pv));
            }
        }
        v.iter().all(|&x| x == 0)
    }

    pub(crate) fn feed_residues(&mut self, mut v: Vec<u64>) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        for (lead, pivot) in &self.pivots {
            let f = v[*lead];
            if f == 0 {
                continue;
            }
            for (x, pv) in v.iter_mut().zip(pivot.iter()) {
                *x = sub_p(*x, mul_p(f, *pv));
            }
        }
        match v.iter().position(|&x| x != 0) {
            None => false,
            Some(lead) => {
                let inv = inv_p(v[lead]);
                for x in v.iter_mut() {
                    *x = mul_p(*x, inv);
                }
                self.pivots.push((lead, v));
                // Keep pivots sorted by leading index so feeds stay a single
                // sparse back-substitution pass.
                self.pivots.sort_by_key(|(l, _)| *l);
                true
            }
        }
    }
}

/// Dense row-major matrix in binary64.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FloatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 {
            return Err(Error::input("FloatMatrix requires at least one row"));
        }
        if data.len() != rows * cols {
            return Err(Error::input(format!(
                "entry storage length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::input("non-finite entry"));
        }
        Ok(FloatMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::input("FloatMatrix requires at least one row"));
        }
        let c = rows[0].len();
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::input("ragged rows"));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        Self::new(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> FloatMatrix {
        let mut data = vec![0.0; self.rows * self.cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                data[c * self.rows + r] = self.get(r, c);
            }
        }
        FloatMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn select_columns(&self, keep: &[usize]) -> FloatMatrix {
        let mut data = Vec::with_capacity(self.rows * keep.len());
        for r in 0..self.rows {
            let row = self.row(r);
            data.extend(keep.iter().map(|&c| row[c]));
        }
        FloatMatrix { rows: self.rows, cols: keep.len(), data }
    }

    pub fn select_rows(&self, keep: &[usize]) -> FloatMatrix {
        let mut data = Vec::with_capacity(keep.len() * self.cols);
        for &r in keep {
            data.extend_from_slice(self.row(r));
        }
        FloatMatrix { rows: keep.len(), cols: self.cols, data }
    }

    /// Gram matrix M Mᵀ (rows x rows).
    pub fn gram(&self) -> FloatMatrix {
        let r = self.rows;
        let mut data = vec![0.0; r * r];
        for i in 0..r {
            for j in i..r {
                let dot: f64 = self.row(i).iter().zip(self.row(j)).map(|(a, b)| a * b).sum();
                data[i * r + j] = dot;
                data[j * r + i] = dot;
            }
        }
        FloatMatrix { rows: r, cols: r, data }
    }

    /// Singular values, descending, via one-sided Jacobi.
    ///
    /// Rotations orthogonalize column pairs until every pair passes the
    /// off-diagonal tolerance 1e-12 (relative); column norms are then the
    /// singular values. Small dense matrices only.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        // One-sided Jacobi wants at least as many rows as columns; singular
        // values are transpose-invariant.
        let work = if self.rows < self.cols { self.transpose() } else { self.clone() };
        let (m, n) = (work.rows, work.cols);
        let mut a: Vec<f64> = vec![0.0; m * n]; // column-major working copy
        for r in 0..m {
            for c in 0..n {
                a[c * m + r] = work.get(r, c);
            }
        }
        let tol = 1e-12;
        // Frobenius norm is invariant under the rotations; numerically dead
        // columns stay O(1)-correlated with live ones, so a relative test
        // alone would spin forever on rank-deficient inputs.
        let frob2: f64 = a.iter().map(|v| v * v).sum();
        let atol = m as f64 * f64::EPSILON * frob2;
        let max_sweeps = 64;
        for _ in 0..max_sweeps {
            let mut rotated = false;
            for i in 0..n {
                for j in i + 1..n {
                    let (ci, cj) = (i * m, j * m);
                    let mut aii = 0.0;
                    let mut ajj = 0.0;
                    let mut aij = 0.0;
                    for r in 0..m {
                        let x = a[ci + r];
                        let y = a[cj + r];
                        aii += x * x;
                        ajj += y * y;
                        aij += x * y;
                    }
                    if aij.abs() <= tol * (aii * ajj).sqrt() + atol {
                        continue;
                    }
                    rotated = true;
                    let tau = (ajj - aii) / (2.0 * aij);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for r in 0..m {
                        let x = a[ci + r];
                        let y = a[cj + r];
                        a[ci + r] = c * x - s * y;
                        a[cj + r] = s * x + c * y;
                    }
                }
            }
            if !rotated {
                let mut sv: Vec<f64> = (0..n)
                    .map(|c| (0..m).map(|r| a[c * m + r] * a[c * m + r]).sum::<f64>().sqrt())
                    .collect();
                sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
                return Ok(sv);
            }
        }
        Err(Error::Numeric("Jacobi SVD did not converge in 64 sweeps".into()))
    }

    /// Ratio of extreme singular values of a square matrix; +infinity when
    /// the smallest singular value is below 1e-300.
    pub fn condition_number(&self) -> Result<f64> {
        if self.rows != self.cols {
            return Err(Error::input(
                "condition_number expects a square matrix; use gram_condition_number for wide inputs",
            ));
        }
        let sv = self.singular_values()?;
        let max = sv[0];
        let min = sv[sv.len() - 1];
        if min < 1e-300 {
            return Ok(f64::INFINITY);
        }
        Ok(max / min)
    }

    /// Condition number of M Mᵀ, the Gram matrix of a wide M.
    pub fn gram_condition_number(&self) -> Result<f64> {
        self.gram().condition_number()
    }

    /// Plain matrix product.
    pub fn matmul(&self, other: &FloatMatrix) -> Result<FloatMatrix> {
        if self.cols != other.rows {
            return Err(Error::input("matmul dimension mismatch"));
        }
        let mut data = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(l);
                let out = &mut data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Ok(FloatMatrix { rows: self.rows, cols: other.cols, data })
    }
}

impl Serialize for FloatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[f64]> = (0..self.rows).map(|r| self.row(r)).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FloatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        FloatMatrix::from_rows(&rows).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Rational value rounded into binary64 (used once per recovered value, after
/// all decisions are made).
///
/// Numerator and denominator are each truncated to a 53-bit window with its
/// own exponent, so arbitrarily mismatched magnitudes cost at most a couple
/// of ulps.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    let neg = x.numer().is_negative();
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    let sn = (num.bits() as i64 - 53).max(0) as usize;
    let sd = (den.bits() as i64 - 53).max(0) as usize;
    let nf = (num >> sn).to_f64().unwrap_or(f64::INFINITY);
    let df = (den >> sd).to_f64().unwrap_or(f64::INFINITY);
    let v = nf / df * 2f64.powi((sn as i64 - sd as i64) as i32);
    if neg {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm1(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_rank() {
        for k in 1..6 {
            assert_eq!(IntMatrix::identity(k).rank_exact(), k);
        }
    }

    #[test]
    fn repeated_row_drops_rank() {
        let m = pm1(&[&[1, -1, 1], &[1, -1, 1], &[1, 1, -1]]);
        assert!(m.rank_exact() < 3);
        assert_eq!(m.rank_exact(), 2);
    }

    #[test]
    fn empty_column_set_is_rank_zero() {
        let m = IntMatrix::new(3, 0, vec![]).unwrap();
        assert_eq!(m.rank_exact(), 0);
    }

    #[test]
    fn rank_matches_transpose() {
        let m = pm1(&[&[1, 1, -1, 1], &[1, -1, 1, 1], &[2, 0, 0, 2]]);
        assert_eq!(m.rank_exact(), m.transpose().rank_exact());
    }

    #[test]
    fn bareiss_handles_mod_p_deficient_paths() {
        // Rank 2 over the rationals; the modular fast path cannot certify
        // full rank here, so the Bareiss confirmation decides.
        let m = pm1(&[&[2, 4, 6], &[1, 2, 3], &[0, 1, 1]]);
        assert_eq!(m.rank_exact(), 2);
    }

    #[test]
    fn solve_in_span_roundtrip() {
        let m = pm1(&[&[1, 1], &[1, -1], &[1, 1]]);
        // target = col0 + 2*col1
        let target = vec![3, -1, 3];
        let w = m.solve_in_span(&target).unwrap().expect("in span");
        assert_eq!(w[0], BigRational::from(BigInt::from(1)));
        assert_eq!(w[1], BigRational::from(BigInt::from(2)));
    }

    #[test]
    fn solve_in_span_rejects_outside() {
        let m = pm1(&[&[1, 1], &[1, 1], &[1, 1]]);
        assert!(m.solve_in_span(&[1, 1, 2]).unwrap().is_none());
        // Identical columns, independent target.
        let m2 = pm1(&[&[1, 1], &[0, 0]]);
        assert!(m2.solve_in_span(&[0, 1]).unwrap().is_none());
    }

    #[test]
    fn solve_single_column() {
        let m = pm1(&[&[1], &[-1], &[1]]);
        let w = m.solve_in_span(&[1, -1, 1]).unwrap().expect("in span");
        assert_eq!(w, vec![BigRational::one()]);
    }

    #[test]
    fn span_decision_matches_rank_comparison() {
        let m = pm1(&[&[1, 1, -1], &[1, -1, 1], &[-1, 1, 1], &[1, 1, 1]]);
        for target in [vec![1, 1, 1, 1], vec![2, 0, 0, 2], vec![1, 0, 0, 0], vec![0, 3, -1, 2]] {
            let joined = {
                let mut rows: Vec<Vec<i64>> = (0..4).map(|r| m.row(r).to_vec()).collect();
                for (r, v) in rows.iter_mut().zip(&target) {
                    r.push(*v);
                }
                IntMatrix::from_rows(&rows).unwrap()
            };
            let present = m.solve_in_span(&target).unwrap().is_some();
            assert_eq!(present, joined.rank_exact() == m.rank_exact(), "target {target:?}");
            if let Some(w) = m.solve_in_span(&target).unwrap() {
                for r in 0..4 {
                    let lhs: BigRational = (0..3)
                        .map(|c| &w[c] * BigRational::from(BigInt::from(m.get(r, c))))
                        .sum();
                    assert_eq!(lhs, BigRational::from(BigInt::from(target[r])));
                }
            }
        }
    }

    #[test]
    fn inverse_exact_roundtrip() {
        let m = pm1(&[&[1, 1, -1], &[1, -1, 1], &[-1, 1, 1]]);
        let inv = m.inverse_exact().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let dot: BigRational = (0..3)
                    .map(|l| BigRational::from(BigInt::from(m.get(i, l))) * &inv[l][j])
                    .sum();
                let expect = if i == j { BigRational::one() } else { BigRational::zero() };
                assert_eq!(dot, expect);
            }
        }
    }

    #[test]
    fn eliminator_tracks_rank() {
        let mut e = ColumnEliminator::new(3);
        assert!(e.feed(&[1, 1, -1]));
        assert!(e.feed(&[1, -1, 1]));
        assert!(!e.feed(&[2, 0, 0])); // sum of the first two
        assert!(e.feed(&[0, 0, 1]));
        assert_eq!(e.rank(), 3);
    }

    #[test]
    fn condition_identity_and_diag() {
        let id = FloatMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((id.condition_number().unwrap() - 1.0).abs() < 1e-12);
        let d = FloatMatrix::from_rows(&[vec![10.0, 0.0], vec![0.0, 0.1]]).unwrap();
        assert!((d.condition_number().unwrap() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn condition_singular_sentinel() {
        let m = FloatMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(m.condition_number().unwrap().is_infinite());
    }

    #[test]
    fn condition_scale_invariance() {
        let m = FloatMatrix::from_rows(&[
            vec![1.0, -1.0, 1.0],
            vec![1.0, 1.0, -1.0],
            vec![-1.0, 1.0, 1.0],
        ])
        .unwrap();
        let base = m.condition_number().unwrap();
        let scaled = FloatMatrix::new(3, 3, m.data.iter().map(|x| x * 37.5).collect()).unwrap();
        let s = scaled.condition_number().unwrap();
        assert!((s - base).abs() <= 1e-9 * base);
    }

    /// Independent oracle: eigenvalues of MᵀM by classical two-sided Jacobi.
    fn svd_oracle(m: &FloatMatrix) -> Vec<f64> {
        let n = m.cols();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = (0..m.rows()).map(|r| m.get(r, i) * m.get(r, j)).sum();
            }
        }
        for _ in 0..200 {
            let mut off = 0.0;
            let (mut p, mut q) = (0, 1);
            for i in 0..n {
                for j in i + 1..n {
                    if a[i][j].abs() > off {
                        off = a[i][j].abs();
                        p = i;
                        q = j;
                    }
                }
            }
            if off < 1e-14 {
                break;
            }
            let theta = 0.5 * (2.0 * a[p][q]).atan2(a[p][p] - a[q][q]);
            let (c, s) = (theta.cos(), theta.sin());
            for i in 0..n {
                let (aip, aiq) = (a[i][p], a[i][q]);
                a[i][p] = c * aip + s * aiq;
                a[i][q] = -s * aip + c * aiq;
            }
            for j in 0..n {
                let (apj, aqj) = (a[p][j], a[q][j]);
                a[p][j] = c * apj + s * aqj;
                a[q][j] = -s * apj + c * aqj;
            }
        }
        let mut sv: Vec<f64> = (0..n).map(|i| a[i][i].max(0.0).sqrt()).collect();
        sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
        sv
    }

    #[test]
    fn jacobi_agrees_with_eigen_oracle() {
        // Fixed full-rank ±1 matrix (det -48, singular values 3,2,2,2,2).
        let m = FloatMatrix::from_rows(&[
            vec![1.0, 1.0, 1.0, 1.0, 1.0],
            vec![1.0, -1.0, 1.0, -1.0, 1.0],
            vec![1.0, 1.0, -1.0, -1.0, 1.0],
            vec![1.0, -1.0, -1.0, 1.0, -1.0],
            vec![1.0, 1.0, 1.0, -1.0, -1.0],
        ])
        .unwrap();
        let got = m.condition_number().unwrap();
        let sv = svd_oracle(&m);
        let want = sv[0] / sv[sv.len() - 1];
        assert!((got - want).abs() <= 1e-9 * want, "got {got}, oracle {want}");
        assert!((got - 1.5).abs() <= 1e-9, "got {got}, expected 1.5");
    }

    #[test]
    fn jacobi_flags_singular_matrices_as_huge() {
        // Rank-deficient ±1 matrix; the reported ratio must be far beyond
        // anything a nonsingular 5x5 ±1 matrix can produce (|det| >= 1
        // caps those near 10^3).
        let m = FloatMatrix::from_rows(&[
            vec![1.0, 1.0, 1.0, 1.0, 1.0],
            vec![1.0, -1.0, 1.0, -1.0, 1.0],
            vec![1.0, 1.0, -1.0, -1.0, 1.0],
            vec![1.0, -1.0, -1.0, 1.0, -1.0],
            vec![-1.0, 1.0, 1.0, -1.0, 1.0],
        ])
        .unwrap();
        let got = m.condition_number().unwrap();
        assert!(got > 1e12, "singular matrix read as kappa = {got}");
    }

    #[test]
    fn non_finite_rejected() {
        assert!(FloatMatrix::new(1, 1, vec![f64::NAN]).is_err());
        assert!(FloatMatrix::new(1, 1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn rational_to_f64_small_and_large() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(rational_to_f64(&half), 0.5);
        let big = BigRational::new(BigInt::from(1i64 << 60), BigInt::from(3));
        let f = rational_to_f64(&big);
        assert!((f - (1.152921504606846976e18 / 3.0)).abs() / f < 1e-12);
    }
}
