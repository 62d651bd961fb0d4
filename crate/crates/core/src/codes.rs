//! Generator-matrix constructions for every code family under study.
//!
//! Binary families (Reed-Muller, polar, random binary) carry ±1 entries: the
//! 0/1 Kronecker rows are mapped through g -> 2g - 1 at construction time so
//! decoders only ever see ±1 generators. The uncoded baseline keeps the 0/1
//! identity, and the real MDS family carries floating entries.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matrix::{FloatMatrix, IntMatrix};
use crate::rng;
use crate::Result;

/// Default cap on Kronecker levels; 2^13 x 2^13 is the largest block this
/// library is meant to materialize.
pub const MAX_KRONECKER_LEVELS: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Rm,
    Polar,
    RandomBinary,
    MdsReal,
    Uncoded,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::Rm => "rm",
            Family::Polar => "polar",
            Family::RandomBinary => "random-binary",
            Family::MdsReal => "mds-real",
            Family::Uncoded => "uncoded",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MdsKind {
    Vandermonde,
    Gaussian,
}

/// Family-specific construction parameters, kept for caching and reporting.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GeneratorMeta {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<usize>,
    /// Selected Kronecker row indices, ascending (polar frozen-set complement
    /// or Reed-Muller subcode rows).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub selected_rows: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub design_eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mds_kind: Option<MdsKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Entries {
    Binary(IntMatrix),
    Real(FloatMatrix),
}

/// A k x n code description: ±1 (or real) generator plus construction
/// metadata. Rows are message coordinates, columns are worker tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorMatrix {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub meta: GeneratorMeta,
    pub entries: Entries,
}

/// Wire form of [`GeneratorMatrix`] with a schema marker for cache files.
#[derive(Serialize, Deserialize)]
struct GeneratorWire {
    schema: String,
    family: Family,
    n: usize,
    k: usize,
    meta: GeneratorMeta,
    entries: Entries,
}

const GENERATOR_SCHEMA: &str = "codedc/generator/v1";

impl GeneratorMatrix {
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// The ±1 (or 0/1 identity) integer generator; input error for MdsReal.
    pub fn binary(&self) -> Result<&IntMatrix> {
        match &self.entries {
            Entries::Binary(m) => Ok(m),
            Entries::Real(_) => Err(Error::input("real-valued generator has no binary entries")),
        }
    }

    pub fn real(&self) -> Result<&FloatMatrix> {
        match &self.entries {
            Entries::Real(m) => Ok(m),
            Entries::Binary(_) => Err(Error::input("binary generator has no real entries")),
        }
    }

    /// Generator entries as binary64, whichever family.
    pub fn to_float(&self) -> FloatMatrix {
        match &self.entries {
            Entries::Binary(m) => m.to_float(),
            Entries::Real(m) => m.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let wire = GeneratorWire {
            schema: GENERATOR_SCHEMA.to_string(),
            family: self.family,
            n: self.n,
            k: self.k,
            meta: self.meta.clone(),
            entries: self.entries.clone(),
        };
        serde_json::to_string_pretty(&wire).expect("generator serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<GeneratorMatrix> {
        let wire: GeneratorWire = serde_json::from_str(text)
            .map_err(|e| Error::input(format!("generator JSON: {e}")))?;
        if wire.schema != GENERATOR_SCHEMA {
            return Err(Error::input(format!(
                "unsupported generator schema {:?}, expected {:?}",
                wire.schema, GENERATOR_SCHEMA
            )));
        }
        let g = GeneratorMatrix {
            family: wire.family,
            n: wire.n,
            k: wire.k,
            meta: wire.meta,
            entries: wire.entries,
        };
        let (rows, cols) = match &g.entries {
            Entries::Binary(m) => (m.rows(), m.cols()),
            Entries::Real(m) => (m.rows(), m.cols()),
        };
        if rows != g.k || cols != g.n {
            return Err(Error::input(format!(
                "generator claims {}x{} but entries are {}x{}",
                g.k, g.n, rows, cols
            )));
        }
        if let Entries::Binary(m) = &g.entries {
            let ok = match g.family {
                Family::Uncoded => (0..m.rows())
                    .all(|r| m.row(r).iter().enumerate().all(|(c, &v)| v == i64::from(c == r))),
                _ => (0..m.rows()).all(|r| m.row(r).iter().all(|&v| v == 1 || v == -1)),
            };
            if !ok {
                return Err(Error::input("binary generator entries must be ±1"));
            }
        }
        Ok(g)
    }
}

/// m-th Kronecker power of [[1,0],[1,1]], with 0/1 entries.
///
/// Row i has weight 2^popcount(i); entry (i,j) is 1 exactly when the bits of
/// j are a subset of the bits of i.
pub fn kronecker_matrix(m: usize) -> Result<IntMatrix> {
    if m > MAX_KRONECKER_LEVELS {
        return Err(Error::Capacity(format!(
            "kronecker_matrix supports m <= {MAX_KRONECKER_LEVELS}, got {m}"
        )));
    }
    let n = 1usize << m;
    let mut data = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..n {
            if j & !i == 0 {
                data[i * n + j] = 1;
            }
        }
    }
    IntMatrix::new(n, n, data)
}

fn pm_rows_from_kronecker(m: usize, rows: &[usize]) -> Result<IntMatrix> {
    let n = 1usize << m;
    let mut data = Vec::with_capacity(rows.len() * n);
    for &i in rows {
        for j in 0..n {
            data.push(if j & !i == 0 { 1 } else { -1 });
        }
    }
    IntMatrix::new(rows.len(), n, data)
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Dimension of RM(m, r): sum of C(m, i) for i = 0..r.
pub fn rm_dimension(m: usize, r: usize) -> usize {
    (0..=r).map(|i| binom(m, i) as usize).sum()
}

/// Reed-Muller code RM(m, r) as a ±1 generator: the rows of the Kronecker
/// power with Hamming weight at least 2^(m-r), i.e. popcount(i) >= m - r.
pub fn rm_generator(m: usize, r: usize) -> Result<GeneratorMatrix> {
    if r > m {
        return Err(Error::input(format!("rm_generator needs r <= m, got ({m}, {r})")));
    }
    if m > MAX_KRONECKER_LEVELS {
        return Err(Error::Capacity(format!(
            "rm_generator supports m <= {MAX_KRONECKER_LEVELS}, got {m}"
        )));
    }
    let n = 1usize << m;
    let rows: Vec<usize> = (0..n).filter(|i| i.count_ones() as usize >= m - r).collect();
    let k = rows.len();
    debug_assert_eq!(k, rm_dimension(m, r));
    Ok(GeneratorMatrix {
        family: Family::Rm,
        n,
        k,
        meta: GeneratorMeta {
            m: Some(m),
            r: Some(r),
            selected_rows: Some(rows.clone()),
            ..Default::default()
        },
        entries: Entries::Binary(pm_rows_from_kronecker(m, &rows)?),
    })
}

/// All 2^m Kronecker row indices ordered by descending Hamming weight, ties
/// broken toward the lower index. Every prefix of this order is a
/// Reed-Muller subcode generator, and complete prefixes are RM(m, r) itself.
pub fn rm_weight_order(m: usize) -> Vec<usize> {
    let n = 1usize << m;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(i.count_ones()), i));
    order
}

/// Reed-Muller subcode of arbitrary dimension k: the k heaviest Kronecker
/// rows (weight descending, index ascending on ties).
///
/// When k equals an RM(m, r) dimension the selection is exactly that code and
/// meta.r is set; otherwise r is left empty and the projective decoder will
/// reject the result.
pub fn rm_subcode_generator(m: usize, k: usize) -> Result<GeneratorMatrix> {
    if m > MAX_KRONECKER_LEVELS {
        return Err(Error::Capacity(format!(
            "rm_subcode_generator supports m <= {MAX_KRONECKER_LEVELS}, got {m}"
        )));
    }
    let n = 1usize << m;
    if k == 0 || k > n {
        return Err(Error::input(format!("rm_subcode_generator needs 1 <= k <= {n}, got {k}")));
    }
    let order = rm_weight_order(m);
    let mut rows: Vec<usize> = order[..k].to_vec();
    rows.sort_unstable();
    let r = (0..=m).find(|&r| rm_dimension(m, r) == k);
    Ok(GeneratorMatrix {
        family: Family::Rm,
        n,
        k,
        meta: GeneratorMeta {
            m: Some(m),
            r,
            selected_rows: Some(rows.clone()),
            ..Default::default()
        },
        entries: Entries::Binary(pm_rows_from_kronecker(m, &rows)?),
    })
}

/// Erasure probabilities of the 2^m polarized bit-channels of a BEC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BitChannelProfile {
    pub m: usize,
    pub z: Vec<f64>,
}

/// One-step BEC polarization applied recursively in natural order: a channel
/// with erasure probability z splits into 2z - z^2 (index bit 0) and z^2
/// (index bit 1), earlier splits occupying higher index bits.
pub fn bec_bit_channels(m: usize, eps: f64) -> Result<BitChannelProfile> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::input(format!("erasure probability {eps} outside [0,1]")));
    }
    if m > MAX_KRONECKER_LEVELS {
        return Err(Error::Capacity(format!(
            "bec_bit_channels supports m <= {MAX_KRONECKER_LEVELS}, got {m}"
        )));
    }
    let mut z = vec![eps];
    for _ in 0..m {
        let mut next = Vec::with_capacity(z.len() * 2);
        for &v in &z {
            next.push(2.0 * v - v * v);
            next.push(v * v);
        }
        z = next;
    }
    Ok(BitChannelProfile { m, z })
}

/// Indices of the k most reliable polarized bit-channels (smallest Z), ties
/// broken toward the lower index, returned ascending.
pub fn polar_row_selection(m: usize, k: usize, eps_design: f64) -> Result<Vec<usize>> {
    let n = 1usize << m;
    if k == 0 || k > n {
        return Err(Error::input(format!("polar selection needs 1 <= k <= {n}, got {k}")));
    }
    let profile = bec_bit_channels(m, eps_design)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        profile.z[a].partial_cmp(&profile.z[b]).expect("Z values are finite").then(a.cmp(&b))
    });
    let mut rows = order[..k].to_vec();
    rows.sort_unstable();
    Ok(rows)
}

/// Polar code: the k Kronecker rows indexed by the most reliable
/// bit-channels at the design erasure probability, as a ±1 generator.
pub fn polar_generator(m: usize, k: usize, eps_design: f64) -> Result<GeneratorMatrix> {
    if m > MAX_KRONECKER_LEVELS {
        return Err(Error::Capacity(format!(
            "polar_generator supports m <= {MAX_KRONECKER_LEVELS}, got {m}"
        )));
    }
    let rows = polar_row_selection(m, k, eps_design)?;
    Ok(GeneratorMatrix {
        family: Family::Polar,
        n: 1 << m,
        k,
        meta: GeneratorMeta {
            m: Some(m),
            selected_rows: Some(rows.clone()),
            design_eps: Some(eps_design),
            ..Default::default()
        },
        entries: Entries::Binary(pm_rows_from_kronecker(m, &rows)?),
    })
}

/// Default attempt budget for random full-rank generator sampling.
pub const RANDOM_BINARY_BUDGET: usize = 1000;

/// Uniform ±1 k x n matrices, rejection-sampled until full row rank.
pub fn random_binary_generator(n: usize, k: usize, seed: u64) -> Result<GeneratorMatrix> {
    if k == 0 || k > n {
        return Err(Error::input(format!("random_binary_generator needs 1 <= k <= n, got ({n}, {k})")));
    }
    for attempt in 0..RANDOM_BINARY_BUDGET {
        let mut rng = rng::derive(seed, &[rng::tag::RANDOM_BINARY, attempt as u64]);
        let data: Vec<i64> =
            (0..k * n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        let m = IntMatrix::new(k, n, data)?;
        if m.rank_exact() == k {
            return Ok(GeneratorMatrix {
                family: Family::RandomBinary,
                n,
                k,
                meta: GeneratorMeta { seed: Some(seed), ..Default::default() },
                entries: Entries::Binary(m),
            });
        }
    }
    Err(Error::Sampling(format!(
        "no full-rank ±1 matrix in {RANDOM_BINARY_BUDGET} attempts for ({n}, {k})"
    )))
}

/// Real MDS generator: Vandermonde on Chebyshev nodes (every k x k submatrix
/// nonsingular because the nodes are distinct), or a Gaussian ensemble.
pub fn mds_real_generator(n: usize, k: usize, kind: MdsKind, seed: u64) -> Result<GeneratorMatrix> {
    if k == 0 || k > n {
        return Err(Error::input(format!("mds_real_generator needs 1 <= k <= n, got ({n}, {k})")));
    }
    let entries = match kind {
        MdsKind::Vandermonde => {
            let mut data = vec![0.0; k * n];
            for j in 0..n {
                let x = (std::f64::consts::PI * (2 * j + 1) as f64 / (2 * n) as f64).cos();
                let mut pow = 1.0;
                for i in 0..k {
                    data[i * n + j] = pow;
                    pow *= x;
                }
            }
            FloatMatrix::new(k, n, data)?
        }
        MdsKind::Gaussian => {
            let mut rng = rng::derive(seed, &[rng::tag::MDS_GAUSSIAN]);
            let data: Vec<f64> = (0..k * n).map(|_| StandardNormal.sample(&mut rng)).collect();
            FloatMatrix::new(k, n, data)?
        }
    };
    Ok(GeneratorMatrix {
        family: Family::MdsReal,
        n,
        k,
        meta: GeneratorMeta { seed: Some(seed), mds_kind: Some(kind), ..Default::default() },
        entries: Entries::Real(entries),
    })
}

/// Uncoded baseline: k tasks on k workers, generator = 0/1 identity.
pub fn uncoded_generator(k: usize) -> Result<GeneratorMatrix> {
    if k == 0 {
        return Err(Error::input("uncoded_generator needs k >= 1"));
    }
    Ok(GeneratorMatrix {
        family: Family::Uncoded,
        n: k,
        k,
        meta: GeneratorMeta::default(),
        entries: Entries::Binary(IntMatrix::identity(k)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_base_cases() {
        let g0 = kronecker_matrix(0).unwrap();
        assert_eq!((g0.rows(), g0.cols()), (1, 1));
        assert_eq!(g0.get(0, 0), 1);
        let g1 = kronecker_matrix(1).unwrap();
        assert_eq!(g1.row(0), &[1, 0]);
        assert_eq!(g1.row(1), &[1, 1]);
    }

    #[test]
    fn kronecker_row_weights_m3() {
        let g = kronecker_matrix(3).unwrap();
        let mut weights: Vec<i64> = (0..8).map(|r| g.row(r).iter().sum()).collect();
        weights.sort_unstable();
        assert_eq!(weights, vec![1, 2, 2, 2, 4, 4, 4, 8]);
    }

    #[test]
    fn kronecker_is_lower_triangular_unit_diagonal() {
        let g = kronecker_matrix(4).unwrap();
        for i in 0..16 {
            assert_eq!(g.get(i, i), 1);
            for j in i + 1..16 {
                assert_eq!(g.get(i, j), 0);
            }
        }
    }

    #[test]
    fn kronecker_cap() {
        assert!(matches!(kronecker_matrix(14), Err(Error::Capacity(_))));
    }

    #[test]
    fn rm_dimensions() {
        let g = rm_generator(3, 2).unwrap();
        assert_eq!((g.n, g.k), (8, 7));
        let g = rm_generator(6, 3).unwrap();
        assert_eq!((g.n, g.k), (64, 42));
        let g = rm_generator(4, 4).unwrap();
        assert_eq!((g.n, g.k), (16, 16));
    }

    #[test]
    fn rm_weight_census() {
        // C(m,i) rows of ±1 row-sum 2*2^(m-i) - n for i = 0..r.
        let m = 5;
        let r = 2;
        let g = rm_generator(m, r).unwrap();
        let b = g.binary().unwrap();
        let mut census = std::collections::BTreeMap::new();
        for row in 0..g.k {
            let ones = b.row(row).iter().filter(|&&v| v == 1).count();
            *census.entry(ones).or_insert(0usize) += 1;
        }
        for i in 0..=r {
            let weight = 1usize << (m - i);
            assert_eq!(census.get(&weight), Some(&(binom(m, i) as usize)), "weight {weight}");
        }
    }

    #[test]
    fn rm_full_rank_and_pm_entries() {
        for (m, r) in [(3, 2), (4, 2), (4, 3)] {
            let g = rm_generator(m, r).unwrap();
            let b = g.binary().unwrap();
            assert!(b.row(0).iter().all(|&v| v == 1 || v == -1));
            assert_eq!(b.rank_exact(), g.k, "RM({m},{r})");
        }
    }

    #[test]
    fn rm_rejects_bad_r() {
        assert!(rm_generator(3, 4).is_err());
    }

    #[test]
    fn rm_subcode_matches_rm_at_rm_dimensions() {
        let sub = rm_subcode_generator(4, 11).unwrap(); // RM(4,2) has k=11
        let rm = rm_generator(4, 2).unwrap();
        assert_eq!(sub.meta.r, Some(2));
        assert_eq!(sub.meta.selected_rows, rm.meta.selected_rows);
        assert_eq!(sub.binary().unwrap(), rm.binary().unwrap());
    }

    #[test]
    fn rm_subcode_tie_break_is_ascending_index() {
        // m=3, k=2: after the weight-8 row (index 7) the three weight-4 rows
        // are indices 3, 5, 6; the tie-break picks 3.
        let g = rm_subcode_generator(3, 2).unwrap();
        assert_eq!(g.meta.selected_rows.as_deref(), Some(&[3usize, 7][..]));
        assert_eq!(g.meta.r, None);
    }

    #[test]
    fn bec_single_level() {
        let p = bec_bit_channels(1, 0.5).unwrap();
        assert_eq!(p.z, vec![0.75, 0.25]);
    }

    #[test]
    fn bec_zero_eps() {
        let p = bec_bit_channels(4, 0.0).unwrap();
        assert!(p.z.iter().all(|&z| z == 0.0));
    }

    #[test]
    fn bec_mean_conservation() {
        for m in [1, 3, 7, 13] {
            for eps in [0.1, 0.37, 0.9] {
                let p = bec_bit_channels(m, eps).unwrap();
                let mean = p.z.iter().sum::<f64>() / p.z.len() as f64;
                assert!((mean - eps).abs() < 1e-12, "m={m} eps={eps} mean={mean}");
                assert!(p.z.iter().all(|&z| (0.0..=1.0).contains(&z)));
            }
        }
    }

    #[test]
    fn bec_natural_order_m2() {
        // Minus-then-minus lands at index 0; plus-then-plus at index 3.
        let p = bec_bit_channels(2, 0.5).unwrap();
        let minus = |z: f64| 2.0 * z - z * z;
        let plus = |z: f64| z * z;
        assert_eq!(p.z[0], minus(minus(0.5)));
        assert_eq!(p.z[1], plus(minus(0.5)));
        assert_eq!(p.z[2], minus(plus(0.5)));
        assert_eq!(p.z[3], plus(plus(0.5)));
    }

    #[test]
    fn polar_selection_matches_sorted_z() {
        let profile = bec_bit_channels(3, 0.5).unwrap();
        let rows = polar_row_selection(3, 4, 0.5).unwrap();
        let worst_selected = rows.iter().map(|&i| profile.z[i]).fold(0.0f64, f64::max);
        let best_dropped = (0..8)
            .filter(|i| !rows.contains(i))
            .map(|i| profile.z[i])
            .fold(1.0f64, f64::min);
        assert!(worst_selected <= best_dropped);
        assert!(rows.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn polar_full_dimension_keeps_all_rows() {
        let g = polar_generator(3, 8, 0.3).unwrap();
        assert_eq!(g.meta.selected_rows.as_deref(), Some(&[0, 1, 2, 3, 4, 5, 6, 7][..]));
        assert_eq!(g.binary().unwrap().rank_exact(), 8);
    }

    #[test]
    fn polar_cardinality_and_rank() {
        let g = polar_generator(3, 7, 0.1).unwrap();
        assert_eq!(g.meta.selected_rows.as_ref().unwrap().len(), 7);
        assert_eq!(g.binary().unwrap().rank_exact(), 7);
    }

    #[test]
    fn polar_always_keeps_heaviest_row() {
        // The all-ones Kronecker row (index n-1) polarizes to the smallest Z.
        for eps in [0.05, 0.5, 0.95] {
            let rows = polar_row_selection(4, 1, eps).unwrap();
            assert_eq!(rows, vec![15]);
        }
    }

    #[test]
    fn random_binary_contract() {
        let g = random_binary_generator(8, 5, 42).unwrap();
        assert_eq!(g.binary().unwrap().rank_exact(), 5);
        let again = random_binary_generator(8, 5, 42).unwrap();
        assert_eq!(g, again);
        let other = random_binary_generator(8, 5, 43).unwrap();
        assert_ne!(g, other);
        let tiny = random_binary_generator(1, 1, 7).unwrap();
        let v = tiny.binary().unwrap().get(0, 0);
        assert!(v == 1 || v == -1);
    }

    #[test]
    fn vandermonde_every_submatrix_nonsingular() {
        let g = mds_real_generator(8, 6, MdsKind::Vandermonde, 0).unwrap();
        let f = g.real().unwrap();
        for a in 0..8 {
            for b in a + 1..8 {
                let keep: Vec<usize> = (0..8).filter(|&c| c != a && c != b).collect();
                let sub = f.select_columns(&keep);
                let sv = sub.singular_values().unwrap();
                assert!(
                    sv[sv.len() - 1] > 1e-12 * sv[0],
                    "erasing {{{a},{b}}} left a singular submatrix"
                );
            }
        }
    }

    #[test]
    fn mds_small_and_reproducible() {
        let g = mds_real_generator(5, 1, MdsKind::Vandermonde, 0).unwrap();
        assert!(g.real().unwrap().row(0).iter().all(|&v| v != 0.0));
        let a = mds_real_generator(6, 3, MdsKind::Gaussian, 9).unwrap();
        let b = mds_real_generator(6, 3, MdsKind::Gaussian, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn uncoded_is_identity() {
        let g = uncoded_generator(3).unwrap();
        assert_eq!(g.binary().unwrap(), &IntMatrix::identity(3));
        assert_eq!((g.n, g.k), (3, 3));
    }

    #[test]
    fn generator_json_roundtrip() {
        for g in [
            rm_generator(3, 2).unwrap(),
            polar_generator(3, 4, 0.5).unwrap(),
            mds_real_generator(6, 4, MdsKind::Vandermonde, 0).unwrap(),
            uncoded_generator(4).unwrap(),
        ] {
            let text = g.to_json();
            assert!(text.contains("codedc/generator/v1"));
            let back = GeneratorMatrix::from_json(&text).unwrap();
            assert_eq!(g, back);
        }
    }

    #[test]
    fn generator_json_rejects_bad_schema() {
        let text = rm_generator(3, 1).unwrap().to_json().replace("/v1", "/v0");
        assert!(GeneratorMatrix::from_json(&text).is_err());
    }
}
