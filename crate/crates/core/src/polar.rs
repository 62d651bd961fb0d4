//! Polar successive-cancellation decoding over the erasure channel.
//!
//! Workers compute real values, so the decoder runs SC message passing over
//! real payloads with erasures: a combined value is known only when its
//! sources are, frozen leaves are known zeros, and failure means some
//! information leaf stays unresolved. The analytic counterpart is the
//! product formula over bit-channel erasure probabilities.

use crate::channel::ErasurePattern;
use crate::codes::{BitChannelProfile, Family, GeneratorMatrix};
use crate::decoder::{DecodeReport, ErasureDecoder};
use crate::error::Error;
use crate::Result;

/// P = 1 - prod_{i in B} (1 - Z_i), evaluated in the log domain.
pub fn sc_failure_prob(profile: &BitChannelProfile, b: &[usize]) -> Result<f64> {
    let n = profile.z.len();
    let mut seen = vec![false; n];
    for &i in b {
        if i >= n {
            return Err(Error::input(format!("selected index {i} outside 0..{n}")));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::input(format!("selected index {i} repeated")));
        }
    }
    let mut ln_ok = 0.0f64;
    for &i in b {
        let z = profile.z[i];
        if z >= 1.0 {
            return Ok(1.0);
        }
        ln_ok += (-z).ln_1p();
    }
    Ok(-ln_ok.exp_m1())
}

/// SC erasure decoder for a Kronecker-row-selected code (polar or RM).
///
/// Encoding uses the ±1 rows, which differ from the 0/1 Kronecker rows by
/// the all-ones offset; the decoder absorbs that offset by working in a
/// shifted message domain (see `decode_values`), which requires the all-ones
/// row (index n-1) to be among the selected rows. Reliability orderings
/// always select it first, so this only excludes degenerate constructions.
pub struct ScDecoder {
    g: GeneratorMatrix,
    n: usize,
    /// info[i] = true iff Kronecker row i is selected (carries message data).
    info: Vec<bool>,
}

impl ScDecoder {
    pub fn new(g: GeneratorMatrix) -> Result<Self> {
        if !matches!(g.family, Family::Polar | Family::Rm) {
            return Err(Error::input("SC decoding needs a Kronecker-row-selected family"));
        }
        let m = g
            .meta
            .m
            .ok_or_else(|| Error::input("SC decoding needs meta.m"))?;
        let rows = g
            .meta
            .selected_rows
            .as_ref()
            .ok_or_else(|| Error::input("SC decoding needs meta.selected_rows"))?;
        let n = 1usize << m;
        if g.n != n || rows.len() != g.k {
            return Err(Error::input("generator metadata inconsistent with dimensions"));
        }
        let mut info = vec![false; n];
        for &i in rows {
            if i >= n {
                return Err(Error::input("selected row index out of range"));
            }
            info[i] = true;
        }
        if !info[n - 1] {
            return Err(Error::input(
                "SC decoding requires the all-ones row (index n-1) to be selected",
            ));
        }
        Ok(ScDecoder { g, n, info })
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.g
    }

    /// Pattern-only SC pass: returns (all info leaves resolved, resolved
    /// codeword coordinate flags). Boolean mirror of `propagate_values`.
    fn propagate_known(&self, known: &[bool]) -> (bool, Vec<bool>) {
        fn recurse(known: &[bool], info: &[bool]) -> (bool, Vec<bool>) {
            let len = known.len();
            if len == 1 {
                // Frozen leaves are known constants; info leaves need data.
                return if info[0] { (known[0], vec![known[0]]) } else { (true, vec![true]) };
            }
            let half = len / 2;
            let (kl, kr) = known.split_at(half);
            let d: Vec<bool> = kl.iter().zip(kr).map(|(&a, &b)| a && b).collect();
            let (ok_l, s_hat) = recurse(&d, &info[..half]);
            let e: Vec<bool> = (0..half).map(|i| kr[i] || (kl[i] && s_hat[i])).collect();
            let (ok_r, t_hat) = recurse(&e, &info[half..]);
            let mut x = Vec::with_capacity(len);
            for i in 0..half {
                x.push(kl[i] || (s_hat[i] && t_hat[i]));
            }
            for i in 0..half {
                x.push(kr[i] || t_hat[i]);
            }
            (ok_l && ok_r, x)
        }
        recurse(known, &self.info)
    }

    /// Value-level SC pass in the shifted message domain u', where
    /// y = sum_i u'_i g01_i with u'_i = 0 on frozen leaves.
    fn propagate_values(&self, y: &[Option<f64>]) -> (Vec<Option<f64>>, Vec<Option<f64>>) {
        // Returns (leaf values u', re-encoded codeword estimate).
        fn recurse(c: &[Option<f64>], info: &[bool]) -> (Vec<Option<f64>>, Vec<Option<f64>>) {
            let len = c.len();
            if len == 1 {
                return if info[0] {
                    (vec![c[0]], vec![c[0]])
                } else {
                    (vec![Some(0.0)], vec![Some(0.0)])
                };
            }
            let half = len / 2;
            let (cl, cr) = c.split_at(half);
            let d: Vec<Option<f64>> = cl
                .iter()
                .zip(cr)
                .map(|(&a, &b)| match (a, b) {
                    (Some(x), Some(y)) => Some(x - y),
                    _ => None,
                })
                .collect();
            let (ua, s_hat) = recurse(&d, &info[..half]);
            let e: Vec<Option<f64>> = (0..half)
                .map(|i| {
                    cr[i].or(match (cl[i], s_hat[i]) {
                        (Some(x), Some(s)) => Some(x - s),
                        _ => None,
                    })
                })
                .collect();
            let (ub, t_hat) = recurse(&e, &info[half..]);
            let mut x = Vec::with_capacity(len);
            for i in 0..half {
                x.push(cl[i].or(match (s_hat[i], t_hat[i]) {
                    (Some(s), Some(t)) => Some(s + t),
                    _ => None,
                }));
            }
            for i in 0..half {
                x.push(cr[i].or(t_hat[i]));
            }
            let mut u = ua;
            u.extend(ub);
            (u, x)
        }
        recurse(y, &self.info)
    }

    /// Recovers the message x from resolved shifted leaves u'.
    ///
    /// The selected ±1 rows satisfy row_i = 2 g01_i - g01_{n-1} (all ±1 rows
    /// share the all-ones offset), so u'_i = 2 x_i off the top row and the
    /// top row absorbs the offset sum.
    pub fn message_from_leaves(&self, u: &[Option<f64>]) -> Option<Vec<f64>> {
        let rows = self.g.meta.selected_rows.as_ref().expect("validated at construction");
        let mut x = vec![0.0; self.g.k];
        let mut offset_half_sum = 0.0;
        let mut top = None;
        for (pos, &i) in rows.iter().enumerate() {
            let v = u[i]?;
            if i == self.n - 1 {
                top = Some(pos);
            } else {
                x[pos] = v / 2.0;
                offset_half_sum += v / 2.0;
            }
        }
        let top = top.expect("all-ones row validated at construction");
        x[top] = u[self.n - 1].unwrap() + offset_half_sum;
        Some(x)
    }
}

impl ErasureDecoder for ScDecoder {
    fn id(&self) -> String {
        "polar-sc".to_string()
    }

    fn block_decodable(&self, pattern: &ErasurePattern) -> Result<bool> {
        if pattern.n() != self.n {
            return Err(Error::input("pattern length does not match blocklength"));
        }
        let mut known = vec![true; self.n];
        for &e in pattern.erased() {
            known[e] = false;
        }
        Ok(self.propagate_known(&known).0)
    }

    fn decode(&self, y: &[f64], pattern: &ErasurePattern) -> Result<DecodeReport> {
        if y.len() != self.n || pattern.n() != self.n {
            return Err(Error::input("received word length does not match blocklength"));
        }
        let obs: Vec<Option<f64>> = (0..self.n)
            .map(|i| if pattern.is_erased(i) { None } else { Some(y[i]) })
            .collect();
        let (u, x_hat) = self.propagate_values(&obs);
        let resolved = self
            .info
            .iter()
            .enumerate()
            .all(|(i, &inf)| !inf || u[i].is_some());
        let mut recovered = Vec::new();
        let mut values = Vec::new();
        if resolved {
            // Full message known: every erased coordinate re-encodes exactly.
            let x = self.message_from_leaves(&u).expect("all leaves resolved");
            let b = self.g.binary()?;
            for &e in pattern.erased() {
                let v: f64 = (0..self.g.k).map(|r| x[r] * b.get(r, e) as f64).sum();
                recovered.push(e);
                values.push(v);
            }
        } else {
            for &e in pattern.erased() {
                if let Some(v) = x_hat[e] {
                    recovered.push(e);
                    values.push(v);
                }
            }
        }
        Ok(DecodeReport {
            success: resolved,
            recovered,
            values,
            iterations: 1,
            decoder: self.id(),
        })
    }
}

/// One-shot convenience wrapper.
pub fn sc_erase_decode(
    g: &GeneratorMatrix,
    y: &[f64],
    pattern: &ErasurePattern,
) -> Result<DecodeReport> {
    ScDecoder::new(g.clone())?.decode(y, pattern)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes;
    use crate::map::MapDecoder;
    use crate::rng;
    use rand::Rng;

    fn encode(g: &GeneratorMatrix, x: &[f64]) -> Vec<f64> {
        let b = g.binary().unwrap();
        (0..g.n)
            .map(|c| (0..g.k).map(|r| x[r] * b.get(r, c) as f64).sum())
            .collect()
    }

    #[test]
    fn failure_prob_trivials() {
        let zeros = BitChannelProfile { m: 2, z: vec![0.0; 4] };
        assert_eq!(sc_failure_prob(&zeros, &[0, 3]).unwrap(), 0.0);
        let with_one = BitChannelProfile { m: 1, z: vec![1.0, 0.2] };
        assert_eq!(sc_failure_prob(&with_one, &[0, 1]).unwrap(), 1.0);
        assert!(sc_failure_prob(&with_one, &[1, 1]).is_err());
    }

    #[test]
    fn repetition_code_hand_case() {
        // m=1, k=1 selects row 1 (all-ones): codeword (x, x).
        let g = codes::polar_generator(1, 1, 0.3).unwrap();
        let dec = ScDecoder::new(g.clone()).unwrap();
        let y = encode(&g, &[2.5]);
        assert_eq!(y, vec![2.5, 2.5]);
        for erase in [vec![], vec![0], vec![1]] {
            let p = ErasurePattern::new(2, erase).unwrap();
            assert!(dec.block_decodable(&p).unwrap());
            let rep = dec.decode(&y, &p).unwrap();
            assert!(rep.success);
            for (i, &e) in rep.recovered.iter().enumerate() {
                assert_eq!(rep.values[i], y[e]);
            }
        }
        let both = ErasurePattern::new(2, vec![0, 1]).unwrap();
        assert!(!dec.block_decodable(&both).unwrap());
        // Analytic failure probability is the plus-channel Z = eps^2.
        let prof = codes::bec_bit_channels(1, 0.4).unwrap();
        let p = sc_failure_prob(&prof, &[1]).unwrap();
        assert!((p - 0.16).abs() < 1e-15);
    }

    #[test]
    fn degenerate_selection_rejected() {
        // eps_design = 0 makes all Z equal, tie-break selects rows 0..k which
        // exclude the all-ones row.
        let g = codes::polar_generator(2, 2, 0.0).unwrap();
        assert!(ScDecoder::new(g).is_err());
    }

    /// Structurally independent erasure-propagation oracle (booleans only).
    fn peel_oracle(known: &[bool], info: &[bool]) -> bool {
        if known.len() == 1 {
            return !info[0] || known[0];
        }
        let half = known.len() / 2;
        let d: Vec<bool> = (0..half).map(|i| known[i] && known[i + half]).collect();
        if !peel_oracle(&d, &info[..half]) {
            return false;
        }
        // Left sub-message resolved, so its re-encoding is fully known.
        let e: Vec<bool> = (0..half).map(|i| known[i + half] || known[i]).collect();
        peel_oracle(&e, &info[half..])
    }

    #[test]
    fn exhaustive_patterns_match_peeling_oracle() {
        let g = codes::polar_generator(3, 4, 0.3).unwrap();
        let dec = ScDecoder::new(g.clone()).unwrap();
        let info: Vec<bool> = {
            let mut f = vec![false; 8];
            for &i in g.meta.selected_rows.as_ref().unwrap() {
                f[i] = true;
            }
            f
        };
        for mask in 0u32..256 {
            let known: Vec<bool> = (0..8).map(|i| mask >> i & 1 == 0).collect();
            let pattern = ErasurePattern::from_flags(
                &known.iter().map(|&k| !k).collect::<Vec<_>>(),
            );
            let got = dec.block_decodable(&pattern).unwrap();
            let want = peel_oracle(&known, &info);
            assert_eq!(got, want, "mask {mask:08b}");
        }
    }

    #[test]
    fn trivial_patterns() {
        let g = codes::polar_generator(3, 4, 0.3).unwrap();
        let dec = ScDecoder::new(g.clone()).unwrap();
        assert!(dec.block_decodable(&ErasurePattern::empty(8)).unwrap());
        let all = ErasurePattern::new(8, (0..8).collect()).unwrap();
        assert!(!dec.block_decodable(&all).unwrap());
    }

    #[test]
    fn recovered_values_match_truth() {
        let g = codes::polar_generator(4, 9, 0.2).unwrap();
        let dec = ScDecoder::new(g.clone()).unwrap();
        let mut r = rng::derive(11, &[]);
        let mut successes = 0;
        for _ in 0..300 {
            let x: Vec<f64> = (0..g.k).map(|_| r.gen_range(-2.0..2.0)).collect();
            let y = encode(&g, &x);
            let pat = crate::channel::sample_pattern(g.n, 0.25, &mut r).unwrap();
            let rep = dec.decode(&y, &pat).unwrap();
            assert_eq!(rep.success, dec.block_decodable(&pat).unwrap());
            for (i, &e) in rep.recovered.iter().enumerate() {
                let scale = y[e].abs().max(1.0);
                assert!(
                    (rep.values[i] - y[e]).abs() <= 1e-9 * scale,
                    "coordinate {e}: {} vs {}",
                    rep.values[i],
                    y[e]
                );
            }
            if rep.success {
                successes += 1;
                assert_eq!(rep.recovered.len(), pat.count());
            }
        }
        assert!(successes > 50, "expected plenty of decodable trials");
    }

    #[test]
    fn sc_never_beats_map() {
        let g = codes::polar_generator(3, 4, 0.3).unwrap();
        let sc = ScDecoder::new(g.clone()).unwrap();
        let map = MapDecoder::new(g);
        for mask in 0u32..256 {
            let erased: Vec<usize> = (0..8).filter(|i| mask >> i & 1 == 1).collect();
            let p = ErasurePattern::new(8, erased).unwrap();
            if sc.block_decodable(&p).unwrap() {
                assert!(map.block_decodable(&p).unwrap(), "mask {mask:08b}");
            }
        }
    }

    #[test]
    fn integer_message_roundtrip_through_leaves() {
        let g = codes::polar_generator(3, 5, 0.3).unwrap();
        let dec = ScDecoder::new(g.clone()).unwrap();
        let x = vec![3.0, -1.0, 2.0, 5.0, -4.0];
        let y = encode(&g, &x);
        let obs: Vec<Option<f64>> = y.iter().map(|&v| Some(v)).collect();
        let (u, _) = dec.propagate_values(&obs);
        let got = dec.message_from_leaves(&u).unwrap();
        for (a, b) in got.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
