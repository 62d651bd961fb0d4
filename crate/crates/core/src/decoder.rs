//! The decoder interface shared by MAP, projective, and SC decoders.

use serde::{Deserialize, Serialize};

use crate::channel::ErasurePattern;
use crate::Result;

/// Outcome of one decode attempt over an erasure pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeReport {
    /// True iff every erased coordinate was recovered.
    pub success: bool,
    /// Recovered erased indices, ascending.
    pub recovered: Vec<usize>,
    /// Recovered values, parallel to `recovered`.
    pub values: Vec<f64>,
    /// Outer passes used (always 1 for single-shot decoders).
    pub iterations: usize,
    pub decoder: String,
}

impl DecodeReport {
    pub fn recovered_value(&self, index: usize) -> Option<f64> {
        self.recovered.iter().position(|&i| i == index).map(|p| self.values[p])
    }
}

/// An erasure decoder bound to one generator matrix.
///
/// `block_decodable` answers "would this decoder recover everything" from the
/// pattern alone; `decode` additionally produces the erased values from a
/// received word. The two must agree: decode(y, p).success ⇔
/// block_decodable(p) for every y consistent with the code.
pub trait ErasureDecoder: Sync {
    fn id(&self) -> String;

    fn block_decodable(&self, pattern: &ErasurePattern) -> Result<bool>;

    /// Fast decodability test for Monte-Carlo estimation loops.
    ///
    /// Implementations may decide rank through a single-prime modular
    /// elimination: full-rank (decodable) verdicts are exact certificates,
    /// while dependence verdicts carry error probability below n/2^61 per
    /// call, far beneath any Monte-Carlo confidence interval. The default
    /// simply defers to the exact test.
    fn block_decodable_stat(&self, pattern: &ErasurePattern) -> Result<bool> {
        self.block_decodable(pattern)
    }

    /// Recovers erased coordinates of `y` (length n; erased entries ignored).
    fn decode(&self, y: &[f64], pattern: &ErasurePattern) -> Result<DecodeReport>;
}
