//! Exact sampling on complete couplings by lumping sites with equal field.
//!
//! On `Q = w(J - I)` the weight of a state depends only on how many `+1` spins
//! each block of equal-field sites carries. The sampler tabulates the law of
//! these counts, draws a count vector, then places the `+1` spins uniformly
//! within each block.

use rand::seq::index::sample;
use rand::Rng;

use super::{Conditioning, ModelParams, SpinConfig};
use crate::error::{Error, Result};

/// Largest count table the sampler will build.
pub const LUMPED_TABLE_LIMIT: usize = 1 << 23;

#[derive(Debug, Clone)]
pub struct LumpedCompleteSampler {
    n: usize,
    blocks: Vec<Vec<usize>>,
    /// Mixed-radix strides for decoding a table index into per-block counts.
    strides: Vec<usize>,
    cdf: Vec<f64>,
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

impl LumpedCompleteSampler {
    pub fn new(params: &ModelParams, cond: Conditioning) -> Result<Self> {
        let w = params
            .coupling()
            .complete_weight()
            .ok_or_else(|| Error::InvalidParameter("lumped sampling needs a complete coupling".into()))?;
        let n = params.n();
        let mut levels: Vec<(f64, Vec<usize>)> = Vec::new();
        for (i, &h) in params.field().iter().enumerate() {
            match levels.iter_mut().find(|(v, _)| *v == h) {
                Some((_, members)) => members.push(i),
                None => levels.push((h, vec![i])),
            }
        }
        let mut size = 1usize;
        let mut strides = Vec::with_capacity(levels.len());
        for (_, members) in &levels {
            strides.push(size);
            size = size
                .checked_mul(members.len() + 1)
                .filter(|&s| s <= LUMPED_TABLE_LIMIT)
                .ok_or_else(|| Error::InvalidParameter("too many distinct field values to lump".into()))?;
        }
        let lf = ln_factorials(n);
        let beta = params.beta();
        let mut logw = vec![f64::NEG_INFINITY; size];
        for (idx, slot) in logw.iter_mut().enumerate() {
            let mut rest = idx;
            let mut ln_count = 0.0;
            let mut lin = 0.0;
            let mut m = 0i64;
            for (b, (h, members)) in levels.iter().enumerate().rev() {
                let k = rest / strides[b];
                rest %= strides[b];
                let size_b = members.len();
                ln_count += lf[size_b] - lf[k] - lf[size_b - k];
                let mb = 2 * k as i64 - size_b as i64;
                lin += h * mb as f64;
                m += mb;
            }
            if cond == Conditioning::NonNegativeMean && m < 0 {
                continue;
            }
            *slot = ln_count + beta * 0.5 * w * ((m * m) as f64 - n as f64) + lin;
        }
        let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut acc = 0.0;
        let cdf = logw
            .iter()
            .map(|v| {
                acc += (v - max).exp();
                acc
            })
            .collect();
        let blocks = levels.into_iter().map(|(_, m)| m).collect();
        Ok(LumpedCompleteSampler { n, blocks, strides, cdf })
    }

    pub fn table_len(&self) -> usize {
        self.cdf.len()
    }

    /// Probability of each table entry, for testing.
    pub fn count_law(&self) -> Vec<f64> {
        let total = *self.cdf.last().unwrap();
        let mut prev = 0.0;
        self.cdf
            .iter()
            .map(|&c| {
                let p = (c - prev) / total;
                prev = c;
                p
            })
            .collect()
    }

    pub fn draw(&self, rng: &mut impl Rng) -> SpinConfig {
        let total = *self.cdf.last().unwrap();
        let u = rng.gen::<f64>() * total;
        let mut idx = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        while idx > 0 && self.cdf[idx] == self.cdf[idx - 1] {
            idx -= 1;
        }
        let mut config = SpinConfig::all_minus(self.n);
        for (b, members) in self.blocks.iter().enumerate().rev() {
            let k = idx / self.strides[b];
            idx %= self.strides[b];
            for pos in sample(rng, members.len(), k) {
                config.set(members[pos], true);
            }
        }
        config
    }
}
