//! Full enumeration of `{-1, +1}^n` for small `n`.

use rand::Rng;

use super::{Conditioning, ModelParams, SpinConfig};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Largest `n` accepted by exact enumeration.
pub const EXACT_LIMIT: usize = 20;

/// Normalised probabilities of every state, indexed by [`SpinConfig::code`].
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    n: usize,
    log_z: f64,
    probs: Vec<f64>,
}

/// Log-weights of every state. Bit `i` of the index is spin `i`.
pub(crate) fn log_weights(params: &ModelParams) -> Result<Vec<f64>> {
    let n = params.n();
    if n > EXACT_LIMIT {
        return Err(Error::SizeCap { n, cap: EXACT_LIMIT });
    }
    let beta = params.beta();
    let field = params.field();
    let q = params.coupling();
    let states = 1usize << n;
    let mut out = vec![0.0; states];
    match q.complete_weight() {
        Some(w) => {
            for (code, lw) in out.iter_mut().enumerate() {
                let m = 2 * (code as u64).count_ones() as i64 - n as i64;
                let quad = 0.5 * w * ((m * m) as f64 - n as f64);
                *lw = beta * quad + linear(field, code);
            }
        }
        None => {
            let edges: Vec<(u32, u32, f64)> = q.edges().into_iter().map(|(i, j, w)| (i as u32, j as u32, w)).collect();
            for (code, lw) in out.iter_mut().enumerate() {
                let mut quad = 0.0;
                for &(i, j, w) in &edges {
                    let differ = ((code >> i) ^ (code >> j)) & 1;
                    quad += if differ == 0 { w } else { -w };
                }
                *lw = beta * quad + linear(field, code);
            }
        }
    }
    Ok(out)
}

#[inline]
fn linear(field: &[f64], code: usize) -> f64 {
    let mut acc = 0.0;
    for (i, h) in field.iter().enumerate() {
        if *h != 0.0 {
            acc += if (code >> i) & 1 == 1 { *h } else { -*h };
        }
    }
    acc
}

/// `log Σ exp(v)` over the entries accepted by `keep`.
pub(crate) fn log_sum_exp(values: &[f64], keep: impl Fn(usize) -> bool) -> f64 {
    let max = values.iter().enumerate().filter(|(k, _)| keep(*k)).map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let sum: f64 = values.iter().enumerate().filter(|(k, _)| keep(*k)).map(|(_, v)| (v - max).exp()).sum();
    max + sum.ln()
}

pub(crate) fn admits_code(cond: Conditioning, n: usize, code: usize) -> bool {
    match cond {
        Conditioning::None => true,
        Conditioning::NonNegativeMean => 2 * code.count_ones() as usize >= n,
    }
}

impl ExactDistribution {
    pub fn compute(params: &ModelParams, cond: Conditioning) -> Result<Self> {
        let n = params.n();
        let lw = log_weights(params)?;
        let keep = |k: usize| admits_code(cond, n, k);
        let log_z = log_sum_exp(&lw, keep);
        let probs = lw.iter().enumerate().map(|(k, v)| if keep(k) { (v - log_z).exp() } else { 0.0 }).collect();
        Ok(ExactDistribution { n, log_z, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn probability(&self, code: u64) -> f64 {
        self.probs[code as usize]
    }

    /// `Σ_x P(x) f(x)` with `x` given by its code.
    pub fn expect(&self, mut f: impl FnMut(u64) -> f64) -> f64 {
        self.probs.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(k, p)| p * f(k as u64)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SpinConfig, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(k, p)| (SpinConfig::from_code(self.n, k as u64), *p))
    }

    pub fn sampler(&self) -> ExactSampler {
        ExactSampler::new(self)
    }
}

pub fn exact_distribution(params: &ModelParams) -> Result<ExactDistribution> {
    ExactDistribution::compute(params, Conditioning::None)
}

/// Inverse-CDF sampler over an exact table.
#[derive(Debug, Clone)]
pub struct ExactSampler {
    n: usize,
    cdf: Vec<f64>,
}

impl ExactSampler {
    pub fn new(dist: &ExactDistribution) -> Self {
        let mut acc = 0.0;
        let cdf = dist
            .probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        ExactSampler { n: dist.n, cdf }
    }

    pub fn draw(&self, rng: &mut impl Rng) -> SpinConfig {
        let total = *self.cdf.last().expect("nonempty table");
        let u = rng.gen::<f64>() * total;
        // First index with cdf > u; its mass is positive since cdf[k-1] <= u.
        let mut k = self.cdf.partition_point(|&c| c <= u);
        if k >= self.cdf.len() {
            k = self.cdf.len() - 1;
            while self.mass(k) == 0.0 {
                k -= 1;
            }
        }
        SpinConfig::from_code(self.n, k as u64)
    }

    fn mass(&self, k: usize) -> f64 {
        if k == 0 {
            self.cdf[0]
        } else {
            self.cdf[k] - self.cdf[k - 1]
        }
    }
}

pub fn exact_sample(params: &ModelParams, count: usize, seed: u64) -> Result<Vec<SpinConfig>> {
    let sampler = exact_distribution(params)?.sampler();
    let mut rng = rng_from_seed(seed);
    Ok((0..count).map(|_| sampler.draw(&mut rng)).collect())
}
