//! Chain correlations and small-set marginal uniformity.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{fixed_point, moments, Conditioning};
use crate::error::{Error, Result};
use crate::graphs::{build_lattice, coupling_from_graph, CouplingMatrix, Scaling};
use crate::model::{ExactDistribution, ModelParams, PreparedSampler, SamplerChoice, SamplerConfig};

/// Largest chain handled by [`chain_correlation`].
pub const CHAIN_LIMIT: usize = 16;

/// Largest number of candidate sets scanned by [`small_marginal_deviation`].
const SUBSET_LIMIT: u128 = 5_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainCorrelation {
    pub n: usize,
    pub beta: f64,
    /// `E[X_i X_j]` on the free path with unit couplings and no field.
    pub values: DMatrix<f64>,
}

impl ChainCorrelation {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    /// `max_{i,j} |E[X_i X_j] - tanh(β)^{|i-j|}|`.
    pub fn max_product_deviation(&self) -> f64 {
        let r = self.beta.tanh();
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max((self.get(i, j) - r.powi(i.abs_diff(j) as i32)).abs());
            }
        }
        worst
    }
}

pub fn chain_correlation(n: usize, beta: f64) -> Result<ChainCorrelation> {
    if n > CHAIN_LIMIT {
        return Err(Error::SizeCap { n, cap: CHAIN_LIMIT });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("chain needs at least one site".into()));
    }
    let q = if n == 1 {
        CouplingMatrix::from_weighted_edges(1, &[])?
    } else {
        coupling_from_graph(&build_lattice(1, n, 1)?, Scaling::Lattice)?
    };
    let m = moments(&ModelParams::null(beta, Arc::new(q)), Conditioning::None)?;
    Ok(ChainCorrelation { n, beta, values: m.second })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallMarginalReport {
    pub n: usize,
    pub s: usize,
    pub beta: f64,
    /// Whether probabilities are taken conditionally on `X̄ ≥ 0`.
    pub conditioned: bool,
    /// Fixed-point tilt `t` used in the reference law (0 when `β ≤ 1`).
    pub tilt: f64,
    /// `sup_{S, a} |P(X_S = a) / g(a) - 1|`.
    pub deviation: f64,
    pub worst_set: Vec<usize>,
    pub worst_pattern: Vec<i8>,
    pub sets_scanned: usize,
    /// Present for sampled estimates: the largest standard error of `P̂/g`.
    pub mc_standard_error: Option<f64>,
    pub samples: Option<usize>,
}

/// Reference law of `X_S`: uniform when `β ≤ 1`, product of `tanh`-tilted signs otherwise.
struct Reference {
    s: usize,
    beta_t: f64,
}

impl Reference {
    fn new(beta: f64, s: usize) -> Result<(Self, bool, f64)> {
        if beta > 1.0 {
            let t = fixed_point(beta, 0.0)?.t;
            Ok((Reference { s, beta_t: beta * t }, true, t))
        } else {
            Ok((Reference { s, beta_t: 0.0 }, false, 0.0))
        }
    }

    /// `g(a)` where bit `u` of `pattern` set means `a_u = +1`.
    fn g(&self, pattern: usize) -> f64 {
        let plus = pattern.count_ones() as i32;
        let sum = 2 * plus - self.s as i32;
        (self.beta_t * sum as f64).exp() / (2.0 * self.beta_t.cosh()).powi(self.s as i32)
    }
}

/// Walsh–Hadamard transform: entry `T` becomes `E[Π_{i∈T} X_i]`.
fn correlations(probs: &[f64]) -> Vec<f64> {
    let mut v = probs.to_vec();
    let mut h = 1;
    while h < v.len() {
        for block in (0..v.len()).step_by(2 * h) {
            for k in block..block + h {
                let (a, b) = (v[k], v[k + h]);
                v[k] = a + b;
                v[k + h] = b - a;
            }
        }
        h *= 2;
    }
    v
}

fn combinations(n: usize, s: usize, mut visit: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..s).collect();
    loop {
        visit(&idx);
        let mut k = s;
        while k > 0 && idx[k - 1] == n - s + k - 1 {
            k -= 1;
        }
        if k == 0 {
            return;
        }
        idx[k - 1] += 1;
        for m in k..s {
            idx[m] = idx[m - 1] + 1;
        }
    }
}

fn pattern_signs(pattern: usize, s: usize) -> Vec<i8> {
    (0..s).map(|u| if (pattern >> u) & 1 == 1 { 1 } else { -1 }).collect()
}

/// Exact deviation over every set of size `s` (`n ≤ 20`).
pub fn small_marginal_deviation(params: &ModelParams, s: usize) -> Result<SmallMarginalReport> {
    let n = params.n();
    if s == 0 || s > n {
        return Err(Error::InvalidParameter(format!("need 1 <= s <= n, got s = {s}")));
    }
    let mut count: u128 = 1;
    for i in 0..s {
        count = count * (n - i) as u128 / (i as u128 + 1);
    }
    if count > SUBSET_LIMIT {
        return Err(Error::InvalidParameter(format!("{count} sets of size {s} exceed the scan limit")));
    }
    let (reference, conditioned, tilt) = Reference::new(params.beta(), s)?;
    let cond = if conditioned { Conditioning::NonNegativeMean } else { Conditioning::None };
    let corr = correlations(ExactDistribution::compute(params, cond)?.probs());
    let scale = 0.5f64.powi(s as i32);
    let mut best = (0.0f64, Vec::new(), 0usize);
    let mut scanned = 0usize;
    combinations(n, s, |set| {
        scanned += 1;
        // c[u] = E[Π_{i ∈ sub(u)} X_i] for the subset of `set` selected by `u`.
        let c: Vec<f64> = (0..1usize << s)
            .map(|u| {
                let mask: usize = (0..s).filter(|b| (u >> b) & 1 == 1).map(|b| 1usize << set[b]).sum();
                corr[mask]
            })
            .collect();
        for pattern in 0..1usize << s {
            let p: f64 = c
                .iter()
                .enumerate()
                .map(|(u, cu)| {
                    let minus = (u & !pattern).count_ones();
                    if minus % 2 == 0 {
                        *cu
                    } else {
                        -*cu
                    }
                })
                .sum::<f64>()
                * scale;
            let dev = (p / reference.g(pattern) - 1.0).abs();
            if dev > best.0 {
                best = (dev, set.to_vec(), pattern);
            }
        }
    });
    Ok(SmallMarginalReport {
        n,
        s,
        beta: params.beta(),
        conditioned,
        tilt,
        deviation: best.0,
        worst_pattern: if best.1.is_empty() { Vec::new() } else { pattern_signs(best.2, s) },
        worst_set: best.1,
        sets_scanned: scanned,
        mc_standard_error: None,
        samples: None,
    })
}

/// Sampled estimate of the deviation over the given sets.
pub fn small_marginal_deviation_mc(
    params: &ModelParams,
    sets: &[Vec<usize>],
    samples: usize,
    seed: u64,
    choice: SamplerChoice,
) -> Result<SmallMarginalReport> {
    let n = params.n();
    let s = sets.first().map(Vec::len).ok_or_else(|| Error::InvalidClass("no sets given".into()))?;
    if s == 0 || s > 16 || sets.iter().any(|set| set.len() != s || set.iter().any(|&i| i >= n)) {
        return Err(Error::InvalidClass("sets must share a size in 1..=16 and lie in [n]".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let (reference, conditioned, tilt) = Reference::new(params.beta(), s)?;
    let cfg = SamplerConfig {
        seed,
        conditioning: if conditioned { Conditioning::NonNegativeMean } else { Conditioning::None },
        initial: if conditioned { crate::model::InitialState::AllPlus } else { crate::model::InitialState::Random },
        ..Default::default()
    };
    let sampler = PreparedSampler::prepare(params, choice, &cfg)?;
    let mut counts = vec![vec![0usize; 1 << s]; sets.len()];
    sampler.draw_with(seed, samples, |x| {
        for (set, row) in sets.iter().zip(counts.iter_mut()) {
            let pattern =
                set.iter().enumerate().filter(|(_, &i)| x.is_plus(i)).map(|(u, _)| 1usize << u).sum::<usize>();
            row[pattern] += 1;
        }
    })?;
    let mut best = (0.0f64, Vec::new(), 0usize);
    let mut se_max: f64 = 0.0;
    for (set, row) in sets.iter().zip(&counts) {
        for (pattern, &c) in row.iter().enumerate() {
            let p = c as f64 / samples as f64;
            let g = reference.g(pattern);
            se_max = se_max.max((p * (1.0 - p) / samples as f64).sqrt() / g);
            let dev = (p / g - 1.0).abs();
            if dev >= best.0 {
                best = (dev, set.clone(), pattern);
            }
        }
    }
    Ok(SmallMarginalReport {
        n,
        s,
        beta: params.beta(),
        conditioned,
        tilt,
        deviation: best.0,
        worst_pattern: pattern_signs(best.2, s),
        worst_set: best.1,
        sets_scanned: sets.len(),
        mc_standard_error: Some(se_max),
        samples: Some(samples),
    })
}
