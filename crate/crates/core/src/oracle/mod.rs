//! Exact small-`n` computations: partition functions, moments, fixed points,
//! likelihood-ratio second moments and correlation-inequality checks.

mod fixed_point;
mod inequalities;
mod marginals;
mod second_moment;

pub use fixed_point::{fixed_point, FixedPoint, Regime};
pub use inequalities::{random_instance, verify_inequalities, CheckSummary, InequalityReport, RandomInstance};
pub use marginals::{
    chain_correlation, small_marginal_deviation, small_marginal_deviation_mc, ChainCorrelation, SmallMarginalReport,
};
pub use second_moment::{second_moment_general, second_moment_mixture, SecondMomentMode, SecondMomentReport};

pub use crate::model::Conditioning;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{ExactDistribution, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionValue {
    pub log_z: f64,
}

impl PartitionValue {
    pub fn z(&self) -> f64 {
        self.log_z.exp()
    }
}

pub fn partition_function(params: &ModelParams, cond: Conditioning) -> Result<PartitionValue> {
    Ok(PartitionValue { log_z: ExactDistribution::compute(params, cond)?.log_z() })
}

/// Exact means, second moments and covariances.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub means: Vec<f64>,
    pub second: DMatrix<f64>,
    pub covariances: DMatrix<f64>,
    pub conditioning: Conditioning,
}

impl MomentTable {
    pub fn n(&self) -> usize {
        self.means.len()
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.means[i]
    }

    /// `E[X_i X_j]`.
    pub fn second_moment(&self, i: usize, j: usize) -> f64 {
        self.second[(i, j)]
    }

    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        self.covariances[(i, j)]
    }
}

#[inline]
fn spin_of(code: usize, i: usize) -> f64 {
    if (code >> i) & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Moments of an already normalised table.
pub fn moments_of(dist: &ExactDistribution, cond: Conditioning) -> MomentTable {
    let n = dist.n();
    let probs = dist.probs();
    let mut means = vec![0.0; n];
    for (code, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (i, m) in means.iter_mut().enumerate() {
            *m += p * spin_of(code, i);
        }
    }
    let mut second = DMatrix::zeros(n, n);
    let mut cov = DMatrix::zeros(n, n);
    let mut centred = vec![0.0; n];
    let mut x = vec![0.0; n];
    for (code, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for i in 0..n {
            x[i] = spin_of(code, i);
            centred[i] = x[i] - means[i];
        }
        for i in 0..n {
            for j in i..n {
                second[(i, j)] += p * x[i] * x[j];
                cov[(i, j)] += p * centred[i] * centred[j];
            }
        }
    }
    for i in 0..n {
        // X_i² = 1 identically; avoid the rounding of the probability sum.
        second[(i, i)] = 1.0;
        for j in 0..i {
            second[(i, j)] = second[(j, i)];
            cov[(i, j)] = cov[(j, i)];
        }
    }
    MomentTable { means, second, covariances: cov, conditioning: cond }
}

pub fn moments(params: &ModelParams, cond: Conditioning) -> Result<MomentTable> {
    let dist = ExactDistribution::compute(params, cond)?;
    Ok(moments_of(&dist, cond))
}
