//! Worst-case risk `P₀(reject) + sup_μ P_μ(accept)`, estimated by simulation
//! or computed exactly, plus grid sweeps and the predicted regime map.

mod predict;
mod sweep;

pub use predict::{predicted_boundary, BoundaryPrediction, BoundaryRegime, RegimeConstants};
pub use sweep::{
    boundary_sweep, boundary_sweep_csv, read_records, AxisA, ClassRule, RiskRecord, SweepGrid, CSV_HEADER,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detect::{
    compensated_sum, empirical_quantile, magnetization_statistic, Detector, MagnetizationCutoff, TestKind, TestSpec,
};
use crate::error::{Error, Result};
use crate::model::{
    ExactDistribution, ModelParams, PreparedSampler, SamplerChoice, SamplerConfig, SpinConfig, EXACT_LIMIT,
};
use crate::rng::derive_seed;
use crate::signals::{alternative_field, AlternativeSpec};

/// Stream tags under the risk seed.
const NULL_STREAM: u64 = 0;
const ALT_STREAM: u64 = 1;
const CALIBRATION_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskOptions {
    pub seed: u64,
    #[serde(default)]
    pub sampler: SamplerChoice,
    /// Burn-in, thinning, initial state and conditioning for every replicate chain.
    #[serde(default)]
    pub chain: SamplerConfig,
    /// Maximise type II over every set of the class instead of the first one.
    #[serde(default)]
    pub exhaustive: bool,
}

impl RiskOptions {
    pub fn with_seed(seed: u64) -> Self {
        RiskOptions { seed, sampler: SamplerChoice::Auto, chain: SamplerConfig::default(), exhaustive: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub type1: f64,
    pub type1_se: f64,
    pub type2: f64,
    pub type2_se: f64,
    pub risk: f64,
    pub replicates: usize,
    pub seed: u64,
    /// Set index at which type II was largest.
    pub worst_set: usize,
    /// Cutoff used by a calibrated magnetization test.
    pub calibrated_threshold: Option<f64>,
}

fn binomial_se(p: f64, r: usize) -> f64 {
    (p * (1.0 - p) / r as f64).sqrt()
}

fn alternative_sets(alt: &AlternativeSpec, exhaustive: bool) -> Vec<usize> {
    if exhaustive {
        (0..alt.class().len()).collect()
    } else {
        vec![0]
    }
}

/// Fraction of `replicates` independent draws on which `f` holds.
fn replicate_rate(
    sampler: &PreparedSampler<'_>,
    base: u64,
    path: &[u64],
    replicates: usize,
    f: impl Fn(&SpinConfig) -> Result<bool> + Sync,
) -> Result<f64> {
    let hits = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut p = path.to_vec();
            p.push(r);
            let x = sampler.draw_one(derive_seed(base, &p))?;
            f(&x).map(usize::from)
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok(hits.iter().sum::<usize>() as f64 / replicates as f64)
}

/// Empirical null quantile of `n^{1/4} X̄` over seeded replicates.
pub fn calibrate_magnetization(
    null: &ModelParams,
    quantile: f64,
    replicates: usize,
    opts: &RiskOptions,
) -> Result<f64> {
    let sampler = PreparedSampler::prepare(null, opts.sampler, &opts.chain)?;
    let stats = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let x = sampler.draw_one(derive_seed(opts.seed, &[CALIBRATION_STREAM, r]))?;
            Ok(magnetization_statistic(&x))
        })
        .collect::<Result<Vec<f64>>>()?;
    empirical_quantile(&stats, quantile)
}

fn resolve_calibration(test: &TestSpec, null: &ModelParams, opts: &RiskOptions) -> Result<(TestSpec, Option<f64>)> {
    match test.cutoff {
        Some(MagnetizationCutoff::Calibrated { quantile, replicates }) if test.kind == TestKind::Magnetization => {
            let threshold = calibrate_magnetization(null, quantile, replicates, opts)?;
            Ok((TestSpec::magnetization(MagnetizationCutoff::Fixed { threshold }), Some(threshold)))
        }
        _ => Ok((*test, None)),
    }
}

/// Monte-Carlo risk of `test` against the extremal alternatives `μ_S(A)`.
///
/// Every replicate draws from its own stream `derive_seed(seed, [tag, set, replicate])`,
/// so results do not depend on the number of worker threads.
pub fn estimate_risk(
    test: &TestSpec,
    null: &ModelParams,
    alt: &AlternativeSpec,
    replicates: usize,
    opts: &RiskOptions,
) -> Result<RiskEstimate> {
    if replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be positive".into()));
    }
    let (spec, calibrated_threshold) = resolve_calibration(test, null, opts)?;
    let detector = Detector::new(spec, null, alt.class())?;
    let null_sampler = PreparedSampler::prepare(null, opts.sampler, &opts.chain)?;
    let type1 = replicate_rate(&null_sampler, opts.seed, &[NULL_STREAM], replicates, |x| detector.rejects(x))?;
    drop(null_sampler);

    let mut type2 = f64::NEG_INFINITY;
    let mut worst_set = 0;
    for k in alternative_sets(alt, opts.exhaustive) {
        let params = null.with_field(alternative_field(alt, k)?)?;
        let sampler = PreparedSampler::prepare(&params, opts.sampler, &opts.chain)?;
        let miss = replicate_rate(&sampler, opts.seed, &[ALT_STREAM, k as u64], replicates, |x| {
            detector.rejects(x).map(|r| !r)
        })?;
        if miss > type2 {
            type2 = miss;
            worst_set = k;
        }
    }
    Ok(RiskEstimate {
        type1,
        type1_se: binomial_se(type1, replicates),
        type2,
        type2_se: binomial_se(type2, replicates),
        risk: type1 + type2,
        replicates,
        seed: opts.seed,
        worst_set,
        calibrated_threshold,
    })
}

/// Exact risk by summing decision indicators against enumerated laws (`n ≤ 20`).
///
/// A calibrated magnetization cutoff is replaced by the exact null quantile.
pub fn exact_risk(
    test: &TestSpec,
    null: &ModelParams,
    alt: &AlternativeSpec,
    exhaustive: bool,
) -> Result<RiskEstimate> {
    let n = null.n();
    if n > EXACT_LIMIT {
        return Err(Error::SizeCap { n, cap: EXACT_LIMIT });
    }
    let null_dist = ExactDistribution::compute(null, Default::default())?;
    let (spec, calibrated_threshold) = match test.cutoff {
        Some(MagnetizationCutoff::Calibrated { quantile, .. }) if test.kind == TestKind::Magnetization => {
            let threshold = exact_quantile(&null_dist, quantile);
            (TestSpec::magnetization(MagnetizationCutoff::Fixed { threshold }), Some(threshold))
        }
        _ => (*test, None),
    };
    let detector = Detector::new(spec, null, alt.class())?;
    let rejects =
        (0..1u64 << n).map(|code| detector.rejects(&SpinConfig::from_code(n, code))).collect::<Result<Vec<bool>>>()?;
    let mass = |probs: &[f64], reject: bool| {
        let m = compensated_sum(probs.iter().zip(&rejects).filter(|(_, r)| **r == reject).map(|(p, _)| *p));
        m.clamp(0.0, 1.0)
    };
    let type1 = mass(null_dist.probs(), true);
    let mut type2 = f64::NEG_INFINITY;
    let mut worst_set = 0;
    for k in alternative_sets(alt, exhaustive) {
        let field = alternative_field(alt, k)?;
        let dist = ExactDistribution::compute(&null.with_field(field)?, Default::default())?;
        let miss = mass(dist.probs(), false);
        if miss > type2 {
            type2 = miss;
            worst_set = k;
        }
    }
    Ok(RiskEstimate {
        type1,
        type1_se: 0.0,
        type2,
        type2_se: 0.0,
        risk: type1 + type2,
        replicates: 0,
        seed: 0,
        worst_set,
        calibrated_threshold,
    })
}

/// Smallest value `v` of `n^{1/4} X̄` with `P₀(stat ≤ v) ≥ q`.
fn exact_quantile(dist: &ExactDistribution, q: f64) -> f64 {
    let n = dist.n();
    let mut by_sum = vec![0.0; n + 1];
    for (code, p) in dist.probs().iter().enumerate() {
        by_sum[code.count_ones() as usize] += p;
    }
    let mut acc = 0.0;
    for (plus, p) in by_sum.iter().enumerate() {
        acc += p;
        if acc >= q - 1e-15 {
            let mean = (2.0 * plus as f64 - n as f64) / n as f64;
            return (n as f64).powf(0.25) * mean;
        }
    }
    (n as f64).powf(0.25)
}
