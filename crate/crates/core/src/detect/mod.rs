//! The conditional scan, the naive scan and the critical magnetization test.

mod diagnostics;

pub use diagnostics::{empirical_quantile, local_field_deviation, LocalFieldReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::CouplingMatrix;
use crate::model::{ModelParams, SpinConfig};
use crate::signals::SignalClass;

/// Sets larger than this are summed with compensation.
pub const COMPENSATED_SUM_THRESHOLD: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    ConditionalScan,
    NaiveScan,
    Magnetization,
    /// Constant decisions, useful as risk baselines.
    AcceptAlways,
    RejectAlways,
}

impl TestKind {
    pub fn id(&self) -> &'static str {
        match self {
            TestKind::ConditionalScan => "conditional_scan",
            TestKind::NaiveScan => "naive_scan",
            TestKind::Magnetization => "magnetization",
            TestKind::AcceptAlways => "accept_always",
            TestKind::RejectAlways => "reject_always",
        }
    }
}

/// Cutoff for `n^{1/4} X̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum MagnetizationCutoff {
    /// `δ₀ · k_n` with `k_n = (n^{-1/4} s A)^{1/3}`.
    KScaled {
        delta0: f64,
        s: usize,
        a: f64,
    },
    Fixed {
        threshold: f64,
    },
    /// Empirical null quantile, resolved by the risk layer before use.
    Calibrated {
        quantile: f64,
        replicates: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestSpec {
    pub kind: TestKind,
    /// Slack `δ ∈ (0, 1)` of the scan thresholds.
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Contraction bound `η ∈ [0, 1)` of the naive scan.
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub cutoff: Option<MagnetizationCutoff>,
}

fn default_delta() -> f64 {
    0.1
}

impl TestSpec {
    pub fn conditional_scan(delta: f64) -> Self {
        TestSpec { kind: TestKind::ConditionalScan, delta, eta: 0.0, cutoff: None }
    }

    pub fn naive_scan(delta: f64, eta: f64) -> Self {
        TestSpec { kind: TestKind::NaiveScan, delta, eta, cutoff: None }
    }

    pub fn magnetization(cutoff: MagnetizationCutoff) -> Self {
        TestSpec { kind: TestKind::Magnetization, delta: default_delta(), eta: 0.0, cutoff: Some(cutoff) }
    }

    pub fn constant(reject: bool) -> Self {
        let kind = if reject { TestKind::RejectAlways } else { TestKind::AcceptAlways };
        TestSpec { kind, delta: default_delta(), eta: 0.0, cutoff: None }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            TestKind::ConditionalScan => check_delta(self.delta),
            TestKind::NaiveScan => {
                check_delta(self.delta)?;
                check_eta(self.eta)
            }
            TestKind::Magnetization => match self.cutoff {
                None => Err(Error::InvalidParameter("magnetization test needs a cutoff".into())),
                Some(MagnetizationCutoff::Calibrated { quantile, replicates }) => {
                    if !(quantile > 0.0 && quantile < 1.0) || replicates == 0 {
                        Err(Error::InvalidParameter("calibration needs a quantile in (0,1) and replicates".into()))
                    } else {
                        Ok(())
                    }
                }
                Some(_) => Ok(()),
            },
            TestKind::AcceptAlways | TestKind::RejectAlways => Ok(()),
        }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")))
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("eta must lie in [0, 1), got {eta}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Reject,
    Accept,
}

impl Decision {
    pub fn rejects(&self) -> bool {
        matches!(self, Decision::Reject)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub kind: TestKind,
    pub statistic: f64,
    pub threshold: f64,
    pub decision: Decision,
    /// Index in the class of the set attaining the scan maximum.
    pub argmax_set: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_set: Option<Vec<f64>>,
}

impl TestResult {
    fn new(kind: TestKind, statistic: f64, threshold: f64, argmax_set: Option<usize>) -> Self {
        let decision = if statistic > threshold { Decision::Reject } else { Decision::Accept };
        TestResult { kind, statistic, threshold, decision, argmax_set, per_set: None }
    }

    pub fn rejects(&self) -> bool {
        self.decision.rejects()
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn set_sum(set: &[usize], value: impl Fn(usize) -> f64) -> f64 {
    if set.len() > COMPENSATED_SUM_THRESHOLD {
        compensated_sum(set.iter().map(|&i| value(i)))
    } else {
        set.iter().map(|&i| value(i)).sum()
    }
}

/// `max_S |Σ_{i∈S} r_i| / √|S|` with the lowest index winning ties.
fn scan(class: &SignalClass, value: impl Fn(usize) -> f64, keep: bool) -> (f64, usize, Option<Vec<f64>>) {
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    let mut per_set = keep.then(|| Vec::with_capacity(class.len()));
    for (k, set) in class.sets().iter().enumerate() {
        let l = set_sum(set, &value) / (set.len() as f64).sqrt();
        if let Some(v) = per_set.as_mut() {
            v.push(l);
        }
        if l.abs() > best {
            best = l.abs();
            arg = k;
        }
    }
    (best, arg, per_set)
}

fn check_dims(config: &SpinConfig, class: &SignalClass) -> Result<()> {
    if config.n() != class.n() {
        return Err(Error::DimensionMismatch { expected: class.n(), got: config.n() });
    }
    Ok(())
}

/// `2(1 + |β|‖Q‖∞) √(2(1+δ) log|C|)`.
pub fn conditional_scan_threshold(beta: f64, inf_norm: f64, class_size: usize, delta: f64) -> f64 {
    2.0 * (1.0 + beta.abs() * inf_norm) * (2.0 * (1.0 + delta) * (class_size as f64).ln()).sqrt()
}

/// `√((1+δ) log|C| / (1-η))`.
pub fn naive_scan_threshold(class_size: usize, delta: f64, eta: f64) -> f64 {
    ((1.0 + delta) * (class_size as f64).ln() / (1.0 - eta)).sqrt()
}

/// Per-site residual `x_i - tanh(β m_i)` evaluated lazily.
struct Residuals<'a> {
    config: &'a SpinConfig,
    coupling: &'a CouplingMatrix,
    beta: f64,
    total: f64,
}

impl Residuals<'_> {
    fn at(&self, i: usize) -> f64 {
        let x = self.config.spin(i) as f64;
        let m = match self.coupling.complete_weight() {
            Some(w) => w * (self.total - x),
            None => self.coupling.row(i).map(|(j, w)| w * self.config.spin(j) as f64).sum(),
        };
        x - (self.beta * m).tanh()
    }
}

fn conditional_scan_with(
    config: &SpinConfig,
    beta: f64,
    coupling: &CouplingMatrix,
    inf_norm: f64,
    class: &SignalClass,
    delta: f64,
    keep: bool,
) -> Result<TestResult> {
    check_dims(config, class)?;
    if coupling.n() != class.n() {
        return Err(Error::DimensionMismatch { expected: class.n(), got: coupling.n() });
    }
    check_delta(delta)?;
    let r = Residuals { config, coupling, beta, total: config.sum() as f64 };
    let (stat, arg, per_set) = scan(class, |i| r.at(i), keep);
    let threshold = conditional_scan_threshold(beta, inf_norm, class.len(), delta);
    let mut out = TestResult::new(TestKind::ConditionalScan, stat, threshold, Some(arg));
    out.per_set = per_set;
    Ok(out)
}

/// `L_n = max_S |Σ_{i∈S} (X_i - tanh(β m_i))| / √|S|` against its union-bound threshold.
pub fn conditional_scan(
    config: &SpinConfig,
    beta: f64,
    coupling: &CouplingMatrix,
    class: &SignalClass,
    delta: f64,
) -> Result<TestResult> {
    conditional_scan_with(config, beta, coupling, coupling.inf_norm(), class, delta, false)
}

/// `L̃_n = max_S |Σ_{i∈S} X_i| / √|S|`. Needs no knowledge of `β` or `Q`.
pub fn naive_scan(config: &SpinConfig, class: &SignalClass, delta: f64, eta: f64) -> Result<TestResult> {
    naive_scan_with(config, class, delta, eta, false)
}

fn naive_scan_with(config: &SpinConfig, class: &SignalClass, delta: f64, eta: f64, keep: bool) -> Result<TestResult> {
    check_dims(config, class)?;
    check_delta(delta)?;
    check_eta(eta)?;
    let (stat, arg, per_set) = scan(class, |i| config.spin(i) as f64, keep);
    let mut out = TestResult::new(TestKind::NaiveScan, stat, naive_scan_threshold(class.len(), delta, eta), Some(arg));
    out.per_set = per_set;
    Ok(out)
}

/// `k_n = (n^{-1/4} s A)^{1/3}`.
pub fn k_n(n: usize, s: usize, a: f64) -> f64 {
    ((n as f64).powf(-0.25) * s as f64 * a).cbrt()
}

pub fn magnetization_statistic(config: &SpinConfig) -> f64 {
    (config.n() as f64).powf(0.25) * config.mean()
}

/// Rejects when `n^{1/4} X̄` exceeds the cutoff.
pub fn magnetization_test(config: &SpinConfig, cutoff: MagnetizationCutoff) -> Result<TestResult> {
    let threshold = match cutoff {
        MagnetizationCutoff::KScaled { delta0, s, a } => delta0 * k_n(config.n(), s, a),
        MagnetizationCutoff::Fixed { threshold } => threshold,
        MagnetizationCutoff::Calibrated { .. } => {
            return Err(Error::InvalidParameter("calibrated cutoff has not been resolved".into()))
        }
    };
    Ok(TestResult::new(TestKind::Magnetization, magnetization_statistic(config), threshold, None))
}

/// A test bound to its null model and class, ready to evaluate many states.
#[derive(Debug, Clone)]
pub struct Detector<'a> {
    spec: TestSpec,
    null: &'a ModelParams,
    class: &'a SignalClass,
    inf_norm: f64,
}

impl<'a> Detector<'a> {
    pub fn new(spec: TestSpec, null: &'a ModelParams, class: &'a SignalClass) -> Result<Self> {
        spec.validate()?;
        if null.n() != class.n() {
            return Err(Error::DimensionMismatch { expected: null.n(), got: class.n() });
        }
        Ok(Detector { spec, null, class, inf_norm: null.coupling().inf_norm() })
    }

    pub fn spec(&self) -> &TestSpec {
        &self.spec
    }

    pub fn evaluate(&self, config: &SpinConfig) -> Result<TestResult> {
        self.evaluate_with(config, false)
    }

    pub fn evaluate_with(&self, config: &SpinConfig, per_set: bool) -> Result<TestResult> {
        match self.spec.kind {
            TestKind::ConditionalScan => conditional_scan_with(
                config,
                self.null.beta(),
                self.null.coupling(),
                self.inf_norm,
                self.class,
                self.spec.delta,
                per_set,
            ),
            TestKind::NaiveScan => naive_scan_with(config, self.class, self.spec.delta, self.spec.eta, per_set),
            TestKind::Magnetization => magnetization_test(config, self.spec.cutoff.expect("validated")),
            TestKind::AcceptAlways => Ok(TestResult::new(TestKind::AcceptAlways, 0.0, 0.0, None)),
            TestKind::RejectAlways => Ok(TestResult::new(TestKind::RejectAlways, 1.0, 0.0, None)),
        }
    }

    pub fn rejects(&self, config: &SpinConfig) -> Result<bool> {
        Ok(self.evaluate(config)?.rejects())
    }
}
