//! The Ising measure `P(x) ∝ exp((β/2) xᵀQx + μᵀx)` on `{-1, +1}^n`.

mod dump;
pub(crate) mod exact;
mod glauber;
mod lumped;
mod sampler;
mod spins;

pub use dump::{read_samples, write_samples, SampleDump};
pub use exact::{exact_distribution, exact_sample, ExactDistribution, ExactSampler, EXACT_LIMIT};
pub use glauber::{
    default_burn_in, glauber_sample, glauber_step, Conditioning, GlauberChain, InitialState, SamplerConfig,
};
pub use lumped::{LumpedCompleteSampler, LUMPED_TABLE_LIMIT};
pub use sampler::{PreparedSampler, SamplerChoice};
pub use spins::SpinConfig;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graphs::CouplingMatrix;

/// Inverse temperature, coupling matrix and external field.
#[derive(Debug, Clone)]
pub struct ModelParams {
    beta: f64,
    coupling: Arc<CouplingMatrix>,
    field: Vec<f64>,
}

impl ModelParams {
    pub fn new(beta: f64, coupling: Arc<CouplingMatrix>, field: Vec<f64>) -> Result<Self> {
        if field.len() != coupling.n() {
            return Err(Error::DimensionMismatch { expected: coupling.n(), got: field.len() });
        }
        if !beta.is_finite() || field.iter().any(|h| !h.is_finite()) {
            return Err(Error::InvalidParameter("beta and field must be finite".into()));
        }
        Ok(ModelParams { beta, coupling, field })
    }

    /// Zero-field model.
    pub fn null(beta: f64, coupling: Arc<CouplingMatrix>) -> Self {
        let n = coupling.n();
        ModelParams { beta, coupling, field: vec![0.0; n] }
    }

    pub fn with_field(&self, field: Vec<f64>) -> Result<Self> {
        ModelParams::new(self.beta, Arc::clone(&self.coupling), field)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn coupling(&self) -> &CouplingMatrix {
        &self.coupling
    }

    pub fn coupling_arc(&self) -> &Arc<CouplingMatrix> {
        &self.coupling
    }

    pub fn field(&self) -> &[f64] {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.coupling.n()
    }

    /// `β ≥ 0` and `Q ≥ 0` entrywise.
    pub fn is_ferromagnetic(&self) -> bool {
        self.beta >= 0.0 && self.coupling.is_nonnegative()
    }

    pub fn has_zero_field(&self) -> bool {
        self.field.iter().all(|&h| h == 0.0)
    }
}

/// `m_i = Σ_j Q_ij x_j` together with its mean.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFields {
    values: Vec<f64>,
    sum: f64,
}

impl LocalFields {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.sum / self.values.len() as f64
        }
    }

    /// Updates the fields after spin `i` changed to `new_spin`.
    pub fn apply_flip(&mut self, coupling: &CouplingMatrix, i: usize, new_spin: i8) {
        let delta = 2.0 * new_spin as f64;
        for (j, w) in coupling.row(i) {
            self.values[j] += w * delta;
            self.sum += w * delta;
        }
    }
}

pub fn local_fields(coupling: &CouplingMatrix, config: &SpinConfig) -> Result<LocalFields> {
    if config.n() != coupling.n() {
        return Err(Error::DimensionMismatch { expected: coupling.n(), got: config.n() });
    }
    let x: Vec<f64> = config.to_spins().iter().map(|&s| s as f64).collect();
    let mut values = vec![0.0; x.len()];
    coupling.mat_vec(&x, &mut values);
    let sum = values.iter().sum();
    Ok(LocalFields { values, sum })
}

/// `P(X_i = +1 | rest) = (1 + tanh(β m_i + μ_i)) / 2`.
#[inline]
pub fn conditional_prob_plus(beta: f64, m_i: f64, mu_i: f64) -> f64 {
    0.5 * (1.0 + (beta * m_i + mu_i).tanh())
}

/// Unnormalised log-mass `(β/2) xᵀQx + μᵀx`, computed edge by edge.
pub fn log_weight(params: &ModelParams, config: &SpinConfig) -> Result<f64> {
    let n = params.n();
    if config.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: config.n() });
    }
    let q = params.coupling();
    let quad = match q.complete_weight() {
        Some(w) => {
            let m = config.sum() as f64;
            0.5 * w * (m * m - n as f64)
        }
        None => {
            let mut acc = 0.0;
            for i in 0..n {
                let si = config.spin(i) as f64;
                for (j, w) in q.row(i) {
                    if j > i {
                        acc += w * si * config.spin(j) as f64;
                    }
                }
            }
            acc
        }
    };
    let lin: f64 = params.field.iter().enumerate().map(|(i, h)| h * config.spin(i) as f64).sum();
    Ok(params.beta * quad + lin)
}

/// `μ_i = η · 1{i ∈ S}`.
pub fn field_vector(n: usize, support: &[usize], eta: f64) -> Result<Vec<f64>> {
    let mut mu = vec![0.0; n];
    for &i in support {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        mu[i] = eta;
    }
    Ok(mu)
}
