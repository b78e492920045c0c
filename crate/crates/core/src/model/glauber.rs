//! Heat-bath (Glauber) dynamics with systematic scan.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{conditional_prob_plus, LocalFields, ModelParams, SpinConfig};
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    AllPlus,
    AllMinus,
    Random,
}

/// Optional restriction of the retained samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conditioning {
    #[default]
    None,
    /// Keep only states with `X̄ ≥ 0`; others are discarded and the chain continues.
    NonNegativeMean,
}

impl Conditioning {
    pub fn admits(&self, config: &SpinConfig) -> bool {
        match self {
            Conditioning::None => true,
            Conditioning::NonNegativeMean => config.sum() >= 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    /// Sweeps discarded before the first retained sample; `None` selects
    /// [`default_burn_in`].
    pub burn_in: Option<usize>,
    /// Sweeps performed before each retained sample (at least one).
    pub thinning: usize,
    pub num_samples: usize,
    pub seed: u64,
    pub initial: InitialState,
    pub conditioning: Conditioning,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            burn_in: None,
            thinning: 1,
            num_samples: 1,
            seed: 0,
            initial: InitialState::Random,
            conditioning: Conditioning::None,
        }
    }
}

impl SamplerConfig {
    pub fn with_seed(seed: u64) -> Self {
        SamplerConfig { seed, ..Default::default() }
    }

    pub fn burn_in_for(&self, beta: f64, n: usize) -> usize {
        self.burn_in.unwrap_or_else(|| default_burn_in(beta, n))
    }
}

/// `200·⌈ln n⌉` sweeps for β < 1 and `2000·⌈ln n⌉` for β ≥ 1.
pub fn default_burn_in(beta: f64, n: usize) -> usize {
    let logs = ((n.max(2) as f64).ln().ceil() as usize).max(1);
    if beta < 1.0 {
        200 * logs
    } else {
        2000 * logs
    }
}

/// Sets spin `i` to +1 iff `u < P(X_i = +1 | rest)` and updates the fields of
/// its neighbours.
pub fn glauber_step(params: &ModelParams, config: &mut SpinConfig, fields: &mut LocalFields, i: usize, u: f64) {
    let p = conditional_prob_plus(params.beta(), fields.get(i), params.field()[i]);
    let plus = u < p;
    if plus != config.is_plus(i) {
        config.set(i, plus);
        fields.apply_flip(params.coupling(), i, if plus { 1 } else { -1 });
    }
}

enum FieldState {
    /// Complete coupling: `m_i = w (Σx - x_i)`, tracked through the integer sum.
    Complete {
        weight: f64,
        total: i64,
    },
    Sparse {
        fields: Vec<f64>,
    },
}

/// A single Glauber chain owning its state and random stream.
pub struct GlauberChain<'a> {
    params: &'a ModelParams,
    config: SpinConfig,
    state: FieldState,
    rng: StreamRng,
}

impl<'a> GlauberChain<'a> {
    pub fn new(params: &'a ModelParams, initial: InitialState, seed: u64) -> Self {
        let n = params.n();
        let mut rng = rng_from_seed(seed);
        let config = match initial {
            InitialState::AllPlus => SpinConfig::all_plus(n),
            InitialState::AllMinus => SpinConfig::all_minus(n),
            InitialState::Random => {
                let mut c = SpinConfig::all_minus(n);
                for i in 0..n {
                    c.set(i, rng.gen::<bool>());
                }
                c
            }
        };
        let state = match params.coupling().complete_weight() {
            Some(weight) => FieldState::Complete { weight, total: config.sum() },
            None => {
                let f = super::local_fields(params.coupling(), &config).expect("dimensions agree");
                FieldState::Sparse { fields: f.values().to_vec() }
            }
        };
        GlauberChain { params, config, state, rng }
    }

    pub fn config(&self) -> &SpinConfig {
        &self.config
    }

    /// Heat-bath update of site `i` with the supplied uniform.
    #[inline]
    pub fn step_with(&mut self, i: usize, u: f64) {
        let beta = self.params.beta();
        let mu = self.params.field()[i];
        let was_plus = self.config.is_plus(i);
        match &mut self.state {
            FieldState::Complete { weight, total } => {
                let own = if was_plus { 1 } else { -1 };
                let m = *weight * (*total - own) as f64;
                let plus = u < conditional_prob_plus(beta, m, mu);
                if plus != was_plus {
                    self.config.set(i, plus);
                    *total += if plus { 2 } else { -2 };
                }
            }
            FieldState::Sparse { fields } => {
                let plus = u < conditional_prob_plus(beta, fields[i], mu);
                if plus != was_plus {
                    self.config.set(i, plus);
                    let delta = if plus { 2.0 } else { -2.0 };
                    for (j, w) in self.params.coupling().row(i) {
                        fields[j] += w * delta;
                    }
                }
            }
        }
    }

    /// One systematic-scan sweep over sites `0..n`.
    pub fn sweep(&mut self) {
        for i in 0..self.params.n() {
            let u: f64 = self.rng.gen();
            self.step_with(i, u);
        }
    }

    /// Runs burn-in, then hands each retained state to `visit`.
    pub fn run_with(&mut self, cfg: &SamplerConfig, mut visit: impl FnMut(&SpinConfig)) -> Result<()> {
        for _ in 0..cfg.burn_in_for(self.params.beta(), self.params.n()) {
            self.sweep();
        }
        let max_attempts = 1000 * cfg.num_samples + 1000;
        let mut kept = 0;
        let mut attempts = 0;
        while kept < cfg.num_samples {
            for _ in 0..cfg.thinning.max(1) {
                self.sweep();
            }
            attempts += 1;
            if cfg.conditioning.admits(&self.config) {
                visit(&self.config);
                kept += 1;
            } else if attempts >= max_attempts {
                return Err(Error::Conditioning { attempts });
            }
        }
        Ok(())
    }

    /// Local fields recomputed from the tracked state.
    pub fn fields(&self) -> LocalFields {
        match &self.state {
            FieldState::Complete { .. } => {
                super::local_fields(self.params.coupling(), &self.config).expect("dimensions agree")
            }
            FieldState::Sparse { fields } => LocalFields { values: fields.clone(), sum: fields.iter().sum() },
        }
    }
}

pub fn glauber_sample(params: &ModelParams, cfg: &SamplerConfig) -> Result<Vec<SpinConfig>> {
    if cfg.num_samples == 0 {
        return Err(Error::InvalidParameter("num_samples must be at least 1".into()));
    }
    let mut chain = GlauberChain::new(params, cfg.initial, cfg.seed);
    let mut out = Vec::with_capacity(cfg.num_samples);
    chain.run_with(cfg, |c| out.push(c.clone()))?;
    Ok(out)
}
