//! Sampler selection shared by the risk and CLI layers.

use serde::{Deserialize, Serialize};

use super::{
    Conditioning, ExactDistribution, ExactSampler, GlauberChain, LumpedCompleteSampler, ModelParams, SamplerConfig,
    SpinConfig, EXACT_LIMIT,
};
use crate::error::Result;
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerChoice {
    /// Exact enumeration for `n ≤ 20`, lumped exact sampling on complete
    /// couplings, Glauber dynamics otherwise.
    #[default]
    Auto,
    Glauber,
    ExactEnumeration,
    LumpedComplete,
}

/// A sampler with its precomputation done, reusable across seeds.
pub enum PreparedSampler<'a> {
    Exact(ExactSampler),
    Lumped(LumpedCompleteSampler),
    Glauber { params: &'a ModelParams, cfg: SamplerConfig },
}

impl<'a> PreparedSampler<'a> {
    pub fn prepare(params: &'a ModelParams, choice: SamplerChoice, cfg: &SamplerConfig) -> Result<Self> {
        let cond = cfg.conditioning;
        let resolved = match choice {
            SamplerChoice::Auto if params.n() <= EXACT_LIMIT => SamplerChoice::ExactEnumeration,
            SamplerChoice::Auto if params.coupling().complete_weight().is_some() => SamplerChoice::LumpedComplete,
            SamplerChoice::Auto => SamplerChoice::Glauber,
            other => other,
        };
        Ok(match resolved {
            SamplerChoice::ExactEnumeration => {
                PreparedSampler::Exact(ExactDistribution::compute(params, cond)?.sampler())
            }
            SamplerChoice::LumpedComplete => match LumpedCompleteSampler::new(params, cond) {
                Ok(s) => PreparedSampler::Lumped(s),
                Err(e) if choice == SamplerChoice::Auto => {
                    let _ = e;
                    PreparedSampler::Glauber { params, cfg: *cfg }
                }
                Err(e) => return Err(e),
            },
            _ => PreparedSampler::Glauber { params, cfg: *cfg },
        })
    }

    pub fn kind(&self) -> SamplerChoice {
        match self {
            PreparedSampler::Exact(_) => SamplerChoice::ExactEnumeration,
            PreparedSampler::Lumped(_) => SamplerChoice::LumpedComplete,
            PreparedSampler::Glauber { .. } => SamplerChoice::Glauber,
        }
    }

    /// Draws `count` states from the stream seeded by `seed`.
    ///
    /// Exact samplers return i.i.d. draws; the Glauber sampler returns
    /// successive retained states of one chain.
    pub fn draw_with(&self, seed: u64, count: usize, mut visit: impl FnMut(&SpinConfig)) -> Result<()> {
        match self {
            PreparedSampler::Exact(s) => {
                let mut rng = rng_from_seed(seed);
                for _ in 0..count {
                    visit(&s.draw(&mut rng));
                }
                Ok(())
            }
            PreparedSampler::Lumped(s) => {
                let mut rng = rng_from_seed(seed);
                for _ in 0..count {
                    visit(&s.draw(&mut rng));
                }
                Ok(())
            }
            PreparedSampler::Glauber { params, cfg } => {
                let cfg = SamplerConfig { num_samples: count, seed, ..*cfg };
                let mut chain = GlauberChain::new(params, cfg.initial, seed);
                chain.run_with(&cfg, visit)
            }
        }
    }

    pub fn draw(&self, seed: u64, count: usize) -> Result<Vec<SpinConfig>> {
        let mut out = Vec::with_capacity(count);
        self.draw_with(seed, count, |c| out.push(c.clone()))?;
        Ok(out)
    }

    pub fn draw_one(&self, seed: u64) -> Result<SpinConfig> {
        let mut out = None;
        self.draw_with(seed, 1, |c| out = Some(c.clone()))?;
        Ok(out.expect("one state drawn"))
    }
}

impl Conditioning {
    pub fn is_none(&self) -> bool {
        matches!(self, Conditioning::None)
    }
}
