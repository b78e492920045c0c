use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::CouplingMatrix;
use crate::model::{local_fields, SpinConfig};
use crate::oracle::fixed_point;

/// Order statistic `x_(⌈qN⌉)` of the sorted sample (type-1 quantile).
pub fn empirical_quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter("quantile needs data and q in [0, 1]".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Ok(sorted[rank - 1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalFieldReport {
    /// Fixed point `t` the fields are compared against.
    pub t: f64,
    /// `(level, quantile)` of `max_i |m_i - t|` over the samples.
    pub quantiles: Vec<(f64, f64)>,
    /// `√(log n / d̄)`.
    pub alpha_n: f64,
    pub samples: usize,
}

impl LocalFieldReport {
    pub fn quantile(&self, level: f64) -> Option<f64> {
        self.quantiles.iter().find(|(l, _)| *l == level).map(|(_, v)| *v)
    }
}

/// Quantiles 0.5, 0.9 and 0.99 of `max_i |m_i(X) - t|`, with `t` the fixed
/// point of `x = tanh(βx + B)`.
pub fn local_field_deviation(
    samples: &[SpinConfig],
    coupling: &CouplingMatrix,
    beta: f64,
    b: f64,
) -> Result<LocalFieldReport> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let t = fixed_point(beta, b)?.t;
    let stats = samples
        .iter()
        .map(|x| {
            let f = local_fields(coupling, x)?;
            Ok(f.values().iter().map(|m| (m - t).abs()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = coupling.n();
    let avg_degree = (0..n).map(|i| coupling.degree(i)).sum::<usize>() as f64 / n as f64;
    let alpha_n = if avg_degree > 0.0 { ((n as f64).ln() / avg_degree).sqrt() } else { f64::INFINITY };
    let quantiles =
        [0.5, 0.9, 0.99].iter().map(|&l| empirical_quantile(&stats, l).map(|v| (l, v))).collect::<Result<_>>()?;
    Ok(LocalFieldReport { t, quantiles, alpha_n, samples: samples.len() })
}
