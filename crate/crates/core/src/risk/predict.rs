use serde::{Deserialize, Serialize};

use crate::graphs::GraphFamily;

/// Constants `c < C` separating the small-`s` and large-`s` regimes.
///
/// Only their existence is known; the defaults are a convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegimeConstants {
    pub c: f64,
    pub big_c: f64,
}

impl Default for RegimeConstants {
    fn default() -> Self {
        RegimeConstants { c: 0.5, big_c: 4.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryRegime {
    Impossible,
    RateSqrtLognOverS,
    RateNQuarterOverS,
}

impl BoundaryRegime {
    pub fn id(&self) -> &'static str {
        match self {
            BoundaryRegime::Impossible => "impossible",
            BoundaryRegime::RateSqrtLognOverS => "rate_sqrt_logn_over_s",
            BoundaryRegime::RateNQuarterOverS => "rate_n_quarter_over_s",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPrediction {
    pub beta: f64,
    pub n: usize,
    pub s: usize,
    pub regime: BoundaryRegime,
    /// Order of the smallest detectable `tanh(A)`; absent when detection is impossible.
    pub rate: Option<f64>,
    pub conditions: Vec<String>,
}

/// Regime of the `(β, n, s)` cell for a graph family.
///
/// `s ≤ c log n` is impossible. Otherwise the rate is `√(log n / s)`, except
/// at `β = 1` on mean-field families with `s ≥ √n / log n`, where it is `n^{1/4}/s`.
pub fn predicted_boundary(
    beta: f64,
    n: usize,
    s: usize,
    family: &GraphFamily,
    k: RegimeConstants,
) -> BoundaryPrediction {
    let log_n = (n.max(2) as f64).ln();
    let sf = s as f64;
    let mut conditions = Vec::new();
    let sqrt_rate = (log_n / sf).sqrt();
    let (regime, rate) = if sf <= k.c * log_n {
        conditions.push(format!("s <= c log n with c = {}", k.c));
        (BoundaryRegime::Impossible, None)
    } else if !family.is_mean_field() {
        conditions.push("lattice family: high-temperature rate".into());
        (BoundaryRegime::RateSqrtLognOverS, Some(sqrt_rate))
    } else if beta != 1.0 {
        conditions.push("beta != 1".into());
        (BoundaryRegime::RateSqrtLognOverS, Some(sqrt_rate))
    } else {
        let cutoff = (n as f64).sqrt() / log_n;
        if sf >= cutoff {
            conditions.push(format!("beta = 1 and s >= sqrt(n)/log n = {cutoff:.4}"));
            (BoundaryRegime::RateNQuarterOverS, Some((n as f64).powf(0.25) / sf))
        } else {
            conditions.push(format!("beta = 1 and s < sqrt(n)/log n = {cutoff:.4}"));
            (BoundaryRegime::RateSqrtLognOverS, Some(sqrt_rate))
        }
    };
    if regime != BoundaryRegime::Impossible && sf < k.big_c * log_n {
        conditions.push(format!("c log n < s < C log n with C = {}: between the proven regimes", k.big_c));
    }
    BoundaryPrediction { beta, n, s, regime, rate, conditions }
}
