//! `E₀[L_π²]` for a uniform prior over finitely many field vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::exact::{log_sum_exp, log_weights};
use crate::model::{field_vector, ModelParams};
use crate::signals::SignalClass;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondMomentMode {
    FiniteA,
    LimitAInfinity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossTerm {
    pub first: usize,
    pub second: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondMomentReport {
    pub mode: SecondMomentMode,
    /// Signal strength, absent in the limit mode.
    pub a: Option<f64>,
    pub k: usize,
    pub s: usize,
    /// `E₀[L_π²]` in the requested mode.
    pub value: f64,
    /// Per-set terms: `Z₀ Z(2μ_S) / Z(μ_S)²`, or `1/P₀(X_S = 1)` in the limit.
    pub diagonal_terms: Vec<f64>,
    /// Unordered pairs `S ≠ T`; each enters the sum twice.
    pub cross_terms: Vec<CrossTerm>,
    /// The `A → ∞` value, always reported alongside.
    pub limit_value: f64,
    pub note: String,
}

const NOTE: &str = "variance-rate sequences used in asymptotic arguments are not computed";

struct Enumerated {
    n: usize,
    lw0: Vec<f64>,
    log_z0: f64,
}

impl Enumerated {
    fn new(null: &ModelParams) -> Result<Self> {
        if !null.has_zero_field() {
            return Err(Error::InvalidParameter("the null model must have zero field".into()));
        }
        let lw0 = log_weights(null)?;
        let log_z0 = log_sum_exp(&lw0, |_| true);
        Ok(Enumerated { n: null.n(), lw0, log_z0 })
    }

    fn log_z(&self, field: &[f64]) -> f64 {
        let shifted: Vec<f64> = self
            .lw0
            .iter()
            .enumerate()
            .map(|(code, lw)| {
                let mut acc = *lw;
                for (i, h) in field.iter().enumerate() {
                    if *h != 0.0 {
                        acc += if (code >> i) & 1 == 1 { *h } else { -*h };
                    }
                }
                acc
            })
            .collect();
        log_sum_exp(&shifted, |_| true)
    }

    /// `P₀(X_i = +1 for all i ∈ set)`.
    fn prob_all_plus(&self, set: &[usize]) -> f64 {
        let mask: usize = set.iter().map(|&i| 1usize << i).sum();
        (log_sum_exp(&self.lw0, |code| code & mask == mask) - self.log_z0).exp()
    }

    fn check(&self, field: &[f64]) -> Result<()> {
        if field.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: field.len() });
        }
        Ok(())
    }
}

/// `(1/k²) Σ_{a,b} Z₀ Z(μ_a + μ_b) / (Z(μ_a) Z(μ_b))` for arbitrary fields.
pub fn second_moment_general(null: &ModelParams, fields: &[Vec<f64>]) -> Result<f64> {
    if fields.is_empty() {
        return Err(Error::InvalidParameter("at least one alternative is required".into()));
    }
    let e = Enumerated::new(null)?;
    for f in fields {
        e.check(f)?;
    }
    let single: Vec<f64> = fields.iter().map(|f| e.log_z(f)).collect();
    let k = fields.len();
    let mut total = 0.0;
    for a in 0..k {
        for b in a..k {
            let sum: Vec<f64> = fields[a].iter().zip(&fields[b]).map(|(x, y)| x + y).collect();
            let term = (e.log_z0 + e.log_z(&sum) - single[a] - single[b]).exp();
            total += if a == b { term } else { 2.0 * term };
        }
    }
    Ok(total / (k * k) as f64)
}

/// Second moment for the uniform prior over `{μ_S(A) : S ∈ class}`.
///
/// `a` is ignored in [`SecondMomentMode::LimitAInfinity`].
pub fn second_moment_mixture(
    null: &ModelParams,
    class: &SignalClass,
    a: f64,
    mode: SecondMomentMode,
) -> Result<SecondMomentReport> {
    if class.n() != null.n() {
        return Err(Error::DimensionMismatch { expected: null.n(), got: class.n() });
    }
    if !class.is_disjoint() {
        return Err(Error::InvalidClass("second moment needs pairwise disjoint sets".into()));
    }
    if mode == SecondMomentMode::FiniteA && !(a >= 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("A must be finite and nonnegative, got {a}")));
    }
    let e = Enumerated::new(null)?;
    let sets = class.sets();
    let k = sets.len();

    let p_single: Vec<f64> = sets.iter().map(|s| e.prob_all_plus(s)).collect();
    let limit_diag: Vec<f64> = p_single.iter().map(|p| 1.0 / p).collect();
    let mut limit_cross = Vec::new();
    for x in 0..k {
        for y in x + 1..k {
            let union: Vec<usize> = sets[x].iter().chain(&sets[y]).copied().collect();
            let value = e.prob_all_plus(&union) / (p_single[x] * p_single[y]);
            limit_cross.push(CrossTerm { first: x, second: y, value });
        }
    }
    let combine = |diag: &[f64], cross: &[CrossTerm]| {
        (diag.iter().sum::<f64>() + 2.0 * cross.iter().map(|c| c.value).sum::<f64>()) / (k * k) as f64
    };
    let limit_value = combine(&limit_diag, &limit_cross);

    let (diagonal_terms, cross_terms, a_used) = match mode {
        SecondMomentMode::LimitAInfinity => (limit_diag, limit_cross, None),
        SecondMomentMode::FiniteA => {
            let n = class.n();
            let fields: Vec<Vec<f64>> = sets.iter().map(|s| field_vector(n, s, a)).collect::<Result<_>>()?;
            let single: Vec<f64> = fields.iter().map(|f| e.log_z(f)).collect();
            let diag = (0..k)
                .map(|x| {
                    let doubled: Vec<f64> = fields[x].iter().map(|h| 2.0 * h).collect();
                    (e.log_z0 + e.log_z(&doubled) - 2.0 * single[x]).exp()
                })
                .collect();
            let mut cross = Vec::new();
            for x in 0..k {
                for y in x + 1..k {
                    let sum: Vec<f64> = fields[x].iter().zip(&fields[y]).map(|(p, q)| p + q).collect();
                    let value = (e.log_z0 + e.log_z(&sum) - single[x] - single[y]).exp();
                    cross.push(CrossTerm { first: x, second: y, value });
                }
            }
            (diag, cross, Some(a))
        }
    };
    let value = combine(&diagonal_terms, &cross_terms);
    Ok(SecondMomentReport {
        mode,
        a: a_used,
        k,
        s: class.set_size(),
        value,
        diagonal_terms,
        cross_terms,
        limit_value,
        note: NOTE.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::*;
    use crate::model::exact_distribution;
    use crate::signals::make_mean_field_class;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn cycle(n: usize) -> Arc<CouplingMatrix> {
        Arc::new(coupling_from_graph(&build_regular_circulant(n, 2).unwrap(), Scaling::MeanField).unwrap())
    }

    /// `Σ_x P₀(x) L(x)²` with each alternative enumerated separately.
    fn brute_force(null: &ModelParams, fields: &[Vec<f64>]) -> f64 {
        let p0 = exact_distribution(null).unwrap();
        let alts: Vec<_> =
            fields.iter().map(|f| exact_distribution(&null.with_field(f.clone()).unwrap()).unwrap()).collect();
        let k = fields.len() as f64;
        p0.probs()
            .iter()
            .enumerate()
            .map(|(code, &p)| {
                let l: f64 = alts.iter().map(|d| d.probs()[code] / p).sum::<f64>() / k;
                p * l * l
            })
            .sum()
    }

    #[test]
    fn independent_spins_closed_form() {
        let q = cycle(6);
        let null = ModelParams::null(0.0, q);
        let class = make_mean_field_class(6, 2, 2, true, 0).unwrap();
        let a: f64 = 0.5;
        let r = second_moment_mixture(&null, &class, a, SecondMomentMode::FiniteA).unwrap();
        let ratio = (2.0 * a).cosh() / a.cosh().powi(2);
        let expected = 0.5 * ratio.powi(2) + 0.5;
        assert!((r.value - expected).abs() < 1e-12);
        assert!((r.value - 1.236).abs() < 1e-3);
    }

    #[test]
    fn null_alternative_gives_one() {
        let null = ModelParams::null(0.7, cycle(8));
        let class = make_mean_field_class(8, 3, 2, true, 0).unwrap();
        let r = second_moment_mixture(&null, &class, 0.0, SecondMomentMode::FiniteA).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force() {
        let q = Arc::new(coupling_from_graph(&build_random_regular(10, 3, 3).unwrap(), Scaling::MeanField).unwrap());
        let null = ModelParams::null(0.9, q);
        let class = make_mean_field_class(10, 3, 3, true, 0).unwrap();
        let a = 0.4;
        let r = second_moment_mixture(&null, &class, a, SecondMomentMode::FiniteA).unwrap();
        let fields: Vec<Vec<f64>> = class.sets().iter().map(|s| field_vector(10, s, a).unwrap()).collect();
        let direct = brute_force(&null, &fields);
        assert!((r.value - direct).abs() < 1e-10, "{} vs {}", r.value, direct);
        assert!((second_moment_general(&null, &fields).unwrap() - direct).abs() < 1e-10);
        assert!(r.cross_terms.iter().all(|c| c.value >= 1.0 - 1e-12));
    }

    #[test]
    fn large_signal_approaches_limit() {
        let null = ModelParams::null(0.4, cycle(12));
        let class = make_mean_field_class(12, 3, 2, true, 0).unwrap();
        let lim = second_moment_mixture(&null, &class, 0.0, SecondMomentMode::LimitAInfinity).unwrap();
        let big = second_moment_mixture(&null, &class, 25.0, SecondMomentMode::FiniteA).unwrap();
        assert!((lim.value - big.value).abs() / lim.value < 1e-9);
        assert_eq!(lim.limit_value, big.limit_value);
        assert!(lim.a.is_none());
    }

    #[test]
    fn rejects_overlapping_sets() {
        let null = ModelParams::null(0.4, cycle(6));
        let class = SignalClass::new(6, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert!(second_moment_mixture(&null, &class, 0.3, SecondMomentMode::FiniteA).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn coordinatewise_increasing(
            beta in 0.0f64..1.5,
            base in proptest::collection::vec(0.0f64..1.0, 12),
            which in 0usize..12,
            bump in 0.01f64..0.5,
        ) {
            let null = ModelParams::null(beta, cycle(6));
            let fields = vec![base[..6].to_vec(), base[6..].to_vec()];
            let before = second_moment_general(&null, &fields).unwrap();
            let mut raised = fields.clone();
            raised[which / 6][which % 6] += bump;
            let after = second_moment_general(&null, &raised).unwrap();
            prop_assert!(before >= 1.0 - 1e-12);
            prop_assert!(after >= before - 1e-10);
        }
    }
}
