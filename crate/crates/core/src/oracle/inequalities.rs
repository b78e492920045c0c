//! Randomised exact checks of GKS, GHS ordering, Griffiths-II and the field
//! lower bound `E X_i ≥ (1 - tanh(β‖Q‖∞)) tanh(μ_i)`.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{moments, Conditioning};
use crate::error::Result;
use crate::graphs::CouplingMatrix;
use crate::model::ModelParams;
use crate::rng::{derive_seed, rng_from_seed};

/// One ferromagnetic instance with its comparison partners.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub seed: u64,
    pub beta: f64,
    pub coupling: Arc<CouplingMatrix>,
    /// Same edges, each weight multiplied by an independent uniform factor.
    pub weaker: Arc<CouplingMatrix>,
    pub field: Vec<f64>,
    /// `u ⊙ μ` with independent uniform `u`, so `0 ≼ smaller ≼ field`.
    pub smaller: Vec<f64>,
}

impl RandomInstance {
    pub fn n(&self) -> usize {
        self.coupling.n()
    }
}

/// `n ∈ {3..8}`, each edge present with probability 1/2 carrying a
/// uniform(0,1) weight, `β ~ U[0,2]`, `μ_i ~ U[0,1]`.
pub fn random_instance(seed: u64) -> RandomInstance {
    let mut rng = rng_from_seed(seed);
    let n = rng.gen_range(3..=8);
    let mut edges = Vec::new();
    let mut weaker = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < 0.5 {
                let w: f64 = rng.gen();
                edges.push((i, j, w));
                weaker.push((i, j, w * rng.gen::<f64>()));
            }
        }
    }
    let beta = 2.0 * rng.gen::<f64>();
    let field: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let smaller = field.iter().map(|m| m * rng.gen::<f64>()).collect();
    RandomInstance {
        seed,
        beta,
        coupling: Arc::new(CouplingMatrix::from_weighted_edges(n, &edges).expect("valid edges")),
        weaker: Arc::new(CouplingMatrix::from_weighted_edges(n, &weaker).expect("valid edges")),
        field,
        smaller,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    /// Number of scalar inequalities evaluated.
    pub evaluated: usize,
    pub violations: usize,
    /// Largest amount by which any inequality failed (0 when none did).
    pub max_violation: f64,
    pub violating_seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub instances: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub checks: Vec<CheckSummary>,
    pub total_violations: usize,
}

impl InequalityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

const CHECKS: [&str; 4] = ["gks", "ghs_covariance_ordering", "griffiths_second", "field_lower_bound"];

#[derive(Default, Clone)]
struct Tally {
    evaluated: usize,
    violations: usize,
    max_violation: f64,
}

impl Tally {
    /// Records `slack ≥ -tol`.
    fn record(&mut self, slack: f64, tol: f64) {
        self.evaluated += 1;
        if slack < -tol {
            self.violations += 1;
        }
        self.max_violation = self.max_violation.max(-slack).max(0.0);
    }
}

fn check_instance(inst: &RandomInstance, tol: f64) -> Result<[Tally; 4]> {
    let n = inst.n();
    let mut t: [Tally; 4] = Default::default();
    let strong = moments(&ModelParams::new(inst.beta, inst.coupling.clone(), inst.field.clone())?, Conditioning::None)?;
    let weak_field =
        moments(&ModelParams::new(inst.beta, inst.coupling.clone(), inst.smaller.clone())?, Conditioning::None)?;
    let zero = moments(&ModelParams::null(inst.beta, inst.coupling.clone()), Conditioning::None)?;
    let zero_weak = moments(&ModelParams::null(inst.beta, inst.weaker.clone()), Conditioning::None)?;
    let rho = 1.0 - (inst.beta * inst.coupling.inf_norm()).tanh();
    for i in 0..n {
        t[0].record(strong.mean(i), tol);
        t[3].record(strong.mean(i) - rho * inst.field[i].tanh(), tol);
        for j in 0..n {
            t[0].record(strong.covariance(i, j), tol);
            t[1].record(weak_field.covariance(i, j) - strong.covariance(i, j), tol);
            t[2].record(zero.covariance(i, j) - zero_weak.covariance(i, j), tol);
        }
    }
    Ok(t)
}

/// Runs every check on `instances` seeded instances; instance `k` uses seed
/// `derive_seed(seed, [k])`.
pub fn verify_inequalities(instances: usize, seed: u64, tol: f64) -> Result<InequalityReport> {
    let results: Vec<(u64, [Tally; 4])> = (0..instances as u64)
        .into_par_iter()
        .map(|k| {
            let inst = random_instance(derive_seed(seed, &[k]));
            check_instance(&inst, tol).map(|t| (inst.seed, t))
        })
        .collect::<Result<_>>()?;
    let mut checks: Vec<CheckSummary> = CHECKS
        .iter()
        .map(|name| CheckSummary {
            name: name.to_string(),
            evaluated: 0,
            violations: 0,
            max_violation: 0.0,
            violating_seeds: Vec::new(),
        })
        .collect();
    for (inst_seed, tallies) in &results {
        for (c, t) in checks.iter_mut().zip(tallies) {
            c.evaluated += t.evaluated;
            c.violations += t.violations;
            c.max_violation = c.max_violation.max(t.max_violation);
            if t.violations > 0 {
                c.violating_seeds.push(*inst_seed);
            }
        }
    }
    let total_violations = checks.iter().map(|c| c.violations).sum();
    Ok(InequalityReport { instances, seed, tolerance: tol, checks, total_violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_complete, coupling_from_graph, Scaling};

    #[test]
    fn triangle_example() {
        let q = Arc::new(coupling_from_graph(&build_complete(3), Scaling::MeanField).unwrap());
        let inst = RandomInstance {
            seed: 0,
            beta: 0.4,
            coupling: q.clone(),
            weaker: Arc::new(q.map_weights(|_, _, w| 0.5 * w).unwrap()),
            field: vec![0.1, 0.0, 0.0],
            smaller: vec![0.05, 0.0, 0.0],
        };
        let t = check_instance(&inst, 1e-10).unwrap();
        assert!(t.iter().all(|c| c.violations == 0));
    }

    #[test]
    fn infinite_temperature_has_no_correlation() {
        let mut inst = random_instance(5);
        inst.beta = 0.0;
        let m = moments(&ModelParams::new(0.0, inst.coupling.clone(), inst.field.clone()).unwrap(), Conditioning::None)
            .unwrap();
        for i in 0..inst.n() {
            for j in 0..inst.n() {
                if i != j {
                    assert!(m.covariance(i, j).abs() < 1e-15);
                }
            }
        }
        assert!(check_instance(&inst, 1e-10).unwrap().iter().all(|c| c.violations == 0));
    }

    #[test]
    fn zero_field_means_vanish() {
        let inst = random_instance(11);
        let m = moments(&ModelParams::null(inst.beta, inst.coupling.clone()), Conditioning::None).unwrap();
        assert!(m.means.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn batch_has_no_violations_and_is_reproducible() {
        let a = verify_inequalities(60, 7, 1e-10).unwrap();
        assert_eq!(a.total_violations, 0, "{}", a.to_json());
        assert_eq!(a.to_json(), verify_inequalities(60, 7, 1e-10).unwrap().to_json());
        assert!(a.checks.iter().all(|c| c.evaluated > 0));
    }
}
