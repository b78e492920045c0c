use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use super::{CouplingMatrix, GraphFamily, GraphSpec};
use crate::error::Result;
use crate::rng::rng_from_seed;

/// Dense symmetric eigensolve is used up to this dimension.
pub const DENSE_EIGEN_LIMIT: usize = 2048;

const LANCZOS_STEPS: usize = 160;
const LANCZOS_SEED: u64 = 0x5eed_1a2c;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    Dense,
    Lanczos,
}

/// Degree and spectral summary of a coupling matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    pub n: usize,
    /// `(1/n) Σ_i d_i` where `d_i` counts nonzero entries of row i.
    pub avg_degree: f64,
    pub min_degree: usize,
    pub max_degree: usize,
    /// `max_i |d_i / d̄ - 1|`.
    pub degree_irregularity: f64,
    /// `‖Q‖_{∞→∞}`, the largest row sum.
    pub inf_norm: f64,
    /// `2·dim·L` for lattice families, reported next to the computed norm.
    pub nominal_lattice_norm: Option<f64>,
    pub lambda1: f64,
    /// Second largest eigenvalue (NaN for n < 2).
    pub lambda2: f64,
    pub lambda_min: f64,
    pub method: EigenMethod,
}

impl GraphStats {
    /// `α_n = sqrt(log n / d̄)`.
    pub fn alpha_n(&self) -> f64 {
        ((self.n as f64).ln() / self.avg_degree).sqrt()
    }
}

pub fn graph_stats(q: &CouplingMatrix) -> GraphStats {
    let method = if q.n() <= DENSE_EIGEN_LIMIT { EigenMethod::Dense } else { EigenMethod::Lanczos };
    graph_stats_with(q, method)
}

/// Stats for a graph spec, recording the nominal `2·dim·L` norm for lattices.
pub fn graph_stats_for_spec(spec: &GraphSpec) -> Result<GraphStats> {
    let q = spec.coupling()?;
    let mut stats = graph_stats(&q);
    if let GraphFamily::Lattice { dim, range, .. } = spec.family {
        stats.nominal_lattice_norm = Some((2 * dim * range) as f64);
    }
    Ok(stats)
}

pub fn graph_stats_with(q: &CouplingMatrix, method: EigenMethod) -> GraphStats {
    let n = q.n();
    let degrees: Vec<usize> = (0..n).map(|i| q.degree(i)).collect();
    let avg_degree = degrees.iter().sum::<usize>() as f64 / n.max(1) as f64;
    let degree_irregularity = if avg_degree > 0.0 {
        degrees.iter().map(|&d| (d as f64 / avg_degree - 1.0).abs()).fold(0.0, f64::max)
    } else {
        0.0
    };
    let (lambda1, lambda2, lambda_min) = match method {
        EigenMethod::Dense => dense_extremes(&q.to_dense()),
        EigenMethod::Lanczos => symmetric_extremes(|x, y| q.mat_vec(x, y), n),
    };
    GraphStats {
        n,
        avg_degree,
        min_degree: degrees.iter().copied().min().unwrap_or(0),
        max_degree: degrees.iter().copied().max().unwrap_or(0),
        degree_irregularity,
        inf_norm: q.inf_norm(),
        nominal_lattice_norm: None,
        lambda1,
        lambda2,
        lambda_min,
        method,
    }
}

fn dense_extremes(m: &DMatrix<f64>) -> (f64, f64, f64) {
    let n = m.nrows();
    if n == 0 {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (ev[0], ev.get(1).copied().unwrap_or(f64::NAN), ev[n - 1])
}

/// Largest, second largest and smallest eigenvalue of a symmetric operator
/// given by its mat-vec, via Lanczos with full reorthogonalisation. The second
/// eigenvalue is found by a second run deflated against the top Ritz vector,
/// so repeated top eigenvalues are resolved.
pub fn symmetric_extremes(op: impl Fn(&[f64], &mut [f64]), n: usize) -> (f64, f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let first = lanczos(&op, n, &[], LANCZOS_SEED);
    let lambda1 = *first.values.last().unwrap();
    let lambda_min = first.values[0];
    if n == 1 {
        return (lambda1, f64::NAN, lambda_min);
    }
    let second = lanczos(&op, n, &[first.top_vector], LANCZOS_SEED ^ 1);
    (lambda1, *second.values.last().unwrap(), lambda_min)
}

struct Ritz {
    values: Vec<f64>,
    top_vector: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for v in basis {
        let c = dot(v, w);
        for (wi, vi) in w.iter_mut().zip(v) {
            *wi -= c * vi;
        }
    }
}

fn normalize(w: &mut [f64]) -> f64 {
    let norm = dot(w, w).sqrt();
    if norm > 0.0 {
        w.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn lanczos(op: &impl Fn(&[f64], &mut [f64]), n: usize, deflate: &[Vec<f64>], seed: u64) -> Ritz {
    let steps = LANCZOS_STEPS.min(n - deflate.len());
    let mut rng = rng_from_seed(seed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    orthogonalize(&mut q, deflate);
    normalize(&mut q);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    let mut w = vec![0.0; n];
    let mut scale: f64 = 0.0;
    for k in 0..steps {
        op(&q, &mut w);
        orthogonalize(&mut w, deflate);
        let a = dot(&q, &w);
        alpha.push(a);
        basis.push(q.clone());
        for _ in 0..2 {
            orthogonalize(&mut w, &basis);
            orthogonalize(&mut w, deflate);
        }
        let b = normalize(&mut w);
        scale = scale.max(a.abs()).max(b);
        if k + 1 == steps || b <= 1e-10 * scale.max(1e-300) {
            break;
        }
        beta.push(b);
        q.copy_from_slice(&w);
    }

    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let top = *order.last().unwrap();
    let mut top_vector = vec![0.0; n];
    for (j, v) in basis.iter().enumerate() {
        let c = eig.eigenvectors[(j, top)];
        for (x, vi) in top_vector.iter_mut().zip(v) {
            *x += c * vi;
        }
    }
    orthogonalize(&mut top_vector, deflate);
    normalize(&mut top_vector);
    Ritz { values, top_vector }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::*;

    #[test]
    fn complete_graph_spectrum() {
        let q = coupling_from_graph(&build_complete(4), Scaling::MeanField).unwrap();
        let s = graph_stats(&q);
        assert!((s.inf_norm - 1.0).abs() < 1e-15);
        assert!((s.lambda1 - 1.0).abs() < 1e-12);
        assert!((s.lambda2 + 1.0 / 3.0).abs() < 1e-12);
        assert!((s.lambda_min + 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.degree_irregularity, 0.0);
        let it = graph_stats_with(&q, EigenMethod::Lanczos);
        assert!((it.lambda2 + 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn path_and_lattice_norms() {
        let p3 = coupling_from_graph(&build_lattice(1, 3, 1).unwrap(), Scaling::Lattice).unwrap();
        assert_eq!(graph_stats(&p3).inf_norm, 2.0);
        let s = graph_stats_for_spec(&GraphSpec::lattice(2, 7, 2)).unwrap();
        assert_eq!(s.inf_norm, 12.0);
        assert_eq!(s.nominal_lattice_norm, Some(8.0));
    }

    #[test]
    fn lanczos_matches_dense() {
        let graphs = [
            build_random_regular(300, 6, 5).unwrap(),
            build_erdos_renyi(250, 0.05, 8),
            build_lattice(2, 14, 1).unwrap(),
            build_regular_circulant(101, 4).unwrap(),
        ];
        for g in graphs {
            let q = coupling_from_graph(&g, Scaling::MeanField).unwrap();
            let dense = graph_stats_with(&q, EigenMethod::Dense);
            let iter = graph_stats_with(&q, EigenMethod::Lanczos);
            assert!((dense.lambda1 - iter.lambda1).abs() < 1e-4);
            assert!((dense.lambda2 - iter.lambda2).abs() < 1e-4, "{} vs {}", dense.lambda2, iter.lambda2);
            assert!((dense.lambda_min - iter.lambda_min).abs() < 1e-4);
        }
    }

    #[test]
    fn repeated_top_eigenvalue_is_resolved() {
        // Two disjoint triangles: top eigenvalue 1 has multiplicity two.
        let g = AdjacencyMatrix::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let q = coupling_from_graph(&g, Scaling::MeanField).unwrap();
        let it = graph_stats_with(&q, EigenMethod::Lanczos);
        assert!((it.lambda2 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn mean_field_regular_lambda2_at_most_one() {
        let q = coupling_from_graph(&build_random_regular(120, 4, 3).unwrap(), Scaling::MeanField).unwrap();
        let s = graph_stats(&q);
        assert!(s.lambda2 <= 1.0 + 1e-12);
        assert!((s.alpha_n() - ((120f64).ln() / 4.0).sqrt()).abs() < 1e-12);
    }
}
