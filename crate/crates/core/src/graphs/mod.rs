//! Graph families, coupling matrices and graph statistics.
//!
//! Adjacency and coupling matrices use two storage layouts: an implicit
//! complete graph (so mean-field models on `K_n` cost O(n) memory and O(1)
//! per local-field update) and a CSR layout for everything else.

mod io;
mod spectral;

pub use io::{read_edge_list, write_edge_list};
pub use spectral::{
    graph_stats, graph_stats_for_spec, graph_stats_with, symmetric_extremes, EigenMethod, GraphStats, DENSE_EIGEN_LIMIT,
};

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Largest lattice accepted by [`build_lattice`].
pub const LATTICE_VERTEX_LIMIT: usize = 1 << 24;

/// Restart budget for [`build_random_regular`].
pub const RANDOM_REGULAR_RESTARTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphFamily {
    Complete,
    RegularCirculant { d: usize },
    RandomRegular { d: usize },
    ErdosRenyi { p: f64 },
    Lattice { dim: usize, side: usize, range: usize },
}

impl GraphFamily {
    /// True for the families whose couplings are scaled by the average degree.
    pub fn is_mean_field(&self) -> bool {
        !matches!(self, GraphFamily::Lattice { .. })
    }

    pub fn default_scaling(&self) -> Scaling {
        if self.is_mean_field() {
            Scaling::MeanField
        } else {
            Scaling::Lattice
        }
    }
}

/// A graph family with its size and (for random families) its seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub family: GraphFamily,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

impl GraphSpec {
    pub fn complete(n: usize) -> Self {
        GraphSpec { family: GraphFamily::Complete, n, seed: 0 }
    }

    pub fn regular_circulant(n: usize, d: usize) -> Self {
        GraphSpec { family: GraphFamily::RegularCirculant { d }, n, seed: 0 }
    }

    pub fn random_regular(n: usize, d: usize, seed: u64) -> Self {
        GraphSpec { family: GraphFamily::RandomRegular { d }, n, seed }
    }

    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Self {
        GraphSpec { family: GraphFamily::ErdosRenyi { p }, n, seed }
    }

    pub fn lattice(dim: usize, side: usize, range: usize) -> Self {
        let n = side.checked_pow(dim as u32).unwrap_or(usize::MAX);
        GraphSpec { family: GraphFamily::Lattice { dim, side, range }, n, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InfeasibleGraph("n must be at least 1".into()));
        }
        match self.family {
            GraphFamily::Complete => Ok(()),
            GraphFamily::RegularCirculant { d } | GraphFamily::RandomRegular { d } => check_regular(self.n, d),
            GraphFamily::ErdosRenyi { p } => {
                if (0.0..=1.0).contains(&p) {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("edge probability {p} outside [0, 1]")))
                }
            }
            GraphFamily::Lattice { dim, side, range } => {
                let n = lattice_size(dim, side, range)?;
                if n != self.n {
                    return Err(Error::DimensionMismatch { expected: n, got: self.n });
                }
                Ok(())
            }
        }
    }

    pub fn build(&self) -> Result<AdjacencyMatrix> {
        self.validate()?;
        match self.family {
            GraphFamily::Complete => Ok(build_complete(self.n)),
            GraphFamily::RegularCirculant { d } => build_regular_circulant(self.n, d),
            GraphFamily::RandomRegular { d } => build_random_regular(self.n, d, self.seed),
            GraphFamily::ErdosRenyi { p } => Ok(build_erdos_renyi(self.n, p, self.seed)),
            GraphFamily::Lattice { dim, side, range } => build_lattice(dim, side, range),
        }
    }

    /// Builds the graph and applies the family's conventional scaling.
    pub fn coupling(&self) -> Result<CouplingMatrix> {
        let adj = self.build()?;
        let q = coupling_from_graph(&adj, self.family.default_scaling())?;
        Ok(q.with_provenance(self.id()))
    }

    /// Short stable identifier used in CSV records.
    pub fn id(&self) -> String {
        match self.family {
            GraphFamily::Complete => format!("complete-n{}", self.n),
            GraphFamily::RegularCirculant { d } => format!("circulant-n{}-d{}", self.n, d),
            GraphFamily::RandomRegular { d } => format!("rrg-n{}-d{}-seed{}", self.n, d, self.seed),
            GraphFamily::ErdosRenyi { p } => format!("er-n{}-p{}-seed{}", self.n, p, self.seed),
            GraphFamily::Lattice { dim, side, range } => {
                format!("lattice-dim{dim}-side{side}-L{range}")
            }
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

fn check_regular(n: usize, d: usize) -> Result<()> {
    if d > n.saturating_sub(1) {
        return Err(Error::InfeasibleGraph(format!("degree {d} exceeds n - 1 = {}", n - 1)));
    }
    if (n * d) % 2 == 1 {
        return Err(Error::InfeasibleGraph(format!("n * d = {} is odd", n * d)));
    }
    Ok(())
}

fn lattice_size(dim: usize, side: usize, range: usize) -> Result<usize> {
    if dim == 0 || side < 2 || range == 0 {
        return Err(Error::InvalidParameter(format!(
            "lattice needs dim >= 1, side >= 2, range >= 1 (got {dim}, {side}, {range})"
        )));
    }
    side.checked_pow(dim as u32).filter(|&n| n <= LATTICE_VERTEX_LIMIT).ok_or(Error::LatticeTooLarge {
        dim,
        side,
        limit: LATTICE_VERTEX_LIMIT,
    })
}

/// Symmetric 0/1 matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    n: usize,
    storage: AdjStorage,
}

#[derive(Debug, Clone, PartialEq)]
enum AdjStorage {
    Complete,
    Sparse { edges: Vec<(u32, u32)>, offsets: Vec<usize>, neighbors: Vec<u32> },
}

impl AdjacencyMatrix {
    /// Builds a graph from an undirected edge list. Self-loops, duplicate
    /// edges (in either orientation) and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange { index: i.max(j), n });
            }
            if i == j {
                return Err(Error::InfeasibleGraph(format!("self-loop at vertex {i}")));
            }
            list.push((i.min(j) as u32, i.max(j) as u32));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InfeasibleGraph(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }
        if n >= 2 && list.len() == n * (n - 1) / 2 {
            return Ok(AdjacencyMatrix { n, storage: AdjStorage::Complete });
        }
        let mut degree = vec![0usize; n];
        for &(i, j) in &list {
            degree[i as usize] += 1;
            degree[j as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0u32; offsets[n]];
        for &(i, j) in &list {
            neighbors[fill[i as usize]] = j;
            fill[i as usize] += 1;
            neighbors[fill[j as usize]] = i;
            fill[j as usize] += 1;
        }
        for i in 0..n {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Ok(AdjacencyMatrix { n, storage: AdjStorage::Sparse { edges: list, offsets, neighbors } })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_complete(&self) -> bool {
        matches!(self.storage, AdjStorage::Complete)
    }

    pub fn num_edges(&self) -> usize {
        match &self.storage {
            AdjStorage::Complete => self.n * (self.n - 1) / 2,
            AdjStorage::Sparse { edges, .. } => edges.len(),
        }
    }

    pub fn degree(&self, i: usize) -> usize {
        match &self.storage {
            AdjStorage::Complete => self.n - 1,
            AdjStorage::Sparse { offsets, .. } => offsets[i + 1] - offsets[i],
        }
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    pub fn neighbors(&self, i: usize) -> Neighbors<'_> {
        match &self.storage {
            AdjStorage::Complete => Neighbors::Complete { skip: i, next: 0, n: self.n },
            AdjStorage::Sparse { offsets, neighbors, .. } => {
                Neighbors::Sparse(neighbors[offsets[i]..offsets[i + 1]].iter())
            }
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        if i == j || i >= self.n || j >= self.n {
            return false;
        }
        match &self.storage {
            AdjStorage::Complete => true,
            AdjStorage::Sparse { offsets, neighbors, .. } => {
                neighbors[offsets[i]..offsets[i + 1]].binary_search(&(j as u32)).is_ok()
            }
        }
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> Box<dyn Iterator<Item = (usize, usize)> + '_> {
        match &self.storage {
            AdjStorage::Complete => {
                let n = self.n;
                Box::new((0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j))))
            }
            AdjStorage::Sparse { edges, .. } => Box::new(edges.iter().map(|&(i, j)| (i as usize, j as usize))),
        }
    }
}

pub enum Neighbors<'a> {
    Complete { skip: usize, next: usize, n: usize },
    Sparse(std::slice::Iter<'a, u32>),
}

impl Iterator for Neighbors<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        match self {
            Neighbors::Complete { skip, next, n } => {
                if *next == *skip {
                    *next += 1;
                }
                if *next >= *n {
                    return None;
                }
                *next += 1;
                Some(*next - 1)
            }
            Neighbors::Sparse(it) => it.next().map(|&j| j as usize),
        }
    }
}

pub fn build_complete(n: usize) -> AdjacencyMatrix {
    if n >= 2 {
        AdjacencyMatrix { n, storage: AdjStorage::Complete }
    } else {
        AdjacencyMatrix::from_edges(n, std::iter::empty()).expect("empty graph is valid")
    }
}

/// d-regular circulant: vertex i joins i ± 1, …, i ± d/2, plus the antipode
/// i + n/2 when d is odd (which forces n even).
pub fn build_regular_circulant(n: usize, d: usize) -> Result<AdjacencyMatrix> {
    if n == 0 {
        return Err(Error::InfeasibleGraph("n must be at least 1".into()));
    }
    check_regular(n, d)?;
    let mut edges = Vec::with_capacity(n * d / 2);
    for i in 0..n {
        for k in 1..=d / 2 {
            let j = (i + k) % n;
            edges.push((i, j));
        }
        if d % 2 == 1 && i < n / 2 {
            edges.push((i, i + n / 2));
        }
    }
    AdjacencyMatrix::from_edges(n, edges)
}

/// Random d-regular simple graph by stub pairing.
///
/// Stubs are paired one random pair at a time, redrawing pairs that would
/// create a self-loop or a repeated edge; if no admissible pair is found the
/// whole pairing restarts, up to [`RANDOM_REGULAR_RESTARTS`] times.
pub fn build_random_regular(n: usize, d: usize, seed: u64) -> Result<AdjacencyMatrix> {
    if n == 0 {
        return Err(Error::InfeasibleGraph("n must be at least 1".into()));
    }
    check_regular(n, d)?;
    if d == 0 {
        return AdjacencyMatrix::from_edges(n, std::iter::empty());
    }
    if d == n - 1 {
        return Ok(build_complete(n));
    }
    let mut rng = rng_from_seed(seed);
    'restart: for _ in 0..RANDOM_REGULAR_RESTARTS {
        let mut stubs: Vec<u32> = (0..n as u32).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        stubs.shuffle(&mut rng);
        let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(n * d / 2);
        let mut edges = Vec::with_capacity(n * d / 2);
        while !stubs.is_empty() {
            let len = stubs.len();
            let mut placed = false;
            for _ in 0..(50 * len).max(100) {
                let a = rng.gen_range(0..len);
                let b = rng.gen_range(0..len);
                if a == b {
                    continue;
                }
                let (u, v) = (stubs[a], stubs[b]);
                let key = (u.min(v), u.max(v));
                if u == v || seen.contains(&key) {
                    continue;
                }
                seen.insert(key);
                edges.push((key.0 as usize, key.1 as usize));
                let (hi, lo) = (a.max(b), a.min(b));
                stubs.swap_remove(hi);
                stubs.swap_remove(lo);
                placed = true;
                break;
            }
            if !placed {
                continue 'restart;
            }
        }
        return AdjacencyMatrix::from_edges(n, edges);
    }
    Err(Error::NoConvergence { restarts: RANDOM_REGULAR_RESTARTS })
}

pub fn build_erdos_renyi(n: usize, p: f64, seed: u64) -> AdjacencyMatrix {
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    AdjacencyMatrix::from_edges(n, edges).expect("generated edges are simple")
}

/// Row-major coordinates of vertex `v` in a `dim`-cube of side `side`.
pub fn lattice_coords(v: usize, dim: usize, side: usize) -> Vec<usize> {
    let mut c = vec![0; dim];
    let mut rest = v;
    for k in (0..dim).rev() {
        c[k] = rest % side;
        rest /= side;
    }
    c
}

pub fn lattice_index(coords: &[usize], side: usize) -> usize {
    coords.iter().fold(0, |acc, &c| acc * side + c)
}

/// Box lattice with free boundary; `i ~ j` iff `0 < |i - j|_1 <= range`.
pub fn build_lattice(dim: usize, side: usize, range: usize) -> Result<AdjacencyMatrix> {
    let n = lattice_size(dim, side, range)?;
    let offsets = positive_offsets(dim, range as i64);
    let mut edges = Vec::new();
    let mut coords = vec![0i64; dim];
    for v in 0..n {
        for (k, c) in lattice_coords(v, dim, side).into_iter().enumerate() {
            coords[k] = c as i64;
        }
        'offset: for off in &offsets {
            let mut w = 0usize;
            for k in 0..dim {
                let c = coords[k] + off[k];
                if c < 0 || c >= side as i64 {
                    continue 'offset;
                }
                w = w * side + c as usize;
            }
            edges.push((v, w));
        }
    }
    AdjacencyMatrix::from_edges(n, edges)
}

/// Nonzero integer vectors with l1 norm at most `range` whose first nonzero
/// coordinate is positive (one representative of each ± pair).
fn positive_offsets(dim: usize, range: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; dim];
    fn rec(k: usize, budget: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if k == cur.len() {
            if let Some(first) = cur.iter().find(|&&c| c != 0) {
                if *first > 0 {
                    out.push(cur.clone());
                }
            }
            return;
        }
        for c in -budget..=budget {
            cur[k] = c;
            rec(k + 1, budget - c.abs(), cur, out);
        }
        cur[k] = 0;
    }
    rec(0, range, &mut cur, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// Adjacency divided by the average degree `(1/n) Σ d_i`.
    MeanField,
    /// Raw 0/1 indicator.
    Lattice,
    /// Arbitrary nonnegative weights.
    Custom,
}

/// Symmetric nonnegative interaction matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    n: usize,
    storage: CouplingStorage,
    scaling: Scaling,
    provenance: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum CouplingStorage {
    Complete { weight: f64 },
    Sparse { offsets: Vec<usize>, neighbors: Vec<u32>, weights: Vec<f64> },
}

pub fn coupling_from_graph(adj: &AdjacencyMatrix, scaling: Scaling) -> Result<CouplingMatrix> {
    let weight = match scaling {
        Scaling::MeanField => {
            let m = adj.num_edges();
            if m == 0 {
                return Err(Error::EmptyGraph);
            }
            adj.n() as f64 / (2 * m) as f64
        }
        Scaling::Lattice | Scaling::Custom => 1.0,
    };
    let storage = match &adj.storage {
        AdjStorage::Complete => CouplingStorage::Complete { weight },
        AdjStorage::Sparse { offsets, neighbors, .. } => CouplingStorage::Sparse {
            offsets: offsets.clone(),
            neighbors: neighbors.clone(),
            weights: vec![weight; neighbors.len()],
        },
    };
    Ok(CouplingMatrix { n: adj.n(), storage, scaling, provenance: None })
}

impl CouplingMatrix {
    /// Builds a custom-weight coupling from undirected weighted edges. Zero
    /// weights are dropped; negative weights, self-loops and repeats are errors.
    pub fn from_weighted_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut list: Vec<(usize, usize, f64)> = Vec::with_capacity(edges.len());
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange { index: i.max(j), n });
            }
            if i == j {
                return Err(Error::InvalidParameter(format!("diagonal entry at {i}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "weight {w} on ({i}, {j}) is not a finite nonnegative number"
                )));
            }
            if w > 0.0 {
                list.push((i.min(j), i.max(j), w));
            }
        }
        list.sort_by_key(|e| (e.0, e.1));
        if let Some(w) = list.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::InvalidParameter(format!("repeated entry ({}, {})", w[0].0, w[0].1)));
        }
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for &(i, j, w) in &list {
            rows[i].push((j as u32, w));
            rows[j].push((i as u32, w));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            for (j, w) in row {
                neighbors.push(j);
                weights.push(w);
            }
            offsets.push(neighbors.len());
        }
        Ok(CouplingMatrix {
            n,
            storage: CouplingStorage::Sparse { offsets, neighbors, weights },
            scaling: Scaling::Custom,
            provenance: None,
        })
    }

    /// Builds a coupling from a dense row-major matrix, checking symmetry,
    /// zero diagonal and nonnegativity exactly.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut edges = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidParameter(format!("nonzero diagonal at {i}")));
            }
            for j in i + 1..n {
                if row[j] != rows[j][i] {
                    return Err(Error::InvalidParameter(format!("asymmetric entry ({i}, {j})")));
                }
                edges.push((i, j, row[j]));
            }
        }
        Self::from_weighted_edges(n, &edges)
    }

    pub fn with_provenance(mut self, id: impl Into<String>) -> Self {
        self.provenance = Some(id.into());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scaling(&self) -> Scaling {
        self.scaling
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    /// The common off-diagonal weight when stored as a complete graph.
    pub fn complete_weight(&self) -> Option<f64> {
        match self.storage {
            CouplingStorage::Complete { weight } => Some(weight),
            CouplingStorage::Sparse { .. } => None,
        }
    }

    /// Nonzero entries of row `i` as `(column, weight)`.
    pub fn row(&self, i: usize) -> RowIter<'_> {
        match &self.storage {
            CouplingStorage::Complete { weight } => {
                RowIter::Complete { inner: Neighbors::Complete { skip: i, next: 0, n: self.n }, weight: *weight }
            }
            CouplingStorage::Sparse { offsets, neighbors, weights } => {
                let r = offsets[i]..offsets[i + 1];
                RowIter::Sparse(neighbors[r.clone()].iter().zip(weights[r].iter()))
            }
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        match &self.storage {
            CouplingStorage::Complete { weight } => *weight,
            CouplingStorage::Sparse { offsets, neighbors, weights } => {
                let r = offsets[i]..offsets[i + 1];
                match neighbors[r.clone()].binary_search(&(j as u32)) {
                    Ok(k) => weights[r.start + k],
                    Err(_) => 0.0,
                }
            }
        }
    }

    /// Number of nonzero entries in row `i`.
    pub fn degree(&self, i: usize) -> usize {
        match &self.storage {
            CouplingStorage::Complete { .. } => self.n - 1,
            CouplingStorage::Sparse { offsets, .. } => offsets[i + 1] - offsets[i],
        }
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        match &self.storage {
            CouplingStorage::Complete { weight } => weight * (self.n - 1) as f64,
            CouplingStorage::Sparse { .. } => self.row(i).map(|(_, w)| w).sum(),
        }
    }

    /// `max_i Σ_j |Q_ij|`.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n).map(|i| self.row_sum(i)).fold(0.0, f64::max)
    }

    /// Upper-triangle entries `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for (j, w) in self.row(i) {
                if j > i {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    /// `y = Q x`.
    pub fn mat_vec(&self, x: &[f64], y: &mut [f64]) {
        match &self.storage {
            CouplingStorage::Complete { weight } => {
                let total: f64 = x.iter().sum();
                for (yi, xi) in y.iter_mut().zip(x) {
                    *yi = weight * (total - xi);
                }
            }
            CouplingStorage::Sparse { offsets, neighbors, weights } => {
                for i in 0..self.n {
                    let mut acc = 0.0;
                    for k in offsets[i]..offsets[i + 1] {
                        acc += weights[k] * x[neighbors[k] as usize];
                    }
                    y[i] = acc;
                }
            }
        }
    }

    /// Applies `f(i, j, w)` to every stored weight, keeping symmetry. The
    /// result is a custom-weight coupling.
    pub fn map_weights(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Result<Self> {
        let edges: Vec<_> = self.edges().into_iter().map(|(i, j, w)| (i, j, f(i, j, w))).collect();
        Self::from_weighted_edges(self.n, &edges)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, w) in self.row(i) {
                m[(i, j)] = w;
            }
        }
        m
    }

    pub fn is_nonnegative(&self) -> bool {
        match &self.storage {
            CouplingStorage::Complete { weight } => *weight >= 0.0,
            CouplingStorage::Sparse { weights, .. } => weights.iter().all(|&w| w >= 0.0),
        }
    }
}

pub enum RowIter<'a> {
    Complete { inner: Neighbors<'a>, weight: f64 },
    Sparse(std::iter::Zip<std::slice::Iter<'a, u32>, std::slice::Iter<'a, f64>>),
}

impl Iterator for RowIter<'_> {
    type Item = (usize, f64);

    fn next(&mut self) -> Option<(usize, f64)> {
        match self {
            RowIter::Complete { inner, weight } => inner.next().map(|j| (j, *weight)),
            RowIter::Sparse(it) => it.next().map(|(&j, &w)| (j as usize, w)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge_set(adj: &AdjacencyMatrix) -> Vec<(usize, usize)> {
        adj.edges().collect()
    }

    fn assert_symmetric(adj: &AdjacencyMatrix) {
        for i in 0..adj.n() {
            assert!(!adj.has_edge(i, i));
            for j in adj.neighbors(i) {
                assert!(adj.has_edge(j, i), "edge ({i},{j}) not symmetric");
            }
        }
    }

    #[test]
    fn complete_graph_small_cases() {
        let k3 = build_complete(3);
        assert_eq!(edge_set(&k3), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(k3.degrees(), vec![2, 2, 2]);
        let k1 = build_complete(1);
        assert_eq!(k1.num_edges(), 0);
        let q = coupling_from_graph(&build_complete(4), Scaling::MeanField).unwrap();
        assert!((q.inf_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn circulant_examples() {
        let c6 = build_regular_circulant(6, 2).unwrap();
        assert_eq!(edge_set(&c6), vec![(0, 1), (0, 5), (1, 2), (2, 3), (3, 4), (4, 5)]);
        let k6 = build_regular_circulant(6, 5).unwrap();
        assert!(k6.is_complete());
        assert!(matches!(build_regular_circulant(5, 3), Err(Error::InfeasibleGraph(_))));
        for (n, d) in [(10, 3), (10, 4), (9, 4), (12, 7), (7, 6), (8, 0)] {
            let g = build_regular_circulant(n, d).unwrap();
            assert!(g.degrees().iter().all(|&k| k == d), "n={n} d={d}");
            assert_symmetric(&g);
        }
    }

    #[test]
    fn random_regular_examples() {
        let g = build_random_regular(6, 3, 1).unwrap();
        assert!(g.degrees().iter().all(|&k| k == 3));
        assert_symmetric(&g);
        assert!(matches!(build_random_regular(5, 3, 1), Err(Error::InfeasibleGraph(_))));
        let a = build_random_regular(10, 3, 9).unwrap();
        let b = build_random_regular(10, 3, 9).unwrap();
        assert_eq!(edge_set(&a), edge_set(&b));
        let big = build_random_regular(200, 20, 4).unwrap();
        assert!(big.degrees().iter().all(|&k| k == 20));
    }

    #[test]
    fn erdos_renyi_extremes_and_moments() {
        assert_eq!(build_erdos_renyi(30, 0.0, 3).num_edges(), 0);
        assert!(build_erdos_renyi(30, 1.0, 3).is_complete());
        let a = build_erdos_renyi(200, 0.5, 11);
        let b = build_erdos_renyi(200, 0.5, 11);
        assert_eq!(a.num_edges(), b.num_edges());
        assert_eq!(edge_set(&a), edge_set(&b));
        let pairs = 200.0 * 199.0 / 2.0;
        let mean = pairs * 0.5;
        let sd = (pairs * 0.25f64).sqrt();
        assert!((a.num_edges() as f64 - mean).abs() < 4.0 * sd);
    }

    fn brute_lattice_degree(dim: usize, side: usize, range: usize, v: usize) -> usize {
        let c = lattice_coords(v, dim, side);
        (0..side.pow(dim as u32))
            .filter(|&w| {
                let d: usize = lattice_coords(w, dim, side).iter().zip(&c).map(|(a, b)| a.abs_diff(*b)).sum();
                d > 0 && d <= range
            })
            .count()
    }

    #[test]
    fn lattice_examples() {
        let p5 = build_lattice(1, 5, 1).unwrap();
        assert_eq!(edge_set(&p5), vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
        let g = build_lattice(2, 3, 1).unwrap();
        assert_eq!(g.degree(lattice_index(&[1, 1], 3)), 4);
        let g = build_lattice(2, 7, 2).unwrap();
        let center = lattice_index(&[3, 3], 7);
        assert_eq!(brute_lattice_degree(2, 7, 2, center), 12);
        assert_eq!(g.degree(center), 12);
        for v in 0..g.n() {
            assert_eq!(g.degree(v), brute_lattice_degree(2, 7, 2, v));
        }
        let g3 = build_lattice(3, 4, 2).unwrap();
        for v in 0..g3.n() {
            assert_eq!(g3.degree(v), brute_lattice_degree(3, 4, 2, v));
        }
        assert!(matches!(build_lattice(3, 1 << 12, 1), Err(Error::LatticeTooLarge { .. })));
    }

    #[test]
    fn coupling_scalings() {
        let q = coupling_from_graph(&build_complete(4), Scaling::MeanField).unwrap();
        assert!((q.entry(0, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(q.entry(2, 2), 0.0);
        let p3 = coupling_from_graph(&build_lattice(1, 3, 1).unwrap(), Scaling::Lattice).unwrap();
        assert_eq!(p3.entry(0, 1), 1.0);
        assert_eq!(p3.entry(1, 2), 1.0);
        assert_eq!(p3.entry(0, 2), 0.0);
        assert_eq!(p3.inf_norm(), 2.0);
        let empty = build_erdos_renyi(5, 0.0, 0);
        assert!(matches!(coupling_from_graph(&empty, Scaling::MeanField), Err(Error::EmptyGraph)));
    }

    #[test]
    fn mean_field_regular_rows_sum_to_one() {
        for g in [build_regular_circulant(12, 4).unwrap(), build_random_regular(40, 5, 2).unwrap(), build_complete(9)] {
            let q = coupling_from_graph(&g, Scaling::MeanField).unwrap();
            for i in 0..q.n() {
                assert!((q.row_sum(i) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn from_dense_validates() {
        assert!(CouplingMatrix::from_dense(&[vec![0.0, 1.0], vec![0.5, 0.0]]).is_err());
        assert!(CouplingMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 0.0]]).is_err());
        assert!(CouplingMatrix::from_dense(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
        let q = CouplingMatrix::from_dense(&[vec![0.0, 0.3], vec![0.3, 0.0]]).unwrap();
        assert_eq!(q.entry(1, 0), 0.3);
    }

    #[test]
    fn spec_round_trip_and_validation() {
        assert!(GraphSpec::lattice(2, 5, 1).validate().is_ok());
        let bad = GraphSpec { family: GraphFamily::Lattice { dim: 2, side: 5, range: 1 }, n: 24, seed: 0 };
        assert!(matches!(bad.validate(), Err(Error::DimensionMismatch { .. })));
        assert!(GraphSpec::erdos_renyi(5, 1.5, 0).validate().is_err());
        let q = GraphSpec::complete(5).coupling().unwrap();
        assert_eq!(q.provenance(), Some("complete-n5"));
    }
}
