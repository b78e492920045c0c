//! Signal classes `C_n` and the extremal alternatives `μ_S(A)`.

mod io;

pub use io::{read_class, write_class};

use std::collections::HashSet;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{lattice_coords, lattice_index};
use crate::model::field_vector;
use crate::rng::rng_from_seed;

/// Placement of a cube class inside its lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeGeometry {
    pub dim: usize,
    pub side: usize,
    /// Points per cube edge.
    pub edge: usize,
}

/// A collection of equal-size index sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalClass {
    n: usize,
    /// Nominal sparsity requested by the caller.
    s: usize,
    /// Realised cardinality of every set (the cube volume for cube classes).
    set_size: usize,
    sets: Vec<Vec<usize>>,
    disjoint: bool,
    geometry: Option<CubeGeometry>,
}

impl SignalClass {
    /// Validates and wraps explicit sets. Each set is sorted.
    pub fn new(n: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let size = sets.first().map(Vec::len).ok_or_else(|| Error::InvalidClass("empty class".into()))?;
        Self::from_parts(n, size, sets, None)
    }

    fn from_parts(n: usize, s: usize, mut sets: Vec<Vec<usize>>, geometry: Option<CubeGeometry>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::InvalidClass("empty class".into()));
        }
        let set_size = sets[0].len();
        if set_size == 0 {
            return Err(Error::InvalidClass("sets must be nonempty".into()));
        }
        for set in &mut sets {
            set.sort_unstable();
            if set.len() != set_size {
                return Err(Error::InvalidClass(format!("all sets must have size {set_size}, found {}", set.len())));
            }
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidClass("repeated index within a set".into()));
            }
            if let Some(&last) = set.last() {
                if last >= n {
                    return Err(Error::IndexOutOfRange { index: last, n });
                }
            }
        }
        let disjoint = pairwise_disjoint(n, &sets);
        Ok(SignalClass { n, s, set_size, sets, disjoint, geometry })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn set_size(&self) -> usize {
        self.set_size
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn set(&self, k: usize) -> Option<&[usize]> {
        self.sets.get(k).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn is_disjoint(&self) -> bool {
        self.disjoint
    }

    pub fn geometry(&self) -> Option<CubeGeometry> {
        self.geometry
    }

    /// Keeps the sets at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let sets = indices
            .iter()
            .map(|&k| self.sets.get(k).cloned().ok_or(Error::IndexOutOfRange { index: k, n: self.sets.len() }))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(self.n, self.s, sets, self.geometry)
    }
}

fn pairwise_disjoint(n: usize, sets: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; n];
    for set in sets {
        for &i in set {
            if seen[i] {
                return false;
            }
            seen[i] = true;
        }
    }
    true
}

/// Number of `k`-subsets of `n` items, saturating at `u128::MAX`.
fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Consecutive blocks `[k s, (k+1) s)` when `disjoint`, otherwise `count`
/// distinct sets drawn uniformly without replacement from a seeded stream.
pub fn make_mean_field_class(n: usize, s: usize, count: usize, disjoint: bool, seed: u64) -> Result<SignalClass> {
    if s == 0 || count == 0 || s > n {
        return Err(Error::InvalidClass(format!("need 1 <= s <= n and count >= 1 (n={n}, s={s}, count={count})")));
    }
    if disjoint {
        if count.saturating_mul(s) > n {
            return Err(Error::InvalidClass(format!("{count} disjoint sets of size {s} do not fit in {n} vertices")));
        }
        let sets = (0..count).map(|k| (k * s..(k + 1) * s).collect()).collect();
        return SignalClass::from_parts(n, s, sets, None);
    }
    if (count as u128) > binomial(n, s) {
        return Err(Error::InvalidClass(format!("only {} distinct sets of size {s} exist", binomial(n, s))));
    }
    let mut rng = rng_from_seed(seed);
    let mut seen = HashSet::with_capacity(count);
    let mut sets = Vec::with_capacity(count);
    while sets.len() < count {
        let mut set = sample(&mut rng, n, s).into_vec();
        set.sort_unstable();
        if seen.insert(set.clone()) {
            sets.push(set);
        }
    }
    SignalClass::from_parts(n, s, sets, None)
}

/// Smallest `e` with `e^dim >= s`.
pub fn cube_edge(s: usize, dim: usize) -> usize {
    let mut e = 1usize;
    while e.checked_pow(dim as u32).is_some_and(|v| v < s) {
        e += 1;
    }
    e
}

/// All axis-aligned cubes of edge `⌈s^{1/dim}⌉` lying inside the box, ordered
/// by the row-major index of their lowest corner.
pub fn make_lattice_cube_class(dim: usize, side: usize, s: usize) -> Result<SignalClass> {
    if dim == 0 || side == 0 || s == 0 {
        return Err(Error::InvalidClass("dim, side and s must be positive".into()));
    }
    let edge = cube_edge(s, dim);
    if edge > side {
        return Err(Error::InvalidClass(format!("cube edge {edge} exceeds lattice side {side}")));
    }
    let n = side.checked_pow(dim as u32).ok_or_else(|| Error::InvalidClass("lattice too large".into()))?;
    let positions = side - edge + 1;
    let count = positions.pow(dim as u32);
    let mut sets = Vec::with_capacity(count);
    for c in 0..count {
        let corner = lattice_coords(c, dim, positions);
        let mut set = Vec::with_capacity(edge.pow(dim as u32));
        for o in 0..edge.pow(dim as u32) {
            let off = lattice_coords(o, dim, edge);
            let point: Vec<usize> = corner.iter().zip(&off).map(|(a, b)| a + b).collect();
            set.push(lattice_index(&point, side));
        }
        sets.push(set);
    }
    SignalClass::from_parts(n, s, sets, Some(CubeGeometry { dim, side, edge }))
}

/// Minimum ℓ1 distance between a point of `a` and a point of `b`.
pub fn set_distance(a: &[usize], b: &[usize], dim: usize, side: usize) -> usize {
    let ca: Vec<Vec<usize>> = a.iter().map(|&v| lattice_coords(v, dim, side)).collect();
    let cb: Vec<Vec<usize>> = b.iter().map(|&v| lattice_coords(v, dim, side)).collect();
    let mut best = usize::MAX;
    for p in &ca {
        for q in &cb {
            let d = p.iter().zip(q).map(|(x, y)| x.abs_diff(*y)).sum();
            best = best.min(d);
        }
    }
    best
}

/// Greedy pass in class order keeping sets that are disjoint from, and (for
/// cube classes) at ℓ1 distance at least `min_separation` from, every set kept so far.
///
/// Fails when a class with two or more sets collapses to fewer than two.
pub fn disjoint_subcollection(class: &SignalClass, min_separation: usize) -> Result<SignalClass> {
    let mut kept: Vec<usize> = Vec::new();
    let mut used = vec![false; class.n];
    for (k, set) in class.sets.iter().enumerate() {
        if set.iter().any(|&i| used[i]) {
            continue;
        }
        if let Some(g) = class.geometry {
            let far = kept.iter().all(|&j| set_distance(&class.sets[j], set, g.dim, g.side) >= min_separation);
            if !far {
                continue;
            }
        }
        for &i in set {
            used[i] = true;
        }
        kept.push(k);
    }
    if class.len() >= 2 && kept.len() < 2 {
        return Err(Error::InvalidClass(format!("separation {min_separation} leaves fewer than two sets")));
    }
    class.select(&kept)
}

/// Size diagnostics of a class and an optional disjoint subcollection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassValidation {
    pub class_size: usize,
    /// `log |C_n| / log n`.
    pub log_ratio: f64,
    pub sub_size: Option<usize>,
    /// `log |C'_n| / log n`.
    pub sub_log_ratio: Option<f64>,
    pub sub_disjoint: Option<bool>,
    /// Minimum pairwise ℓ1 distance (cube classes only), taken over the
    /// subcollection when given.
    pub min_separation: Option<usize>,
    /// `|C_n| = 1`: the class cannot grow with `n`.
    pub singleton: bool,
}

fn log_ratio(count: usize, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        (count as f64).ln() / (n as f64).ln()
    }
}

pub fn validate_class(class: &SignalClass, sub: Option<&SignalClass>) -> ClassValidation {
    let target = sub.unwrap_or(class);
    let min_separation = target.geometry.map(|g| {
        let mut best = usize::MAX;
        for a in 0..target.sets.len() {
            for b in a + 1..target.sets.len() {
                best = best.min(set_distance(&target.sets[a], &target.sets[b], g.dim, g.side));
            }
        }
        best
    });
    ClassValidation {
        class_size: class.len(),
        log_ratio: log_ratio(class.len(), class.n),
        sub_size: sub.map(SignalClass::len),
        sub_log_ratio: sub.map(|c| log_ratio(c.len(), c.n)),
        sub_disjoint: sub.map(SignalClass::is_disjoint),
        min_separation,
        singleton: class.len() == 1,
    }
}

/// An element of the alternative family: a class and a minimum signal `A > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeSpec {
    class: SignalClass,
    a: f64,
}

impl AlternativeSpec {
    pub fn new(class: SignalClass, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("signal strength must be positive and finite, got {a}")));
        }
        Ok(AlternativeSpec { class, a })
    }

    /// Uses `A = atanh(tanh_a)`; `tanh_a` must lie in `(0, 1)`.
    pub fn from_tanh(class: SignalClass, tanh_a: f64) -> Result<Self> {
        if !(tanh_a > 0.0 && tanh_a < 1.0) {
            return Err(Error::InvalidParameter(format!("tanh A must lie in (0, 1), got {tanh_a}")));
        }
        Self::new(class, tanh_a.atanh())
    }

    pub fn class(&self) -> &SignalClass {
        &self.class
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

/// `μ = A · 1_S` for the `which`-th set of the class.
pub fn alternative_field(alt: &AlternativeSpec, which: usize) -> Result<Vec<f64>> {
    let set = alt.class.set(which).ok_or(Error::IndexOutOfRange { index: which, n: alt.class.len() })?;
    field_vector(alt.class.n, set, alt.a)
}
