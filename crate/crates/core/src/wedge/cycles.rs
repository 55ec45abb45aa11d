//! Spectral determinants by explicit simple-cycle and multicycle enumeration.

use std::collections::BinaryHeap;
use std::cmp::Reverse;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Restriction, TruncatedWedgeGraph, WedgeError};
use crate::linalg::{strongly_connected_components, SparseMatrix};

/// `c_0 + c_1 t + ... + c_N t^N`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralPolynomial {
    coefficients: Vec<i128>,
}

pub const ROOT_SCAN_STEPS: usize = 4096;

impl SpectralPolynomial {
    pub fn new(coefficients: Vec<i128>) -> Self {
        SpectralPolynomial { coefficients }
    }

    pub fn coefficients(&self) -> &[i128] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn truncated(&self, degree: usize) -> Self {
        SpectralPolynomial::new(self.coefficients.iter().take(degree + 1).copied().collect())
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * t + c as f64)
    }

    /// Smallest zero in `(0, 1)`: the first sign change on a uniform scan,
    /// refined by bisection.
    pub fn smallest_root_in_unit_interval(&self) -> Option<f64> {
        let eps = 1e-9;
        let mut lo = eps;
        let mut flo = self.eval(lo);
        if flo == 0.0 {
            return Some(lo);
        }
        for step in 1..=ROOT_SCAN_STEPS {
            let hi = eps + (1.0 - 2.0 * eps) * step as f64 / ROOT_SCAN_STEPS as f64;
            let fhi = self.eval(hi);
            if fhi == 0.0 || (fhi < 0.0) != (flo < 0.0) {
                let (mut a, mut b) = (lo, hi);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if b - a < 1e-15 {
                        break;
                    }
                    let fm = self.eval(mid);
                    if fm == 0.0 {
                        return Some(mid);
                    }
                    if (fm < 0.0) == (flo < 0.0) {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                return Some(0.5 * (a + b));
            }
            lo = hi;
            flo = fhi;
        }
        None
    }
}

impl fmt::Display for SpectralPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, &c) in self.coefficients.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mag = c.unsigned_abs();
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0 { '-' } else { '+' })?;
            }
            first = false;
            match (n, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => write!(f, "t")?,
                (1, m) => write!(f, "{m}t")?,
                (_, 1) => write!(f, "t^{n}")?,
                (_, m) => write!(f, "{m}t^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SpectralPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleBudget {
    pub max_cycles: usize,
    pub max_multicycles: usize,
}

impl Default for CycleBudget {
    fn default() -> Self {
        CycleBudget {
            max_cycles: 1_000_000,
            max_multicycles: 20_000_000,
        }
    }
}

/// Upper bound `(2nk)^(k + sqrt(2kn))`, `k = leaves^2`, on simple multicycles of length `n`.
pub fn multicycle_bound(n: usize, leaves: usize) -> f64 {
    let k = (leaves * leaves) as f64;
    let n = n as f64;
    (2.0 * n * k).powf(k + (2.0 * k * n).sqrt())
}

/// Digraph whose edges carry a length and a multiplicity.
struct LengthGraph {
    adj: Vec<Vec<(usize, usize, u64)>>,
}

struct Cycle {
    members: Vec<u64>,
    length: usize,
    weight: i128,
}

fn disjoint(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == 0)
}

fn shortest_back(g: &LengthGraph, root: usize, allowed: &[bool], limit: usize) -> Vec<usize> {
    // distances to `root` along edges within `allowed`
    let n = g.adj.len();
    let mut rev: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for v in 0..n {
        if !allowed[v] {
            continue;
        }
        for &(w, len, _) in &g.adj[v] {
            if allowed[w] {
                rev[w].push((v, len));
            }
        }
    }
    let mut dist = vec![usize::MAX; n];
    dist[root] = 0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0usize, root)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v] || d > limit {
            continue;
        }
        for &(u, len) in &rev[v] {
            let nd = d + len;
            if nd < dist[u] {
                dist[u] = nd;
                heap.push(Reverse((nd, u)));
            }
        }
    }
    dist
}

fn simple_cycles(
    g: &LengthGraph,
    max_len: usize,
    budget: &CycleBudget,
    on_budget: impl Fn() -> WedgeError,
) -> Result<Vec<Cycle>, WedgeError> {
    let n = g.adj.len();
    let words = n.div_ceil(64).max(1);
    let mut comp_of = vec![usize::MAX; n];
    let pairs: Vec<Vec<(usize, ())>> = g
        .adj
        .iter()
        .map(|r| r.iter().map(|&(w, _, _)| (w, ())).collect())
        .collect();
    for (c, comp) in strongly_connected_components(&pairs).iter().enumerate() {
        for &v in comp {
            comp_of[v] = c;
        }
    }
    let mut cycles = Vec::new();
    for root in 0..n {
        let allowed: Vec<bool> = (0..n).map(|v| v >= root && comp_of[v] == comp_of[root]).collect();
        let dist = shortest_back(g, root, &allowed, max_len);
        // explicit DFS stack: (vertex, next edge index)
        let mut path = vec![root];
        let mut on_path = vec![false; n];
        on_path[root] = true;
        let mut lens = vec![0usize];
        let mut weights = vec![1i128];
        let mut pos = vec![0usize];
        while let Some(&v) = path.last() {
            let depth = path.len() - 1;
            let idx = pos[depth];
            if idx >= g.adj[v].len() {
                path.pop();
                pos.pop();
                lens.pop();
                weights.pop();
                on_path[v] = false;
                continue;
            }
            pos[depth] += 1;
            let (w, len, mult) = g.adj[v][idx];
            if !allowed[w] {
                continue;
            }
            let total = lens[depth] + len;
            let weight = weights[depth] * mult as i128;
            if w == root {
                if total <= max_len {
                    let mut members = vec![0u64; words];
                    for &u in &path {
                        members[u / 64] |= 1 << (u % 64);
                    }
                    cycles.push(Cycle {
                        members,
                        length: total,
                        weight,
                    });
                    if cycles.len() > budget.max_cycles {
                        return Err(on_budget());
                    }
                }
                continue;
            }
            if on_path[w] || dist[w] == usize::MAX || total + dist[w] > max_len {
                continue;
            }
            on_path[w] = true;
            path.push(w);
            pos.push(0);
            lens.push(total);
            weights.push(weight);
        }
    }
    cycles.sort_by_key(|c| c.length);
    Ok(cycles)
}

fn pack_multicycles(
    cycles: &[Cycle],
    max_len: usize,
    budget: &CycleBudget,
) -> Option<Vec<i128>> {
    let mut coeffs = vec![0i128; max_len + 1];
    coeffs[0] = 1;
    let words = cycles.first().map_or(1, |c| c.members.len());
    let mut used = vec![0u64; words];
    let mut count = 0usize;
    #[allow(clippy::too_many_arguments)]
    fn rec(
        cycles: &[Cycle],
        start: usize,
        used: &mut Vec<u64>,
        len: usize,
        weight: i128,
        sign: i128,
        max_len: usize,
        coeffs: &mut [i128],
        count: &mut usize,
        limit: usize,
    ) -> bool {
        for idx in start..cycles.len() {
            let c = &cycles[idx];
            if len + c.length > max_len {
                break;
            }
            if !disjoint(used, &c.members) {
                continue;
            }
            *count += 1;
            if *count > limit {
                return false;
            }
            let w = weight * c.weight;
            coeffs[len + c.length] -= sign * w;
            for (u, m) in used.iter_mut().zip(&c.members) {
                *u |= m;
            }
            let ok = rec(cycles, idx + 1, used, len + c.length, w, -sign, max_len, coeffs, count, limit);
            for (u, m) in used.iter_mut().zip(&c.members) {
                *u &= !m;
            }
            if !ok {
                return false;
            }
        }
        true
    }
    // coefficient of a multicycle with c components is (-1)^c; `sign` tracks (-1)^(c-1) of the parent
    rec(
        cycles,
        0,
        &mut used,
        0,
        1,
        1,
        max_len,
        &mut coeffs,
        &mut count,
        budget.max_multicycles,
    )
    .then_some(coeffs)
}

/// `det(I - tA)` up to `t^degree` for a finite nonnegative integer matrix,
/// by multicycle enumeration.
pub fn spectral_determinant_of_matrix(
    a: &SparseMatrix,
    degree: usize,
    budget: CycleBudget,
) -> Result<SpectralPolynomial, WedgeError> {
    let g = LengthGraph {
        adj: a
            .rows()
            .iter()
            .map(|r| r.iter().map(|&(c, m)| (c, 1, m)).collect())
            .collect(),
    };
    let bound = multicycle_bound(degree, a.n());
    enumerate(&g, degree, budget, bound)
}

fn enumerate(
    g: &LengthGraph,
    degree: usize,
    budget: CycleBudget,
    bound: f64,
) -> Result<SpectralPolynomial, WedgeError> {
    let cycles = simple_cycles(g, degree, &budget, || WedgeError::TooManyCycles {
        limit: budget.max_cycles,
        length: degree,
        bound,
    })?;
    let coeffs = pack_multicycles(&cycles, degree, &budget).ok_or(WedgeError::TooManyMulticycles {
        limit: budget.max_multicycles,
        length: degree,
        bound,
    })?;
    Ok(SpectralPolynomial::new(coeffs))
}

/// Spectral determinant of a truncated wedge graph up to `t^degree`, by
/// enumerating simple cycles (rooted at their smallest vertex) and packing
/// disjoint ones into multicycles with sign `(-1)^(#components)`.
pub fn spectral_determinant(
    g: &TruncatedWedgeGraph,
    degree: usize,
    restrict: Restriction,
    budget: CycleBudget,
) -> Result<SpectralPolynomial, WedgeError> {
    if degree > g.bound() {
        return Err(WedgeError::DegreeTooLarge {
            degree,
            bound: g.bound(),
        });
    }
    let jg = g.jump_graph(restrict);
    let lg = LengthGraph {
        adj: jg
            .jumps
            .iter()
            .map(|r| r.iter().map(|&(w, len)| (w, len, 1)).collect())
            .collect(),
    };
    enumerate(&lg, degree, budget, multicycle_bound(degree, g.leaves()))
}
