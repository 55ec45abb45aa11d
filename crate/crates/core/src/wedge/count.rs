//! Closed-path counts on truncated wedge graphs.
//!
//! Every non-upward edge ends at height 1 and upward edges raise the height, so
//! each vertex of height 1 starts a unique chain of upward edges ending at its
//! first separated vertex. Collapsing these chains gives a small "jump" graph
//! whose edges carry the chain length; closed paths of the wedge graph are
//! closed walks of the jump graph.

use super::cycles::SpectralPolynomial;
use super::{Restriction, TruncatedWedgeGraph, WedgeError};
use crate::linalg::strongly_connected_components;

#[derive(Debug, Clone)]
pub(crate) struct JumpGraph {
    /// Slots of the height-1 vertices.
    pub nodes: Vec<usize>,
    /// `(target node, length)` per node.
    pub jumps: Vec<Vec<(usize, usize)>>,
}

impl JumpGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Strongly connected components that carry at least one cycle.
    pub fn cyclic_components(&self) -> Vec<Vec<usize>> {
        strongly_connected_components(&self.jumps)
            .into_iter()
            .filter(|c| c.len() > 1 || self.jumps[c[0]].iter().any(|&(w, _)| w == c[0]))
            .collect()
    }
}

impl TruncatedWedgeGraph {
    pub(crate) fn jump_graph(&self, restrict: Restriction) -> JumpGraph {
        let slots = self.slots();
        let mut node_of = vec![usize::MAX; slots];
        let mut nodes = Vec::new();
        for (slot, node) in node_of.iter_mut().enumerate() {
            if self.includes(slot, restrict) && self.vertex(slot).is_some_and(|v| v.height() == 1) {
                *node = nodes.len();
                nodes.push(slot);
            }
        }
        let jumps = nodes
            .iter()
            .map(|&start| {
                let mut cur = start;
                let mut len = 0;
                loop {
                    let label = self.label(cur).expect("included slot has a label");
                    if label.is_empty() {
                        match self.successors(cur, restrict).next() {
                            Some(e) => {
                                cur = e.target;
                                len += 1;
                            }
                            None => return Vec::new(),
                        }
                    } else {
                        return self
                            .successors(cur, restrict)
                            .map(|e| {
                                let w = node_of[e.target];
                                debug_assert!(w != usize::MAX, "non-upward edges end at height 1");
                                (w, len + 1)
                            })
                            .collect();
                    }
                }
            })
            .collect();
        JumpGraph { nodes, jumps }
    }
}

trait Tally: Copy {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(self, other: Self) -> Option<Self>;
    fn scale(self, by: usize) -> Option<Self>;
}

impl Tally for u128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(self, other: Self) -> Option<Self> {
        self.checked_add(other)
    }
    fn scale(self, by: usize) -> Option<Self> {
        self.checked_mul(by as u128)
    }
}

const PRIMES: [u64; 3] = [
    18_446_744_073_709_551_557, // 2^64 - 59
    9_223_372_036_854_775_783,  // 2^63 - 25
    2_305_843_009_213_693_951,  // 2^61 - 1, used to verify the reconstruction
];

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Residues([u64; 3]);

impl Tally for Residues {
    fn zero() -> Self {
        Residues([0; 3])
    }
    fn one() -> Self {
        Residues([1; 3])
    }
    fn is_zero(&self) -> bool {
        self.0 == [0; 3]
    }
    fn add(self, other: Self) -> Option<Self> {
        let mut r = [0; 3];
        for (q, p) in PRIMES.iter().enumerate() {
            r[q] = add_mod(self.0[q], other.0[q], *p);
        }
        Some(Residues(r))
    }
    fn scale(self, by: usize) -> Option<Self> {
        let mut r = [0; 3];
        for (q, p) in PRIMES.iter().enumerate() {
            r[q] = mul_mod(self.0[q], by as u64 % p, *p);
        }
        Some(Residues(r))
    }
}

/// `counts[n]` = number of closed paths of length `n` (with distinguished start), `1 <= n <= n_max`.
fn closed_walk_tallies<T: Tally>(jg: &JumpGraph, n_max: usize) -> Result<Vec<T>, WedgeError> {
    let mut counts = vec![T::zero(); n_max + 1];
    let mut local = vec![usize::MAX; jg.len()];
    for comp in jg.cyclic_components() {
        for (i, &u) in comp.iter().enumerate() {
            local[u] = i;
        }
        let m = comp.len();
        for (ui, &u) in comp.iter().enumerate() {
            // f[len * m + w]: walks from u of total length len ending at w
            let mut f = vec![T::zero(); (n_max + 1) * m];
            f[ui] = T::one();
            for len in 0..n_max {
                for wi in 0..m {
                    let cur = f[len * m + wi];
                    if cur.is_zero() {
                        continue;
                    }
                    for &(x, step) in &jg.jumps[comp[wi]] {
                        let xi = local[x];
                        if xi == usize::MAX || len + step > n_max {
                            continue;
                        }
                        let next = len + step;
                        let cell = &mut f[next * m + xi];
                        *cell = cell.add(cur).ok_or(WedgeError::Overflow { length: next })?;
                        if x == u {
                            let extra = cur.scale(step).ok_or(WedgeError::Overflow { length: next })?;
                            counts[next] =
                                counts[next].add(extra).ok_or(WedgeError::Overflow { length: next })?;
                        }
                    }
                }
            }
        }
        for &u in &comp {
            local[u] = usize::MAX;
        }
    }
    Ok(counts)
}

fn check_degree(g: &TruncatedWedgeGraph, n: usize) -> Result<(), WedgeError> {
    if n > g.bound() {
        return Err(WedgeError::DegreeTooLarge {
            degree: n,
            bound: g.bound(),
        });
    }
    Ok(())
}

/// Closed-path counts `C(1..=n_max)`; index 0 is unused and set to 0.
pub fn closed_path_counts(
    g: &TruncatedWedgeGraph,
    n_max: usize,
    restrict: Restriction,
) -> Result<Vec<u128>, WedgeError> {
    check_degree(g, n_max)?;
    closed_walk_tallies::<u128>(&g.jump_graph(restrict), n_max)
}

/// Number of closed paths of length `n` (distinct starting vertices counted separately).
pub fn closed_path_count(
    g: &TruncatedWedgeGraph,
    n: usize,
    restrict: Restriction,
) -> Result<u128, WedgeError> {
    Ok(closed_path_counts(g, n, restrict)?[n])
}

/// Spectral determinant up to `t^degree` from closed-path counts, via
/// `n p_n = -Σ_{m=1}^{n} C(m) p_{n-m}`, computed modulo three primes.
pub fn spectral_series(
    g: &TruncatedWedgeGraph,
    degree: usize,
    restrict: Restriction,
) -> Result<SpectralPolynomial, WedgeError> {
    check_degree(g, degree)?;
    let traces = closed_walk_tallies::<Residues>(&g.jump_graph(restrict), degree)?;
    series_from_traces(&traces, degree)
}

pub(crate) fn series_from_traces(
    traces: &[Residues],
    degree: usize,
) -> Result<SpectralPolynomial, WedgeError> {
    let mut coeffs: Vec<[u64; 3]> = vec![[1, 1, 1]];
    for n in 1..=degree {
        let mut c = [0u64; 3];
        for (q, &p) in PRIMES.iter().enumerate() {
            let mut acc = 0u64;
            for m in 1..=n {
                acc = add_mod(acc, mul_mod(traces[m].0[q], coeffs[n - m][q], p), p);
            }
            // p_n = -acc / n
            let val = mul_mod(acc, inv_mod(n as u64, p), p);
            c[q] = if val == 0 { 0 } else { p - val };
        }
        coeffs.push(c);
    }
    let (p1, p2, p3) = (PRIMES[0] as u128, PRIMES[1] as u128, PRIMES[2]);
    let inv_p1 = inv_mod((p1 % p2) as u64, p2 as u64) as u128;
    let modulus = p1 * p2;
    let mut out = Vec::with_capacity(coeffs.len());
    for (n, c) in coeffs.iter().enumerate() {
        let (a1, a2) = (c[0] as u128, c[1] as u128);
        let diff = (a2 + p2 - a1 % p2) % p2;
        let h = mulmod_u128(diff, inv_p1, p2);
        let x = a1 + p1 * h; // in [0, p1 p2)
        let signed: i128 = if x > modulus / 2 {
            -((modulus - x) as i128)
        } else {
            x as i128
        };
        let check = signed.rem_euclid(p3 as i128) as u64;
        if check != c[2] {
            return Err(WedgeError::Overflow { length: n });
        }
        out.push(signed);
    }
    Ok(SpectralPolynomial::new(out))
}

fn mulmod_u128(a: u128, b: u128, p: u128) -> u128 {
    // both operands are below p < 2^63, so the product fits
    (a * b) % p
}

#[cfg(test)]
pub(crate) fn residues_from_counts(counts: &[u128]) -> Vec<Residues> {
    counts
        .iter()
        .map(|&c| {
            let mut r = [0; 3];
            for (q, &p) in PRIMES.iter().enumerate() {
                r[q] = (c % p as u128) as u64;
            }
            Residues(r)
        })
        .collect()
}
