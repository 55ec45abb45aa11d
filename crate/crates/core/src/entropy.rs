//! Thurston's entropy algorithm for rational critical portraits.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::{tau, Angle};
use crate::linalg::{leading_eigenvalue, EigenError, SparseMatrix};
use crate::portrait::{CriticalPortrait, SeparationOracle};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("arc basis would have {size} elements, above the limit {limit}")]
    BasisTooLarge { size: usize, limit: usize },
}

/// Where a postcritical angle first appears: `τ^iterate(leaf)`, leaf 0-based, iterate ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub leaf: usize,
    pub iterate: usize,
}

/// Forward orbits of the leaf images, as a sorted set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostcriticalSet {
    angles: Vec<Angle>,
    source: BTreeMap<Angle, Witness>,
}

impl PostcriticalSet {
    pub fn angles(&self) -> &[Angle] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn contains(&self, x: &Angle) -> bool {
        self.source.contains_key(x)
    }

    pub fn witness(&self, x: &Angle) -> Option<Witness> {
        self.source.get(x).copied()
    }

    pub fn rank(&self, x: &Angle) -> Option<usize> {
        self.angles.binary_search(x).ok()
    }
}

pub fn postcritical_set(xi: &CriticalPortrait) -> PostcriticalSet {
    let d = xi.degree();
    let mut source = BTreeMap::new();
    for k in 0..xi.size() {
        let mut x = xi.leaf_image(k);
        let mut iterate = 1;
        while !source.contains_key(&x) {
            source.insert(x.clone(), Witness { leaf: k, iterate });
            x = tau(&x, d);
            iterate += 1;
        }
    }
    PostcriticalSet {
        angles: source.keys().cloned().collect(),
        source,
    }
}

/// Unordered pair of postcritical angles, stored with `lo <= hi`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArcPair {
    pub lo: Angle,
    pub hi: Angle,
}

impl ArcPair {
    pub fn new(a: Angle, b: Angle) -> Self {
        if a <= b {
            ArcPair { lo: a, hi: b }
        } else {
            ArcPair { lo: b, hi: a }
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

impl fmt::Display for ArcPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.lo, self.hi)
    }
}

impl fmt::Debug for ArcPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Lexicographically ordered basis of arcs between postcritical angles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcBasis {
    pairs: Vec<ArcPair>,
}

impl ArcBasis {
    pub fn pairs(&self) -> &[ArcPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn position(&self, pair: &ArcPair) -> Option<usize> {
        self.pairs.binary_search(pair).ok()
    }
}

pub fn arc_basis(p: &PostcriticalSet) -> ArcBasis {
    let a = p.angles();
    let pairs = if a.len() == 1 {
        vec![ArcPair::new(a[0].clone(), a[0].clone())]
    } else {
        let mut v = Vec::with_capacity(a.len() * a.len().saturating_sub(1) / 2);
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                v.push(ArcPair::new(a[i].clone(), a[j].clone()));
            }
        }
        v
    };
    ArcBasis { pairs }
}

/// Index of the pair `(i, j)`, `i < j`, among all pairs of `0..p` in lexicographic order.
fn pair_index(i: usize, j: usize, p: usize) -> usize {
    debug_assert!(i < j && j < p);
    i * p - i * (i + 1) / 2 + (j - i - 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionSystem {
    pub basis: ArcBasis,
    pub matrix: SparseMatrix,
}

pub const DEFAULT_BASIS_LIMIT: usize = 20_000_000;

pub fn transition_matrix(xi: &CriticalPortrait) -> TransitionSystem {
    transition_matrix_with_limit(xi, usize::MAX).expect("no limit")
}

pub fn transition_matrix_with_limit(
    xi: &CriticalPortrait,
    limit: usize,
) -> Result<TransitionSystem, EntropyError> {
    let d = xi.degree();
    let post = postcritical_set(xi);
    let p = post.len();
    let size = if p == 1 { 1 } else { p * (p - 1) / 2 };
    if size > limit {
        return Err(EntropyError::BasisTooLarge { size, limit });
    }
    let basis = arc_basis(&post);
    let oracle = SeparationOracle::new(xi, post.angles().iter().cloned());
    let to_oracle: Vec<usize> = post
        .angles()
        .iter()
        .map(|a| oracle.rank(a).expect("postcritical angle in oracle"))
        .collect();
    let image: Vec<usize> = post
        .angles()
        .iter()
        .map(|a| post.rank(&tau(a, d)).expect("postcritical set is forward invariant"))
        .collect();
    let leaf_image: Vec<usize> = (0..xi.size())
        .map(|k| post.rank(&xi.leaf_image(k)).expect("leaf images are postcritical"))
        .collect();

    let row_for = |i: usize, j: usize| -> Vec<(usize, u64)> {
        let (ri, rj) = (to_oracle[i], to_oracle[j]);
        if oracle.common_leaf(ri, rj).is_some() {
            return Vec::new();
        }
        let sep = oracle.separation(ri, rj);
        let mut chain = Vec::with_capacity(sep.len() + 2);
        chain.push(image[i]);
        chain.extend(sep.leaves().iter().map(|&k| leaf_image[k]));
        chain.push(image[j]);
        chain
            .windows(2)
            .filter_map(|w| {
                let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                if a == b {
                    // a point-arc only lives in the basis of a one-point set
                    (p == 1).then_some((0, 1))
                } else {
                    Some((pair_index(a, b, p), 1))
                }
            })
            .collect()
    };

    let rows: Vec<Vec<(usize, u64)>> = if p == 1 {
        vec![row_for(0, 0)]
    } else {
        (0..p)
            .into_par_iter()
            .flat_map_iter(|i| (i + 1..p).map(move |j| (i, j)))
            .map(|(i, j)| row_for(i, j))
            .collect()
    };
    Ok(TransitionSystem {
        basis,
        matrix: SparseMatrix::from_rows(rows),
    })
}

/// Result of Thurston's algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteEntropy {
    /// Spectral radius of the transition matrix.
    pub rho: f64,
    /// `max(0, log rho)`.
    pub entropy: f64,
    pub system: TransitionSystem,
}

impl FiniteEntropy {
    pub fn basis_size(&self) -> usize {
        self.system.basis.len()
    }
}

pub fn core_entropy(xi: &CriticalPortrait) -> Result<FiniteEntropy, EntropyError> {
    core_entropy_with_limit(xi, DEFAULT_BASIS_LIMIT)
}

pub fn core_entropy_with_limit(
    xi: &CriticalPortrait,
    limit: usize,
) -> Result<FiniteEntropy, EntropyError> {
    let system = transition_matrix_with_limit(xi, limit)?;
    let rho = leading_eigenvalue(&system.matrix)?;
    let entropy = if rho > 1.0 { rho.ln() } else { 0.0 };
    Ok(FiniteEntropy {
        rho,
        entropy,
        system,
    })
}
