//! Labeled wedges and their associated directed graphs.
//!
//! A wedge vertex `(k, i, l, j)` stands for the arc between the `i`-th iterate of
//! leaf `k` and the `j`-th iterate of leaf `l`. Leaf indices are 0-based here and
//! printed 1-based. Vertices are stored in canonical orientation: `i < j`, or
//! `i == j` and `k <= l`.

mod count;
mod cycles;
mod growth;
mod periodic;
mod quotient;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::{orbit, Angle};
use crate::entropy::{postcritical_set, PostcriticalSet};
use crate::linalg::{EigenError, SparseMatrix};
use crate::portrait::{CriticalPortrait, SeparationOracle, SeparationVector};

pub use count::{closed_path_count, closed_path_counts, spectral_series};
pub use cycles::{
    multicycle_bound, spectral_determinant, spectral_determinant_of_matrix, CycleBudget,
    SpectralPolynomial,
};
pub use growth::{
    growth_rate, growth_rate_with, truncated_perron_root, GrowthEstimate, GrowthOptions,
};
pub use periodic::{check_weakly_periodic, Clause, PeriodicityReport};
pub use quotient::{quotient_graph, QuotientGraph};

pub const DEFAULT_MAX_VERTICES: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WedgeError {
    #[error("truncation bound must be at least 1")]
    ZeroBound,
    #[error("truncated wedge would have {count} vertex slots, above the limit {limit}")]
    TooManyVertices { count: usize, limit: usize },
    #[error("more than {limit} simple cycles up to length {length}; multicycle count bound is about {bound:.3e}")]
    TooManyCycles {
        limit: usize,
        length: usize,
        bound: f64,
    },
    #[error("more than {limit} multicycles up to length {length}; multicycle count bound is about {bound:.3e}")]
    TooManyMulticycles {
        limit: usize,
        length: usize,
        bound: f64,
    },
    #[error("integer overflow counting closed paths of length {length}")]
    Overflow { length: usize },
    #[error("spectral coefficient {degree} changed between truncations {previous} and {current}")]
    NotStabilized {
        degree: usize,
        previous: usize,
        current: usize,
    },
    #[error("degree {degree} exceeds truncation bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
    #[error("truncation {bound} too small: no representative for arc {pair}")]
    TruncationTooSmall { bound: usize, pair: String },
    #[error("edge compatibility fails at vertex {vertex}")]
    Incompatible { vertex: WedgeVertex },
    #[error("labeling has {found} leaves, portrait has {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// `{y_k(i), y_l(j)}` in canonical orientation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WedgeVertex {
    pub k: usize,
    pub i: usize,
    pub l: usize,
    pub j: usize,
}

impl WedgeVertex {
    /// Canonicalizes the unordered pair. Iterates start at 1.
    pub fn new(k: usize, i: usize, l: usize, j: usize) -> Self {
        debug_assert!(i >= 1 && j >= 1);
        if i < j || (i == j && k <= l) {
            WedgeVertex { k, i, l, j }
        } else {
            WedgeVertex {
                k: l,
                i: j,
                l: k,
                j: i,
            }
        }
    }

    pub fn height(&self) -> usize {
        self.i.min(self.j)
    }

    pub fn width(&self) -> usize {
        self.i.max(self.j)
    }
}

impl fmt::Display for WedgeVertex {
    /// 1-based leaf indices: `k,i,l,j`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.k + 1, self.i, self.l + 1, self.j)
    }
}

impl fmt::Debug for WedgeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Empty, or pairwise distinct leaf indices (0-based).
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WedgeLabel(Vec<usize>);

impl WedgeLabel {
    pub fn empty() -> Self {
        WedgeLabel(Vec::new())
    }

    pub fn new(leaves: Vec<usize>) -> Self {
        WedgeLabel(leaves)
    }

    pub fn leaves(&self) -> &[usize] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn reversed(&self) -> Self {
        WedgeLabel(self.0.iter().rev().copied().collect())
    }
}

impl From<SeparationVector> for WedgeLabel {
    fn from(v: SeparationVector) -> Self {
        WedgeLabel(v.leaves().to_vec())
    }
}

impl fmt::Display for WedgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&SeparationVector::new(self.0.clone()), f)
    }
}

impl fmt::Debug for WedgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Upward,
    Backward,
    Forward,
    Central,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EdgeKind::Upward => "upward",
            EdgeKind::Backward => "backward",
            EdgeKind::Forward => "forward",
            EdgeKind::Central => "central",
        };
        f.write_str(s)
    }
}

/// Targets of the edges leaving `v`, where `label` is the label of `v` in its
/// canonical orientation.
pub fn outgoing_edges(v: &WedgeVertex, label: &WedgeLabel) -> Vec<(WedgeVertex, EdgeKind)> {
    let a = label.leaves();
    if a.is_empty() {
        return vec![(WedgeVertex::new(v.k, v.i + 1, v.l, v.j + 1), EdgeKind::Upward)];
    }
    let r = a.len();
    let first = WedgeVertex::new(v.k, v.i + 1, a[0], 1);
    let last = WedgeVertex::new(a[r - 1], 1, v.l, v.j + 1);
    let (first_kind, last_kind) = if first.width() <= last.width() {
        (EdgeKind::Backward, EdgeKind::Forward)
    } else {
        (EdgeKind::Forward, EdgeKind::Backward)
    };
    let mut out = Vec::with_capacity(r + 1);
    out.push((first, first_kind));
    for w in a.windows(2) {
        out.push((WedgeVertex::new(w[0], 1, w[1], 1), EdgeKind::Central));
    }
    out.push((last, last_kind));
    out
}

/// Vertices of height at most `bound` and width at most `2 * bound`, addressed
/// by dense slots. Some slots do not hold a canonical vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexSpace {
    pub leaves: usize,
    pub bound: usize,
}

impl VertexSpace {
    pub fn new(leaves: usize, bound: usize) -> Self {
        VertexSpace { leaves, bound }
    }

    pub fn slots(&self) -> usize {
        self.bound * 2 * self.bound * self.leaves * self.leaves
    }

    pub fn contains(&self, v: &WedgeVertex) -> bool {
        v.height() <= self.bound && v.width() <= 2 * self.bound
    }

    pub fn slot(&self, v: &WedgeVertex) -> Option<usize> {
        if !self.contains(v) {
            return None;
        }
        let s = self.leaves;
        Some((((v.i - 1) * 2 * self.bound + (v.j - 1)) * s + v.k) * s + v.l)
    }

    /// The canonical vertex stored at `slot`, if any.
    pub fn vertex(&self, slot: usize) -> Option<WedgeVertex> {
        let s = self.leaves;
        let l = slot % s;
        let rest = slot / s;
        let k = rest % s;
        let rest = rest / s;
        let j = rest % (2 * self.bound) + 1;
        let i = rest / (2 * self.bound) + 1;
        let canonical = i < j || (i == j && k <= l);
        (canonical && i <= self.bound).then_some(WedgeVertex { k, i, l, j })
    }

    pub fn vertices(&self) -> impl Iterator<Item = (usize, WedgeVertex)> + '_ {
        (0..self.slots()).filter_map(move |s| self.vertex(s).map(|v| (s, v)))
    }
}

/// Iterates of the leaves of a portrait, mapped to postcritical indices.
#[derive(Debug, Clone)]
pub struct PortraitWedge {
    portrait: CriticalPortrait,
    post: PostcriticalSet,
    oracle: SeparationOracle,
    oracle_rank: Vec<usize>,
    // per leaf: postcritical index of x_k(1), x_k(2), ... up to the first repeat
    orbits: Vec<(Vec<usize>, usize)>,
}

impl PortraitWedge {
    pub fn new(xi: &CriticalPortrait) -> Self {
        let post = postcritical_set(xi);
        let oracle = SeparationOracle::new(xi, post.angles().iter().cloned());
        let oracle_rank = post
            .angles()
            .iter()
            .map(|a| oracle.rank(a).expect("postcritical angle in oracle"))
            .collect();
        let orbits = (0..xi.size())
            .map(|k| {
                let o = orbit(&xi.leaf_image(k), xi.degree());
                let ids = o
                    .orbit
                    .iter()
                    .map(|a| post.rank(a).expect("orbit is postcritical"))
                    .collect();
                (ids, o.preperiod)
            })
            .collect();
        PortraitWedge {
            portrait: xi.clone(),
            post,
            oracle,
            oracle_rank,
            orbits,
        }
    }

    pub fn portrait(&self) -> &CriticalPortrait {
        &self.portrait
    }

    pub fn postcritical(&self) -> &PostcriticalSet {
        &self.post
    }

    pub fn leaves(&self) -> usize {
        self.portrait.size()
    }

    /// Postcritical index of `x_k(i)`, `i >= 1`.
    pub fn point_id(&self, k: usize, i: usize) -> usize {
        let (ids, pre) = &self.orbits[k];
        let n = i - 1;
        let idx = if n < ids.len() {
            n
        } else {
            pre + (n - pre) % (ids.len() - pre)
        };
        ids[idx]
    }

    /// `x_k(i) = τ^i(ℓ_k)`.
    pub fn point(&self, k: usize, i: usize) -> &Angle {
        &self.post.angles()[self.point_id(k, i)]
    }

    pub fn is_diagonal(&self, v: &WedgeVertex) -> bool {
        self.point_id(v.k, v.i) == self.point_id(v.l, v.j)
    }

    /// Label of the ordered pair `(y_k(i), y_l(j))`.
    pub fn ordered_label(&self, k: usize, i: usize, l: usize, j: usize) -> WedgeLabel {
        self.label_of_ids(self.point_id(k, i), self.point_id(l, j))
    }

    pub fn label(&self, v: &WedgeVertex) -> WedgeLabel {
        self.ordered_label(v.k, v.i, v.l, v.j)
    }

    fn label_of_ids(&self, a: usize, b: usize) -> WedgeLabel {
        self.oracle
            .separation(self.oracle_rank[a], self.oracle_rank[b])
            .into()
    }

    /// Labels of every vertex of the truncation, computed once per pair of points.
    pub fn labeling(&self, bound: usize) -> WedgeLabeling {
        let space = VertexSpace::new(self.leaves(), bound);
        let p = self.post.len();
        let mut cache: Vec<Option<WedgeLabel>> = vec![None; p * p];
        let labels = (0..space.slots())
            .map(|slot| {
                space.vertex(slot).map(|v| {
                    let (a, b) = (self.point_id(v.k, v.i), self.point_id(v.l, v.j));
                    cache[a * p + b]
                        .get_or_insert_with(|| self.label_of_ids(a, b))
                        .clone()
                })
            })
            .collect();
        WedgeLabeling { space, labels }
    }

    pub fn diagonal_flags(&self, space: &VertexSpace) -> Vec<bool> {
        (0..space.slots())
            .map(|slot| space.vertex(slot).is_some_and(|v| self.is_diagonal(&v)))
            .collect()
    }
}

/// Label of `v` in the wedge induced by `xi`.
pub fn label_of(xi: &CriticalPortrait, v: &WedgeVertex) -> WedgeLabel {
    PortraitWedge::new(xi).label(v)
}

/// Labels on a truncation of the wedge (not necessarily induced by a portrait).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WedgeLabeling {
    space: VertexSpace,
    labels: Vec<Option<WedgeLabel>>,
}

impl WedgeLabeling {
    pub fn space(&self) -> &VertexSpace {
        &self.space
    }

    pub fn get(&self, v: &WedgeVertex) -> Option<&WedgeLabel> {
        self.space.slot(v).and_then(|s| self.labels[s].as_ref())
    }

    /// Replaces the label of `v` (given in canonical orientation).
    pub fn set(&mut self, v: &WedgeVertex, label: WedgeLabel) -> bool {
        match self.space.slot(v) {
            Some(s) if self.labels[s].is_some() => {
                self.labels[s] = Some(label);
                true
            }
            _ => false,
        }
    }

    /// Label of the ordered pair `(y_k(i), y_l(j))`.
    pub fn ordered(&self, k: usize, i: usize, l: usize, j: usize) -> Option<WedgeLabel> {
        let v = WedgeVertex::new(k, i, l, j);
        let label = self.get(&v)?;
        Some(if v.k == k && v.i == i && v.l == l && v.j == j {
            label.clone()
        } else {
            label.reversed()
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (WedgeVertex, &WedgeLabel)> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter_map(move |(s, l)| Some((self.space.vertex(s)?, l.as_ref()?)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Restriction {
    All,
    NonDiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WedgeEdge {
    pub target: usize,
    pub kind: EdgeKind,
}

/// The finite part of the wedge graph with height `<= N` and width `<= 2N`.
/// Edges leaving the truncation are dropped.
#[derive(Debug, Clone)]
pub struct TruncatedWedgeGraph {
    space: VertexSpace,
    labels: Vec<Option<WedgeLabel>>,
    diagonal: Vec<bool>,
    edges: Vec<Vec<WedgeEdge>>,
}

pub fn build_truncated_graph(
    xi: &CriticalPortrait,
    bound: usize,
) -> Result<TruncatedWedgeGraph, WedgeError> {
    build_truncated_graph_with(xi, bound, DEFAULT_MAX_VERTICES)
}

pub fn build_truncated_graph_with(
    xi: &CriticalPortrait,
    bound: usize,
    max_vertices: usize,
) -> Result<TruncatedWedgeGraph, WedgeError> {
    if bound == 0 {
        return Err(WedgeError::ZeroBound);
    }
    let space = VertexSpace::new(xi.size(), bound);
    if space.slots() > max_vertices {
        return Err(WedgeError::TooManyVertices {
            count: space.slots(),
            limit: max_vertices,
        });
    }
    let pw = PortraitWedge::new(xi);
    let diagonal = pw.diagonal_flags(&space);
    Ok(TruncatedWedgeGraph::from_labeling(pw.labeling(bound), diagonal))
}

impl TruncatedWedgeGraph {
    /// `diagonal` holds one flag per slot of the labeling's vertex space.
    pub fn from_labeling(labeling: WedgeLabeling, diagonal: Vec<bool>) -> Self {
        let WedgeLabeling { space, labels } = labeling;
        assert_eq!(diagonal.len(), space.slots());
        let edges = labels
            .iter()
            .enumerate()
            .map(|(slot, label)| match (space.vertex(slot), label) {
                (Some(v), Some(label)) => outgoing_edges(&v, label)
                    .into_iter()
                    .filter_map(|(t, kind)| space.slot(&t).map(|target| WedgeEdge { target, kind }))
                    .collect(),
                _ => Vec::new(),
            })
            .collect();
        TruncatedWedgeGraph {
            space,
            labels,
            diagonal,
            edges,
        }
    }

    pub fn bound(&self) -> usize {
        self.space.bound
    }

    pub fn space(&self) -> &VertexSpace {
        &self.space
    }

    pub fn leaves(&self) -> usize {
        self.space.leaves
    }

    pub fn slots(&self) -> usize {
        self.space.slots()
    }

    pub fn vertex(&self, slot: usize) -> Option<WedgeVertex> {
        self.space.vertex(slot)
    }

    pub fn slot(&self, v: &WedgeVertex) -> Option<usize> {
        self.space.slot(v)
    }

    pub fn label(&self, slot: usize) -> Option<&WedgeLabel> {
        self.labels[slot].as_ref()
    }

    pub fn is_diagonal(&self, slot: usize) -> bool {
        self.diagonal[slot]
    }

    pub fn edges(&self, slot: usize) -> &[WedgeEdge] {
        &self.edges[slot]
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn includes(&self, slot: usize, restrict: Restriction) -> bool {
        self.labels[slot].is_some()
            && (restrict == Restriction::All || !self.diagonal[slot])
    }

    /// Edges between included vertices.
    pub fn successors(
        &self,
        slot: usize,
        restrict: Restriction,
    ) -> impl Iterator<Item = &WedgeEdge> + '_ {
        let ok = self.includes(slot, restrict);
        self.edges[slot]
            .iter()
            .filter(move |e| ok && self.includes(e.target, restrict))
    }

    /// Adjacency matrix indexed by slot.
    pub fn adjacency(&self, restrict: Restriction) -> SparseMatrix {
        SparseMatrix::from_rows(
            (0..self.slots())
                .map(|s| self.successors(s, restrict).map(|e| (e.target, 1)).collect())
                .collect(),
        )
    }

    /// One line per edge: `k,i,l,j -> k',i',l',j' type`.
    pub fn edge_list(&self, restrict: Restriction) -> String {
        let mut out = String::new();
        for slot in 0..self.slots() {
            let Some(v) = self.vertex(slot) else { continue };
            for e in self.successors(slot, restrict) {
                let t = self.vertex(e.target).expect("edge target is a vertex");
                out.push_str(&format!("{v} -> {t} {}\n", e.kind));
            }
        }
        out
    }
}
