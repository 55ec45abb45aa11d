//! Critical portraits and primitive majors.
//!
//! A critical portrait of degree `d` is a finite set of leaves (chords, or ideal
//! polygons when they have more than two vertices) such that
//!
//! 1. two distinct leaves are disjoint or meet in exactly one circle point,
//! 2. the vertices of each leaf share the same image under `τ_d`,
//! 3. `Σ (#vertices - 1) = d - 1`.
//!
//! A primitive major is a portrait whose leaves are pairwise disjoint. Every
//! portrait induces a unique primitive major by merging touching leaves.
//!
//! Leaves are stored in canonical order (by smallest vertex, then
//! lexicographically); leaf indices used throughout the crate refer to that
//! order and are 0-based.

mod hausdorff;
mod metric;
mod separation;

use std::fmt;
use std::fs;
use std::ops::Deref;
use std::path::Path;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::{tau, Angle, AngleParseError};

pub use hausdorff::{hausdorff_distance, hausdorff_distance_with_tolerance, HAUSDORFF_TOLERANCE};
pub use metric::{major_metric_md, met_pseudometric, CollapsedCircle, MdEstimate};
pub use separation::{separates, separation_vector, SeparationOracle, SeparationVector};

#[derive(Debug, Error)]
pub enum PortraitError {
    #[error("degree must be at least 2, got {0}")]
    DegreeTooSmall(u32),
    #[error("leaf {index} has fewer than two distinct vertices")]
    DegenerateLeaf { index: usize },
    #[error("leaves {first} and {second} cross or overlap")]
    CrossingLeaves { first: usize, second: usize },
    #[error("vertices of leaf {index} are not identified by the degree-{degree} map")]
    NotIdentified { index: usize, degree: u32 },
    #[error("vertex count condition violated: sum of (#vertices - 1) is {found}, expected {expected}")]
    WrongCount { expected: u32, found: u32 },
    #[error("complementary regions do not all have arc length 1/{degree}")]
    UnbalancedComponents { degree: u32 },
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(u32, u32),
    #[error("not a primitive major (leaves {first} and {second} touch)")]
    NotPrimitive { first: usize, second: usize },
    #[error(transparent)]
    Angle(#[from] AngleParseError),
    #[error("malformed portrait JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A chord or ideal polygon, given by its sorted vertex set on the circle.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Leaf {
    vertices: Vec<Angle>,
}

impl Leaf {
    /// Sorts and deduplicates; `None` when fewer than two distinct vertices remain.
    pub fn new(mut vertices: Vec<Angle>) -> Option<Self> {
        vertices.sort();
        vertices.dedup();
        (vertices.len() >= 2).then_some(Leaf { vertices })
    }

    pub fn vertices(&self) -> &[Angle] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, x: &Angle) -> bool {
        self.vertices.binary_search(x).is_ok()
    }

    pub fn smallest(&self) -> &Angle {
        &self.vertices[0]
    }

    /// Index of the open arc of `circle \ vertices` containing `x`; `None` when `x`
    /// is a vertex. Arc `g` runs from `vertices[g-1]` to `vertices[g]`, arc 0 wraps
    /// through angle 0.
    pub fn gap_of(&self, x: &Angle) -> Option<usize> {
        match self.vertices.binary_search(x) {
            Ok(_) => None,
            Err(pos) => Some(pos % self.vertices.len()),
        }
    }

    /// The two vertices bounding arc `g`.
    pub fn gap_endpoints(&self, g: usize) -> (&Angle, &Angle) {
        let m = self.vertices.len();
        (&self.vertices[(g + m - 1) % m], &self.vertices[g % m])
    }

    /// Common image of the vertices under `τ_d` (the image of the first vertex).
    pub fn image(&self, d: u32) -> Angle {
        tau(&self.vertices[0], d)
    }

    /// Leaves meet in more than one point (shared chord or crossing interiors).
    pub fn is_linked_with(&self, other: &Leaf) -> bool {
        one_sided_linked(self, other) || one_sided_linked(other, self)
    }

    pub fn shares_vertex_with(&self, other: &Leaf) -> bool {
        self.vertices.iter().any(|v| other.contains(v))
    }
}

fn one_sided_linked(a: &Leaf, b: &Leaf) -> bool {
    let shared: Vec<&Angle> = b.vertices.iter().filter(|v| a.contains(v)).collect();
    if shared.len() >= 2 {
        return true;
    }
    let mut gaps = b.vertices.iter().filter_map(|v| a.gap_of(v));
    let Some(g) = gaps.next() else {
        return true;
    };
    if gaps.any(|h| h != g) {
        return true;
    }
    if let Some(p) = shared.first() {
        let (lo, hi) = a.gap_endpoints(g);
        return *p != lo && *p != hi;
    }
    false
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// On-disk form: `{"degree": d, "leaves": [["p/q", ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PortraitFile {
    pub degree: u32,
    pub leaves: Vec<Vec<Angle>>,
}

/// A validated critical portrait with leaves in canonical order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PortraitFile", into = "PortraitFile")]
pub struct CriticalPortrait {
    degree: u32,
    leaves: Vec<Leaf>,
}

impl TryFrom<PortraitFile> for CriticalPortrait {
    type Error = PortraitError;

    fn try_from(file: PortraitFile) -> Result<Self, Self::Error> {
        validate_portrait(file.degree, file.leaves)
    }
}

impl From<CriticalPortrait> for PortraitFile {
    fn from(p: CriticalPortrait) -> Self {
        PortraitFile {
            degree: p.degree,
            leaves: p.leaves.into_iter().map(|l| l.vertices).collect(),
        }
    }
}

/// One region of the disk minus the leaves, described by its boundary arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Boundary arcs `(start, end)` traversed counterclockwise.
    pub arcs: Vec<(Angle, Angle)>,
    pub length: BigRational,
}

/// Validates a raw portrait. Leaves are canonicalized (sorted) on success.
pub fn validate_portrait(
    degree: u32,
    leaves: Vec<Vec<Angle>>,
) -> Result<CriticalPortrait, PortraitError> {
    if degree < 2 {
        return Err(PortraitError::DegreeTooSmall(degree));
    }
    let leaves: Vec<Leaf> = leaves
        .into_iter()
        .enumerate()
        .map(|(index, vs)| Leaf::new(vs).ok_or(PortraitError::DegenerateLeaf { index }))
        .collect::<Result<_, _>>()?;

    for (index, leaf) in leaves.iter().enumerate() {
        let image = leaf.image(degree);
        if leaf.vertices.iter().any(|v| tau(v, degree) != image) {
            return Err(PortraitError::NotIdentified { index, degree });
        }
    }
    for i in 0..leaves.len() {
        for j in i + 1..leaves.len() {
            if leaves[i].is_linked_with(&leaves[j]) {
                return Err(PortraitError::CrossingLeaves {
                    first: i,
                    second: j,
                });
            }
        }
    }
    let found: u32 = leaves.iter().map(|l| l.len() as u32 - 1).sum();
    if found != degree - 1 {
        return Err(PortraitError::WrongCount {
            expected: degree - 1,
            found,
        });
    }

    let mut leaves = leaves;
    leaves.sort();
    let portrait = CriticalPortrait { degree, leaves };
    let expected = BigRational::new(1.into(), degree.into());
    let components = portrait.complementary_components();
    if components.len() != degree as usize || components.iter().any(|c| c.length != expected) {
        return Err(PortraitError::UnbalancedComponents { degree });
    }
    Ok(portrait)
}

impl CriticalPortrait {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn leaf(&self, k: usize) -> &Leaf {
        &self.leaves[k]
    }

    /// Number of leaves.
    pub fn size(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_primitive_major(&self) -> bool {
        self.touching_pair().is_none()
    }

    fn touching_pair(&self) -> Option<(usize, usize)> {
        for i in 0..self.leaves.len() {
            for j in i + 1..self.leaves.len() {
                if self.leaves[i].shares_vertex_with(&self.leaves[j]) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn into_major(self) -> Result<PrimitiveMajor, PortraitError> {
        match self.touching_pair() {
            None => Ok(PrimitiveMajor(self)),
            Some((first, second)) => Err(PortraitError::NotPrimitive { first, second }),
        }
    }

    /// Common image angle `τ(ℓ_k)`.
    pub fn leaf_image(&self, k: usize) -> Angle {
        self.leaves[k].image(self.degree)
    }

    /// All leaf vertices, sorted, without repetition.
    pub fn all_vertices(&self) -> Vec<Angle> {
        let mut v: Vec<Angle> = self
            .leaves
            .iter()
            .flat_map(|l| l.vertices.iter().cloned())
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Index of a leaf having both `x` and `y` as vertices.
    pub fn common_leaf(&self, x: &Angle, y: &Angle) -> Option<usize> {
        self.leaves
            .iter()
            .position(|l| l.contains(x) && l.contains(y))
    }

    /// Merges touching leaves into the convex hulls of their vertex unions.
    pub fn induced_major(&self) -> PrimitiveMajor {
        let n = self.leaves.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut c = x;
            while parent[c] != r {
                let next = parent[c];
                parent[c] = r;
                c = next;
            }
            r
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.leaves[i].shares_vertex_with(&self.leaves[j]) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
        let mut classes: Vec<Vec<Angle>> = vec![Vec::new(); n];
        for i in 0..n {
            let r = find(&mut parent, i);
            classes[r].extend(self.leaves[i].vertices.iter().cloned());
        }
        let merged: Vec<Vec<Angle>> = classes.into_iter().filter(|c| !c.is_empty()).collect();
        validate_portrait(self.degree, merged)
            .and_then(CriticalPortrait::into_major)
            .expect("merging touching leaves yields a primitive major")
    }

    /// Same induced equivalence relation on the circle.
    pub fn is_equivalent_to(&self, other: &CriticalPortrait) -> bool {
        self.induced_major() == other.induced_major()
    }

    /// Regions of the disk minus the leaves, each with its total boundary arc length.
    pub fn complementary_components(&self) -> Vec<Component> {
        let verts = self.all_vertices();
        let m = verts.len();
        let one = BigRational::one();
        let two = BigRational::from_integer(2.into());
        let gaps: Vec<(Angle, Angle, BigRational, Angle)> = (0..m)
            .map(|i| {
                let lo = verts[i].clone();
                let hi = verts[(i + 1) % m].clone();
                let mut len = lo.ccw_distance(&hi);
                if len.is_zero() {
                    len = one.clone();
                }
                let mid = lo.add(&(&len / &two));
                (lo, hi, len, mid)
            })
            .collect();
        let mut comp: Vec<usize> = (0..m).collect();
        for i in 0..m {
            if comp[i] != i {
                continue;
            }
            for j in i + 1..m {
                if comp[j] == j
                    && !self
                        .leaves
                        .iter()
                        .any(|l| separates(l, &gaps[i].3, &gaps[j].3))
                {
                    comp[j] = i;
                }
            }
        }
        let mut out: Vec<Component> = Vec::new();
        let mut slot: Vec<Option<usize>> = vec![None; m];
        for (i, (lo, hi, len, _)) in gaps.into_iter().enumerate() {
            let root = comp[i];
            let idx = *slot[root].get_or_insert_with(|| {
                out.push(Component {
                    arcs: Vec::new(),
                    length: BigRational::zero(),
                });
                out.len() - 1
            });
            out[idx].arcs.push((lo, hi));
            out[idx].length += len;
        }
        out
    }

    /// Deterministic serialization used as a cache key.
    pub fn canonical_key(&self) -> String {
        serde_json::to_string(self).expect("portrait serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self, PortraitError> {
        let file: PortraitFile = serde_json::from_str(s)?;
        CriticalPortrait::try_from(file)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, PortraitError> {
        let path = path.as_ref();
        let s = fs::read_to_string(path).map_err(|source| PortraitError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&s)
    }

    pub fn to_json_string(&self) -> String {
        self.canonical_key()
    }
}

impl fmt::Display for CriticalPortrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} {{", self.degree)?;
        for (i, l) in self.leaves.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for CriticalPortrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A critical portrait whose leaves are pairwise disjoint.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PrimitiveMajor(CriticalPortrait);

impl PrimitiveMajor {
    pub fn portrait(&self) -> &CriticalPortrait {
        &self.0
    }

    pub fn into_portrait(self) -> CriticalPortrait {
        self.0
    }
}

impl Deref for PrimitiveMajor {
    type Target = CriticalPortrait;

    fn deref(&self) -> &CriticalPortrait {
        &self.0
    }
}

impl fmt::Display for PrimitiveMajor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Parses a list of leaves written as angle strings.
pub fn portrait_from_strs(degree: u32, leaves: &[&[&str]]) -> Result<CriticalPortrait, PortraitError> {
    let leaves = leaves
        .iter()
        .map(|l| l.iter().map(|s| s.parse::<Angle>()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    validate_portrait(degree, leaves)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Angle {
        s.parse().unwrap()
    }

    #[test]
    fn strip_boundary_is_valid_portrait() {
        let p = portrait_from_strs(3, &[&["0", "1/3"], &["1/3", "2/3"]]).unwrap();
        assert!(!p.is_primitive_major());
        let p = portrait_from_strs(3, &[&["0", "1/3"], &["1/2", "5/6"]]).unwrap();
        assert!(p.is_primitive_major());
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            portrait_from_strs(3, &[&["0", "1/3"], &["1/6", "1/2"]]),
            Err(PortraitError::CrossingLeaves { .. })
        ));
        assert!(matches!(
            portrait_from_strs(3, &[&["0", "1/2"], &["1/4", "7/12"]]),
            Err(PortraitError::NotIdentified { .. })
        ));
        assert!(matches!(
            portrait_from_strs(3, &[&["0", "1/3"]]),
            Err(PortraitError::WrongCount { expected: 2, found: 1 })
        ));
        assert!(matches!(
            portrait_from_strs(3, &[&["0", "0"], &["1/3", "2/3"]]),
            Err(PortraitError::DegenerateLeaf { index: 0 })
        ));
        assert!(matches!(
            portrait_from_strs(1, &[&["0", "1/2"]]),
            Err(PortraitError::DegreeTooSmall(1))
        ));
        // same chord twice
        assert!(matches!(
            portrait_from_strs(3, &[&["0", "1/3"], &["0", "1/3"]]),
            Err(PortraitError::CrossingLeaves { .. })
        ));
    }

    #[test]
    fn polygon_touching_at_non_adjacent_vertex_is_rejected() {
        // Triangle {0,1/4,1/2} (d=4 fails identification, so test linkage directly).
        let tri = Leaf::new(vec![a("0"), a("1/4"), a("1/2")]).unwrap();
        let ok = Leaf::new(vec![a("1/4"), a("3/8")]).unwrap();
        let bad = Leaf::new(vec![a("1/4"), a("3/4")]).unwrap();
        assert!(!tri.is_linked_with(&ok));
        assert!(tri.is_linked_with(&bad));
    }

    #[test]
    fn induced_major_examples() {
        let xi = portrait_from_strs(3, &[&["0", "1/3"], &["0", "2/3"]]).unwrap();
        let m = xi.induced_major();
        assert_eq!(m.size(), 1);
        assert_eq!(m.leaf(0).vertices(), &[a("0"), a("1/3"), a("2/3")]);

        let xi = portrait_from_strs(3, &[&["1/12", "5/12"], &["5/12", "3/4"]]).unwrap();
        let m = xi.induced_major();
        assert_eq!(m.leaf(0).vertices(), &[a("1/12"), a("5/12"), a("3/4")]);

        let major = portrait_from_strs(3, &[&["0", "1/3"], &["7/15", "4/5"]]).unwrap();
        assert_eq!(major.induced_major().portrait(), &major);
    }

    #[test]
    fn components_have_length_one_over_d() {
        let p = portrait_from_strs(3, &[&["0", "1/3"], &["7/15", "4/5"]]).unwrap();
        let comps = p.complementary_components();
        assert_eq!(comps.len(), 3);
        for c in comps {
            assert_eq!(c.length, BigRational::new(1.into(), 3.into()));
        }
    }

    #[test]
    fn json_round_trip_and_canonical_order() {
        let json = r#"{"degree": 3, "leaves": [["4/5", "7/15"], ["1/3", "0"]]}"#;
        let p = CriticalPortrait::from_json_str(json).unwrap();
        assert_eq!(
            p.to_json_string(),
            r#"{"degree":3,"leaves":[["0","1/3"],["7/15","4/5"]]}"#
        );
        let q = CriticalPortrait::from_json_str(&p.to_json_string()).unwrap();
        assert_eq!(p, q);
        assert!(CriticalPortrait::from_json_str(r#"{"degree": 3, "leaves": [["0", "1/0"]]}"#).is_err());
    }
}
