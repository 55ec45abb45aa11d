use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CriticalPortrait, Leaf};
use crate::angle::Angle;

/// Leaf indices (0-based) met in order when travelling from `x` to `y`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SeparationVector(Vec<usize>);

impl SeparationVector {
    pub fn new(leaves: Vec<usize>) -> Self {
        SeparationVector(leaves)
    }

    pub fn leaves(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Self {
        SeparationVector(self.0.iter().rev().copied().collect())
    }
}

impl fmt::Display for SeparationVector {
    /// 1-based, e.g. `(1,2)`; `∅` when empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", k + 1)?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for SeparationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `x` and `y` lie in different open arcs of `circle \ leaf`.
pub fn separates(leaf: &Leaf, x: &Angle, y: &Angle) -> bool {
    match (leaf.gap_of(x), leaf.gap_of(y)) {
        (Some(gx), Some(gy)) => gx != gy,
        _ => false,
    }
}

/// Separating leaves of `xi` for `x, y`, ordered from `x` to `y`.
pub fn separation_vector(xi: &CriticalPortrait, x: &Angle, y: &Angle) -> SeparationVector {
    let mut seps: Vec<usize> = (0..xi.size())
        .filter(|&k| separates(xi.leaf(k), x, y))
        .collect();
    let precedes = |a: usize, b: usize| -> bool {
        let la = xi.leaf(a);
        let gy = la.gap_of(y);
        xi.leaf(b)
            .vertices()
            .iter()
            .all(|v| la.contains(v) || la.gap_of(v) == gy)
    };
    seps.sort_by(|&a, &b| {
        if a == b {
            std::cmp::Ordering::Equal
        } else if precedes(a, b) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    SeparationVector(seps)
}

/// Separation queries on a fixed finite set of angles, using integer ranks.
#[derive(Debug, Clone)]
pub struct SeparationOracle {
    points: Vec<Angle>,
    index: HashMap<Angle, usize>,
    leaves: Vec<Vec<usize>>,
}

impl SeparationOracle {
    /// The universe is the leaf vertices of `xi` together with `extra`.
    pub fn new(xi: &CriticalPortrait, extra: impl IntoIterator<Item = Angle>) -> Self {
        let mut points: Vec<Angle> = xi.all_vertices();
        points.extend(extra);
        points.sort();
        points.dedup();
        let index: HashMap<Angle, usize> = points
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let leaves = xi
            .leaves()
            .iter()
            .map(|l| l.vertices().iter().map(|v| index[v]).collect())
            .collect();
        SeparationOracle {
            points,
            index,
            leaves,
        }
    }

    pub fn rank(&self, x: &Angle) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn point(&self, r: usize) -> &Angle {
        &self.points[r]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn gap(&self, k: usize, r: usize) -> Option<usize> {
        let vs = &self.leaves[k];
        match vs.binary_search(&r) {
            Ok(_) => None,
            Err(pos) => Some(pos % vs.len()),
        }
    }

    fn contains(&self, k: usize, r: usize) -> bool {
        self.leaves[k].binary_search(&r).is_ok()
    }

    pub fn common_leaf(&self, rx: usize, ry: usize) -> Option<usize> {
        (0..self.leaves.len()).find(|&k| self.contains(k, rx) && self.contains(k, ry))
    }

    pub fn separates(&self, k: usize, rx: usize, ry: usize) -> bool {
        match (self.gap(k, rx), self.gap(k, ry)) {
            (Some(a), Some(b)) => a != b,
            _ => false,
        }
    }

    pub fn separation(&self, rx: usize, ry: usize) -> SeparationVector {
        let mut seps: Vec<usize> = (0..self.leaves.len())
            .filter(|&k| self.separates(k, rx, ry))
            .collect();
        if seps.len() > 1 {
            let precedes = |a: usize, b: usize| -> bool {
                let gy = self.gap(a, ry);
                self.leaves[b]
                    .iter()
                    .all(|&v| self.contains(a, v) || self.gap(a, v) == gy)
            };
            seps.sort_by(|&a, &b| {
                if a == b {
                    std::cmp::Ordering::Equal
                } else if precedes(a, b) {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            });
        }
        SeparationVector(seps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portrait::portrait_from_strs;

    fn a(s: &str) -> Angle {
        s.parse().unwrap()
    }

    #[test]
    fn separation_examples() {
        let xi = portrait_from_strs(3, &[&["0", "1/3"], &["7/15", "4/5"]]).unwrap();
        assert_eq!(separation_vector(&xi, &a("1/5"), &a("3/5")).leaves(), &[0, 1]);
        assert_eq!(separation_vector(&xi, &a("3/5"), &a("1/5")).leaves(), &[1, 0]);
        assert!(separation_vector(&xi, &a("2/5"), &a("9/10")).is_empty());
        // a vertex of a leaf is not separated by that leaf
        assert!(separation_vector(&xi, &a("0"), &a("1/5")).is_empty());
        assert_eq!(separation_vector(&xi, &a("1/5"), &a("3/5")).to_string(), "(1,2)");
    }

    #[test]
    fn touching_leaves_are_ordered() {
        let xi = portrait_from_strs(3, &[&["0", "1/3"], &["1/3", "2/3"]]).unwrap();
        assert_eq!(separation_vector(&xi, &a("1/6"), &a("1/2")).leaves(), &[0, 1]);
        assert_eq!(separation_vector(&xi, &a("1/2"), &a("1/6")).leaves(), &[1, 0]);
        assert_eq!(separation_vector(&xi, &a("1/6"), &a("5/6")).leaves(), &[0]);
    }

    #[test]
    fn oracle_agrees_with_direct_route() {
        let xi = portrait_from_strs(3, &[&["0", "1/3"], &["7/15", "4/5"]]).unwrap();
        let pts: Vec<Angle> = ["1/5", "2/5", "3/5", "0", "1/3", "4/5", "7/15", "9/10"]
            .iter()
            .map(|s| a(s))
            .collect();
        let o = SeparationOracle::new(&xi, pts.clone());
        for x in &pts {
            for y in &pts {
                let direct = separation_vector(&xi, x, y);
                let ranked = o.separation(o.rank(x).unwrap(), o.rank(y).unwrap());
                assert_eq!(direct, ranked, "{x} {y}");
            }
        }
    }
}
