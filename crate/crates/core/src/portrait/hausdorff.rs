use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;

use super::CriticalPortrait;

pub const HAUSDORFF_TOLERANCE: f64 = 1e-9;

type Pt = [f64; 2];

fn sub(a: Pt, b: Pt) -> Pt {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Pt, b: Pt) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: Pt, b: Pt) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: Pt) -> f64 {
    dot(a, a).sqrt()
}

fn lerp(a: Pt, b: Pt, t: f64) -> Pt {
    [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]
}

fn segment_distance(p: Pt, a: Pt, b: Pt) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    let t = if len2 == 0.0 {
        0.0
    } else {
        (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0)
    };
    norm(sub(p, lerp(a, b, t)))
}

/// Filled convex hull of a leaf; vertices in counterclockwise order.
struct Hull(Vec<Pt>);

impl Hull {
    fn distance(&self, p: Pt) -> f64 {
        let v = &self.0;
        if v.len() == 2 {
            return segment_distance(p, v[0], v[1]);
        }
        let n = v.len();
        let inside = (0..n).all(|i| cross(sub(v[(i + 1) % n], v[i]), sub(p, v[i])) >= 0.0);
        if inside {
            return 0.0;
        }
        (0..n)
            .map(|i| segment_distance(p, v[i], v[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }
}

fn hulls(xi: &CriticalPortrait) -> Vec<Hull> {
    xi.leaves()
        .iter()
        .map(|l| {
            Hull(
                l.vertices()
                    .iter()
                    .map(|a| {
                        let t = TAU * a.to_f64();
                        [t.cos(), t.sin()]
                    })
                    .collect(),
            )
        })
        .collect()
}

fn distance_to_set(p: Pt, set: &[Hull]) -> f64 {
    set.iter().map(|h| h.distance(p)).fold(f64::INFINITY, f64::min)
}

/// Segment or triangle, with its bound on the distance function.
#[derive(Clone)]
struct Piece {
    verts: Vec<Pt>,
    upper: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.upper == other.upper
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper.total_cmp(&other.upper)
    }
}

fn make_piece(verts: Vec<Pt>, target: &[Hull], best: &mut f64) -> Piece {
    let k = verts.len() as f64;
    let c = verts
        .iter()
        .fold([0.0, 0.0], |acc, v| [acc[0] + v[0] / k, acc[1] + v[1] / k]);
    let radius = verts.iter().map(|v| norm(sub(*v, c))).fold(0.0, f64::max);
    let dc = distance_to_set(c, target);
    *best = best.max(dc);
    // distance to a convex hull is convex, so on the piece it peaks at a vertex
    let per_hull: Vec<Vec<f64>> = target
        .iter()
        .map(|h| verts.iter().map(|v| h.distance(*v)).collect())
        .collect();
    for i in 0..verts.len() {
        let dv = per_hull.iter().map(|r| r[i]).fold(f64::INFINITY, f64::min);
        *best = best.max(dv);
    }
    let convex = per_hull
        .iter()
        .map(|r| r.iter().copied().fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min);
    Piece {
        verts,
        upper: (dc + radius).min(convex),
    }
}

fn split(p: &Piece) -> Vec<Vec<Pt>> {
    let v = &p.verts;
    if v.len() == 2 {
        let m = lerp(v[0], v[1], 0.5);
        return vec![vec![v[0], m], vec![m, v[1]]];
    }
    let (a, b, c) = (v[0], v[1], v[2]);
    let (ab, bc, ca) = (lerp(a, b, 0.5), lerp(b, c, 0.5), lerp(c, a, 0.5));
    vec![
        vec![a, ab, ca],
        vec![ab, b, bc],
        vec![ca, bc, c],
        vec![ab, bc, ca],
    ]
}

/// `sup_{p in source} d(p, target)` within `tol`, by branch and bound.
fn directed(source: &[Hull], target: &[Hull], tol: f64) -> f64 {
    let mut best = 0.0f64;
    for h in source {
        for v in &h.0 {
            best = best.max(distance_to_set(*v, target));
        }
    }
    let mut heap = BinaryHeap::new();
    for h in source {
        let v = &h.0;
        if v.len() == 2 {
            heap.push(make_piece(v.clone(), target, &mut best));
        } else {
            for i in 1..v.len() - 1 {
                heap.push(make_piece(vec![v[0], v[i], v[i + 1]], target, &mut best));
            }
        }
    }
    while let Some(piece) = heap.pop() {
        if piece.upper <= best + tol {
            break;
        }
        for verts in split(&piece) {
            let child = make_piece(verts, target, &mut best);
            if child.upper > best + tol {
                heap.push(child);
            }
        }
    }
    best
}

/// Hausdorff distance between the unions of the filled leaves, within
/// [`HAUSDORFF_TOLERANCE`].
pub fn hausdorff_distance(a: &CriticalPortrait, b: &CriticalPortrait) -> f64 {
    hausdorff_distance_with_tolerance(a, b, HAUSDORFF_TOLERANCE)
}

pub fn hausdorff_distance_with_tolerance(a: &CriticalPortrait, b: &CriticalPortrait, tol: f64) -> f64 {
    let (ha, hb) = (hulls(a), hulls(b));
    directed(&ha, &hb, tol).max(directed(&hb, &ha, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portrait::portrait_from_strs;

    #[test]
    fn identical_portraits_have_distance_zero() {
        let p = portrait_from_strs(3, &[&["0", "1/3"], &["7/15", "4/5"]]).unwrap();
        assert!(hausdorff_distance(&p, &p) < 1e-9);
    }

    #[test]
    fn diameter_versus_triangle() {
        // chord {0,1/2} vs triangle {0,1/3,2/3}: far point of the triangle is 1/3 or 2/3
        let c = portrait_from_strs(2, &[&["0", "1/2"]]).unwrap();
        let t = portrait_from_strs(3, &[&["0", "1/3", "2/3"]]).unwrap();
        let expected = (TAU / 3.0).sin();
        let h = hausdorff_distance(&c, &t);
        assert!((h - expected).abs() < 1e-8, "{h} vs {expected}");
    }
}
