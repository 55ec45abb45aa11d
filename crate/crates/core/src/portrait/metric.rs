use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{CriticalPortrait, PortraitError, PrimitiveMajor};
use crate::angle::Angle;

/// The circle with every leaf collapsed to a point, sampled at a finite set of
/// angles. Arc lengths are kept exact as integers over a common denominator.
#[derive(Debug, Clone)]
pub struct CollapsedCircle {
    points: Vec<Angle>,
    index: HashMap<Angle, usize>,
    denom: BigInt,
    class: Vec<usize>,
    adj: Vec<Vec<(usize, BigInt)>>,
}

impl CollapsedCircle {
    pub fn new(xi: &CriticalPortrait, extra: impl IntoIterator<Item = Angle>) -> Self {
        let mut points = xi.all_vertices();
        points.extend(extra);
        points.sort();
        points.dedup();
        let index: HashMap<Angle, usize> = points
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let denom = points
            .iter()
            .fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
        let n = points.len();

        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        for leaf in xi.leaves() {
            let first = index[&leaf.vertices()[0]];
            for v in &leaf.vertices()[1..] {
                let (a, b) = (find(&mut parent, first), find(&mut parent, index[v]));
                parent[a] = b;
            }
        }
        let mut class_id: HashMap<usize, usize> = HashMap::new();
        let class: Vec<usize> = (0..n)
            .map(|i| {
                let r = find(&mut parent, i);
                let next = class_id.len();
                *class_id.entry(r).or_insert(next)
            })
            .collect();

        let numer = |p: &Angle| -> BigInt { p.numer() * (&denom / p.denom()) };
        let mut adj: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); class_id.len()];
        for i in 0..n {
            let j = (i + 1) % n;
            let mut w = numer(&points[j]) - numer(&points[i]);
            if w.is_negative() || (n == 1) {
                w += &denom;
            }
            let (ci, cj) = (class[i], class[j]);
            if ci != cj {
                adj[ci].push((cj, w.clone()));
                adj[cj].push((ci, w));
            }
        }
        CollapsedCircle {
            points,
            index,
            denom,
            class,
            adj,
        }
    }

    pub fn points(&self) -> &[Angle] {
        &self.points
    }

    pub fn index_of(&self, x: &Angle) -> Option<usize> {
        self.index.get(x).copied()
    }

    /// Numerators of path distances from point `src` to every point, over `denom()`.
    pub fn distance_numerators_from(&self, src: usize) -> Vec<BigInt> {
        let nc = self.adj.len();
        let mut dist: Vec<Option<BigInt>> = vec![None; nc];
        let mut done = vec![false; nc];
        let mut heap = BinaryHeap::new();
        let s = self.class[src];
        dist[s] = Some(BigInt::zero());
        heap.push(Reverse((BigInt::zero(), s)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for (v, w) in &self.adj[u] {
                let nd = &d + w;
                if dist[*v].as_ref().is_none_or(|cur| nd < *cur) {
                    dist[*v] = Some(nd.clone());
                    heap.push(Reverse((nd, *v)));
                }
            }
        }
        self.class
            .iter()
            .map(|&c| dist[c].clone().expect("collapsed circle is connected"))
            .collect()
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    pub fn distances_from(&self, src: usize) -> Vec<BigRational> {
        self.distance_numerators_from(src)
            .into_iter()
            .map(|n| BigRational::new(n, self.denom.clone()))
            .collect()
    }
}

/// Length of the shortest path from `x` to `y` in the circle with each leaf of
/// `m` collapsed to a point.
pub fn met_pseudometric(m: &PrimitiveMajor, x: &Angle, y: &Angle) -> BigRational {
    let circle = CollapsedCircle::new(m, [x.clone(), y.clone()]);
    let ix = circle.index_of(x).expect("x is sampled");
    let iy = circle.index_of(y).expect("y is sampled");
    circle.distances_from(ix).swap_remove(iy)
}

/// Grid estimate of `sup_{x,y} |met_1(x,y) - met_2(x,y)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MdEstimate {
    /// Largest discrepancy found on the grid; a lower bound for the supremum.
    pub value: BigRational,
    /// Guaranteed upper bound for the supremum.
    pub upper: BigRational,
    /// A pair attaining `value`.
    pub witness: (Angle, Angle),
    pub resolution: usize,
}

impl MdEstimate {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    pub fn upper_f64(&self) -> f64 {
        self.upper.to_f64().unwrap_or(f64::NAN)
    }
}

/// Approximates the distance between two majors of the same degree by sampling
/// every arc between consecutive leaf endpoints at `resolution` equal steps.
pub fn major_metric_md(
    m1: &PrimitiveMajor,
    m2: &PrimitiveMajor,
    resolution: usize,
) -> Result<MdEstimate, PortraitError> {
    if m1.degree() != m2.degree() {
        return Err(PortraitError::DegreeMismatch(m1.degree(), m2.degree()));
    }
    let resolution = resolution.max(1);
    let mut ends = m1.all_vertices();
    ends.extend(m2.all_vertices());
    ends.sort();
    ends.dedup();
    let n = ends.len();
    let res = BigRational::from_integer(resolution.into());
    let mut candidates = Vec::with_capacity(n * resolution);
    let mut max_step = BigRational::zero();
    for i in 0..n {
        let mut gap = ends[i].ccw_distance(&ends[(i + 1) % n]);
        if gap.is_zero() {
            gap = BigRational::one();
        }
        let step = &gap / &res;
        if step > max_step {
            max_step = step.clone();
        }
        for j in 0..resolution {
            candidates.push(ends[i].add(&(&step * BigRational::from_integer(j.into()))));
        }
    }
    let c1 = CollapsedCircle::new(m1, candidates.iter().cloned());
    let c2 = CollapsedCircle::new(m2, candidates.iter().cloned());
    // both circles sample the same point set
    debug_assert_eq!(c1.points(), c2.points());
    let l = c1.denom().lcm(c2.denom());
    let (s1, s2) = (&l / c1.denom(), &l / c2.denom());
    let pts = c1.points().len();

    let mut best = BigInt::zero();
    let mut witness = (c1.points()[0].clone(), c1.points()[0].clone());
    for src in 0..pts {
        let d1 = c1.distance_numerators_from(src);
        let d2 = c2.distance_numerators_from(src);
        for dst in 0..pts {
            let diff = (&d1[dst] * &s1 - &d2[dst] * &s2).abs();
            if diff > best {
                best = diff;
                witness = (c1.points()[src].clone(), c1.points()[dst].clone());
            }
        }
    }
    let value = BigRational::new(best, l);
    let upper = &value + max_step * BigRational::from_integer(2.into());
    Ok(MdEstimate {
        value,
        upper,
        witness,
        resolution,
    })
}
