#![allow(dead_code)]

use core_entropy::portrait::{validate_portrait, CriticalPortrait};
use core_entropy::Angle;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

/// Random rational primitive major of degree `d` whose vertices have
/// denominators at most `max_den`.
pub fn random_major<R: Rng>(rng: &mut R, d: u32, max_den: u64) -> CriticalPortrait {
    let d64 = d as u64;
    loop {
        let leaves: Vec<Vec<Angle>> = if d >= 3 && rng.gen_bool(0.15) {
            let q = d64 * rng.gen_range(1..=max_den / d64);
            let a = rng.gen_range(0..q);
            vec![(0..d64).map(|k| Angle::new(a + k * q / d64, q)).collect()]
        } else {
            (0..d - 1)
                .map(|_| {
                    let q = d64 * rng.gen_range(1..=max_den / d64);
                    let a = rng.gen_range(0..q);
                    let m = rng.gen_range(1..d64);
                    vec![Angle::new(a, q), Angle::new(a + m * q / d64, q)]
                })
                .collect()
        };
        if let Ok(xi) = validate_portrait(d, leaves) {
            if xi.is_primitive_major() {
                return xi;
            }
        }
    }
}

/// Replaces every polygon of a major by a fan of chords from one of its
/// vertices. The result is a critical portrait inducing the same major.
pub fn fan_split<R: Rng>(rng: &mut R, m: &CriticalPortrait) -> CriticalPortrait {
    let mut leaves = Vec::new();
    for leaf in m.leaves() {
        let vs = leaf.vertices();
        if vs.len() == 2 {
            leaves.push(vs.to_vec());
            continue;
        }
        let hub = rng.gen_range(0..vs.len());
        for (i, v) in vs.iter().enumerate() {
            if i != hub {
                leaves.push(vec![vs[hub].clone(), v.clone()]);
            }
        }
    }
    validate_portrait(m.degree(), leaves).expect("fan of a polygon is a portrait")
}

/// Random portrait of degree 3 or 4 that touches itself: a polygon split into a fan.
pub fn random_touching_portrait<R: Rng>(rng: &mut R, max_den: u64) -> CriticalPortrait {
    loop {
        let d = rng.gen_range(3..=4u32);
        let m = random_major(rng, d, max_den);
        if m.leaves().iter().any(|l| l.len() > 2) {
            return fan_split(rng, &m);
        }
    }
}

pub fn random_01_matrix<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<Vec<u64>> {
    (0..n)
        .map(|_| (0..n).map(|_| u64::from(rng.gen_bool(p))).collect())
        .collect()
}

type Poly = Vec<i128>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &Poly, b: &Poly, sign: i128) -> Poly {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += sign * y;
    }
    out
}

fn cofactor_det(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 0 {
        return vec![1];
    }
    let mut acc: Poly = Vec::new();
    for col in 0..n {
        if m[0][col].iter().all(|&c| c == 0) {
            continue;
        }
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != col)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = poly_mul(&m[0][col], &cofactor_det(&minor));
        acc = poly_add(&acc, &term, if col % 2 == 0 { 1 } else { -1 });
    }
    acc
}

/// Coefficients of `det(I - tA)` by Laplace expansion along the first row.
pub fn det_i_minus_ta(a: &[Vec<u64>]) -> Vec<i128> {
    let n = a.len();
    let m: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let diag = if i == j { 1 } else { 0 };
                    vec![diag, -(a[i][j] as i128)]
                })
                .collect()
        })
        .collect();
    let mut p = cofactor_det(&m);
    p.resize(n + 1, 0);
    p
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Characteristic polynomial `det(xI - A)` by Faddeev-LeVerrier, highest
/// degree first.
pub fn characteristic_polynomial(a: &[Vec<u64>]) -> Vec<BigRational> {
    let n = a.len();
    let am: Vec<Vec<BigRational>> = a
        .iter()
        .map(|r| r.iter().map(|&x| rat(x as i64)).collect())
        .collect();
    let mul = |x: &Vec<Vec<BigRational>>, y: &Vec<Vec<BigRational>>| -> Vec<Vec<BigRational>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(BigRational::zero(), |s, k| s + &x[i][k] * &y[k][j]))
                    .collect()
            })
            .collect()
    };
    let mut coeffs = vec![BigRational::one()];
    let mut mk: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{k-1} I
        let mut next = mul(&am, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[k - 1];
        }
        mk = next;
        let amk = mul(&am, &mk);
        let trace = (0..n).fold(BigRational::zero(), |s, i| s + &amk[i][i]);
        coeffs.push(-trace / rat(k as i64));
    }
    coeffs
}

fn eval(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r: Vec<BigRational> = a.to_vec();
    while r.len() >= b.len() && !r.is_empty() {
        let factor = &r[0] / &b[0];
        for i in 0..b.len() {
            let t = &factor * &b[i];
            r[i] -= t;
        }
        r.remove(0);
    }
    while r.first().is_some_and(|c| c.is_zero()) {
        r.remove(0);
    }
    r
}

fn derivative(p: &[BigRational]) -> Vec<BigRational> {
    let n = p.len() - 1;
    p[..n]
        .iter()
        .enumerate()
        .map(|(i, c)| c * rat((n - i) as i64))
        .collect()
}

fn sturm_sequence(p: &[BigRational]) -> Vec<Vec<BigRational>> {
    let mut seq = vec![p.to_vec(), derivative(p)];
    loop {
        let r = poly_rem(&seq[seq.len() - 2], &seq[seq.len() - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn sign_changes(seq: &[Vec<BigRational>], x: &BigRational) -> usize {
    let signs: Vec<i32> = seq
        .iter()
        .map(|p| eval(p, x))
        .filter(|v| !v.is_zero())
        .map(|v| if v.is_positive() { 1 } else { -1 })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Largest real eigenvalue of a nonnegative integer matrix, isolated with a
/// Sturm sequence on the squarefree part of the characteristic polynomial.
pub fn largest_real_eigenvalue(a: &[Vec<u64>]) -> f64 {
    let p = characteristic_polynomial(a);
    // squarefree part p / gcd(p, p')
    let mut g0 = p.clone();
    let mut g1 = derivative(&p);
    while !g1.is_empty() {
        let r = poly_rem(&g0, &g1);
        g0 = g1;
        g1 = r;
    }
    let sq = if g0.len() <= 1 { p.clone() } else { poly_div(&p, &g0) };
    let seq = sturm_sequence(&sq);
    let bound: i64 = a.iter().map(|r| r.iter().sum::<u64>() as i64).max().unwrap_or(0) + 1;
    let mut lo = rat(-1);
    let mut hi = rat(bound);
    if sign_changes(&seq, &lo) == sign_changes(&seq, &hi) {
        return 0.0;
    }
    // largest root lies in (lo, hi]: keep exactly one root above lo
    for _ in 0..80 {
        let mid = (&lo + &hi) / rat(2);
        if sign_changes(&seq, &mid) > sign_changes(&seq, &hi) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    use num_traits::ToPrimitive;
    ((lo + hi) / rat(2)).to_f64().unwrap()
}

fn poly_div(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r: Vec<BigRational> = a.to_vec();
    let mut q = Vec::new();
    while r.len() >= b.len() {
        let factor = &r[0] / &b[0];
        for i in 0..b.len() {
            let t = &factor * &b[i];
            r[i] -= t;
        }
        q.push(factor);
        r.remove(0);
    }
    q
}

/// `met` by Floyd-Warshall on the circle points `pts` plus all leaf vertices,
/// in floating point.
pub fn met_oracle(m: &CriticalPortrait, x: f64, y: f64) -> f64 {
    let mut pts: Vec<f64> = vec![x, y];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for leaf in m.leaves() {
        let mut g = Vec::new();
        for v in leaf.vertices() {
            g.push(pts.len());
            pts.push(v.to_f64());
        }
        groups.push(g);
    }
    let n = pts.len();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for i in 0..n {
        for j in 0..n {
            let diff = (pts[i] - pts[j]).abs();
            d[i][j] = diff.min(1.0 - diff);
        }
    }
    for g in &groups {
        for &i in g {
            for &j in g {
                d[i][j] = 0.0;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d[0][1]
}

fn point(t: f64) -> (f64, f64) {
    let a = std::f64::consts::TAU * t;
    (a.cos(), a.sin())
}

/// Dense sample of the union of the leaves (edges and interiors of polygons)
/// with spacing at most `h`.
pub fn sample_portrait(m: &CriticalPortrait, h: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for leaf in m.leaves() {
        let vs: Vec<(f64, f64)> = leaf.vertices().iter().map(|v| point(v.to_f64())).collect();
        if vs.len() == 2 {
            let steps = (2.0 / h).ceil() as usize;
            for s in 0..=steps {
                let t = s as f64 / steps as f64;
                out.push((vs[0].0 + t * (vs[1].0 - vs[0].0), vs[0].1 + t * (vs[1].1 - vs[0].1)));
            }
        } else {
            // fan of triangles from the first vertex, sampled barycentrically
            let steps = (2.0 / h).ceil() as usize;
            for w in 1..vs.len() - 1 {
                let (a, b, c) = (vs[0], vs[w], vs[w + 1]);
                for i in 0..=steps {
                    for j in 0..=steps - i {
                        let (u, v) = (i as f64 / steps as f64, j as f64 / steps as f64);
                        out.push((
                            a.0 + u * (b.0 - a.0) + v * (c.0 - a.0),
                            a.1 + u * (b.1 - a.1) + v * (c.1 - a.1),
                        ));
                    }
                }
            }
        }
    }
    out
}

pub fn sampled_hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let directed = |p: &[(f64, f64)], q: &[(f64, f64)]| {
        p.iter()
            .map(|x| {
                q.iter()
                    .map(|y| ((x.0 - y.0).powi(2) + (x.1 - y.1).powi(2)).sqrt())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// The worked cubic example `{(0,1/3), (7/15,4/5)}`.
pub fn worked_example() -> CriticalPortrait {
    core_entropy::portrait::portrait_from_strs(3, &[&["0", "1/3"], &["7/15", "4/5"]]).unwrap()
}

/// Largest real root of `x^4 - 2x - 1`, by bisection on `[1, 2]`.
pub fn quartic_root() -> f64 {
    let f = |x: f64| x.powi(4) - 2.0 * x - 1.0;
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Basis of the worked example and the image of every basis arc.
type Arc = (&'static str, &'static str);

pub const WORKED_EXAMPLE_ACTION: [(Arc, &[Arc]); 10] = [
    (("0", "1/5"), &[("0", "3/5")]),
    (("0", "2/5"), &[("0", "1/5")]),
    (("0", "3/5"), &[("0", "2/5"), ("2/5", "4/5")]),
    (("0", "4/5"), &[("0", "2/5")]),
    (("1/5", "2/5"), &[("0", "3/5"), ("0", "1/5")]),
    (("1/5", "3/5"), &[("0", "3/5"), ("0", "2/5"), ("2/5", "4/5")]),
    (("1/5", "4/5"), &[("0", "3/5"), ("0", "2/5")]),
    (("2/5", "3/5"), &[("1/5", "2/5"), ("2/5", "4/5")]),
    (("2/5", "4/5"), &[("1/5", "2/5")]),
    (("3/5", "4/5"), &[("4/5", "2/5")]),
];

/// Compares the transition system of the worked example with
/// [`WORKED_EXAMPLE_ACTION`]; returns a description of the first mismatch.
pub fn check_worked_example_action() -> Result<(), String> {
    use core_entropy::entropy::ArcPair;
    let a = |s: &str| -> Angle { s.parse().unwrap() };
    let pair = |(x, y): (&str, &str)| ArcPair::new(a(x), a(y));
    let t = core_entropy::transition_matrix(&worked_example());
    let expected_basis: Vec<ArcPair> = WORKED_EXAMPLE_ACTION.iter().map(|(p, _)| pair(*p)).collect();
    if t.basis.pairs() != &expected_basis[..] {
        return Err(format!("basis {:?}", t.basis.pairs()));
    }
    for (i, (src, image)) in WORKED_EXAMPLE_ACTION.iter().enumerate() {
        let mut want: Vec<(usize, u64)> = image
            .iter()
            .map(|p| (t.basis.position(&pair(*p)).expect("image arc in basis"), 1))
            .collect();
        want.sort_unstable();
        if t.matrix.row(i) != &want[..] {
            return Err(format!("row {src:?}: {:?} != {want:?}", t.matrix.row(i)));
        }
    }
    Ok(())
}
