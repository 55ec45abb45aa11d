//! Sparse nonnegative integer matrices and their spectral radius.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("power iteration did not converge after {iterations} steps (bracket [{lower}, {upper}])")]
    NotConverged {
        iterations: usize,
        lower: f64,
        upper: f64,
    },
}

pub const EIGEN_TOLERANCE: f64 = 1e-9;
pub const EIGEN_MAX_ITERATIONS: usize = 1_000_000;

/// Square matrix stored by rows as sorted `(column, count)` lists.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    rows: Vec<Vec<(usize, u64)>>,
}

impl SparseMatrix {
    pub fn zeros(n: usize) -> Self {
        SparseMatrix {
            rows: vec![Vec::new(); n],
        }
    }

    /// Rows may list a column several times; counts are merged.
    pub fn from_rows(rows: Vec<Vec<(usize, u64)>>) -> Self {
        let n = rows.len();
        let rows = rows
            .into_iter()
            .map(|mut r| {
                r.sort_unstable();
                let mut out: Vec<(usize, u64)> = Vec::with_capacity(r.len());
                for (c, v) in r {
                    assert!(c < n, "column {c} out of range");
                    match out.last_mut() {
                        Some((lc, lv)) if *lc == c => *lv += v,
                        _ if v > 0 => out.push((c, v)),
                        _ => {}
                    }
                }
                out
            })
            .collect();
        SparseMatrix { rows }
    }

    pub fn from_dense(dense: &[Vec<u64>]) -> Self {
        Self::from_rows(
            dense
                .iter()
                .map(|r| r.iter().copied().enumerate().filter(|&(_, v)| v > 0).collect())
                .collect(),
        )
    }

    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let n = self.n();
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![0; n];
                for &(c, v) in r {
                    d[c] = v;
                }
                d
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, u64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(usize, u64)>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|p| self.rows[i][p].1)
            .unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.rows[i].iter().map(|&(_, v)| v).sum()
    }
}

/// Strongly connected components (iterative Tarjan) of the digraph whose
/// out-neighbours of `v` are the first entries of `rows[v]`, in reverse
/// topological order.
pub fn strongly_connected_components<T>(rows: &[Vec<(usize, T)>]) -> Vec<Vec<usize>> {
    let n = rows.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0usize;
    // (vertex, next edge position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let row = &rows[v];
            if *pos < row.len() {
                let w = row[*pos].0;
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Spectral radius of a nonnegative integer matrix, within absolute tolerance
/// [`EIGEN_TOLERANCE`]. Returns 0 for nilpotent matrices.
pub fn leading_eigenvalue(m: &SparseMatrix) -> Result<f64, EigenError> {
    leading_eigenvalue_with(m, EIGEN_TOLERANCE, EIGEN_MAX_ITERATIONS)
}

pub fn leading_eigenvalue_with(
    m: &SparseMatrix,
    tol: f64,
    max_iterations: usize,
) -> Result<f64, EigenError> {
    let rows: Vec<Vec<(usize, f64)>> = m
        .rows()
        .iter()
        .map(|r| r.iter().map(|&(c, v)| (c, v as f64)).collect())
        .collect();
    spectral_radius(&rows, tol, max_iterations)
}

/// Spectral radius of a nonnegative real matrix given by rows, maximized over
/// strongly connected components.
pub fn spectral_radius(
    rows: &[Vec<(usize, f64)>],
    tol: f64,
    max_iterations: usize,
) -> Result<f64, EigenError> {
    let mut best = 0.0f64;
    let mut local = vec![usize::MAX; rows.len()];
    for comp in strongly_connected_components(rows) {
        if comp.len() == 1 {
            let v = comp[0];
            let diag: f64 = rows[v].iter().filter(|&&(c, _)| c == v).map(|&(_, x)| x).sum();
            best = best.max(diag);
            continue;
        }
        for (i, &v) in comp.iter().enumerate() {
            local[v] = i;
        }
        let sub: Vec<Vec<(usize, f64)>> = comp
            .iter()
            .map(|&v| {
                rows[v]
                    .iter()
                    .filter(|&&(c, _)| local[c] != usize::MAX)
                    .map(|&(c, x)| (local[c], x))
                    .collect()
            })
            .collect();
        let (lo, hi) = irreducible_radius(&sub, tol, max_iterations)?;
        best = best.max(0.5 * (lo + hi));
        for &v in &comp {
            local[v] = usize::MAX;
        }
    }
    Ok(best)
}

/// Power iteration on `B + I` for an irreducible `B`; returns a Collatz-Wielandt
/// bracket for the spectral radius of `B`.
fn irreducible_radius(
    rows: &[Vec<(usize, f64)>],
    tol: f64,
    max_iterations: usize,
) -> Result<(f64, f64), EigenError> {
    let n = rows.len();
    let mut x = vec![1.0f64; n];
    let mut y = vec![0.0f64; n];
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    for _ in 0..max_iterations {
        // y = (B + I) x, with B acting on column vectors: y_i = x_i + Σ_j B_ij x_j
        for (i, r) in rows.iter().enumerate() {
            y[i] = x[i] + r.iter().map(|&(c, v)| v * x[c]).sum::<f64>();
        }
        lo = f64::INFINITY;
        hi = 0.0f64;
        for i in 0..n {
            let ratio = y[i] / x[i];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        let scale = y.iter().copied().fold(0.0, f64::max);
        for i in 0..n {
            x[i] = y[i] / scale;
            if x[i] < f64::MIN_POSITIVE {
                x[i] = f64::MIN_POSITIVE;
            }
        }
        if hi - lo <= tol {
            return Ok((lo - 1.0, hi - 1.0));
        }
    }
    Err(EigenError::NotConverged {
        iterations: max_iterations,
        lower: lo - 1.0,
        upper: hi - 1.0,
    })
}
