//! Growth rates of truncated non-diagonal wedge graphs.

use serde::{Deserialize, Serialize};

use super::count::spectral_series;
use super::cycles::SpectralPolynomial;
use super::{
    build_truncated_graph_with, Restriction, TruncatedWedgeGraph, WedgeError,
    DEFAULT_MAX_VERTICES,
};
use crate::linalg::{spectral_radius, EIGEN_MAX_ITERATIONS, EIGEN_TOLERANCE};
use crate::portrait::CriticalPortrait;

/// Highest series degree computed by default; keeps coefficients well inside `i128`.
pub const DEFAULT_SERIES_DEGREE: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrowthOptions {
    pub bound: usize,
    /// Degree of the diagnostic series; defaults to `min(bound - 2, 24)`.
    pub degree: Option<usize>,
    pub max_vertices: usize,
    pub check_stabilization: bool,
}

impl GrowthOptions {
    pub fn new(bound: usize) -> Self {
        GrowthOptions {
            bound,
            degree: None,
            max_vertices: DEFAULT_MAX_VERTICES,
            check_stabilization: true,
        }
    }

    pub fn series_degree(&self) -> usize {
        self.degree
            .unwrap_or_else(|| self.bound.saturating_sub(2).min(DEFAULT_SERIES_DEGREE))
            .min(self.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    /// Perron root of the truncated non-diagonal graph, clamped below at 1.
    pub rate: f64,
    pub bound: usize,
    /// Non-diagonal spectral determinant up to the series degree.
    pub series: SpectralPolynomial,
    /// Reciprocal of the smallest zero of `series` in `(0, 1)`, or 1.
    pub series_rate: f64,
    pub stabilized: bool,
}

impl GrowthEstimate {
    pub fn entropy(&self) -> f64 {
        self.rate.ln()
    }
}

pub fn growth_rate(xi: &CriticalPortrait, bound: usize) -> Result<GrowthEstimate, WedgeError> {
    growth_rate_with(xi, &GrowthOptions::new(bound))
}

pub fn growth_rate_with(
    xi: &CriticalPortrait,
    opts: &GrowthOptions,
) -> Result<GrowthEstimate, WedgeError> {
    let g = build_truncated_graph_with(xi, opts.bound, opts.max_vertices)?;
    let rate = truncated_perron_root(&g, Restriction::NonDiagonal)?.max(1.0);
    let degree = opts.series_degree();
    let series = spectral_series(&g, degree, Restriction::NonDiagonal)?;
    let mut stabilized = false;
    if opts.check_stabilization && opts.bound >= 2 && degree < opts.bound {
        let prev = build_truncated_graph_with(xi, opts.bound - 1, opts.max_vertices)?;
        let earlier = spectral_series(&prev, degree, Restriction::NonDiagonal)?;
        if let Some(n) = (0..=degree).find(|&n| earlier.coefficients()[n] != series.coefficients()[n]) {
            return Err(WedgeError::NotStabilized {
                degree: n,
                previous: opts.bound - 1,
                current: opts.bound,
            });
        }
        stabilized = true;
    }
    let series_rate = series
        .smallest_root_in_unit_interval()
        .map_or(1.0, |t| 1.0 / t);
    Ok(GrowthEstimate {
        rate,
        bound: opts.bound,
        series,
        series_rate,
        stabilized,
    })
}

fn weighted_radius(jumps: &[Vec<(usize, usize)>], t: f64) -> Result<f64, WedgeError> {
    let rows: Vec<Vec<(usize, f64)>> = jumps
        .iter()
        .map(|r| r.iter().map(|&(w, len)| (w, t.powi(len as i32))).collect())
        .collect();
    Ok(spectral_radius(&rows, EIGEN_TOLERANCE, EIGEN_MAX_ITERATIONS)?)
}

/// Spectral radius of the adjacency matrix of the truncated graph.
///
/// Closed paths are closed walks of the jump graph, so the radius is `1/t`
/// where `t` solves `ρ(M(t)) = 1` with `M(t)_{uw} = Σ t^len` over jumps `u -> w`.
pub fn truncated_perron_root(
    g: &TruncatedWedgeGraph,
    restrict: Restriction,
) -> Result<f64, WedgeError> {
    let jg = g.jump_graph(restrict);
    if jg.cyclic_components().is_empty() {
        return Ok(0.0);
    }
    let at_one = weighted_radius(&jg.jumps, 1.0)?;
    if at_one <= 1.0 + 1e-12 {
        return Ok(1.0);
    }
    // ρ(M(t)) increases from 0 to at_one on (0, 1]
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if weighted_radius(&jg.jumps, mid)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(2.0 / (lo + hi))
}
