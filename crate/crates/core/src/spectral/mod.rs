//! Principal eigenvalue of adjacency snapshots.
//!
//! [`principal_eig`] is a shifted power iteration with a Rayleigh-quotient
//! readout. Every result carries a residual certificate
//! `||A v - mu v|| <= rel_tol * max(1, |mu|)` that is recomputed with a
//! separate mat-vec before returning. [`series_eig`] reaches the same
//! eigenvalue of `A* = H + sqrt(N q) E_N` through the resolvent series in
//! `H / mu`, and [`spectral_norm`] estimates `||H||` by Lanczos.

mod lanczos;
mod series;

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;

use crate::edge::EdgeParams;
use crate::error::{domain, Error, Result};
use crate::graph::{GraphTrajectory, TimeGrid};
use crate::matrix::{dot, norm2, DenseMatrix};

pub use lanczos::{spectral_norm, symmetric_spectral_norm};
pub use series::{default_truncation, quadratic_form_powers, series_eig, series_rhs};

/// Shift used for nonnegative matrices, as a fraction of the row-sum
/// bound. It separates `rho` from `-rho` for bipartite graphs.
const NONNEG_SHIFT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConfig {
    pub rel_tol: f64,
    pub max_iters: usize,
    pub warm_start: bool,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, max_iters: 100_000, warm_start: true }
    }
}

impl SpectralConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(domain(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_iters == 0 {
            return Err(domain("max_iters must be at least 1"));
        }
        Ok(())
    }

    pub fn tolerance_for(&self, mu: f64) -> f64 {
        self.rel_tol * mu.abs().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub mu: f64,
    /// Unit eigenvector with nonnegative entry sum.
    pub vector: Vec<f64>,
    /// `||A v - mu v||_2`.
    pub residual: f64,
    pub iters: usize,
    /// Snapshot time, when the matrix came from a trajectory.
    pub t: Option<f64>,
}

fn unit_ones(n: usize) -> Vec<f64> {
    vec![1.0 / sqrt(n as f64); n]
}

/// Deterministic start vector with a component along every direction.
pub(crate) fn scrambled_start(n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            let mut z = (i as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            1.0 + ((z >> 11) as f64 / 9_007_199_254_740_992.0 - 0.5)
        })
        .collect();
    let norm = norm2(&v);
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// Residual recomputed with a plain row loop, independent of the
/// unrolled kernel used inside the iteration.
fn certify(matrix: &DenseMatrix, v: &[f64]) -> (f64, f64) {
    let n = matrix.n();
    let mut av = vec![0.0; n];
    for (i, out) in av.iter_mut().enumerate() {
        *out = matrix.row(i).iter().zip(v).map(|(a, x)| a * x).sum();
    }
    let mu: f64 = av.iter().zip(v).map(|(a, x)| a * x).sum();
    let r2: f64 = av.iter().zip(v).map(|(a, x)| (a - mu * x) * (a - mu * x)).sum();
    (mu, sqrt(r2))
}

/// Largest eigenvalue of a symmetric matrix.
///
/// `warm` must be a unit vector of matching length; without it the
/// iteration starts from `e` (nonnegative matrices) or a scrambled
/// vector. The all-zero matrix returns `mu = 0` with eigenvector `e`.
pub fn principal_eig(
    matrix: &DenseMatrix,
    config: &SpectralConfig,
    warm: Option<&[f64]>,
) -> Result<SpectralResult> {
    config.validate()?;
    let n = matrix.n();
    if n == 0 {
        return Err(domain("empty matrix"));
    }
    matrix.check_symmetric()?;
    if matrix.is_zero() {
        return Ok(SpectralResult { mu: 0.0, vector: unit_ones(n), residual: 0.0, iters: 0, t: None });
    }

    let nonneg = matrix.is_nonnegative();
    let mut v = match warm {
        Some(w) => {
            if w.len() != n {
                return Err(domain(format!("warm vector has length {}, expected {n}", w.len())));
            }
            let norm = norm2(w);
            if !((norm - 1.0).abs() <= 1e-8) {
                return Err(domain(format!("warm vector must have unit norm, got {norm}")));
            }
            w.iter().map(|x| x / norm).collect()
        }
        None if nonneg => unit_ones(n),
        None => scrambled_start(n),
    };

    let shift = if nonneg {
        NONNEG_SHIFT * matrix.max_abs_row_sum()
    } else {
        // make every eigenvalue of A + shift I nonnegative (Gershgorin)
        let lower = (0..n)
            .map(|i| {
                let row = matrix.row(i);
                let off: f64 = row.iter().map(|x| x.abs()).sum::<f64>() - row[i].abs();
                row[i] - off
            })
            .fold(f64::INFINITY, f64::min);
        (-lower).max(0.0)
    };

    let mut w = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iter in 1..=config.max_iters {
        matrix.matvec_into(&v, &mut w);
        let theta = dot(&v, &w);
        let r2: f64 = w.iter().zip(&v).map(|(a, x)| (a - theta * x) * (a - theta * x)).sum();
        residual = sqrt(r2);
        if residual <= config.tolerance_for(theta) {
            let (mu, checked) = certify(matrix, &v);
            if checked <= config.tolerance_for(mu) {
                if v.iter().sum::<f64>() < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
                return Ok(SpectralResult { mu, vector: v, residual: checked, iters: iter, t: None });
            }
        }
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += shift * vi;
        }
        let norm = norm2(&w);
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
    }
    Err(Error::NoConvergence { residual, iters: config.max_iters })
}

/// Principal eigenvalue at every grid point, warm-starting each solve
/// from the previous eigenvector when `config.warm_start` is set.
/// Warm starting makes the grid order sequential.
pub fn eig_path(
    traj: &GraphTrajectory,
    grid: &TimeGrid,
    config: &SpectralConfig,
) -> Result<Vec<SpectralResult>> {
    let mut out: Vec<SpectralResult> = Vec::with_capacity(grid.len());
    for (index, &t) in grid.points().iter().enumerate() {
        let at = |e: Error| Error::AtGridPoint { index, source: Box::new(e) };
        let a = traj.adjacency_at(t).map_err(at)?;
        let warm = if config.warm_start { out.last().map(|r| r.vector.as_slice()) } else { None };
        let mut res = principal_eig(&a, config, warm).map_err(at)?;
        res.t = Some(t);
        out.push(res);
    }
    Ok(out)
}

/// `mu* = mu / sqrt(N p(t) (1 - p(t)))`, the principal eigenvalue of the
/// normalized adjacency `A*`.
pub fn mu_star(result: &SpectralResult, params: &EdgeParams, t: f64) -> Result<f64> {
    let p = params.edge_prob(t)?;
    let n = result.vector.len() as f64;
    Ok(result.mu / sqrt(n * p * (1.0 - p)))
}
