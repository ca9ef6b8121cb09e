use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;

use super::{scrambled_start, SpectralConfig};
use crate::error::{domain, Error, Result};
use crate::graph::CenteredMatrixView;
use crate::matrix::{dot, norm2, DenseMatrix};

/// `||H||` for a centered snapshot.
pub fn spectral_norm(h: &CenteredMatrixView, config: &SpectralConfig) -> Result<f64> {
    symmetric_spectral_norm(h.matrix(), config)
}

/// Largest absolute eigenvalue of a symmetric matrix.
///
/// Lanczos with full reorthogonalization. The extreme Ritz value is
/// accepted once its Ritz vector passes the same residual certificate as
/// [`super::principal_eig`], and the returned value is that vector's
/// Rayleigh quotient.
pub fn symmetric_spectral_norm(a: &DenseMatrix, config: &SpectralConfig) -> Result<f64> {
    config.validate()?;
    let n = a.n();
    if n == 0 {
        return Err(domain("empty matrix"));
    }
    a.check_symmetric()?;
    if a.is_zero() {
        return Ok(0.0);
    }
    let scale = a.max_abs_row_sum();
    let steps = n.min(config.max_iters);

    let mut basis: Vec<f64> = Vec::with_capacity(n * steps.min(64));
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut q = scrambled_start(n);
    let mut w = vec![0.0; n];
    let mut last_residual = f64::INFINITY;

    for m in 1..=steps {
        basis.extend_from_slice(&q);
        a.matvec_into(&q, &mut w);
        let aj = dot(&q, &w);
        alpha.push(aj);
        for _ in 0..2 {
            for v in basis.chunks_exact(n) {
                let c = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
            }
        }
        let b = norm2(&w);
        let exhausted = m == steps || b <= f64::EPSILON * scale;

        let (theta, y) = extreme_ritz_pair(&alpha, &beta);
        let estimate = b * y[m - 1].abs();
        if exhausted || estimate <= config.tolerance_for(theta) {
            let mut x = vec![0.0; n];
            for (v, yi) in basis.chunks_exact(n).zip(&y) {
                x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += yi * vi);
            }
            let norm = norm2(&x);
            x.iter_mut().for_each(|xi| *xi /= norm);
            let ax = a.matvec(&x);
            let rq = dot(&x, &ax);
            let r2: f64 = ax.iter().zip(&x).map(|(u, v)| (u - rq * v) * (u - rq * v)).sum();
            last_residual = sqrt(r2);
            if last_residual <= config.tolerance_for(rq) {
                return Ok(rq.abs());
            }
        }
        if exhausted {
            break;
        }
        beta.push(b);
        q.iter_mut().zip(&w).for_each(|(qi, wi)| *qi = wi / b);
    }
    Err(Error::NoConvergence { residual: last_residual, iters: steps })
}

/// Ritz value of largest magnitude and its unit eigenvector in the
/// tridiagonal basis.
fn extreme_ritz_pair(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let hi = kth_eigenvalue(alpha, beta, m - 1);
    let lo = kth_eigenvalue(alpha, beta, 0);
    let theta = if hi.abs() >= lo.abs() { hi } else { lo };
    (theta, tridiagonal_eigenvector(alpha, beta, theta))
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(alpha: &[f64], beta: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut d = alpha[0] - x;
    for i in 0..alpha.len() {
        if i > 0 {
            d = alpha[i] - x - beta[i - 1] * beta[i - 1] / d;
        }
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// `k`-th smallest eigenvalue (0-based) by bisection.
fn kth_eigenvalue(alpha: &[f64], beta: &[f64], k: usize) -> f64 {
    let m = alpha.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut bound: f64 = 0.0;
    for i in 0..m {
        let left = if i > 0 { beta[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < m { beta[i].abs() } else { 0.0 };
        lo = lo.min(alpha[i] - left - right);
        hi = hi.max(alpha[i] + left + right);
        bound = bound.max(alpha[i].abs() + left + right);
    }
    let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * bound * bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * bound {
            break;
        }
        if sturm_count(alpha, beta, mid, pivmin) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvector for an accurate eigenvalue by two steps of inverse
/// iteration.
fn tridiagonal_eigenvector(alpha: &[f64], beta: &[f64], theta: f64) -> Vec<f64> {
    let m = alpha.len();
    if m == 1 {
        return vec![1.0];
    }
    let scale = alpha.iter().chain(beta).fold(0.0f64, |s, x| s.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut y = vec![1.0; m];
    for _ in 0..2 {
        let mut diag: Vec<f64> = alpha.iter().map(|a| a - theta).collect();
        let mut sub = beta.to_vec();
        let mut sup = beta.to_vec();
        solve_tridiagonal(&mut sub, &mut diag, &mut sup, &mut y, f64::EPSILON * scale);
        let norm = norm2(&y);
        if !(norm > 0.0 && norm.is_finite()) {
            break;
        }
        y.iter_mut().for_each(|v| *v /= norm);
    }
    y
}

/// Gaussian elimination with partial pivoting on a tridiagonal system,
/// overwriting `b` with the solution. Zero pivots are replaced by `tiny`.
fn solve_tridiagonal(dl: &mut [f64], d: &mut [f64], du: &mut [f64], b: &mut [f64], tiny: f64) {
    let n = d.len();
    let guard = |x: f64| if x == 0.0 { tiny } else { x };
    // du2 reuses dl after elimination
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            d[i] = guard(d[i]);
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            dl[i] = 0.0;
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = temp;
            let tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
    }
    d[n - 1] = guard(d[n - 1]);
    b[n - 1] /= d[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
    }
}
