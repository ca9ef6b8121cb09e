use alloc::format;
use alloc::vec::Vec;
use libm::{ceil, log, sqrt};

use super::SpectralConfig;
use crate::edge::EdgeParams;
use crate::error::{domain, Error, Result};
use crate::graph::CenteredMatrixView;
use crate::matrix::DenseMatrix;
use crate::theory::TheoryCurves;

/// `ceil(ln N)`, the default series truncation.
pub fn default_truncation(n: usize) -> usize {
    if n < 2 {
        return 1;
    }
    (ceil(log(n as f64)) as usize).max(1)
}

/// `<e, H^k e>` for `k = 0..=k_max` by iterated mat-vecs, with
/// `e = N^{-1/2} (1, ..., 1)`.
pub fn quadratic_form_powers(h: &CenteredMatrixView, k_max: usize) -> Result<Vec<f64>> {
    let cap = default_truncation(h.n()) + 2;
    if k_max > cap {
        return Err(domain(format!("k_max {k_max} exceeds ceil(ln N) + 2 = {cap}")));
    }
    Ok(powers(h.matrix(), k_max))
}

pub(crate) fn powers(h: &DenseMatrix, k_max: usize) -> Vec<f64> {
    let n = h.n();
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(1.0);
    let mut x: Vec<f64> = alloc::vec![1.0 / sqrt(n as f64); n];
    let mut y = alloc::vec![0.0; n];
    let inv = 1.0 / sqrt(n as f64);
    for _ in 0..k_max {
        h.matvec_into(&x, &mut y);
        core::mem::swap(&mut x, &mut y);
        out.push(inv * x.iter().sum::<f64>());
    }
    out
}

/// `sqrt(N q) * sum_k c_k mu^{-k}`, the truncated right-hand side
/// evaluated from precomputed `c_k = <e, H^k e>`.
pub fn series_rhs(coeffs: &[f64], sqrt_nq: f64, mu: f64) -> f64 {
    let inv = 1.0 / mu;
    let mut acc = 0.0;
    for c in coeffs.iter().rev() {
        acc = acc * inv + c;
    }
    sqrt_nq * acc
}

/// Normalized principal eigenvalue `mu*` as the root of the truncated
/// resolvent series, found by damped fixed-point iteration from
/// `sqrt(N q)`.
///
/// `truncation` defaults to `ceil(ln N)`. An iterate leaving
/// `[sqrt(N q-)/4, 4 sqrt(N q+)]` is reported as
/// [`Error::SeriesDivergence`].
pub fn series_eig(
    h: &CenteredMatrixView,
    params: &EdgeParams,
    truncation: Option<usize>,
    config: &SpectralConfig,
) -> Result<f64> {
    config.validate()?;
    let n = h.n();
    let k = truncation.unwrap_or_else(|| default_truncation(n));
    if k == 0 {
        return Err(domain("series truncation must be at least 1"));
    }
    let p = h.p();
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!("p(t) must lie in (0,1), got {p}")));
    }
    let theory = TheoryCurves::new(*params);
    let nf = n as f64;
    let lower = sqrt(nf * theory.q_minus()) / 4.0;
    let upper = 4.0 * sqrt(nf * theory.q_plus());

    let coeffs = powers(h.matrix(), k);
    let s = sqrt(nf * h.q());
    let mut mu = s;
    let mut last = f64::NAN;
    for _ in 0..config.max_iters {
        let rhs = series_rhs(&coeffs, s, mu);
        last = (rhs - mu).abs();
        if last <= config.rel_tol * mu {
            return Ok(mu);
        }
        mu = 0.5 * (mu + rhs);
        if !(mu >= lower && mu <= upper) {
            return Err(Error::SeriesDivergence { iterate: mu, lower, upper });
        }
    }
    Err(Error::NoConvergence { residual: last, iters: config.max_iters })
}
