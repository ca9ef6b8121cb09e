//! Closed-form limit quantities for the principal eigenvalue process.

use alloc::format;
use libm::{exp, log, pow, sqrt};

use crate::edge::EdgeParams;
use crate::error::{domain, Result};

/// Relative widening applied to the extreme values of `p(t)`.
const BOUND_SLACK: f64 = 1e-12;

/// Theory curves for one parameter set; all methods are pure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryCurves {
    params: EdgeParams,
}

impl TheoryCurves {
    pub fn new(params: EdgeParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> &EdgeParams {
        &self.params
    }

    pub fn rho(&self) -> f64 {
        self.params.rho()
    }

    pub fn kappa(&self) -> f64 {
        self.params.kappa()
    }

    pub fn p(&self, t: f64) -> Result<f64> {
        self.params.edge_prob(t)
    }

    /// Odds `p(t) / (1 - p(t))`.
    pub fn q(&self, t: f64) -> Result<f64> {
        let p = self.p(t)?;
        Ok(p / (1.0 - p))
    }

    /// Lower bound on `p(t)`; `p(t)` relaxes monotonically from `p0` to
    /// `rho`, so the smaller of the two is tight.
    pub fn p_minus(&self) -> f64 {
        let lo = self.params.p0().min(self.rho());
        lo * (1.0 - BOUND_SLACK)
    }

    pub fn p_plus(&self) -> f64 {
        let hi = self.params.p0().max(self.rho());
        (hi * (1.0 + BOUND_SLACK)).min(0.5 * (hi + 1.0))
    }

    pub fn q_minus(&self) -> f64 {
        let p = self.p_minus();
        p / (1.0 - p)
    }

    pub fn q_plus(&self) -> f64 {
        let p = self.p_plus();
        p / (1.0 - p)
    }

    /// `C1 = 1 / sqrt(p-(1 - p+))`: every centered entry satisfies
    /// `|h_ij| <= C1 / sqrt(N)`, hence `||H|| <= C1 sqrt(N)`.
    pub fn entry_bound_constant(&self) -> f64 {
        1.0 / sqrt(self.p_minus() * (1.0 - self.p_plus()))
    }

    /// Covariance of the limiting Gaussian process, `t1 <= t2`.
    pub fn limit_cov(&self, t1: f64, t2: f64) -> Result<f64> {
        Ok(2.0 * self.params.edge_cov(t1, t2)?)
    }

    /// Correlation of the limit process, `t1 <= t2`.
    pub fn limit_corr(&self, t1: f64, t2: f64) -> Result<f64> {
        let c12 = self.limit_cov(t1, t2)?;
        let c11 = self.limit_cov(t1, t1)?;
        let c22 = self.limit_cov(t2, t2)?;
        Ok(c12 / sqrt(c11 * c22))
    }

    /// `N p(t) + (1 - p(t))`, the expansion of `E[mu_N(t)]` up to `O(1/N)`.
    pub fn mean_expansion(&self, n: usize, t: f64) -> Result<f64> {
        if n == 0 {
            return Err(domain("mean expansion needs n >= 1"));
        }
        self.check_horizon(t)?;
        let p = self.p(t)?;
        Ok(n as f64 * p + (1.0 - p))
    }

    /// `(F(t) - F(r))^2` with `F(t) = 35 kappa t`.
    pub fn tightness_bound(&self, r: f64, t: f64) -> Result<f64> {
        if !(r >= 0.0 && r <= t) {
            return Err(domain(format!("tightness bound needs 0 <= r <= t, got ({r}, {t})")));
        }
        let f = 35.0 * self.kappa() * (t - r);
        Ok(f * f)
    }

    /// The intermediate constant `(384 + 792) kappa^2 (t - r)^2`, which
    /// the `F(t) = 35 kappa t` bound dominates.
    pub fn tightness_bound_sharp(&self, r: f64, t: f64) -> Result<f64> {
        if !(r >= 0.0 && r <= t) {
            return Err(domain(format!("tightness bound needs 0 <= r <= t, got ({r}, {t})")));
        }
        let k = self.kappa();
        Ok(1176.0 * k * k * (t - r) * (t - r))
    }

    /// `2 + (log N)^2 / N^{1/4}`, the high-probability bound on `||H_N(t)||`.
    pub fn norm_bound(&self, n: usize) -> f64 {
        let ln = log(n as f64);
        2.0 + ln * ln / pow(n as f64, 0.25)
    }

    /// `C = 4 e max(1, C2)` with `C2 = 1/sqrt(p-(1-p+))`, the constant in
    /// the deviation bound for `<e, H^k e>`.
    pub fn quad_form_constant(&self) -> f64 {
        4.0 * core::f64::consts::E * self.entry_bound_constant().max(1.0)
    }

    /// `C^k (log N)^{2k} / sqrt(N)`.
    pub fn quad_form_bound(&self, n: usize, k: usize) -> f64 {
        let ln = log(n as f64);
        let base = self.quad_form_constant() * ln * ln;
        pow(base, k as f64) / sqrt(n as f64)
    }

    fn check_horizon(&self, t: f64) -> Result<()> {
        let h = self.params.horizon();
        if t >= 0.0 && t <= h {
            Ok(())
        } else {
            Err(domain(format!("time {t} outside [0, {h}]")))
        }
    }
}

/// `(log n)^4 / sqrt(n)`: the normalization under which the remainder of
/// the edge-sum representation stays bounded.
pub fn representation_remainder_scale(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(domain("remainder scale needs n >= 2"));
    }
    let ln = log(n as f64);
    Ok(ln * ln * ln * ln / sqrt(n as f64))
}

/// `exp(-(lambda_on + lambda_off) delta)`, the limit autocorrelation at lag `delta`.
pub fn stationary_corr(params: &EdgeParams, delta: f64) -> f64 {
    exp(-params.rate_sum() * delta)
}
