//! A single edge as a two-state continuous-time Markov chain.
//!
//! State 1 (present) is left at rate `lambda_on`, state 0 (absent) at
//! rate `lambda_off`, so the stationary presence probability is
//! `rho = lambda_off / (lambda_on + lambda_off)`.
//!
//! Paths are càdlàg: the state changes *at* a jump time, and
//! [`flip_count`](EdgePathRef::flip_count) counts jumps in `(t1, t2]`.

use alloc::format;
use alloc::vec::Vec;
use libm::{exp, expm1, log};

use crate::error::{domain, Result};
use crate::rng::UniformSource;

/// Rates, initial presence probability and horizon of the edge process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeParams {
    lambda_on: f64,
    lambda_off: f64,
    p0: f64,
    horizon: f64,
}

impl EdgeParams {
    pub fn new(lambda_on: f64, lambda_off: f64, p0: f64, horizon: f64) -> Result<Self> {
        if !(lambda_on > 0.0 && lambda_on.is_finite()) {
            return Err(domain(format!("lambda_on must be positive and finite, got {lambda_on}")));
        }
        if !(lambda_off > 0.0 && lambda_off.is_finite()) {
            return Err(domain(format!("lambda_off must be positive and finite, got {lambda_off}")));
        }
        if !(p0 > 0.0 && p0 < 1.0) {
            return Err(domain(format!("p0 must lie in (0,1), got {p0}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(domain(format!("T must be positive and finite, got {horizon}")));
        }
        Ok(Self { lambda_on, lambda_off, p0, horizon })
    }

    pub fn lambda_on(&self) -> f64 {
        self.lambda_on
    }

    pub fn lambda_off(&self) -> f64 {
        self.lambda_off
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    /// Time horizon `T`.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Stationary presence probability.
    pub fn rho(&self) -> f64 {
        self.lambda_off / (self.lambda_on + self.lambda_off)
    }

    pub fn kappa(&self) -> f64 {
        self.lambda_on.max(self.lambda_off)
    }

    /// Relaxation rate `lambda_on + lambda_off`.
    pub fn rate_sum(&self) -> f64 {
        self.lambda_on + self.lambda_off
    }

    /// The same rates with a different initial probability.
    pub fn with_p0(&self, p0: f64) -> Result<Self> {
        Self::new(self.lambda_on, self.lambda_off, p0, self.horizon)
    }

    /// Stationary start: `p0 = rho`.
    pub fn stationary(lambda_on: f64, lambda_off: f64, horizon: f64) -> Result<Self> {
        Self::new(lambda_on, lambda_off, lambda_off / (lambda_on + lambda_off), horizon)
    }

    pub fn transition_prob(&self, from: u8, to: u8, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(domain(format!("transition time must be >= 0, got {t}")));
        }
        if from > 1 || to > 1 {
            return Err(domain("edge states are 0 or 1"));
        }
        let rho = self.rho();
        let decay = exp(-self.rate_sum() * t);
        let to_one = if from == 1 { rho + (1.0 - rho) * decay } else { rho - rho * decay };
        Ok(if to == 1 { to_one } else { 1.0 - to_one })
    }

    /// Marginal presence probability `p(t)`.
    pub fn edge_prob(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(domain(format!("time must be >= 0, got {t}")));
        }
        Ok(self.edge_prob_unchecked(t))
    }

    #[inline]
    pub(crate) fn edge_prob_unchecked(&self, t: f64) -> f64 {
        let rho = self.rho();
        let amp = (1.0 - rho) * self.p0 - rho * (1.0 - self.p0);
        rho + amp * exp(-self.rate_sum() * t)
    }

    /// `Cov(a(t1), a(t2))` for `t1 <= t2`.
    pub fn edge_cov(&self, t1: f64, t2: f64) -> Result<f64> {
        if !(t1 >= 0.0) || !(t1 <= t2) {
            return Err(domain(format!("edge_cov needs 0 <= t1 <= t2, got ({t1}, {t2})")));
        }
        let p = self.edge_prob_unchecked(t1);
        Ok(p * (1.0 - p) * exp(-self.rate_sum() * (t2 - t1)))
    }

    /// Probability of at least two flips within a window of length `x`
    /// that opens in `start_state` (right after a flip, or at time 0).
    ///
    /// Two flips need one full holding time in each state, so this is the
    /// CDF of `Exp(lambda_on) + Exp(lambda_off)`; it is symmetric in the
    /// two rates, hence the same for both start states.
    pub fn two_flip_prob(&self, start_state: u8, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(domain(format!("window length must be >= 0, got {x}")));
        }
        if start_state > 1 {
            return Err(domain("edge states are 0 or 1"));
        }
        // ordering the rates keeps z >= 0 (no overflow in phi) and makes
        // the value bit-identical for both start states
        let a = self.lambda_on.min(self.lambda_off);
        let b = self.lambda_on.max(self.lambda_off);
        // 1 - e^{-ax} - a x e^{-ax} phi((b - a) x) with
        // phi(z) = (1 - e^{-z}) / z, stable for equal or nearly equal rates
        let z = (b - a) * x;
        let phi = if z == 0.0 { 1.0 } else { -expm1(-z) / z };
        Ok(-expm1(-a * x) - a * x * exp(-a * x) * phi)
    }
}

/// One edge's trajectory on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePath {
    pub(crate) initial_state: u8,
    pub(crate) jump_times: Vec<f64>,
    pub(crate) horizon: f64,
}

/// Borrowed view of an edge trajectory; [`EdgePath`] and the flat
/// storage inside a graph trajectory both hand these out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePathRef<'a> {
    initial_state: u8,
    jump_times: &'a [f64],
    horizon: f64,
}

impl EdgePath {
    /// Builds a path after checking the type invariants.
    pub fn new(initial_state: u8, jump_times: Vec<f64>, horizon: f64) -> Result<Self> {
        if initial_state > 1 {
            return Err(domain("edge states are 0 or 1"));
        }
        if !(horizon > 0.0) {
            return Err(domain("horizon must be positive"));
        }
        let mut prev = 0.0;
        for &t in &jump_times {
            if !(t > prev && t <= horizon) {
                return Err(domain(format!(
                    "jump times must be strictly increasing in (0, {horizon}], found {t} after {prev}"
                )));
            }
            prev = t;
        }
        Ok(Self { initial_state, jump_times, horizon })
    }

    pub fn as_ref(&self) -> EdgePathRef<'_> {
        EdgePathRef {
            initial_state: self.initial_state,
            jump_times: &self.jump_times,
            horizon: self.horizon,
        }
    }

    pub fn initial_state(&self) -> u8 {
        self.initial_state
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn state_at(&self, t: f64) -> Result<u8> {
        self.as_ref().state_at(t)
    }

    pub fn flip_count(&self, t1: f64, t2: f64) -> Result<usize> {
        self.as_ref().flip_count(t1, t2)
    }
}

impl<'a> EdgePathRef<'a> {
    pub(crate) fn from_parts(initial_state: u8, jump_times: &'a [f64], horizon: f64) -> Self {
        Self { initial_state, jump_times, horizon }
    }

    pub fn initial_state(&self) -> u8 {
        self.initial_state
    }

    pub fn jump_times(&self) -> &'a [f64] {
        self.jump_times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn to_owned(&self) -> EdgePath {
        EdgePath {
            initial_state: self.initial_state,
            jump_times: self.jump_times.to_vec(),
            horizon: self.horizon,
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t >= 0.0 && t <= self.horizon {
            Ok(())
        } else {
            Err(domain(format!("time {t} outside [0, {}]", self.horizon)))
        }
    }

    /// Number of jumps at or before `t`.
    #[inline]
    pub(crate) fn jumps_through(&self, t: f64) -> usize {
        self.jump_times.partition_point(|&s| s <= t)
    }

    #[inline]
    pub(crate) fn state_at_unchecked(&self, t: f64) -> u8 {
        self.initial_state ^ (self.jumps_through(t) & 1) as u8
    }

    /// Right-continuous state at `t`.
    pub fn state_at(&self, t: f64) -> Result<u8> {
        self.check_time(t)?;
        Ok(self.state_at_unchecked(t))
    }

    /// Number of jumps in `(t1, t2]`.
    pub fn flip_count(&self, t1: f64, t2: f64) -> Result<usize> {
        self.check_time(t1)?;
        self.check_time(t2)?;
        if t1 > t2 {
            return Err(domain(format!("flip_count needs t1 <= t2, got ({t1}, {t2})")));
        }
        Ok(self.jumps_through(t2) - self.jumps_through(t1))
    }
}

/// Draws an `Exp(rate)` holding time by inversion.
#[inline]
fn exponential<R: UniformSource + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    -log(rng.next_uniform()) / rate
}

/// Samples a path and appends its jump times to `out`; returns the
/// initial state. The first uniform decides the initial state, the
/// following ones are the holding times in order.
pub(crate) fn sample_jumps_into<R: UniformSource + ?Sized>(
    params: &EdgeParams,
    rng: &mut R,
    out: &mut Vec<f64>,
) -> u8 {
    let start = out.len();
    let initial = u8::from(rng.next_uniform() < params.p0);
    let mut state = initial;
    let mut t = 0.0;
    loop {
        let rate = if state == 1 { params.lambda_on } else { params.lambda_off };
        let next = t + exponential(rng, rate);
        if next > params.horizon {
            break;
        }
        if next <= t {
            // Holding time lost to rounding: the two flips cancel.
            if out.len() > start {
                out.pop();
            }
        } else {
            out.push(next);
        }
        t = next;
        state ^= 1;
    }
    initial
}

/// Samples one edge trajectory on `[0, T]`.
pub fn sample_edge_path<R: UniformSource + ?Sized>(params: &EdgeParams, rng: &mut R) -> EdgePath {
    let mut jumps = Vec::new();
    let initial_state = sample_jumps_into(params, rng, &mut jumps);
    EdgePath { initial_state, jump_times: jumps, horizon: params.horizon }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sym(t: f64) -> EdgeParams {
        EdgeParams::new(1.0, 1.0, 0.5, t).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(EdgeParams::new(-1.0, 1.0, 0.5, 1.0).is_err());
        assert!(EdgeParams::new(1.0, 0.0, 0.5, 1.0).is_err());
        let err = EdgeParams::new(1.0, 1.0, 1.0, 1.0).unwrap_err();
        assert!(alloc::format!("{err}").contains("p0 must lie in (0,1)"));
        assert!(EdgeParams::new(1.0, 1.0, 0.5, 0.0).is_err());
        assert!(EdgeParams::new(1.0, 1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn derived_quantities() {
        let p = EdgeParams::new(3.0, 1.0, 0.2, 1.0).unwrap();
        assert_eq!(p.rho(), 0.25);
        assert_eq!(p.kappa(), 3.0);
    }

    #[test]
    fn state_and_flip_examples() {
        let path = EdgePath::new(0, vec![0.3, 0.9], 1.0).unwrap();
        assert_eq!(path.state_at(0.5).unwrap(), 1);
        assert_eq!(path.state_at(0.0).unwrap(), 0);
        assert_eq!(path.flip_count(0.0, 1.0).unwrap(), 2);
        assert_eq!(path.flip_count(0.4, 0.4).unwrap(), 0);
        assert!(path.state_at(1.5).is_err());
        assert!(path.state_at(-0.1).is_err());
        assert!(path.flip_count(0.6, 0.5).is_err());

        let one = EdgePath::new(1, vec![0.3], 1.0).unwrap();
        assert_eq!(one.state_at(0.3).unwrap(), 0);
        assert_eq!(one.state_at(0.299_999).unwrap(), 1);
        // the jump at 0.3 belongs to (0.3 - h, 0.3] but not to (0.3, 1]
        assert_eq!(one.flip_count(0.2, 0.3).unwrap(), 1);
        assert_eq!(one.flip_count(0.3, 1.0).unwrap(), 0);
    }

    #[test]
    fn path_invariants_checked() {
        assert!(EdgePath::new(0, vec![0.5, 0.5], 1.0).is_err());
        assert!(EdgePath::new(0, vec![0.0], 1.0).is_err());
        assert!(EdgePath::new(0, vec![1.5], 1.0).is_err());
        assert!(EdgePath::new(2, vec![], 1.0).is_err());
    }

    #[test]
    fn transition_prob_values() {
        let p = sym(1.0);
        assert_eq!(p.transition_prob(0, 1, 0.0).unwrap(), 0.0);
        assert_eq!(p.transition_prob(1, 1, 0.0).unwrap(), 1.0);
        // 0.5 (1 - e^{-1})
        let expected = 0.5 * (1.0 - (-1.0f64).exp());
        assert!((p.transition_prob(0, 1, 0.5).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.316_060).abs() < 1e-6);
        assert!((p.transition_prob(0, 1, 100.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((p.transition_prob(1, 1, 100.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(p.transition_prob(0, 1, -1.0).is_err());
    }

    #[test]
    fn edge_prob_values() {
        let stationary = EdgeParams::stationary(2.0, 3.0, 5.0).unwrap();
        for t in [0.0, 0.3, 1.0, 4.0] {
            assert!((stationary.edge_prob(t).unwrap() - 0.6).abs() < 1e-15);
        }
        // p0 = 0 is excluded by the parameter domain, so check the closed
        // form through the transition probability from state 0.
        let p = sym(1.0);
        let half_ln2 = core::f64::consts::LN_2 / 2.0;
        assert!((p.transition_prob(0, 1, half_ln2).unwrap() - 0.25).abs() < 1e-15);
        assert!(p.edge_prob(-0.5).is_err());
    }

    #[test]
    fn edge_cov_values() {
        let p = sym(1.0);
        let expected = 0.25 * (-2.0f64).exp();
        assert!((p.edge_cov(0.0, 1.0).unwrap() - expected).abs() < 1e-16);
        assert!((expected - 0.033_833_8).abs() < 1e-7);
        let q = EdgeParams::new(1.0, 2.0, 0.1, 3.0).unwrap();
        let pt = q.edge_prob(0.7).unwrap();
        assert!((q.edge_cov(0.7, 0.7).unwrap() - pt * (1.0 - pt)).abs() < 1e-16);
        assert!(q.edge_cov(0.0, 40.0).unwrap() < 1e-50);
        assert!(q.edge_cov(1.0, 0.5).is_err());
    }

    #[test]
    fn two_flip_values() {
        let p = sym(1.0);
        assert_eq!(p.two_flip_prob(1, 0.0).unwrap(), 0.0);
        let x: f64 = 0.1;
        let closed = 1.0 - (-x).exp() - x * (-x).exp();
        let w = p.two_flip_prob(1, x).unwrap();
        assert!((w - closed).abs() < 1e-15);
        assert!((w - 0.004_678_8).abs() < 1e-7);
        assert!(p.two_flip_prob(0, -1.0).is_err());

        // distinct rates: compare with the textbook form
        let q = EdgeParams::new(2.0, 1.0, 0.5, 1.0).unwrap();
        let x: f64 = 0.3;
        let (a, b) = (2.0f64, 1.0f64);
        let textbook = 1.0 - (-a * x).exp() - a * ((-b * x).exp() - (-a * x).exp()) / (a - b);
        assert!((q.two_flip_prob(1, x).unwrap() - textbook).abs() < 1e-14);
        assert!((q.two_flip_prob(0, x).unwrap() - textbook).abs() < 1e-14);
    }

    #[test]
    fn two_flip_branch_is_continuous() {
        let base = EdgeParams::new(1.0, 1.0, 0.5, 1.0).unwrap();
        let near = EdgeParams::new(1.0 + 1e-7, 1.0, 0.5, 1.0).unwrap();
        for x in [1e-3, 0.1, 1.0, 5.0] {
            let (a, b) = (base.two_flip_prob(1, x).unwrap(), near.two_flip_prob(1, x).unwrap());
            assert!((a - b).abs() < 1e-6 * a.max(1e-12), "x={x}: {a} vs {b}");
        }
    }
}
