//! Small estimators shared by the campaign code.

use alloc::vec;
use alloc::vec::Vec;
use libm::{erfc, sqrt};

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn new(value: f64, se: f64) -> Self {
        Self { value, se }
    }

    /// `|value - target| <= k * se`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.se
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; NaN below two samples.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Sample mean with standard error `sd / sqrt(n)`.
pub fn mean_estimate(xs: &[f64]) -> Estimate {
    Estimate::new(mean(xs), sqrt(variance(xs) / xs.len() as f64))
}

/// Unbiased sample covariance.
pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let (mx, my) = (mean(xs), mean(ys));
    xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (n - 1) as f64
}

/// Jackknife standard error from leave-one-out replicates of a statistic.
pub fn jackknife_se(leave_one_out: &[f64]) -> f64 {
    let n = leave_one_out.len() as f64;
    let m = mean(leave_one_out);
    let ss: f64 = leave_one_out.iter().map(|v| (v - m) * (v - m)).sum();
    sqrt((n - 1.0) / n * ss)
}

/// Leave-one-out covariances in one pass over centered sums.
fn loo_covariances(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len() as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    // sums of centered values are zero, so dropping point i leaves
    // sum_x = -dx, sum_y = -dy
    xs.iter()
        .zip(ys)
        .map(|(x, y)| {
            let (dx, dy) = (x - mx, y - my);
            (sxy - dx * dy - dx * dy / (n - 1.0)) / (n - 2.0)
        })
        .collect()
}

/// Sample covariance with a jackknife standard error (NaN below three
/// samples).
pub fn covariance_estimate(xs: &[f64], ys: &[f64]) -> Estimate {
    let value = covariance(xs, ys);
    if xs.len() < 3 {
        return Estimate::new(value, f64::NAN);
    }
    Estimate::new(value, jackknife_se(&loo_covariances(xs, ys)))
}

/// Pearson correlation with a jackknife standard error.
pub fn correlation_estimate(xs: &[f64], ys: &[f64]) -> Estimate {
    let corr = |c: f64, vx: f64, vy: f64| c / sqrt(vx * vy);
    let value = corr(covariance(xs, ys), variance(xs), variance(ys));
    if xs.len() < 3 {
        return Estimate::new(value, f64::NAN);
    }
    Estimate::new(value, jackknife_se(&correlation_leave_one_out(xs, ys)))
}

/// Correlations with each sample left out in turn.
pub fn correlation_leave_one_out(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let cxy = loo_covariances(xs, ys);
    let cxx = loo_covariances(xs, xs);
    let cyy = loo_covariances(ys, ys);
    (0..xs.len()).map(|i| cxy[i] / sqrt(cxx[i] * cyy[i])).collect()
}

fn central_moments(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64, f64) {
    let (mut n, mut s) = (0.0, 0.0);
    for x in xs.clone() {
        n += 1.0;
        s += x;
    }
    let m = s / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for x in xs {
        let d = x - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

fn skew_of(m: (f64, f64, f64)) -> f64 {
    m.1 / (m.0 * sqrt(m.0))
}

fn kurt_of(m: (f64, f64, f64)) -> f64 {
    m.2 / (m.0 * m.0) - 3.0
}

/// Skewness `m3 / m2^{3/2}` and excess kurtosis `m4 / m2^2 - 3`, each
/// with a jackknife standard error.
pub fn shape_estimates(xs: &[f64]) -> (Estimate, Estimate) {
    let all = central_moments(xs.iter().copied());
    let mut skews = Vec::with_capacity(xs.len());
    let mut kurts = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        let it = xs.iter().enumerate().filter(move |(j, _)| *j != i).map(|(_, x)| *x);
        let m = central_moments(it);
        skews.push(skew_of(m));
        kurts.push(kurt_of(m));
    }
    (
        Estimate::new(skew_of(all), jackknife_se(&skews)),
        Estimate::new(kurt_of(all), jackknife_se(&kurts)),
    )
}

/// Linear interpolation between order statistics (type 7).
pub fn quantile(xs: &[f64], prob: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * prob.clamp(0.0, 1.0);
    let lo = h as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / core::f64::consts::SQRT_2)
}

/// Ordinary least squares fit `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let (mx, my) = (mean(xs), mean(ys));
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LinearFit { slope, intercept: my - slope * mx, r_squared }
}

/// Mann-Kendall statistic `S = sum_{i<j} sign(x_j - x_i)`.
pub fn mann_kendall_s(xs: &[f64]) -> i64 {
    let mut s = 0i64;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            s += match xs[j].partial_cmp(&xs[i]) {
                Some(core::cmp::Ordering::Greater) => 1,
                Some(core::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    s
}

/// One-sided p-value for an increasing trend, `P(S >= s_obs)` under
/// exchangeability. Exact (Mahonian counts) up to 30 points, normal
/// approximation with continuity correction beyond.
pub fn mann_kendall_increasing_p(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 1.0;
    }
    let s = mann_kendall_s(xs);
    let pairs = (n * (n - 1) / 2) as i64;
    if n <= 30 {
        // S = pairs - 2 * inversions
        let counts = inversion_counts(n);
        let total: f64 = counts.iter().sum();
        let tail: f64 = counts
            .iter()
            .enumerate()
            .filter(|(inv, _)| pairs - 2 * *inv as i64 >= s)
            .map(|(_, c)| c)
            .sum();
        return tail / total;
    }
    let nf = n as f64;
    let var = nf * (nf - 1.0) * (2.0 * nf + 5.0) / 18.0;
    let z = (s as f64 - 1.0) / sqrt(var);
    1.0 - normal_cdf(z)
}

/// Number of permutations of `n` items with each inversion count.
fn inversion_counts(n: usize) -> Vec<f64> {
    let mut counts = vec![1.0];
    for k in 1..n {
        let mut next = vec![0.0; counts.len() + k];
        for (inv, c) in counts.iter().enumerate() {
            for add in 0..=k {
                next[inv + add] += c;
            }
        }
        counts = next;
    }
    counts
}
