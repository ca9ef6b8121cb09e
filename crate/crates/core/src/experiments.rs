//! Estimators for Monte Carlo campaigns over replicate trajectories.
//!
//! Everything here is sequential and deterministic; parallel drivers
//! feed replicates in index order.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;

use crate::error::{domain, Error, Result};
use crate::graph::{GraphTrajectory, TimeGrid};
use crate::spectral::{
    default_truncation, principal_eig, quadratic_form_powers, spectral_norm, SpectralConfig,
};
use crate::stats::{self, Estimate};
use crate::theory::TheoryCurves;

/// Smallest replicate count accepted by [`normality_diagnostics`].
pub const MIN_NORMALITY_REPLICATES: usize = 50;

/// Principal eigenvalue at each grid point, keeping per-point failures.
/// A failure resets the warm start for the next point.
pub fn mu_path(
    traj: &GraphTrajectory,
    grid: &TimeGrid,
    config: &SpectralConfig,
) -> Vec<Result<f64>> {
    let mut warm: Option<Vec<f64>> = None;
    grid.points()
        .iter()
        .map(|&t| {
            let a = traj.adjacency_at(t)?;
            let w = if config.warm_start { warm.as_deref() } else { None };
            match principal_eig(&a, config, w) {
                Ok(res) => {
                    let mu = res.mu;
                    warm = Some(res.vector);
                    Ok(mu)
                }
                Err(e) => {
                    warm = None;
                    Err(e)
                }
            }
        })
        .collect()
}

/// Sample covariance matrix of grid values across replicates with
/// jackknife standard errors, stored row-major `g x g`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    pub size: usize,
    pub values: Vec<f64>,
    pub se: Vec<f64>,
}

impl CovarianceEstimate {
    pub fn get(&self, j: usize, k: usize) -> Estimate {
        let idx = j * self.size + k;
        Estimate::new(self.values[idx], self.se[idx])
    }
}

/// `C(j,k) = sum_r (x_rj - mean_j)(x_rk - mean_k) / (R - 1)` over rows
/// `samples[r]`.
pub fn estimate_centered_cov(samples: &[Vec<f64>]) -> Result<CovarianceEstimate> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: samples.len() });
    }
    let g = samples[0].len();
    if samples.iter().any(|row| row.len() != g) {
        return Err(domain("replicate rows have different lengths"));
    }
    let columns: Vec<Vec<f64>> = (0..g).map(|j| samples.iter().map(|row| row[j]).collect()).collect();
    let mut values = vec![0.0; g * g];
    let mut se = vec![0.0; g * g];
    for j in 0..g {
        for k in j..g {
            let e = stats::covariance_estimate(&columns[j], &columns[k]);
            for idx in [j * g + k, k * g + j] {
                values[idx] = e.value;
                se[idx] = e.se;
            }
        }
    }
    Ok(CovarianceEstimate { size: g, values, se })
}

/// `sup_t |mu(t) - mean(t) - edge_sum(t)|` from precomputed grid values.
pub fn residual_from_values(mu: &[f64], mean: &[f64], edge_sums: &[f64]) -> Result<f64> {
    if mu.len() != mean.len() || mu.len() != edge_sums.len() {
        return Err(domain("residual inputs must share the grid length"));
    }
    Ok(mu
        .iter()
        .zip(mean)
        .zip(edge_sums)
        .map(|((m, c), s)| (m - c - s).abs())
        .fold(0.0, f64::max))
}

/// Sup-residual of the edge-sum representation for one trajectory.
/// `mean` must come from replicates independent of `traj`.
pub fn representation_residual(
    traj: &GraphTrajectory,
    mean: &[f64],
    grid: &TimeGrid,
    config: &SpectralConfig,
) -> Result<f64> {
    let mu = mu_path(traj, grid, config).into_iter().collect::<Result<Vec<f64>>>()?;
    let sums = traj.edge_sums_on(grid.points())?;
    residual_from_values(&mu, mean, &sums)
}

/// Time triple `r <= s <= t` for the increment moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple {
    pub r: f64,
    pub s: f64,
    pub t: f64,
}

impl Triple {
    pub fn new(r: f64, s: f64, t: f64) -> Result<Self> {
        if !(0.0 <= r && r <= s && s <= t) {
            return Err(domain(format!("need 0 <= r <= s <= t, got ({r}, {s}, {t})")));
        }
        Ok(Self { r, s, t })
    }
}

/// Streaming estimate of `E[|D(r,s)|^2 |D(s,t)|^2]` where
/// `D(s,t) = (1/N) sum_{i<=j} X_ij(s,t)` equals the difference of
/// centered edge sums.
#[derive(Debug, Clone)]
pub struct TightnessAccumulator {
    triples: Vec<Triple>,
    times: Vec<f64>,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    count: usize,
}

impl TightnessAccumulator {
    pub fn new(triples: Vec<Triple>) -> Self {
        let mut times: Vec<f64> = triples.iter().flat_map(|q| [q.r, q.s, q.t]).collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        let k = triples.len();
        Self { triples, times, sum: vec![0.0; k], sum_sq: vec![0.0; k], count: 0 }
    }

    pub fn push(&mut self, traj: &GraphTrajectory) -> Result<()> {
        let v = self.products(traj)?;
        self.push_products(&v);
        Ok(())
    }

    /// `|D(r,s)|^2 |D(s,t)|^2` per triple for one trajectory, without
    /// accumulating; lets parallel callers fix the summation order.
    pub fn products(&self, traj: &GraphTrajectory) -> Result<Vec<f64>> {
        let sums = traj.edge_sums_on(&self.times)?;
        let at = |x: f64| sums[self.times.partition_point(|&u| u < x)];
        Ok(self
            .triples
            .iter()
            .map(|q| {
                let a = at(q.s) - at(q.r);
                let b = at(q.t) - at(q.s);
                a * a * b * b
            })
            .collect())
    }

    pub fn push_products(&mut self, values: &[f64]) {
        for (k, v) in values.iter().enumerate() {
            self.sum[k] += v;
            self.sum_sq[k] += v * v;
        }
        self.count += 1;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// Mean per triple with standard error `sd / sqrt(count)`.
    pub fn finish(&self) -> Vec<Estimate> {
        let n = self.count as f64;
        self.sum
            .iter()
            .zip(&self.sum_sq)
            .map(|(s, s2)| {
                let m = s / n;
                let var = ((s2 - n * m * m) / (n - 1.0)).max(0.0);
                Estimate::new(m, sqrt(var / n))
            })
            .collect()
    }
}

/// Empirical increment moment for a single triple.
pub fn tightness_moment_lhs<'a>(
    batch: impl IntoIterator<Item = &'a GraphTrajectory>,
    r: f64,
    s: f64,
    t: f64,
) -> Result<Estimate> {
    let mut acc = TightnessAccumulator::new(vec![Triple::new(r, s, t)?]);
    for traj in batch {
        acc.push(traj)?;
    }
    if acc.count() == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    Ok(acc.finish()[0])
}

/// Per-replicate inputs for the high-probability bound checks.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSample {
    /// `||H(t)||` per grid point.
    pub norms: Vec<f64>,
    /// `<e, H(t)^k e>` for `k = 0..=K` per grid point.
    pub quad_forms: Vec<Vec<f64>>,
}

/// Norms and quadratic forms of the centered matrix along the grid, with
/// `K = ceil(ln N)`.
pub fn bound_sample(
    traj: &GraphTrajectory,
    grid: &TimeGrid,
    config: &SpectralConfig,
) -> Result<BoundSample> {
    let k = default_truncation(traj.n());
    let mut norms = Vec::with_capacity(grid.len());
    let mut quad_forms = Vec::with_capacity(grid.len());
    for &t in grid.points() {
        let h = traj.centered_matrix_at(t)?;
        norms.push(spectral_norm(&h, config)?);
        quad_forms.push(quadratic_form_powers(&h, k)?);
    }
    Ok(BoundSample { norms, quad_forms })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceRates {
    /// Fraction of replicates with `sup_t ||H(t)||` above the norm bound.
    pub norm: Estimate,
    /// Per `k`: fraction with some `t` where the deviation of
    /// `<e, H^k e>` from its cross-replicate mean reaches the bound.
    pub quad_form: Vec<Estimate>,
    /// Fraction with any quadratic-form exceedance.
    pub quad_form_any: Estimate,
    pub norm_bound: f64,
    pub max_norm: f64,
    /// Largest observed deviation divided by its bound, per `k`.
    pub max_quad_ratio: Vec<f64>,
}

fn rate(hits: usize, total: usize) -> Estimate {
    let r = hits as f64 / total as f64;
    Estimate::new(r, sqrt(r * (1.0 - r) / total as f64))
}

/// Exceedance frequencies of the norm and quadratic-form bounds.
pub fn bound_exceedance(samples: &[BoundSample], theory: &TheoryCurves, n: usize) -> Result<ExceedanceRates> {
    let reps = samples.len();
    if reps == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let g = samples[0].norms.len();
    let kk = samples[0].quad_forms.first().map_or(0, |q| q.len());
    if samples.iter().any(|s| s.norms.len() != g || s.quad_forms.len() != g || s.quad_forms.iter().any(|q| q.len() != kk)) {
        return Err(domain("bound samples have inconsistent shapes"));
    }
    let norm_bound = theory.norm_bound(n);
    let sups: Vec<f64> = samples.iter().map(|s| s.norms.iter().copied().fold(0.0, f64::max)).collect();
    let norm_hits = sups.iter().filter(|&&v| v > norm_bound).count();

    let mut centre = vec![vec![0.0; kk]; g];
    for s in samples {
        for (c, q) in centre.iter_mut().zip(&s.quad_forms) {
            c.iter_mut().zip(q).for_each(|(a, b)| *a += b / reps as f64);
        }
    }
    let bounds: Vec<f64> = (0..kk).map(|k| theory.quad_form_bound(n, k)).collect();
    let mut hits = vec![0usize; kk];
    let mut any = 0usize;
    let mut max_ratio = vec![0.0f64; kk];
    for s in samples {
        let mut hit_any = false;
        for k in 0..kk {
            let dev = s.quad_forms.iter().zip(&centre).map(|(q, c)| (q[k] - c[k]).abs()).fold(0.0, f64::max);
            max_ratio[k] = max_ratio[k].max(dev / bounds[k]);
            // k = 0 is identically 1, so its deviation is exactly 0
            if k > 0 && dev >= bounds[k] {
                hits[k] += 1;
                hit_any = true;
            }
        }
        any += usize::from(hit_any);
    }
    Ok(ExceedanceRates {
        norm: rate(norm_hits, reps),
        quad_form: hits.iter().map(|&h| rate(h, reps)).collect(),
        quad_form_any: rate(any, reps),
        norm_bound,
        max_norm: sups.iter().copied().fold(0.0, f64::max),
        max_quad_ratio: max_ratio,
    })
}

/// Skewness and excess kurtosis per grid column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normality {
    pub skew: Estimate,
    pub excess_kurtosis: Estimate,
}

/// Shape diagnostics of each column of `samples` (rows are replicates).
pub fn normality_diagnostics(samples: &[Vec<f64>]) -> Result<Vec<Normality>> {
    if samples.len() < MIN_NORMALITY_REPLICATES {
        return Err(Error::TooFewSamples { needed: MIN_NORMALITY_REPLICATES, got: samples.len() });
    }
    let g = samples[0].len();
    if samples.iter().any(|row| row.len() != g) {
        return Err(domain("replicate rows have different lengths"));
    }
    Ok((0..g)
        .map(|j| {
            let col: Vec<f64> = samples.iter().map(|row| row[j]).collect();
            let (skew, excess_kurtosis) = stats::shape_estimates(&col);
            Normality { skew, excess_kurtosis }
        })
        .collect())
}
