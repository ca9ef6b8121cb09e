//! Replicate campaigns and their verdicts.
//!
//! Replicates run in parallel on a dedicated rayon pool and are collected
//! in replicate-index order, so every aggregate is bit-identical for any
//! thread count. Replicate `r` of vertex count `n` samples its graph from
//! the substreams keyed by `(seed, r, i, j)`.

use eigdyn_core::edge::EdgeParams;
use eigdyn_core::experiments::{
    bound_exceedance, bound_sample, estimate_centered_cov, mu_path, normality_diagnostics, BoundSample,
    TightnessAccumulator, Triple,
};
use eigdyn_core::graph::{sample_graph, TimeGrid};
use eigdyn_core::rng::{StreamKey, UniformSource};
use eigdyn_core::spectral::SpectralConfig;
use eigdyn_core::stats::{self, Estimate};
use eigdyn_core::theory::{representation_remainder_scale, TheoryCurves};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Check, RunConfig};
use crate::error::{Error, Result};

/// Replicate index reserved for auxiliary draws such as random triples.
const AUX_REPLICATE: u32 = u32::MAX;

/// Absolute slack on the mean band, alongside `3 se`.
pub const MEAN_ABS_SLACK: f64 = 0.05;
pub const SE_BAND: f64 = 3.0;
/// Fraction of grid points or pairs that must fall inside their band.
pub const BAND_COVERAGE: f64 = 0.9;
pub const TREND_ALPHA: f64 = 0.05;
pub const H2_SE_BAND: f64 = 4.0;
pub const SPACING_MIN_R2: f64 = 0.95;
/// Vertex count from which norm and quadratic-form exceedances must vanish
/// and shape diagnostics are expected to look Gaussian.
pub const ASYMPTOTIC_MIN_N: usize = 100;
/// Largest tail probability for which `P(spacing < x)` is still in its
/// linear regime.
pub const SPACING_MAX_TAIL: f64 = 0.5;

pub fn version() -> String {
    format!("v{}", env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanPoint {
    pub t: f64,
    pub mean: f64,
    pub se: f64,
    pub theory: f64,
    /// Mean of `mu(t) - S(t)` with `S` the centered edge sum, which has
    /// expectation zero; a lower-variance estimator of `E[mu(t)]`.
    pub cv_mean: f64,
    pub cv_se: f64,
    pub included: usize,
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovPoint {
    pub t1: f64,
    pub t2: f64,
    pub cov_hat: f64,
    pub se: f64,
    pub theory: f64,
    pub corr: f64,
    pub corr_se: f64,
    pub corr_theory: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagCorrelation {
    pub lag: f64,
    pub pairs: usize,
    pub corr: f64,
    pub se: f64,
    pub theory: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceSummary {
    pub replicates: usize,
    pub excluded: usize,
    pub entries: Vec<CovPoint>,
    /// Pooled correlations by lag, present for stationary starts.
    pub lag_correlations: Vec<LagCorrelation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityPoint {
    pub t: f64,
    pub skew: f64,
    pub skew_se: f64,
    pub excess_kurtosis: f64,
    pub kurtosis_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRecord {
    pub replicate: usize,
    pub residual: f64,
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentationSummary {
    pub centering_replicates: usize,
    pub residual_replicates: usize,
    pub excluded: usize,
    pub scale: f64,
    pub median_raw: f64,
    pub median_scaled: f64,
    pub p95_scaled: f64,
    pub records: Vec<ResidualRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessPoint {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub lhs: f64,
    pub se: f64,
    pub bound: f64,
    pub bound_sharp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadFormRate {
    pub k: usize,
    pub rate: f64,
    pub se: f64,
    pub bound: f64,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsSummary {
    pub replicates: usize,
    pub excluded: usize,
    pub norm_rate: f64,
    pub norm_se: f64,
    pub norm_bound: f64,
    pub max_norm: f64,
    pub quad_forms: Vec<QuadFormRate>,
    pub quad_any_rate: f64,
    pub quad_any_se: f64,
    /// Mean squared centered entry, target `1/N`.
    pub h2_mean: f64,
    pub h2_se: f64,
    pub h2_target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeSummary {
    pub n: usize,
    pub mean: Vec<MeanPoint>,
    pub covariance: Option<CovarianceSummary>,
    pub normality: Option<Vec<NormalityPoint>>,
    pub representation: Option<RepresentationSummary>,
    pub tightness: Option<Vec<TightnessPoint>>,
    pub bounds: Option<BoundsSummary>,
    /// Solver failures per grid point.
    pub exclusions: Vec<usize>,
    /// First few failure messages, for diagnosis.
    pub failure_samples: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacingSummary {
    pub n: usize,
    pub replicates: usize,
    pub x: Vec<f64>,
    pub prob: Vec<f64>,
    pub se: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub n: Option<usize>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub version: String,
    pub seed: u64,
    pub config: RunConfig,
    pub sizes: Vec<SizeSummary>,
    pub spacing: Option<Vec<SpacingSummary>>,
    pub verdicts: Vec<Verdict>,
}

impl CampaignSummary {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn size(&self, n: usize) -> Option<&SizeSummary> {
        self.sizes.iter().find(|s| s.n == n)
    }
}

struct Replicate {
    mu: Vec<Option<f64>>,
    failures: Vec<Option<String>>,
    edge_sums: Vec<f64>,
    bounds: Option<std::result::Result<BoundSample, String>>,
    h2: Option<f64>,
}

pub fn run_campaign(cfg: &RunConfig) -> Result<CampaignSummary> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    pool.install(|| run_in_pool(cfg))
}

fn run_in_pool(cfg: &RunConfig) -> Result<CampaignSummary> {
    let params = cfg.params()?;
    let grid = cfg.time_grid()?;
    let spectral = cfg.spectral();
    let theory = TheoryCurves::new(params);
    let triples = tightness_triples(cfg)?;

    let mut sizes = Vec::with_capacity(cfg.n.len());
    for &n in &cfg.n {
        sizes.push(run_size(cfg, n, &params, &grid, &spectral, &theory, &triples)?);
    }
    let spacing = if cfg.has(Check::Bounds) { Some(run_spacing(cfg, &params)?) } else { None };

    let mut summary = CampaignSummary {
        version: version(),
        seed: cfg.seed,
        config: cfg.experiment_echo(),
        sizes,
        spacing,
        verdicts: Vec::new(),
    };
    summary.verdicts = verdicts(&summary);
    Ok(summary)
}

fn tightness_triples(cfg: &RunConfig) -> Result<Vec<Triple>> {
    if !cfg.tightness.triples.is_empty() {
        return cfg
            .tightness
            .triples
            .iter()
            .map(|q| Triple::new(q[0], q[1], q[2]).map_err(Error::from))
            .collect();
    }
    let mut rng = StreamKey::new(cfg.seed, AUX_REPLICATE, 0, 0).stream();
    (0..cfg.tightness.random_triples)
        .map(|_| {
            let mut v = [0.0; 3].map(|_: f64| rng.next_uniform() * cfg.horizon);
            v.sort_by(f64::total_cmp);
            Triple::new(v[0], v[1], v[2]).map_err(Error::from)
        })
        .collect()
}

fn run_size(
    cfg: &RunConfig,
    n: usize,
    params: &EdgeParams,
    grid: &TimeGrid,
    spectral: &SpectralConfig,
    theory: &TheoryCurves,
    triples: &[Triple],
) -> Result<SizeSummary> {
    let need_eig = cfg.checks.iter().any(|c| c.needs_eigenvalues());
    let need_bounds = cfg.has(Check::Bounds);
    let g = grid.len();

    let reps: Vec<Replicate> = if need_eig || need_bounds {
        (0..cfg.replicates)
            .into_par_iter()
            .map(|r| -> Result<Replicate> {
                let traj = sample_graph(n, params, cfg.seed, r as u32, cfg.self_loops)?;
                let (mu, failures) = if need_eig {
                    mu_path(&traj, grid, spectral)
                        .into_iter()
                        .map(|res| match res {
                            Ok(v) => (Some(v), None),
                            Err(e) => (None, Some(e.to_string())),
                        })
                        .unzip()
                } else {
                    (vec![None; g], vec![None; g])
                };
                let edge_sums = traj.edge_sums_on(grid.points())?;
                let (bounds, h2) = if need_bounds {
                    let mut h2 = 0.0;
                    for &t in grid.points() {
                        h2 += traj.centered_matrix_at(t)?.mean_square_entry() / g as f64;
                    }
                    (Some(bound_sample(&traj, grid, spectral).map_err(|e| e.to_string())), Some(h2))
                } else {
                    (None, None)
                };
                Ok(Replicate { mu, failures, edge_sums, bounds, h2 })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let exclusions: Vec<usize> = (0..g).map(|j| reps.iter().filter(|r| r.mu[j].is_none()).count()).collect();
    let failure_samples: Vec<String> = reps
        .iter()
        .flat_map(|r| r.failures.iter().flatten().cloned())
        .chain(reps.iter().filter_map(|r| match &r.bounds {
            Some(Err(e)) => Some(e.clone()),
            _ => None,
        }))
        .take(5)
        .collect();

    let mean = if need_eig { mean_points(&reps, grid, theory, n)? } else { Vec::new() };
    let complete: Vec<usize> = (0..reps.len()).filter(|&r| reps[r].mu.iter().all(Option::is_some)).collect();
    let rows = |idx: &[usize]| -> Vec<Vec<f64>> {
        idx.iter().map(|&r| reps[r].mu.iter().map(|v| v.unwrap()).collect()).collect()
    };

    let covariance = if cfg.has(Check::FcltCov) { Some(covariance_summary(&rows(&complete), reps.len(), grid, params)?) } else { None };
    let normality = if cfg.has(Check::Normality) && complete.len() >= eigdyn_core::experiments::MIN_NORMALITY_REPLICATES {
        Some(
            normality_diagnostics(&rows(&complete))?
                .into_iter()
                .zip(grid.points())
                .map(|(d, &t)| NormalityPoint {
                    t,
                    skew: d.skew.value,
                    skew_se: d.skew.se,
                    excess_kurtosis: d.excess_kurtosis.value,
                    kurtosis_se: d.excess_kurtosis.se,
                })
                .collect(),
        )
    } else {
        None
    };
    let representation = if cfg.has(Check::Representation) { Some(representation_summary(&reps, n)?) } else { None };
    let tightness = if cfg.has(Check::Tightness) { Some(tightness_points(cfg, n, params, theory, triples)?) } else { None };
    let bounds = if need_bounds { bounds_summary(&reps, theory, n)? } else { None };

    Ok(SizeSummary { n, mean, covariance, normality, representation, tightness, bounds, exclusions, failure_samples })
}

fn mean_points(reps: &[Replicate], grid: &TimeGrid, theory: &TheoryCurves, n: usize) -> Result<Vec<MeanPoint>> {
    grid.points()
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let mu: Vec<f64> = reps.iter().filter_map(|r| r.mu[j]).collect();
            let cv: Vec<f64> = reps.iter().filter_map(|r| r.mu[j].map(|m| m - r.edge_sums[j])).collect();
            let plain = stats::mean_estimate(&mu);
            let controlled = stats::mean_estimate(&cv);
            Ok(MeanPoint {
                t,
                mean: plain.value,
                se: plain.se,
                theory: theory.mean_expansion(n, t)?,
                cv_mean: controlled.value,
                cv_se: controlled.se,
                included: mu.len(),
                excluded: reps.len() - mu.len(),
            })
        })
        .collect()
}

fn is_stationary(params: &EdgeParams) -> bool {
    (params.p0() - params.rho()).abs() <= 1e-12
}

fn covariance_summary(rows: &[Vec<f64>], total: usize, grid: &TimeGrid, params: &EdgeParams) -> Result<CovarianceSummary> {
    let theory = TheoryCurves::new(*params);
    let cov = estimate_centered_cov(rows)?;
    let pts = grid.points();
    let g = pts.len();
    let columns: Vec<Vec<f64>> = (0..g).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut entries = Vec::with_capacity(g * (g + 1) / 2);
    for j in 0..g {
        for k in j..g {
            let e = cov.get(j, k);
            let corr = stats::correlation_estimate(&columns[j], &columns[k]);
            entries.push(CovPoint {
                t1: pts[j],
                t2: pts[k],
                cov_hat: e.value,
                se: e.se,
                theory: theory.limit_cov(pts[j], pts[k])?,
                corr: corr.value,
                corr_se: corr.se,
                corr_theory: theory.limit_corr(pts[j], pts[k])?,
            });
        }
    }

    let mut lag_correlations = Vec::new();
    if is_stationary(params) {
        let mut lags: Vec<f64> = Vec::new();
        for j in 0..g {
            for k in j + 1..g {
                let d = pts[k] - pts[j];
                if !lags.iter().any(|&l| (l - d).abs() <= 1e-9) {
                    lags.push(d);
                }
            }
        }
        lags.sort_by(f64::total_cmp);
        for lag in lags {
            let pairs: Vec<(usize, usize)> = (0..g)
                .flat_map(|j| (j + 1..g).map(move |k| (j, k)))
                .filter(|&(j, k)| (pts[k] - pts[j] - lag).abs() <= 1e-9)
                .collect();
            let m = pairs.len() as f64;
            let value = pairs.iter().map(|&(j, k)| stats::correlation_estimate(&columns[j], &columns[k]).value).sum::<f64>() / m;
            let mut loo = vec![0.0; rows.len()];
            for &(j, k) in &pairs {
                for (acc, v) in loo.iter_mut().zip(stats::correlation_leave_one_out(&columns[j], &columns[k])) {
                    *acc += v / m;
                }
            }
            lag_correlations.push(LagCorrelation {
                lag,
                pairs: pairs.len(),
                corr: value,
                se: stats::jackknife_se(&loo),
                theory: eigdyn_core::theory::stationary_corr(params, lag),
            });
        }
    }
    Ok(CovarianceSummary { replicates: rows.len(), excluded: total - rows.len(), entries, lag_correlations })
}

/// Split-sample residuals: the first half of the replicates estimates
/// `E[mu(t)]`, the second half supplies the residual paths.
fn representation_summary(reps: &[Replicate], n: usize) -> Result<RepresentationSummary> {
    let half = reps.len() / 2;
    let complete = |r: &Replicate| r.mu.iter().all(Option::is_some);
    let centering: Vec<&Replicate> = reps[..half].iter().filter(|r| complete(r)).collect();
    if centering.len() < 2 {
        return Err(eigdyn_core::Error::TooFewSamples { needed: 2, got: centering.len() }.into());
    }
    let g = reps[0].mu.len();
    let centre: Vec<f64> = (0..g)
        .map(|j| stats::mean(&centering.iter().map(|r| r.mu[j].unwrap() - r.edge_sums[j]).collect::<Vec<_>>()))
        .collect();
    let scale = representation_remainder_scale(n.max(2))?;
    let mut records = Vec::new();
    let mut excluded = half - centering.len();
    for (idx, r) in reps.iter().enumerate().skip(half) {
        if !complete(r) {
            excluded += 1;
            continue;
        }
        let mu: Vec<f64> = r.mu.iter().map(|v| v.unwrap()).collect();
        let residual = eigdyn_core::experiments::residual_from_values(&mu, &centre, &r.edge_sums)?;
        records.push(ResidualRecord { replicate: idx, residual, scaled: residual / scale });
    }
    let raw: Vec<f64> = records.iter().map(|r| r.residual).collect();
    let scaled: Vec<f64> = records.iter().map(|r| r.scaled).collect();
    Ok(RepresentationSummary {
        centering_replicates: centering.len(),
        residual_replicates: records.len(),
        excluded,
        scale,
        median_raw: stats::median(&raw),
        median_scaled: stats::median(&scaled),
        p95_scaled: stats::quantile(&scaled, 0.95),
        records,
    })
}

fn tightness_points(
    cfg: &RunConfig,
    n: usize,
    params: &EdgeParams,
    theory: &TheoryCurves,
    triples: &[Triple],
) -> Result<Vec<TightnessPoint>> {
    let mut acc = TightnessAccumulator::new(triples.to_vec());
    let products: Vec<Vec<f64>> = (0..cfg.tightness.batch)
        .into_par_iter()
        .map(|r| -> Result<Vec<f64>> {
            let traj = sample_graph(n, params, cfg.seed, r as u32, cfg.self_loops)?;
            Ok(acc.products(&traj)?)
        })
        .collect::<Result<Vec<_>>>()?;
    for v in &products {
        acc.push_products(v);
    }
    acc.finish()
        .into_iter()
        .zip(triples)
        .map(|(e, q)| {
            Ok(TightnessPoint {
                r: q.r,
                s: q.s,
                t: q.t,
                lhs: e.value,
                se: e.se,
                bound: theory.tightness_bound(q.r, q.t)?,
                bound_sharp: theory.tightness_bound_sharp(q.r, q.t)?,
            })
        })
        .collect()
}

fn bounds_summary(reps: &[Replicate], theory: &TheoryCurves, n: usize) -> Result<Option<BoundsSummary>> {
    let samples: Vec<BoundSample> = reps
        .iter()
        .filter_map(|r| match &r.bounds {
            Some(Ok(s)) => Some(s.clone()),
            _ => None,
        })
        .collect();
    if samples.is_empty() {
        return Ok(None);
    }
    let rates = bound_exceedance(&samples, theory, n)?;
    let h2: Vec<f64> = reps.iter().filter_map(|r| r.h2).collect();
    let h2e = stats::mean_estimate(&h2);
    Ok(Some(BoundsSummary {
        replicates: samples.len(),
        excluded: reps.len() - samples.len(),
        norm_rate: rates.norm.value,
        norm_se: rates.norm.se,
        norm_bound: rates.norm_bound,
        max_norm: rates.max_norm,
        quad_forms: rates
            .quad_form
            .iter()
            .enumerate()
            .map(|(k, e)| QuadFormRate {
                k,
                rate: e.value,
                se: e.se,
                bound: theory.quad_form_bound(n, k),
                max_ratio: rates.max_quad_ratio[k],
            })
            .collect(),
        quad_any_rate: rates.quad_form_any.value,
        quad_any_se: rates.quad_form_any.se,
        h2_mean: h2e.value,
        h2_se: h2e.se,
        h2_target: 1.0 / n as f64,
    }))
}

fn run_spacing(cfg: &RunConfig, params: &EdgeParams) -> Result<Vec<SpacingSummary>> {
    let x = &cfg.spacing.x;
    cfg.spacing
        .n
        .iter()
        .map(|&n| {
            let spacings: Vec<f64> = (0..cfg.spacing.replicates)
                .into_par_iter()
                .map(|r| Ok(sample_graph(n, params, cfg.seed, r as u32, cfg.self_loops)?.min_jump_spacing()))
                .collect::<Result<Vec<_>>>()?;
            let total = spacings.len() as f64;
            let prob: Vec<f64> = x.iter().map(|&xv| spacings.iter().filter(|&&s| s < xv).count() as f64 / total).collect();
            let se = prob.iter().map(|p| (p * (1.0 - p) / total).sqrt()).collect();
            let fit = stats::linear_fit(x, &prob);
            Ok(SpacingSummary {
                n,
                replicates: spacings.len(),
                x: x.clone(),
                prob,
                se,
                slope: fit.slope,
                intercept: fit.intercept,
                r_squared: fit.r_squared,
            })
        })
        .collect()
}

fn verdict(check: &str, n: Option<usize>, passed: bool, detail: String) -> Verdict {
    Verdict { check: check.to_string(), n, passed, detail }
}

fn count_within<I: IntoIterator<Item = bool>>(it: I) -> (usize, usize) {
    it.into_iter().fold((0, 0), |(a, b), ok| (a + usize::from(ok), b + 1))
}

fn verdicts(summary: &CampaignSummary) -> Vec<Verdict> {
    let cfg = &summary.config;
    let mut out = Vec::new();
    let mut by_n: Vec<&SizeSummary> = summary.sizes.iter().collect();
    by_n.sort_by_key(|s| s.n);

    for s in &by_n {
        if cfg.has(Check::Mean) {
            let (ok, total) = count_within(
                s.mean.iter().map(|m| (m.mean - m.theory).abs() <= (SE_BAND * m.se).max(MEAN_ABS_SLACK)),
            );
            out.push(verdict("mean", Some(s.n), ok == total, format!("{ok}/{total} grid points within max(3 se, {MEAN_ABS_SLACK})")));
        }
        if let Some(c) = &s.covariance {
            let (ok, total) = count_within(c.entries.iter().map(|e| Estimate::new(e.cov_hat, e.se).within(e.theory, SE_BAND)));
            let frac = ok as f64 / total as f64;
            out.push(verdict("fclt_cov", Some(s.n), frac >= BAND_COVERAGE, format!("{ok}/{total} pairs within 3 se")));
            if !c.lag_correlations.is_empty() {
                let (ok, total) = count_within(c.lag_correlations.iter().map(|l| Estimate::new(l.corr, l.se).within(l.theory, SE_BAND)));
                out.push(verdict("lag_correlation", Some(s.n), ok == total, format!("{ok}/{total} lags within 3 se")));
            }
        }
        if let Some(pts) = &s.normality {
            if s.n >= ASYMPTOTIC_MIN_N {
                let (ok, total) = count_within(pts.iter().map(|p| {
                    p.skew.abs() <= SE_BAND * p.skew_se && p.excess_kurtosis.abs() <= SE_BAND * p.kurtosis_se
                }));
                out.push(verdict(
                    "normality",
                    Some(s.n),
                    ok as f64 >= BAND_COVERAGE * total as f64,
                    format!("{ok}/{total} grid points with |skew|, |kurtosis| <= 3 se"),
                ));
            }
        }
        if let Some(pts) = &s.tightness {
            let ok = pts.iter().filter(|p| p.lhs <= p.bound + SE_BAND * p.se).count();
            let sharp = pts.iter().filter(|p| p.lhs <= p.bound_sharp + SE_BAND * p.se).count();
            out.push(verdict(
                "tightness",
                Some(s.n),
                ok == pts.len() && sharp == pts.len(),
                format!("{ok}/{} below (35 kappa (t-r))^2 + 3 se, {sharp}/{} below 1176 kappa^2 (t-r)^2 + 3 se", pts.len(), pts.len()),
            ));
        }
        if let Some(b) = &s.bounds {
            let h2_ok = (b.h2_mean - b.h2_target).abs() <= H2_SE_BAND * b.h2_se + 1e-12 * b.h2_target;
            out.push(verdict(
                "entry_second_moment",
                Some(s.n),
                h2_ok,
                format!("mean h^2 = {:.6e} +- {:.2e}, target {:.6e}", b.h2_mean, b.h2_se, b.h2_target),
            ));
            if s.n >= ASYMPTOTIC_MIN_N {
                out.push(verdict(
                    "norm_bound",
                    Some(s.n),
                    b.norm_rate == 0.0,
                    format!("exceedance rate {} (max norm {:.4} vs bound {:.4})", b.norm_rate, b.max_norm, b.norm_bound),
                ));
                out.push(verdict(
                    "quad_form_bound",
                    Some(s.n),
                    b.quad_any_rate == 0.0,
                    format!("exceedance rate {}", b.quad_any_rate),
                ));
            }
        }
    }

    if by_n.len() >= 2 {
        let (lo, hi) = (by_n[0], by_n[by_n.len() - 1]);
        if cfg.has(Check::Mean) && !lo.mean.is_empty() {
            let bias = |s: &SizeSummary| stats::median(&s.mean.iter().map(|m| (m.cv_mean - m.theory).abs()).collect::<Vec<_>>());
            let (a, b) = (bias(lo), bias(hi));
            out.push(verdict(
                "mean_trend",
                None,
                b < a,
                format!("median |E mu - expansion|: {a:.3e} at n={} vs {b:.3e} at n={}", lo.n, hi.n),
            ));
        }
        let reps: Vec<(usize, &RepresentationSummary)> =
            by_n.iter().filter_map(|s| s.representation.as_ref().map(|r| (s.n, r))).collect();
        if reps.len() >= 2 {
            let scaled: Vec<f64> = reps.iter().map(|(_, r)| r.median_scaled).collect();
            let p = stats::mann_kendall_increasing_p(&scaled);
            let raw_decreasing = reps.windows(2).all(|w| w[1].1.median_raw < w[0].1.median_raw);
            out.push(verdict(
                "representation",
                None,
                p > TREND_ALPHA && raw_decreasing,
                format!(
                    "scaled medians {scaled:?} (Mann-Kendall p = {p:.3}); raw medians {:?}",
                    reps.iter().map(|(_, r)| r.median_raw).collect::<Vec<_>>()
                ),
            ));
        }
        let bounds: Vec<&BoundsSummary> = by_n.iter().filter_map(|s| s.bounds.as_ref()).collect();
        if bounds.len() >= 2 {
            let ok = bounds.windows(2).all(|w| w[1].norm_rate <= w[0].norm_rate && w[1].quad_any_rate <= w[0].quad_any_rate);
            out.push(verdict("bound_trend", None, ok, "exceedance rates non-increasing in n".to_string()));
        }
    }

    if let Some(spacing) = &summary.spacing {
        for s in spacing {
            let max_tail = s.prob.iter().copied().fold(0.0, f64::max);
            if max_tail <= SPACING_MAX_TAIL && max_tail > 0.0 {
                out.push(verdict(
                    "spacing_linearity",
                    Some(s.n),
                    s.r_squared >= SPACING_MIN_R2,
                    format!("R^2 = {:.4}, slope {:.4e}", s.r_squared, s.slope),
                ));
            }
        }
        let mut sorted: Vec<&SpacingSummary> = spacing.iter().collect();
        sorted.sort_by_key(|s| s.n);
        if sorted.len() >= 2 {
            let ok = sorted.windows(2).all(|w| w[0].prob.iter().zip(&w[1].prob).all(|(a, b)| b >= a));
            out.push(verdict("spacing_growth", None, ok, "P(spacing < x) non-decreasing in n".to_string()));
        }
    }
    out
}
