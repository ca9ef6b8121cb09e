//! Flat-file output: CSV tables, `summary.json`, optional SVG plots and
//! trajectory snapshots.
//!
//! Floats are written as `{:.16e}` (17 significant digits), so every
//! value round-trips exactly and reruns produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use eigdyn_core::graph::{GraphTrajectory, TimeGrid};
use eigdyn_core::spectral::{eig_path, mu_star, SpectralConfig};
use eigdyn_core::theory::TheoryCurves;

use crate::campaign::CampaignSummary;
use crate::error::{Error, Result};
use crate::plot;

pub const MEAN_HEADER: &str = "n,t,mean,se,theory";
pub const COV_HEADER: &str = "n,t1,t2,cov_hat,se,theory";
pub const RESIDUAL_HEADER: &str = "n,replicate,residual,scaled_residual";
pub const TIGHTNESS_HEADER: &str = "n,r,s,t,lhs,se,bound,bound_sharp";
pub const BOUNDS_HEADER: &str = "n,statistic,k,rate,se,bound,max_ratio";
pub const NORMALITY_HEADER: &str = "n,t,skew,skew_se,excess_kurtosis,kurtosis_se";
pub const SPACING_HEADER: &str = "n,x,prob,se";
pub const THEORY_HEADER: &str = "n,t,p,q,mean_expansion,var_limit,cov_to_t0";

/// Files written by [`emit_results`], relative to the output directory.
pub const RESULT_FILES: [&str; 8] = [
    "summary.json",
    "mean.csv",
    "cov.csv",
    "residual.csv",
    "tightness.csv",
    "bounds.csv",
    "normality.csv",
    "spacing.csv",
];

pub fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

struct Table(String);

impl Table {
    fn new(header: &str) -> Self {
        Table(format!("{header}\n"))
    }

    fn row(&mut self, cells: &[String]) {
        self.0.push_str(&cells.join(","));
        self.0.push('\n');
    }
}

pub fn mean_csv(summary: &CampaignSummary) -> String {
    let mut t = Table::new(MEAN_HEADER);
    for s in &summary.sizes {
        for m in &s.mean {
            t.row(&[s.n.to_string(), f(m.t), f(m.mean), f(m.se), f(m.theory)]);
        }
    }
    t.0
}

pub fn cov_csv(summary: &CampaignSummary) -> String {
    let mut t = Table::new(COV_HEADER);
    for s in &summary.sizes {
        for c in s.covariance.iter().flat_map(|c| &c.entries) {
            t.row(&[s.n.to_string(), f(c.t1), f(c.t2), f(c.cov_hat), f(c.se), f(c.theory)]);
        }
    }
    t.0
}

pub fn residual_csv(summary: &CampaignSummary) -> String {
    let mut t = Table::new(RESIDUAL_HEADER);
    for s in &summary.sizes {
        for r in s.representation.iter().flat_map(|r| &r.records) {
            t.row(&[s.n.to_string(), r.replicate.to_string(), f(r.residual), f(r.scaled)]);
        }
    }
    t.0
}

pub fn tightness_csv(summary: &CampaignSummary) -> String {
    let mut t = Table::new(TIGHTNESS_HEADER);
    for s in &summary.sizes {
        for p in s.tightness.iter().flatten() {
            t.row(&[s.n.to_string(), f(p.r), f(p.s), f(p.t), f(p.lhs), f(p.se), f(p.bound), f(p.bound_sharp)]);
        }
    }
    t.0
}

pub fn bounds_csv(summary: &CampaignSummary) -> String {
    let mut t = Table::new(BOUNDS_HEADER);
    for s in &summary.sizes {
        let Some(b) = &s.bounds else { continue };
        let n = s.n.to_string();
        t.row(&[n.clone(), "norm".into(), String::new(), f(b.norm_rate), f(b.norm_se), f(b.norm_bound), f(b.max_norm / b.norm_bound)]);
        for q in &b.quad_forms {
            t.row(&[n.clone(), "quad_form".into(), q.k.to_string(), f(q.rate), f(q.se), f(q.bound), f(q.max_ratio)]);
        }
        t.row(&[n.clone(), "quad_form_any".into(), String::new(), f(b.quad_any_rate), f(b.quad_any_se), String::new(), String::new()]);
        t.row(&[n, "h2_mean".into(), String::new(), f(b.h2_mean), f(b.h2_se), f(b.h2_target), String::new()]);
    }
    t.0
}

pub fn normality_csv(summary: &CampaignSummary) -> String {
    let mut t = Table::new(NORMALITY_HEADER);
    for s in &summary.sizes {
        for p in s.normality.iter().flatten() {
            t.row(&[s.n.to_string(), f(p.t), f(p.skew), f(p.skew_se), f(p.excess_kurtosis), f(p.kurtosis_se)]);
        }
    }
    t.0
}

pub fn spacing_csv(summary: &CampaignSummary) -> String {
    let mut t = Table::new(SPACING_HEADER);
    for s in summary.spacing.iter().flatten() {
        for ((x, p), se) in s.x.iter().zip(&s.prob).zip(&s.se) {
            t.row(&[s.n.to_string(), f(*x), f(*p), f(*se)]);
        }
    }
    t.0
}

pub fn summary_json(summary: &CampaignSummary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}

/// Writes every result file (header-only when a check did not run) and,
/// when requested, the SVG overlays under `plots/`.
pub fn emit_results(summary: &CampaignSummary, dir: &Path, plots: bool) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let contents = [
        summary_json(summary),
        mean_csv(summary),
        cov_csv(summary),
        residual_csv(summary),
        tightness_csv(summary),
        bounds_csv(summary),
        normality_csv(summary),
        spacing_csv(summary),
    ];
    let mut written = Vec::new();
    for (name, body) in RESULT_FILES.iter().zip(contents) {
        let path = dir.join(name);
        write_file(&path, &body)?;
        written.push(path);
    }
    if plots {
        let pdir = dir.join("plots");
        create_dir(&pdir)?;
        for (name, svg) in plot::campaign_plots(summary) {
            let path = pdir.join(name);
            write_file(&path, &svg)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Theory curves on a grid for each vertex count.
pub fn theory_csv(theory: &TheoryCurves, n_list: &[usize], grid: &TimeGrid) -> Result<String> {
    let mut t = Table::new(THEORY_HEADER);
    let t0 = grid.points()[0];
    for &n in n_list {
        for &time in grid.points() {
            t.row(&[
                n.to_string(),
                f(time),
                f(theory.p(time)?),
                f(theory.q(time)?),
                f(theory.mean_expansion(n, time)?),
                f(theory.limit_cov(time, time)?),
                f(theory.limit_cov(t0, time)?),
            ]);
        }
    }
    Ok(t.0)
}

/// Dumps one trajectory: per-edge jump lists, the eigenvalue path and the
/// adjacency snapshot at every grid time.
pub fn write_snapshot(traj: &GraphTrajectory, grid: &TimeGrid, spectral: &SpectralConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let mut written = Vec::new();

    let mut jumps = Table::new("i,j,initial_state,jump,time");
    for ((i, j), path) in traj.edges() {
        let head = [i.to_string(), j.to_string(), path.initial_state().to_string()];
        if path.jump_times().is_empty() {
            jumps.row(&[head[0].clone(), head[1].clone(), head[2].clone(), String::new(), String::new()]);
        }
        for (k, &time) in path.jump_times().iter().enumerate() {
            jumps.row(&[head[0].clone(), head[1].clone(), head[2].clone(), k.to_string(), f(time)]);
        }
    }
    let path = dir.join("jumps.csv");
    write_file(&path, &jumps.0)?;
    written.push(path);

    let mut eig = Table::new("t,mu,mu_star,residual,iters");
    for r in eig_path(traj, grid, spectral)? {
        let time = r.t.unwrap_or_default();
        let star = mu_star(&r, traj.params(), time)?;
        eig.row(&[f(time), f(r.mu), f(star), f(r.residual), r.iters.to_string()]);
    }
    let path = dir.join("eigenvalues.csv");
    write_file(&path, &eig.0)?;
    written.push(path);

    for (k, &time) in grid.points().iter().enumerate() {
        let a = traj.adjacency_at(time)?;
        let mut body = String::from("row,col,value\n");
        for i in 0..a.n() {
            for j in 0..a.n() {
                let _ = writeln!(body, "{i},{j},{}", a.get(i, j) as u8);
            }
        }
        let path = dir.join(format!("adjacency_{k:03}.csv"));
        write_file(&path, &body)?;
        written.push(path);
    }
    Ok(written)
}
