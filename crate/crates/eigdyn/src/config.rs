//! JSON run configuration.
//!
//! Only `n`, `lambda_on`, `lambda_off`, `p0`, `T` and `grid` are
//! required; every other key has a default. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use eigdyn_core::edge::EdgeParams;
use eigdyn_core::graph::TimeGrid;
use eigdyn_core::spectral::SpectralConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Mean,
    FcltCov,
    Representation,
    Normality,
    Tightness,
    Bounds,
}

impl Check {
    pub const ALL: [Check; 6] =
        [Check::Mean, Check::FcltCov, Check::Representation, Check::Normality, Check::Tightness, Check::Bounds];

    pub fn name(self) -> &'static str {
        match self {
            Check::Mean => "mean",
            Check::FcltCov => "fclt_cov",
            Check::Representation => "representation",
            Check::Normality => "normality",
            Check::Tightness => "tightness",
            Check::Bounds => "bounds",
        }
    }

    /// Whether the check needs principal eigenvalues along the grid.
    pub fn needs_eigenvalues(self) -> bool {
        matches!(self, Check::Mean | Check::FcltCov | Check::Representation | Check::Normality)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TightnessConfig {
    /// Explicit `[r, s, t]` triples; when empty, `random_triples` are
    /// drawn uniformly from the horizon with `seed`.
    #[serde(default)]
    pub triples: Vec<[f64; 3]>,
    #[serde(default = "default_random_triples")]
    pub random_triples: usize,
    /// Trajectories per vertex count.
    #[serde(default = "default_tightness_batch")]
    pub batch: usize,
}

impl Default for TightnessConfig {
    fn default() -> Self {
        Self { triples: Vec::new(), random_triples: default_random_triples(), batch: default_tightness_batch() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacingConfig {
    #[serde(default = "default_spacing_n")]
    pub n: Vec<usize>,
    #[serde(default = "default_spacing_replicates")]
    pub replicates: usize,
    #[serde(default = "default_spacing_x")]
    pub x: Vec<f64>,
}

impl Default for SpacingConfig {
    fn default() -> Self {
        Self { n: default_spacing_n(), replicates: default_spacing_replicates(), x: default_spacing_x() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: Vec<usize>,
    pub lambda_on: f64,
    pub lambda_off: f64,
    pub p0: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub grid: Vec<f64>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
    #[serde(default = "yes")]
    pub self_loops: bool,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "yes")]
    pub warm_start: bool,
    #[serde(default)]
    pub tightness: TightnessConfig,
    #[serde(default)]
    pub spacing: SpacingConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub emit_plots: bool,
    /// Worker threads; 0 picks the number of available cores.
    #[serde(default)]
    pub threads: usize,
}

fn yes() -> bool {
    true
}
fn default_replicates() -> usize {
    200
}
fn default_checks() -> Vec<Check> {
    Check::ALL.to_vec()
}
fn default_rel_tol() -> f64 {
    1e-10
}
fn default_max_iters() -> usize {
    100_000
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_random_triples() -> usize {
    20
}
fn default_tightness_batch() -> usize {
    10_000
}
fn default_spacing_n() -> Vec<usize> {
    vec![4, 8]
}
fn default_spacing_replicates() -> usize {
    200_000
}
fn default_spacing_x() -> Vec<f64> {
    vec![1e-5, 2e-5, 3e-5, 4e-5, 5e-5]
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: vec![100],
            lambda_on: 1.0,
            lambda_off: 1.0,
            p0: 0.5,
            horizon: 2.0,
            grid: vec![0.0, 0.5, 1.0, 1.5, 2.0],
            replicates: default_replicates(),
            seed: 0,
            checks: default_checks(),
            self_loops: true,
            rel_tol: default_rel_tol(),
            max_iters: default_max_iters(),
            warm_start: true,
            tightness: TightnessConfig::default(),
            spacing: SpacingConfig::default(),
            output_dir: default_output_dir(),
            emit_plots: false,
            threads: 0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::Config(format!("{key}: {msg}")));
        if self.n.is_empty() {
            return bad("n", "at least one vertex count is required".into());
        }
        if self.n.contains(&0) {
            return bad("n", "vertex counts must be >= 1".into());
        }
        self.params().map_err(|e| Error::Config(e.to_string()))?;
        if self.grid.is_empty() {
            return bad("grid", "at least one time point is required".into());
        }
        self.time_grid().map_err(|e| Error::Config(format!("grid: {e}")))?;
        if self.replicates < 2 {
            return bad("replicates", format!("need at least 2, got {}", self.replicates));
        }
        if self.checks.is_empty() {
            return bad("checks", "at least one check is required".into());
        }
        self.spectral().validate().map_err(|e| Error::Config(e.to_string()))?;
        for q in &self.tightness.triples {
            if !(0.0 <= q[0] && q[0] <= q[1] && q[1] <= q[2] && q[2] <= self.horizon) {
                return bad("tightness.triples", format!("need 0 <= r <= s <= t <= T, got {q:?}"));
            }
        }
        if self.tightness.triples.is_empty() && self.tightness.random_triples == 0 {
            return bad("tightness.random_triples", "need explicit triples or a positive count".into());
        }
        if self.tightness.batch < 2 {
            return bad("tightness.batch", format!("need at least 2, got {}", self.tightness.batch));
        }
        if self.spacing.n.contains(&0) || self.spacing.replicates < 2 {
            return bad("spacing", "vertex counts must be >= 1 and replicates >= 2".into());
        }
        if self.spacing.x.iter().any(|&x| !(x > 0.0)) {
            return bad("spacing.x", "spacings must be positive".into());
        }
        Ok(())
    }

    pub fn params(&self) -> eigdyn_core::Result<EdgeParams> {
        EdgeParams::new(self.lambda_on, self.lambda_off, self.p0, self.horizon)
    }

    pub fn time_grid(&self) -> eigdyn_core::Result<TimeGrid> {
        TimeGrid::new(self.grid.clone(), self.horizon)
    }

    pub fn spectral(&self) -> SpectralConfig {
        SpectralConfig { rel_tol: self.rel_tol, max_iters: self.max_iters, warm_start: self.warm_start }
    }

    /// The configuration with execution-only settings (`threads`,
    /// `output_dir`) reset to their defaults, so results do not depend on
    /// where or how wide a run was.
    pub fn experiment_echo(&self) -> RunConfig {
        RunConfig { threads: 0, output_dir: default_output_dir(), ..self.clone() }
    }

    pub fn has(&self, check: Check) -> bool {
        self.checks.contains(&check)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"n":[100],"lambda_on":1,"lambda_off":1,"p0":0.5,"T":2,"grid":[0,0.5,1,1.5,2]}"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.replicates, 200);
        assert_eq!(cfg.rel_tol, 1e-10);
        assert!(cfg.self_loops && cfg.warm_start);
        assert_eq!(cfg.checks.len(), 6);
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn rejects_out_of_domain_values() {
        let err = RunConfig::from_json(&MINIMAL.replace("\"p0\":0.5", "\"p0\":1.0")).unwrap_err();
        assert!(err.to_string().contains("p0 must lie in (0,1)"), "{err}");
        assert!(RunConfig::from_json(&MINIMAL.replace("\"lambda_on\":1", "\"lambda_on\":-1")).is_err());
        assert!(RunConfig::from_json(&MINIMAL.replace("[0,0.5,1,1.5,2]", "[0,3]")).is_err());
        assert!(RunConfig::from_json(&MINIMAL.replace("[100]", "[]")).is_err());
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = RunConfig::from_json(&MINIMAL.replace("\"T\":2", "\"T\":2,\"horizon\":3")).unwrap_err();
        assert!(err.to_string().contains("horizon"), "{err}");
        assert!(RunConfig::from_json(&MINIMAL.replace("{\"n\"", "{\"lambda\":1,\"n\"")).is_err());
    }

    #[test]
    fn round_trip() {
        let mut cfg = RunConfig::from_json(MINIMAL).unwrap();
        cfg.seed = u64::MAX;
        cfg.checks = vec![Check::Mean, Check::Bounds];
        cfg.tightness.triples = vec![[0.0, 0.5, 1.0]];
        assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }
}
