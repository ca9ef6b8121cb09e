use std::fs;
use std::process::Command;

use eigdyn::config::{Check, RunConfig};
use eigdyn::output::{emit_results, RESULT_FILES};
use eigdyn::run_campaign;

fn small(checks: Vec<Check>) -> RunConfig {
    RunConfig {
        n: vec![6, 9],
        p0: 0.3,
        grid: vec![0.0, 0.4, 1.0],
        replicates: 8,
        seed: 17,
        checks,
        tightness: eigdyn::config::TightnessConfig { triples: vec![[0.1, 0.3, 0.9]], random_triples: 0, batch: 20 },
        spacing: eigdyn::config::SpacingConfig { n: vec![4], replicates: 100, x: vec![1e-3, 2e-3] },
        ..RunConfig::default()
    }
}

fn first_line(path: &std::path::Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap_or_default().to_string()
}

#[test]
fn csv_headers_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_campaign(&small(Check::ALL.to_vec())).unwrap();
    emit_results(&summary, dir.path(), false).unwrap();
    let golden = [
        ("mean.csv", "n,t,mean,se,theory"),
        ("cov.csv", "n,t1,t2,cov_hat,se,theory"),
        ("residual.csv", "n,replicate,residual,scaled_residual"),
        ("tightness.csv", "n,r,s,t,lhs,se,bound,bound_sharp"),
        ("bounds.csv", "n,statistic,k,rate,se,bound,max_ratio"),
        ("normality.csv", "n,t,skew,skew_se,excess_kurtosis,kurtosis_se"),
        ("spacing.csv", "n,x,prob,se"),
    ];
    for (name, header) in golden {
        assert_eq!(first_line(&dir.path().join(name)), header, "{name}");
    }
}

#[test]
fn minimal_campaign_writes_every_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { n: vec![3], grid: vec![0.5], replicates: 2, checks: vec![Check::Mean], ..RunConfig::default() };
    let summary = run_campaign(&cfg).unwrap();
    assert_eq!(summary.sizes[0].mean.len(), 1);
    assert_eq!(summary.sizes[0].mean[0].included + summary.sizes[0].mean[0].excluded, 2);
    emit_results(&summary, dir.path(), false).unwrap();
    for name in RESULT_FILES {
        let body = fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(!body.is_empty(), "{name} is empty");
    }
    // unrun checks leave header-only tables
    assert_eq!(fs::read_to_string(dir.path().join("cov.csv")).unwrap().lines().count(), 1);

    let again = run_campaign(&cfg).unwrap();
    assert_eq!(eigdyn::output::summary_json(&summary), eigdyn::output::summary_json(&again));
}

#[test]
fn cov_rows_cover_upper_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(vec![Check::FcltCov]);
    let summary = run_campaign(&cfg).unwrap();
    emit_results(&summary, dir.path(), false).unwrap();
    let rows = fs::read_to_string(dir.path().join("cov.csv")).unwrap().lines().count() - 1;
    let g = cfg.grid.len();
    assert_eq!(rows, cfg.n.len() * g * (g + 1) / 2);
}

#[test]
fn summary_echo_round_trips() {
    let cfg = small(vec![Check::Mean, Check::Tightness]);
    let summary = run_campaign(&cfg).unwrap();
    let json: serde_json::Value = serde_json::from_str(&eigdyn::output::summary_json(&summary)).unwrap();
    let echo = RunConfig::from_json(&json["config"].to_string()).unwrap();
    assert_eq!(echo, cfg.experiment_echo());
    assert_eq!(json["seed"], 17);
}

#[test]
fn plots_are_written_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_campaign(&small(vec![Check::Mean, Check::FcltCov])).unwrap();
    let written = emit_results(&summary, dir.path(), true).unwrap();
    let svgs: Vec<_> = written.iter().filter(|p| p.extension().is_some_and(|e| e == "svg")).collect();
    assert!(!svgs.is_empty());
    for p in svgs {
        assert!(fs::read_to_string(p).unwrap().starts_with("<svg"));
    }
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eigdyn"))
}

#[test]
fn theory_subcommand_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let status = cli()
        .args(["theory", "--n", "10,20", "--grid", "0,1,2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    let body = fs::read_to_string(dir.path().join("theory.csv")).unwrap();
    assert_eq!(body.lines().next().unwrap(), "n,t,p,q,mean_expansion,var_limit,cov_to_t0");
    assert_eq!(body.lines().count(), 1 + 2 * 3);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"n": [10], "lambda_on": 1, "lambda_off": 1, "p0": 0.5, "T": 2, "grid": [0], "bogus_key": 1}"#).unwrap();
    let out = cli().args(["verify-mean", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_key"));

    let out = cli().args(["verify-mean", "--p0", "1.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_reflects_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli()
        .args(["verify-mean", "--n", "3", "--replicates", "2", "--grid", "0", "--p0", "0.05", "--seed", "1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    let expected = if stdout.contains("FAIL") { 1 } else { 0 };
    assert_eq!(out.status.code(), Some(expected), "{stdout}");
}

#[test]
fn simulate_dumps_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli()
        .args(["simulate", "--n", "5", "--grid", "0,1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("jumps.csv").exists());
    assert!(dir.path().join("eigenvalues.csv").exists());
}
