use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eigdyn::config::{Check, RunConfig};
use eigdyn::output::{emit_results, theory_csv, write_snapshot};
use eigdyn::{run_campaign, Error};
use eigdyn_core::graph::sample_graph;
use eigdyn_core::theory::TheoryCurves;

#[derive(Parser)]
#[command(name = "eigdyn", version, about = "Principal eigenvalue of dynamic random graphs: simulation and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads, 0 for all cores
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write SVG overlays under <out>/plots
    #[arg(long, global = true)]
    plots: bool,
    /// Vertex counts, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, global = true)]
    lambda_on: Option<f64>,
    #[arg(long, global = true)]
    lambda_off: Option<f64>,
    #[arg(long, global = true)]
    p0: Option<f64>,
    #[arg(long = "horizon", global = true)]
    horizon: Option<f64>,
    /// Grid times, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[arg(long, global = true)]
    replicates: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Dump one trajectory's jumps, eigenvalue path and adjacency snapshots
    Simulate {
        /// Replicate index of the dumped trajectory
        #[arg(long, default_value_t = 0)]
        replicate: u32,
    },
    /// Write the theory curves on the grid
    Theory,
    VerifyMean,
    VerifyFclt,
    VerifyRepresentation,
    VerifyBounds,
    VerifyTightness,
    /// Run every check
    All,
}

fn load(common: &Common) -> Result<RunConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = common.threads {
        cfg.threads = v;
    }
    if let Some(v) = &common.out {
        cfg.output_dir = v.clone();
    }
    if common.plots {
        cfg.emit_plots = true;
    }
    if let Some(v) = &common.n {
        cfg.n = v.clone();
    }
    if let Some(v) = common.lambda_on {
        cfg.lambda_on = v;
    }
    if let Some(v) = common.lambda_off {
        cfg.lambda_off = v;
    }
    if let Some(v) = common.p0 {
        cfg.p0 = v;
    }
    if let Some(v) = common.horizon {
        cfg.horizon = v;
    }
    if let Some(v) = &common.grid {
        cfg.grid = v.clone();
    }
    if let Some(v) = common.replicates {
        cfg.replicates = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool, Error> {
    let mut cfg = load(&cli.common)?;
    let checks: Option<Vec<Check>> = match cli.command {
        Command::Simulate { replicate } => {
            let traj = sample_graph(cfg.n[0], &cfg.params()?, cfg.seed, replicate, cfg.self_loops)?;
            let files = write_snapshot(&traj, &cfg.time_grid()?, &cfg.spectral(), &cfg.output_dir)?;
            println!("wrote {} files to {}", files.len(), cfg.output_dir.display());
            return Ok(true);
        }
        Command::Theory => {
            let body = theory_csv(&TheoryCurves::new(cfg.params()?), &cfg.n, &cfg.time_grid()?)?;
            std::fs::create_dir_all(&cfg.output_dir)
                .map_err(|source| Error::Io { path: cfg.output_dir.clone(), source })?;
            let path = cfg.output_dir.join("theory.csv");
            std::fs::write(&path, body).map_err(|source| Error::Io { path: path.clone(), source })?;
            println!("wrote {}", path.display());
            return Ok(true);
        }
        Command::VerifyMean => Some(vec![Check::Mean]),
        Command::VerifyFclt => Some(vec![Check::FcltCov, Check::Normality]),
        Command::VerifyRepresentation => Some(vec![Check::Representation]),
        Command::VerifyBounds => Some(vec![Check::Bounds]),
        Command::VerifyTightness => Some(vec![Check::Tightness]),
        Command::All => None,
    };
    if let Some(c) = checks {
        cfg.checks = c;
    }
    let summary = run_campaign(&cfg)?;
    emit_results(&summary, &cfg.output_dir, cfg.emit_plots)?;
    for v in &summary.verdicts {
        let n = v.n.map(|n| format!(" n={n}")).unwrap_or_default();
        println!("{} {}{}: {}", if v.passed { "PASS" } else { "FAIL" }, v.check, n, v.detail);
    }
    Ok(summary.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
