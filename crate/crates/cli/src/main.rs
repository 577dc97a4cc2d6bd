//! `tubelab` command-line interface.
//!
//! Exit codes: 0 on success, 2 for usage, config and input errors, 3 when a
//! numeric budget (raster cells, enumeration size) is exceeded, 1 otherwise.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::warn;

use tubelab::experiment::{
    run_estimate, run_lecam, run_rates, run_sample, write_estimate, write_sample, ExperimentConfig, ExperimentKind,
};
use tubelab::geometry::hausdorff;
use tubelab::io::read_points_file;
use tubelab::Error;

#[derive(Parser, Debug)]
#[command(name = "tubelab", version, about = "Manifold estimation experiments under perpendicular noise")]
struct Cli {
    /// Flat `key = value` experiment config.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Overrides the master seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the output directory of the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw observations and write `observations.csv`.
    Sample {
        /// Sample size (defaults to the first value of `n`).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Estimate the manifold and write `manifold_estimate.csv` with a summary.
    Estimate {
        /// Observations to read instead of sampling from the config.
        #[arg(long, value_name = "CSV")]
        input: Option<PathBuf>,
    },
    /// Print the Hausdorff distance between two point CSVs.
    Hausdorff { a: PathBuf, b: PathBuf },
    /// Sweep the two-point construction over `gamma_grid`.
    Lecam,
    /// Run the convergence-rate sweep over `n` and `replicates`.
    Rates,
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::Sample { .. } => ExperimentKind::Sample,
            Command::Estimate { .. } => ExperimentKind::Estimate,
            Command::Hausdorff { .. } => ExperimentKind::Hausdorff,
            Command::Lecam => ExperimentKind::Lecam,
            Command::Rates => ExperimentKind::Rates,
        }
    }
}

/// Error with the file it came from, if any.
struct Failure {
    context: Option<PathBuf>,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { context: None, error }
    }
}

fn in_file(path: &Path) -> impl FnOnce(Error) -> Failure + '_ {
    move |error| Failure { context: Some(path.to_path_buf()), error }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path).map_err(in_file(path))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    let kind = cli.command.kind();
    if let Some(k) = cfg.experiment.filter(|k| *k != kind) {
        warn!("config names experiment `{k}`, running `{kind}`");
    }
    cfg.experiment = Some(kind);
    Ok(cfg)
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let mut cfg = load_config(cli)?;
    let dir = cfg.output_dir.clone();
    match &cli.command {
        Command::Sample { n } => {
            if let Some(n) = n {
                cfg.n = vec![*n];
            }
            let obs = run_sample(&cfg)?;
            report(&[write_sample(&cfg, &obs, &dir)?]);
        }
        Command::Estimate { input } => {
            let points = match input {
                Some(path) => Some(read_points_file(path).map_err(in_file(path))?.points),
                None => None,
            };
            let est = run_estimate(&cfg, points)?;
            println!(
                "epsilon = {}, h = {}, sigma_hat = {}, points = {}",
                est.epsilon,
                est.h,
                est.sigma_hat,
                est.points.len()
            );
            report(&write_estimate(&cfg, &est, &dir)?);
        }
        Command::Hausdorff { a, b } => {
            let pa = read_points_file(a).map_err(in_file(a))?.points;
            let pb = read_points_file(b).map_err(in_file(b))?.points;
            println!("{:?}", hausdorff(&pa, &pb)?);
        }
        Command::Lecam => {
            let rep = run_lecam(&cfg)?;
            println!(
                "sym diff slope = {:.6}, l1 slope = {:.6}, all calibrated = {}",
                rep.sym_diff_fit.slope,
                rep.l1_fit.slope,
                rep.all_calibrated()
            );
            report(&rep.write_to(&dir)?);
        }
        Command::Rates => {
            let rep = run_rates(&cfg)?;
            println!("fitted slope = {:.6} (r^2 = {:.4})", rep.fit.slope, rep.fit.r_squared);
            report(&rep.write_to(&dir)?);
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    if e.is_budget() {
        3
    } else if e.is_config() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { context, error }) => {
            match context {
                Some(path) => eprintln!("error: {}: {error}", path.display()),
                None => eprintln!("error: {error}"),
            }
            ExitCode::from(exit_code(&error))
        }
    }
}
