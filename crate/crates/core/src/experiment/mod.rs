//! Config-driven experiments and their report files.
//!
//! Every report starts with `# ` comment lines holding the crate version and
//! the canonical config echo, so re-running the echo reproduces the report.
//! Parallel work is gathered and sorted before anything is written, and
//! every random stream is derived from the master seed, so reports are
//! byte-identical across runs and thread counts.

mod config;
mod lecam;
mod rates;
pub mod svg;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, ExperimentKind, CONFIG_KEYS};
pub use lecam::{run_lecam, BoundPoint, LecamRecord, LecamReport, DENSITY_PROBES, LECAM_COLUMNS};
pub use rates::{
    median, reference_slopes, run_rates, RateAggregate, RateRecord, RatesReport, ReferenceSlope, MAX_RATES_DIM,
    RATES_COLUMNS,
};

use crate::error::{Error, Result};
use crate::estimator::{estimate, EstimatorConfig, ManifoldEstimate};
use crate::geometry::PointSet;
use crate::io::write_points_file;
use crate::rng::derive_seed;
use crate::sampling::{sample_observations, ObservationSet};

const TAG_SAMPLE: u64 = 41;

/// Comment header, column names and comma-separated rows.
pub(crate) fn format_table<I>(header: &[String], columns: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut s = String::new();
    for line in header {
        s.push_str("# ");
        s.push_str(line);
        s.push('\n');
    }
    s.push_str(&columns.join(","));
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub(crate) fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

/// Observations for the first sample size of the config.
pub fn run_sample(cfg: &ExperimentConfig) -> Result<ObservationSet> {
    cfg.validate()?;
    sample_observations(&cfg.noise_model()?, cfg.n[0], derive_seed(cfg.seed, &[TAG_SAMPLE]))
}

/// Writes `observations.csv` into `dir`.
pub fn write_sample(cfg: &ExperimentConfig, obs: &ObservationSet, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join("observations.csv");
    obs.write_csv(&path, &cfg.header("sample"))?;
    Ok(path)
}

/// Runs the estimator on `input`, or on a fresh sample from the config.
pub fn run_estimate(cfg: &ExperimentConfig, input: Option<PointSet>) -> Result<ManifoldEstimate> {
    cfg.validate()?;
    let y = match input {
        Some(y) => y,
        None => run_sample(cfg)?.y,
    };
    if y.dim() > MAX_RATES_DIM {
        return Err(Error::Config(format!(
            "the raster estimator runs in dimension at most {MAX_RATES_DIM}, got {}",
            y.dim()
        )));
    }
    if y.len() < 2 {
        return Err(Error::Config(format!("the estimator needs at least 2 points, got {}", y.len())));
    }
    let ecfg = EstimatorConfig::for_sample(y.len(), y.dim(), cfg.rate_constant)?
        .grid_width(cfg.grid)
        .cell_budget(cfg.cell_budget);
    estimate(&y, &ecfg)
}

/// Writes `manifold_estimate.csv` and `estimate_summary.txt` into `dir`.
pub fn write_estimate(cfg: &ExperimentConfig, est: &ManifoldEstimate, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let csv = dir.join("manifold_estimate.csv");
    write_points_file(&csv, &est.points, None, &cfg.header("estimate"))?;
    let summary = format!(
        "epsilon = {}\nh = {}\nsigma_hat = {}\nthreshold = {}\npoints = {}\n",
        est.epsilon,
        est.h,
        est.sigma_hat,
        est.threshold,
        est.points.len()
    );
    Ok(vec![csv, write_text(dir, "estimate_summary.txt", &summary)?])
}
