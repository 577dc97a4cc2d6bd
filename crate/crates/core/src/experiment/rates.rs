//! Convergence-rate sweeps of the manifold estimator.

use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::svg::{LogLogPlot, Series, SeriesStyle};
use super::{format_table, write_text};
use crate::error::{Error, Result};
use crate::estimator::{estimate_support, extract_manifold, warn_if_below_threshold, EstimatorConfig};
use crate::geometry::{directed_hausdorff, hausdorff};
use crate::lower_bound::{fit_scaling_exponent, ScalingFit};
use crate::manifold::dense_net;
use crate::rng::derive_seed;
use crate::sampling::sample_observations;

const TAG_RATES: u64 = 21;
const TAG_RATES_NET: u64 = 22;

/// Largest ambient dimension the raster estimator is run in.
pub const MAX_RATES_DIM: usize = 3;

pub const RATES_COLUMNS: &[&str] = &["n", "replicate", "hausdorff", "epsilon", "sigma_hat", "seconds"];

/// One `(n, replicate)` cell of a rate sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct RateRecord {
    pub n: usize,
    pub replicate: usize,
    /// `H(M̂, net(M))` with the net at spacing `h`.
    pub hausdorff: f64,
    /// Directed distance from the estimate to the net.
    pub estimate_to_net: f64,
    /// Directed distance from the net to the estimate.
    pub net_to_estimate: f64,
    pub epsilon: f64,
    pub h: f64,
    pub sigma_hat: f64,
    pub seconds: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateAggregate {
    pub n: usize,
    pub median: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceSlope {
    pub label: &'static str,
    pub slope: f64,
}

#[derive(Clone, Debug)]
pub struct RatesReport {
    pub config: ExperimentConfig,
    /// Sorted by `(n, replicate)`.
    pub records: Vec<RateRecord>,
    pub aggregates: Vec<RateAggregate>,
    /// Fit of `log median H` against `log(n / ln n)`.
    pub fit: ScalingFit,
    pub references: Vec<ReferenceSlope>,
}

pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "median of an empty slice");
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Reference exponents for intrinsic dimension `d` in ambient dimension `dim`.
pub fn reference_slopes(d: usize, dim: usize) -> Vec<ReferenceSlope> {
    let minimax = -2.0 / (2.0 + d as f64);
    vec![
        ReferenceSlope { label: "estimator rate -1/D", slope: -1.0 / dim as f64 },
        ReferenceSlope { label: "minimax upper -2/(2+d), reference only", slope: minimax },
        ReferenceSlope { label: "minimax lower -2/(2+d)", slope: minimax },
    ]
}

fn run_cell(cfg: &ExperimentConfig, n: usize, replicate: usize) -> Result<RateRecord> {
    let start = Instant::now();
    let noise = cfg.noise_model()?;
    let dim = noise.ambient_dim();
    let seed = derive_seed(cfg.seed, &[TAG_RATES, n as u64, replicate as u64]);
    let obs = sample_observations(&noise, n, seed)?;
    let ecfg = EstimatorConfig::for_sample(n, dim, cfg.rate_constant)?
        .grid_width(cfg.grid)
        .cell_budget(cfg.cell_budget);
    let est = extract_manifold(&estimate_support(&obs.y, &ecfg)?);
    let net = dense_net(noise.manifold(), est.h, derive_seed(cfg.seed, &[TAG_RATES_NET]))?;
    let estimate_to_net = directed_hausdorff(&est.points, &net)?;
    let net_to_estimate = directed_hausdorff(&net, &est.points)?;
    let h = hausdorff(&est.points, &net)?;
    debug_assert_eq!(h, estimate_to_net.max(net_to_estimate));
    let seconds = cfg.timing.then(|| start.elapsed().as_secs_f64());
    info!("rates: n = {n}, replicate = {replicate}, H = {h:.5}");
    Ok(RateRecord {
        n,
        replicate,
        hausdorff: h,
        estimate_to_net,
        net_to_estimate,
        epsilon: est.epsilon,
        h: est.h,
        sigma_hat: est.sigma_hat,
        seconds,
    })
}

pub fn run_rates(cfg: &ExperimentConfig) -> Result<RatesReport> {
    cfg.validate()?;
    let noise = cfg.noise_model()?;
    let dim = noise.ambient_dim();
    if dim > MAX_RATES_DIM {
        return Err(Error::Config(format!(
            "rate experiments run in ambient dimension at most {MAX_RATES_DIM}, got {dim}"
        )));
    }
    if cfg.n.len() < 3 {
        return Err(Error::NotEnoughPoints(cfg.n.len()));
    }
    warn_if_below_threshold(cfg.rate_constant, dim);
    let cells: Vec<(usize, usize)> =
        cfg.n.iter().flat_map(|&n| (0..cfg.replicates).map(move |r| (n, r))).collect();
    let mut records = cells.par_iter().map(|&(n, r)| run_cell(cfg, n, r)).collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| (r.n, r.replicate));

    let aggregates: Vec<RateAggregate> = cfg
        .n
        .iter()
        .map(|&n| {
            let hs: Vec<f64> = records.iter().filter(|r| r.n == n).map(|r| r.hausdorff).collect();
            RateAggregate { n, median: median(&hs), mean: hs.iter().sum::<f64>() / hs.len() as f64 }
        })
        .collect();
    let xs: Vec<f64> = aggregates.iter().map(|a| a.n as f64 / (a.n as f64).ln()).collect();
    let ys: Vec<f64> = aggregates.iter().map(|a| a.median).collect();
    let fit = fit_scaling_exponent(&xs, &ys)?;
    let references = reference_slopes(noise.manifold().intrinsic_dim(), dim);
    Ok(RatesReport { config: cfg.clone(), records, aggregates, fit, references })
}

impl RatesReport {
    pub fn csv(&self) -> String {
        let rows = self.records.iter().map(|r| {
            vec![
                r.n.to_string(),
                r.replicate.to_string(),
                r.hausdorff.to_string(),
                r.epsilon.to_string(),
                r.sigma_hat.to_string(),
                r.seconds.map_or_else(|| "NA".to_string(), |s| s.to_string()),
            ]
        });
        format_table(&self.config.header("rates"), RATES_COLUMNS, rows)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for line in self.config.header("rates summary") {
            s.push_str(&format!("# {line}\n"));
        }
        s.push_str("n\tmedian_hausdorff\tmean_hausdorff\n");
        for a in &self.aggregates {
            s.push_str(&format!("{}\t{}\t{}\n", a.n, a.median, a.mean));
        }
        s.push_str(&format!("fitted_slope = {}\n", self.fit.slope));
        s.push_str(&format!("intercept = {}\n", self.fit.intercept));
        s.push_str(&format!("r_squared = {}\n", self.fit.r_squared));
        for r in &self.references {
            s.push_str(&format!("reference ({}) = {}\n", r.label, r.slope));
        }
        s
    }

    pub fn plot(&self) -> LogLogPlot {
        let x = |n: usize| n as f64 / (n as f64).ln();
        let (x_lo, x_hi) = (x(self.aggregates[0].n), x(self.aggregates[self.aggregates.len() - 1].n));
        let anchor = (x_lo, self.aggregates[0].median);
        let fitted = |v: f64| (v, (self.fit.intercept + self.fit.slope * v.ln()).exp());
        let mut series = vec![
            Series::new(
                "median H",
                self.aggregates.iter().map(|a| (x(a.n), a.median)).collect(),
                SeriesStyle::Markers,
            ),
            Series::new("least-squares fit", vec![fitted(x_lo), fitted(x_hi)], SeriesStyle::Line),
        ];
        for r in &self.references {
            series.push(Series::power_law(format!("{} ({:.3})", r.label, r.slope), anchor, r.slope, x_lo, x_hi));
        }
        LogLogPlot {
            title: format!("Hausdorff error, {}", self.config.model.kind),
            x_label: "n / ln n".into(),
            y_label: "median H(M_hat, M)".into(),
            series,
            annotations: vec![format!("fitted slope = {:.6}", self.fit.slope)],
        }
    }

    /// Writes `rates.csv`, `rates_summary.txt` and `rates.svg` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        Ok(vec![
            write_text(dir, "rates.csv", &self.csv())?,
            write_text(dir, "rates_summary.txt", &self.summary())?,
            write_text(dir, "rates.svg", &self.plot().render())?,
        ])
    }
}
