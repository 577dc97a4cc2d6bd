//! Sweeps of the two-point construction over the bump height `γ`.

use std::path::{Path, PathBuf};

use log::info;

use super::config::ExperimentConfig;
use super::svg::{LogLogPlot, Series, SeriesStyle};
use super::{format_table, write_text};
use crate::error::{Error, Result};
use crate::geometry::McEstimate;
use crate::lower_bound::{
    build_lecam_pair, calibrate, fit_scaling_exponent, l1_distance_bound, lecam_risk_bound, pair_hausdorff,
    symmetric_difference_volume, Calibration, L1Estimate, ScalingFit,
};
use crate::manifold::ManifoldModel;
use crate::rng::derive_seed;
use crate::sampling::{density_ratio_bounds, sample_observations, NoiseModel};

const TAG_LECAM: u64 = 31;
const TAG_LECAM_DENSITY: u64 = 32;

/// Interior probe points used to bound the observation density from below.
pub const DENSITY_PROBES: usize = 200;

pub const LECAM_COLUMNS: &[&str] =
    &["gamma", "hausdorff", "sym_diff_vol", "sym_diff_se", "l1_est", "l1_se", "fitted_slope", "r_squared"];

#[derive(Clone, Debug)]
pub struct LecamRecord {
    pub gamma: f64,
    pub hausdorff: f64,
    pub sym_diff: McEstimate,
    pub l1: L1Estimate,
    pub calibration: Calibration,
}

/// One point of the risk-bound curve at the separation `γ_n = n^{-2/(d+2)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundPoint {
    pub n: usize,
    pub gamma: f64,
    /// `c · γ_n^{(d+2)/2}`, capped at 2.
    pub l1: f64,
    pub risk_bound: f64,
}

#[derive(Clone, Debug)]
pub struct LecamReport {
    pub config: ExperimentConfig,
    pub records: Vec<LecamRecord>,
    pub sym_diff_fit: ScalingFit,
    pub l1_fit: ScalingFit,
    pub proxy_fit: ScalingFit,
    /// Geometric mean of `ℓ1 / γ^{(d+2)/2}` over the positive grid values.
    pub l1_constant: f64,
    /// Lower bound on the observation density used by the calibration.
    pub c_star: f64,
    /// Extremes of the estimated density ratio on the probes.
    pub density_ratio: (f64, f64),
    pub bound: Vec<BoundPoint>,
}

/// Estimated lower bound on the density of observations around the saucer,
/// from interior probes drawn with noise `0.75 σ` and balls of radius `σ/4`.
fn density_floor(m0: &ManifoldModel, sigma: f64, n_mc: usize, seed: u64) -> Result<(f64, (f64, f64))> {
    let probes = sample_observations(&NoiseModel::new(m0.clone(), 0.75 * sigma)?, DENSITY_PROBES, seed)?.y;
    let noise = NoiseModel::new(m0.clone(), sigma)?;
    let (lo, hi) = density_ratio_bounds(&noise, &probes, sigma / 4.0, n_mc, seed)?;
    let tube = noise.tube_volume(n_mc, seed)?;
    Ok((lo / tube.value, (lo, hi)))
}

pub fn run_lecam(cfg: &ExperimentConfig) -> Result<LecamReport> {
    cfg.validate()?;
    let (kappa, d, dim, sigma) = (cfg.model.kappa, cfg.model.intrinsic_dim, cfg.model.ambient_dim, cfg.sigma);
    let positive = cfg.gamma_grid.iter().filter(|g| **g > 0.0).count();
    if positive < 3 {
        return Err(Error::NotEnoughPoints(positive));
    }
    let config_err = |e: Error| match e {
        Error::GridTooLarge { .. } | Error::EnumerationBudget { .. } => e,
        e => Error::Config(format!("invalid pair parameters: {e}")),
    };
    let m0 = ManifoldModel::saucer(kappa, d, dim).map_err(config_err)?;
    let (c_star, density_ratio) =
        density_floor(&m0, sigma, cfg.density_samples, derive_seed(cfg.seed, &[TAG_LECAM_DENSITY]))
            .map_err(config_err)?;

    let mut records = Vec::with_capacity(cfg.gamma_grid.len());
    for &gamma in &cfg.gamma_grid {
        let pair = build_lecam_pair(kappa, gamma, d, dim).map_err(config_err)?;
        let seed = derive_seed(cfg.seed, &[TAG_LECAM, gamma.to_bits()]);
        let hausdorff = if gamma > 0.0 { pair_hausdorff(&pair, gamma / 20.0)? } else { 0.0 };
        let sym_diff = symmetric_difference_volume(&pair, sigma, cfg.mc_samples, seed).map_err(config_err)?;
        let l1 = l1_distance_bound(&pair, sigma, cfg.mc_samples, seed)?;
        let calibration = calibrate(dim, l1.direct, hausdorff, c_star);
        info!(
            "lecam: gamma = {gamma}, H = {hausdorff:.6}, sym diff = {:.4e}, l1 = {:.4e}",
            sym_diff.value, l1.direct.value
        );
        records.push(LecamRecord { gamma, hausdorff, sym_diff, l1, calibration });
    }

    let pos: Vec<&LecamRecord> = records.iter().filter(|r| r.gamma > 0.0).collect();
    let gammas: Vec<f64> = pos.iter().map(|r| r.gamma).collect();
    let fit = |f: &dyn Fn(&LecamRecord) -> f64| {
        fit_scaling_exponent(&gammas, &pos.iter().map(|r| f(r)).collect::<Vec<_>>())
    };
    let sym_diff_fit = fit(&|r| r.sym_diff.value)?;
    let l1_fit = fit(&|r| r.l1.direct.value)?;
    let proxy_fit = fit(&|r| r.l1.proxy.value)?;

    let power = (d as f64 + 2.0) / 2.0;
    let l1_constant =
        (pos.iter().map(|r| (r.l1.direct.value / r.gamma.powf(power)).ln()).sum::<f64>() / pos.len() as f64).exp();
    let bound = cfg
        .bound_n
        .iter()
        .map(|&n| {
            let gamma = (n as f64).powf(-2.0 / (d as f64 + 2.0));
            let l1 = (l1_constant * gamma.powf(power)).min(2.0);
            Ok(BoundPoint { n, gamma, l1, risk_bound: lecam_risk_bound(gamma, l1, n)? })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(LecamReport {
        config: cfg.clone(),
        records,
        sym_diff_fit,
        l1_fit,
        proxy_fit,
        l1_constant,
        c_star,
        density_ratio,
        bound,
    })
}

impl LecamReport {
    pub fn all_calibrated(&self) -> bool {
        self.records.iter().all(|r| r.calibration.passed)
    }

    /// The per-`γ` table. `fitted_slope` and `r_squared` repeat the ℓ1 fit.
    pub fn csv(&self) -> String {
        let rows = self.records.iter().map(|r| {
            vec![
                r.gamma.to_string(),
                r.hausdorff.to_string(),
                r.sym_diff.value.to_string(),
                r.sym_diff.std_error.to_string(),
                r.l1.direct.value.to_string(),
                r.l1.direct.std_error.to_string(),
                self.l1_fit.slope.to_string(),
                self.l1_fit.r_squared.to_string(),
            ]
        });
        format_table(&self.config.header("lecam"), LECAM_COLUMNS, rows)
    }

    pub fn bound_csv(&self) -> String {
        let rows = self
            .bound
            .iter()
            .map(|b| vec![b.n.to_string(), b.gamma.to_string(), b.l1.to_string(), b.risk_bound.to_string()]);
        format_table(&self.config.header("lecam bound"), &["n", "gamma_n", "l1", "risk_bound"], rows)
    }

    pub fn summary(&self) -> String {
        let d = self.config.model.intrinsic_dim as f64;
        let mut s = String::new();
        for line in self.config.header("lecam summary") {
            s.push_str(&format!("# {line}\n"));
        }
        let fit_line = |name: &str, f: &ScalingFit| {
            format!("{name}_slope = {}\n{name}_r_squared = {}\n", f.slope, f.r_squared)
        };
        s.push_str(&fit_line("sym_diff", &self.sym_diff_fit));
        s.push_str(&fit_line("l1", &self.l1_fit));
        s.push_str(&fit_line("l1_proxy", &self.proxy_fit));
        s.push_str(&format!("reference_slope = {}\n", (d + 2.0) / 2.0));
        s.push_str(&format!("l1_constant = {}\n", self.l1_constant));
        s.push_str(&format!("density_floor = {}\n", self.c_star));
        s.push_str(&format!("density_ratio_min = {}\n", self.density_ratio.0));
        s.push_str(&format!("density_ratio_max = {}\n", self.density_ratio.1));
        s.push_str("gamma\thausdorff\tl1\trequired\tcalibrated\n");
        for r in &self.records {
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                r.gamma, r.hausdorff, r.l1.direct.value, r.calibration.required, r.calibration.passed
            ));
        }
        s.push_str(&format!("all_calibrated = {}\n", self.all_calibrated()));
        s
    }

    pub fn plot(&self) -> LogLogPlot {
        let d = self.config.model.intrinsic_dim as f64;
        let pos: Vec<&LecamRecord> = self.records.iter().filter(|r| r.gamma > 0.0).collect();
        let (g_lo, g_hi) = (pos[0].gamma, pos[pos.len() - 1].gamma);
        let pts = |f: &dyn Fn(&LecamRecord) -> f64| pos.iter().map(|r| (r.gamma, f(r))).collect::<Vec<_>>();
        let fitted = |f: &ScalingFit| {
            let at = |g: f64| (g, (f.intercept + f.slope * g.ln()).exp());
            vec![at(g_lo), at(g_hi)]
        };
        let power = (d + 2.0) / 2.0;
        LogLogPlot {
            title: format!("Two-point construction, d = {}, D = {}", d, self.config.model.ambient_dim),
            x_label: "gamma".into(),
            y_label: "volume / l1 distance".into(),
            series: vec![
                Series::new("symmetric difference volume", pts(&|r| r.sym_diff.value), SeriesStyle::Markers),
                Series::new("l1 estimate", pts(&|r| r.l1.direct.value), SeriesStyle::Markers),
                Series::new("l1 proxy", pts(&|r| r.l1.proxy.value), SeriesStyle::Markers),
                Series::new("l1 fit", fitted(&self.l1_fit), SeriesStyle::Line),
                Series::power_law(
                    format!("gamma^{power}"),
                    (g_lo, pos[0].l1.direct.value),
                    power,
                    g_lo,
                    g_hi,
                ),
            ],
            annotations: vec![
                format!("fitted slope = {:.6}", self.l1_fit.slope),
                format!("symmetric difference slope = {:.6}", self.sym_diff_fit.slope),
            ],
        }
    }

    /// Writes `lecam.csv`, `lecam_bound.csv`, `lecam_summary.txt` and
    /// `lecam.svg` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        Ok(vec![
            write_text(dir, "lecam.csv", &self.csv())?,
            write_text(dir, "lecam_bound.csv", &self.bound_csv())?,
            write_text(dir, "lecam_summary.txt", &self.summary())?,
            write_text(dir, "lecam.svg", &self.plot().render())?,
        ])
    }
}
