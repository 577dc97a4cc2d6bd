//! Flat `key = value` experiment configuration.
//!
//! Lines starting with `#` and blank lines are ignored. Every key is
//! optional and falls back to a default; unknown or repeated keys are
//! errors. Lists are comma separated, and sample sizes may be written as
//! powers (`2^10`) or inclusive power ranges (`2^10..2^16`).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimator::{GridWidth, DEFAULT_GRID_FACTOR, DEFAULT_RATE_CONSTANT};
use crate::geometry::DEFAULT_CELL_BUDGET;
use crate::manifold::{ManifoldModel, ModelKind, ModelSpec};
use crate::sampling::NoiseModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Rates,
    Lecam,
    Sample,
    Estimate,
    Hausdorff,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Rates => "rates",
            ExperimentKind::Lecam => "lecam",
            ExperimentKind::Sample => "sample",
            ExperimentKind::Estimate => "estimate",
            ExperimentKind::Hausdorff => "hausdorff",
        })
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rates" => ExperimentKind::Rates,
            "lecam" => ExperimentKind::Lecam,
            "sample" => ExperimentKind::Sample,
            "estimate" => ExperimentKind::Estimate,
            "hausdorff" => ExperimentKind::Hausdorff,
            other => return Err(Error::Config(format!("unknown experiment `{other}`"))),
        })
    }
}

/// Keys accepted in a config file, in the order they are echoed.
pub const CONFIG_KEYS: &[&str] = &[
    "experiment",
    "model",
    "radius",
    "kappa",
    "gamma",
    "intrinsic_dim",
    "ambient_dim",
    "sigma",
    "n",
    "replicates",
    "seed",
    "rate_constant",
    "grid_factor",
    "grid_width",
    "cell_budget",
    "gamma_grid",
    "mc_samples",
    "density_samples",
    "bound_n",
    "output_dir",
    "timing",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentKind>,
    pub model: ModelSpec,
    pub sigma: f64,
    pub n: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub rate_constant: f64,
    pub grid: GridWidth,
    pub cell_budget: usize,
    pub gamma_grid: Vec<f64>,
    pub mc_samples: usize,
    pub density_samples: usize,
    pub bound_n: Vec<usize>,
    pub output_dir: PathBuf,
    /// Record wall-clock seconds in the rates table. Off by default so that
    /// reports are byte-for-byte reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: None,
            model: ModelSpec::default(),
            sigma: 0.1,
            n: (10..=16).map(|k| 1usize << k).collect(),
            replicates: 10,
            seed: 1,
            rate_constant: DEFAULT_RATE_CONSTANT,
            grid: GridWidth::Relative(DEFAULT_GRID_FACTOR),
            cell_budget: DEFAULT_CELL_BUDGET,
            gamma_grid: vec![0.02, 0.04, 0.08, 0.16],
            mc_samples: 1_000_000,
            density_samples: 400_000,
            bound_n: vec![100, 1_000, 10_000, 100_000],
            output_dir: PathBuf::from("out"),
            timing: false,
        }
    }
}

fn cfg_err(line: usize, msg: impl fmt::Display) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

fn parse_scalar<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| cfg_err(line, format!("invalid value `{v}` for `{key}`")))
}

fn parse_count(line: usize, key: &str, v: &str) -> Result<usize> {
    let v = v.trim();
    if let Some((base, exp)) = v.split_once('^') {
        let base: usize = parse_scalar(line, key, base.trim())?;
        let exp: u32 = parse_scalar(line, key, exp.trim())?;
        return base
            .checked_pow(exp)
            .ok_or_else(|| cfg_err(line, format!("`{v}` overflows for `{key}`")));
    }
    parse_scalar(line, key, v)
}

fn parse_counts(line: usize, key: &str, v: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = item.split_once("..") {
            let (Some((ba, ea)), Some((bb, eb))) = (a.split_once('^'), b.split_once('^')) else {
                return Err(cfg_err(line, format!("ranges must be written like 2^10..2^16, got `{item}`")));
            };
            if ba.trim() != bb.trim() {
                return Err(cfg_err(line, format!("range `{item}` mixes bases")));
            }
            let base: usize = parse_scalar(line, key, ba.trim())?;
            let (ea, eb): (u32, u32) = (parse_scalar(line, key, ea.trim())?, parse_scalar(line, key, eb.trim())?);
            for e in ea..=eb {
                out.push(
                    base.checked_pow(e).ok_or_else(|| cfg_err(line, format!("`{item}` overflows")))?,
                );
            }
        } else {
            out.push(parse_count(line, key, item)?);
        }
    }
    if out.is_empty() {
        return Err(cfg_err(line, format!("`{key}` needs at least one value")));
    }
    Ok(out)
}

fn parse_floats(line: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    let out: Vec<f64> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_scalar(line, key, s))
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(cfg_err(line, format!("`{key}` needs at least one value")));
    }
    Ok(out)
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let Some((key, value)) = t.split_once('=') else {
                return Err(cfg_err(line, format!("expected `key = value`, got `{t}`")));
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(&known) = CONFIG_KEYS.iter().find(|k| **k == key) else {
                return Err(cfg_err(line, format!("unknown key `{key}`")));
            };
            if seen.contains(&known) {
                return Err(cfg_err(line, format!("duplicate key `{key}`")));
            }
            if (known == "grid_factor" && seen.contains(&"grid_width"))
                || (known == "grid_width" && seen.contains(&"grid_factor"))
            {
                return Err(cfg_err(line, "set either `grid_factor` or `grid_width`, not both"));
            }
            seen.push(known);
            match known {
                "experiment" => cfg.experiment = Some(value.parse().map_err(|e| cfg_err(line, e))?),
                "model" => cfg.model.kind = value.parse::<ModelKind>().map_err(|e| cfg_err(line, e))?,
                "radius" => cfg.model.radius = parse_scalar(line, key, value)?,
                "kappa" => cfg.model.kappa = parse_scalar(line, key, value)?,
                "gamma" => cfg.model.gamma = parse_scalar(line, key, value)?,
                "intrinsic_dim" => cfg.model.intrinsic_dim = parse_scalar(line, key, value)?,
                "ambient_dim" => cfg.model.ambient_dim = parse_scalar(line, key, value)?,
                "sigma" => cfg.sigma = parse_scalar(line, key, value)?,
                "n" => cfg.n = parse_counts(line, key, value)?,
                "replicates" => cfg.replicates = parse_scalar(line, key, value)?,
                "seed" => cfg.seed = parse_scalar(line, key, value)?,
                "rate_constant" => cfg.rate_constant = parse_scalar(line, key, value)?,
                "grid_factor" => cfg.grid = GridWidth::Relative(parse_scalar(line, key, value)?),
                "grid_width" => cfg.grid = GridWidth::Absolute(parse_scalar(line, key, value)?),
                "cell_budget" => cfg.cell_budget = parse_count(line, key, value)?,
                "gamma_grid" => cfg.gamma_grid = parse_floats(line, key, value)?,
                "mc_samples" => cfg.mc_samples = parse_count(line, key, value)?,
                "density_samples" => cfg.density_samples = parse_count(line, key, value)?,
                "bound_n" => cfg.bound_n = parse_counts(line, key, value)?,
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "timing" => cfg.timing = parse_scalar(line, key, value)?,
                _ => unreachable!("every key in CONFIG_KEYS is handled"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Checks everything that does not depend on the experiment kind.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n.iter().any(|&n| n < 2) {
            return bad("every sample size must be at least 2".into());
        }
        if self.n.windows(2).any(|w| w[1] <= w[0]) {
            return bad("the `n` grid must be strictly increasing".into());
        }
        if self.replicates == 0 {
            return bad("`replicates` must be at least 1".into());
        }
        if !(self.rate_constant > 0.0) {
            return bad("`rate_constant` must be positive".into());
        }
        let g = match self.grid {
            GridWidth::Relative(f) | GridWidth::Absolute(f) => f,
        };
        if !(g > 0.0) {
            return bad("grid width must be positive".into());
        }
        if self.gamma_grid.iter().any(|g| !(*g >= 0.0)) {
            return bad("`gamma_grid` values must be nonnegative".into());
        }
        if self.bound_n.contains(&0) {
            return bad("`bound_n` values must be positive".into());
        }
        Ok(())
    }

    pub fn build_model(&self) -> Result<ManifoldModel> {
        self.model.build().map_err(|e| Error::Config(format!("invalid model: {e}")))
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.build_model()?, self.sigma)
            .map_err(|e| Error::Config(format!("invalid noise level {}: {e}", self.sigma)))
    }

    /// Canonical text form: parsing it gives back an equal config.
    pub fn echo(&self) -> String {
        let mut lines = Vec::new();
        if let Some(e) = self.experiment {
            lines.push(format!("experiment = {e}"));
        }
        let m = &self.model;
        lines.push(format!("model = {}", m.kind));
        lines.push(format!("radius = {}", m.radius));
        lines.push(format!("kappa = {}", m.kappa));
        lines.push(format!("gamma = {}", m.gamma));
        lines.push(format!("intrinsic_dim = {}", m.intrinsic_dim));
        lines.push(format!("ambient_dim = {}", m.ambient_dim));
        lines.push(format!("sigma = {}", self.sigma));
        lines.push(format!("n = {}", join(&self.n)));
        lines.push(format!("replicates = {}", self.replicates));
        lines.push(format!("seed = {}", self.seed));
        lines.push(format!("rate_constant = {}", self.rate_constant));
        lines.push(match self.grid {
            GridWidth::Relative(f) => format!("grid_factor = {f}"),
            GridWidth::Absolute(h) => format!("grid_width = {h}"),
        });
        lines.push(format!("cell_budget = {}", self.cell_budget));
        lines.push(format!("gamma_grid = {}", join(&self.gamma_grid)));
        lines.push(format!("mc_samples = {}", self.mc_samples));
        lines.push(format!("density_samples = {}", self.density_samples));
        lines.push(format!("bound_n = {}", join(&self.bound_n)));
        lines.push(format!("output_dir = {}", self.output_dir.display()));
        lines.push(format!("timing = {}", self.timing));
        lines.join("\n") + "\n"
    }

    /// Header lines for report files: the version and the config echo. The
    /// output directory is left out so that a report does not depend on
    /// where it was written.
    pub fn header(&self, what: &str) -> Vec<String> {
        let mut out = vec![format!("tubelab {} {what}", env!("CARGO_PKG_VERSION"))];
        out.extend(self.echo().lines().filter(|l| !l.starts_with("output_dir =")).map(str::to_string));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = ExperimentConfig::parse(
            "# comment\nexperiment = rates\nmodel = circle\nsigma = 0.2\nn = 2^10..2^12, 10000\nreplicates=3\n",
        )
        .unwrap();
        assert_eq!(cfg.experiment, Some(ExperimentKind::Rates));
        assert_eq!(cfg.sigma, 0.2);
        assert_eq!(cfg.n, vec![1024, 2048, 4096, 10000]);
        assert_eq!(cfg.replicates, 3);
        assert_eq!(cfg.rate_constant, 1.5);
    }

    #[test]
    fn echo_round_trips() {
        let mut cfg = ExperimentConfig::parse("model = bump\nkappa = 0.9\ngamma = 0.05\ngrid_width = 0.01\ntiming = true\n").unwrap();
        cfg.experiment = Some(ExperimentKind::Lecam);
        let back = ExperimentConfig::parse(&cfg.echo()).unwrap();
        assert_eq!(back, cfg);
        let d = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::parse(&d.echo()).unwrap(), d);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "sigmaa = 0.1",
            "sigma = 0.1\nsigma = 0.2",
            "sigma",
            "sigma = abc",
            "n = 100, 50",
            "n = 2^10..3^12",
            "replicates = 0",
            "model = torus",
            "grid_factor = 0.2\ngrid_width = 0.01",
            "timing = maybe",
        ] {
            let e = ExperimentConfig::parse(text).unwrap_err();
            assert!(e.is_config(), "{text}: {e}");
        }
        let e = ExperimentConfig::parse("x = 1").unwrap_err().to_string();
        assert!(e.contains("line 1") && e.contains("unknown key `x`"), "{e}");
    }

    #[test]
    fn model_errors_are_config_errors() {
        let cfg = ExperimentConfig::parse("model = circle\nsigma = 2.0").unwrap();
        assert!(matches!(cfg.noise_model(), Err(Error::Config(_))));
        let cfg = ExperimentConfig::parse("model = bump\ngamma = 1.0").unwrap();
        assert!(matches!(cfg.build_model(), Err(Error::Config(_))));
    }

    #[test]
    fn header_embeds_echo() {
        let cfg = ExperimentConfig::default();
        let h = cfg.header("rates");
        assert!(h[0].starts_with("tubelab "));
        assert!(h.iter().any(|l| l == "seed = 1"));
        assert!(!h.iter().any(|l| l.starts_with("output_dir")));
        let text: String = h[1..].iter().map(|l| format!("{l}\n")).collect();
        let mut back = ExperimentConfig::parse(&text).unwrap();
        back.output_dir = cfg.output_dir.clone();
        assert_eq!(back, cfg);
    }
}
