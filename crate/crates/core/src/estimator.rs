//! Union-of-balls support estimate and the level-set manifold estimate.
//!
//! `Ŝ` is the union of `ε`-balls around the data. The distance from each
//! point of `Ŝ` to its boundary is computed on a raster, `σ̂` is its
//! maximum, and the manifold estimate keeps the cells at depth at least
//! `σ̂ − 2ε`.

use log::warn;

use crate::error::{Error, Result};
use crate::geometry::{
    grid_distance_to_complement, unit_ball_volume, BoundingBox, DistanceField, KdTree, PointSet,
    DEFAULT_CELL_BUDGET,
};

/// Default multiplier in `ε = C (ln n / n)^(1/D)`.
pub const DEFAULT_RATE_CONSTANT: f64 = 1.5;
/// Default raster width as a fraction of `ε`.
pub const DEFAULT_GRID_FACTOR: f64 = 0.2;

/// Raster cell width, absolute or as a fraction of `ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridWidth {
    Absolute(f64),
    Relative(f64),
}

#[derive(Clone, Debug)]
pub struct EstimatorConfig {
    pub epsilon: f64,
    pub rate_constant: f64,
    pub grid_width: GridWidth,
    /// Raster box; defaults to the data extent enlarged by `ε + 2h`.
    pub bbox: Option<BoundingBox>,
    pub cell_budget: usize,
}

impl EstimatorConfig {
    /// Configuration for `n` points in `R^dim` with `ε` from
    /// [`choose_epsilon`] and `h = ε / 5`.
    pub fn for_sample(n: usize, dim: usize, rate_constant: f64) -> Result<Self> {
        Ok(EstimatorConfig {
            epsilon: choose_epsilon(n, dim, rate_constant)?,
            rate_constant,
            grid_width: GridWidth::Relative(DEFAULT_GRID_FACTOR),
            bbox: None,
            cell_budget: DEFAULT_CELL_BUDGET,
        })
    }

    /// Configuration with a fixed ball radius.
    pub fn with_epsilon(epsilon: f64) -> Self {
        EstimatorConfig {
            epsilon,
            rate_constant: f64::NAN,
            grid_width: GridWidth::Relative(DEFAULT_GRID_FACTOR),
            bbox: None,
            cell_budget: DEFAULT_CELL_BUDGET,
        }
    }

    pub fn grid_width(mut self, w: GridWidth) -> Self {
        self.grid_width = w;
        self
    }

    pub fn bbox(mut self, bbox: BoundingBox) -> Self {
        self.bbox = Some(bbox);
        self
    }

    pub fn cell_budget(mut self, cells: usize) -> Self {
        self.cell_budget = cells;
        self
    }

    /// Raster cell width.
    pub fn h(&self) -> f64 {
        match self.grid_width {
            GridWidth::Absolute(h) => h,
            GridWidth::Relative(f) => f * self.epsilon,
        }
    }

    fn validate(&self) -> Result<()> {
        let h = self.h();
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(h > 0.0) {
            return Err(Error::invalid(format!("grid width must be positive, got {h}")));
        }
        if h > self.epsilon / 5.0 * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "grid width {h} exceeds epsilon / 5 = {}",
                self.epsilon / 5.0
            )));
        }
        Ok(())
    }
}

/// `C (ln n / n)^(1/D)`.
pub fn choose_epsilon(n: usize, dim: usize, rate_constant: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 points to choose epsilon, got {n}")));
    }
    if dim == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if !(rate_constant > 0.0 && rate_constant.is_finite()) {
        return Err(Error::invalid(format!("rate constant must be positive, got {rate_constant}")));
    }
    let n = n as f64;
    Ok(rate_constant * (n.ln() / n).powf(1.0 / dim as f64))
}

/// `(2 / (χ ω_D))^(1/D)` with `χ = 2^(−D)`: rate constants at or below this
/// value are not covered by the consistency guarantee.
pub fn rate_constant_threshold(dim: usize) -> f64 {
    let chi = 0.5f64.powi(dim as i32);
    (2.0 / (chi * unit_ball_volume(dim))).powf(1.0 / dim as f64)
}

#[derive(Debug)]
pub struct SupportEstimate {
    tree: KdTree,
    field: DistanceField,
    pub epsilon: f64,
    pub h: f64,
    pub sigma_hat: f64,
    pub n_data: usize,
}

impl SupportEstimate {
    pub fn field(&self) -> &DistanceField {
        &self.field
    }

    /// Whether `y` lies within `ε` of a data point.
    pub fn contains(&self, y: &[f64]) -> bool {
        self.tree.any_within(y, self.epsilon * self.epsilon)
    }

    /// Plain-text `key = value` summary.
    pub fn summary(&self) -> String {
        format!(
            "epsilon = {}\nh = {}\nsigma_hat = {}\nn = {}\ncells = {}\ninside_cells = {}\n",
            self.epsilon,
            self.h,
            self.sigma_hat,
            self.n_data,
            self.field.grid().len(),
            self.field.inside_count()
        )
    }
}

/// Raster point cloud of the manifold estimate.
#[derive(Clone, Debug)]
pub struct ManifoldEstimate {
    pub points: PointSet,
    pub epsilon: f64,
    pub sigma_hat: f64,
    /// Depth threshold `max(σ̂ − 2ε, 0)`.
    pub threshold: f64,
    pub h: f64,
}

pub fn estimate_support(y: &PointSet, cfg: &EstimatorConfig) -> Result<SupportEstimate> {
    y.require_nonempty()?;
    cfg.validate()?;
    let (eps, h) = (cfg.epsilon, cfg.h());
    let bbox = match &cfg.bbox {
        Some(b) => {
            if b.dim() != y.dim() {
                return Err(Error::DimensionMismatch { expected: y.dim(), got: b.dim() });
            }
            if !y.iter().all(|p| b.contains_ball(p, eps)) {
                return Err(Error::invalid("bounding box must contain every data ball"));
            }
            b.clone()
        }
        None => {
            let (lo, hi) = y.extent().expect("nonempty");
            let m = eps + 2.0 * h;
            BoundingBox::new(lo.iter().map(|v| v - m).collect(), hi.iter().map(|v| v + m).collect())?
        }
    };
    let tree = KdTree::new(y);
    let r2 = eps * eps;
    let field = grid_distance_to_complement(|p| tree.any_within(p, r2), &bbox, h, cfg.cell_budget)?;
    let sigma_hat = field.argmax().map(|(_, v)| v).unwrap_or(0.0);
    Ok(SupportEstimate { tree, field, epsilon: eps, h, sigma_hat, n_data: y.len() })
}

pub fn extract_manifold(s: &SupportEstimate) -> ManifoldEstimate {
    let threshold = (s.sigma_hat - 2.0 * s.epsilon).max(0.0);
    let grid = s.field.grid();
    let mut points = PointSet::new(grid.dim());
    for i in s.field.inside_cells() {
        if s.field.value(i) >= threshold {
            points.push(&grid.center(i));
        }
    }
    ManifoldEstimate { points, epsilon: s.epsilon, sigma_hat: s.sigma_hat, threshold, h: s.h }
}

/// Logs a warning when `rate_constant` is at or below
/// [`rate_constant_threshold`] for dimension `dim`.
pub fn warn_if_below_threshold(rate_constant: f64, dim: usize) {
    if rate_constant.is_finite() && rate_constant <= rate_constant_threshold(dim) {
        warn!(
            "rate constant {rate_constant} is at most {:.4}, below the range covered by the consistency guarantee",
            rate_constant_threshold(dim)
        );
    }
}

/// Support and manifold estimates in one call.
pub fn estimate(y: &PointSet, cfg: &EstimatorConfig) -> Result<ManifoldEstimate> {
    warn_if_below_threshold(cfg.rate_constant, y.dim());
    Ok(extract_manifold(&estimate_support(y, cfg)?))
}
