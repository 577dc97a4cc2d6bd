//! Observations `Y = ξ + Z`: `ξ` uniform on a model, `Z` uniform on the
//! normal ball of radius `σ` at `ξ`. Also Monte Carlo estimates of the
//! density of `Y` against Lebesgue measure.

use std::path::Path;

use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{mc_volume, norm, unit_ball_volume, KdTree, PointSet, MC_BATCH};
use crate::io::write_points_file;
use crate::manifold::ManifoldModel;
use crate::rng::{derive_seed, stream_rng, Rng};

const TAG_MANIFOLD: u64 = 1;
const TAG_OBSERVATIONS: u64 = 2;
const TAG_FIBER: u64 = 3;
const TAG_DENSITY: u64 = 4;
const TAG_TUBE_VOLUME: u64 = 5;

/// A model together with the fiber half-width `σ`.
#[derive(Clone, Debug)]
pub struct NoiseModel {
    manifold: ManifoldModel,
    sigma: f64,
}

impl NoiseModel {
    pub fn new(manifold: ManifoldModel, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
        }
        if sigma >= manifold.reach() {
            return Err(Error::NoiseExceedsReach);
        }
        Ok(NoiseModel { manifold, sigma })
    }

    pub fn manifold(&self) -> &ManifoldModel {
        &self.manifold
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn ambient_dim(&self) -> usize {
        self.manifold.ambient_dim()
    }

    /// Whether `y` lies in the support `M ⊕ σ`.
    pub fn in_support(&self, y: &[f64]) -> bool {
        self.manifold.distance_to_manifold(y).map(|d| d <= self.sigma).unwrap_or(false)
    }

    /// Monte Carlo estimate of the volume of the support `M ⊕ σ`.
    pub fn tube_volume(&self, n_mc: usize, seed: u64) -> Result<crate::geometry::McEstimate> {
        let bbox = self.manifold.bounding_box(self.sigma);
        mc_volume(|p| self.in_support(p), &bbox, n_mc, derive_seed(seed, &[TAG_TUBE_VOLUME]))
    }
}

/// `n` observations with their latent manifold points.
#[derive(Clone, Debug)]
pub struct ObservationSet {
    pub y: PointSet,
    pub xi: Option<PointSet>,
    pub seed: u64,
    pub model: NoiseModel,
}

impl ObservationSet {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Writes `y_1..y_D` and, when retained, `xi_1..xi_D`.
    pub fn write_csv(&self, path: &Path, comments: &[String]) -> Result<()> {
        write_points_file(path, &self.y, self.xi.as_ref(), comments)
    }
}

/// A Monte Carlo density value with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityEstimate {
    pub value: f64,
    pub std_error: f64,
    pub ball_radius: f64,
}

fn require_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    Ok(())
}

/// Runs `fill(rng, count, out)` over fixed-size batches, each with its own
/// stream, and concatenates the outputs in batch order.
fn batched<F>(n: usize, seed: u64, dim: usize, fill: F) -> PointSet
where
    F: Fn(&mut Rng, usize, &mut Vec<f64>) + Sync,
{
    let chunks: Vec<Vec<f64>> = (0..n.div_ceil(MC_BATCH))
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b as u64);
            let count = MC_BATCH.min(n - b * MC_BATCH);
            let mut out = Vec::with_capacity(count * dim);
            fill(&mut rng, count, &mut out);
            out
        })
        .collect();
    PointSet::from_flat(dim, chunks.concat()).expect("batches hold whole points")
}

/// `n` independent draws from the uniform (volume) measure on `m`.
pub fn sample_manifold_uniform(m: &ManifoldModel, n: usize, seed: u64) -> Result<PointSet> {
    require_n(n)?;
    let seed = derive_seed(seed, &[TAG_MANIFOLD]);
    Ok(batched(n, seed, m.ambient_dim(), |rng, count, out| {
        for _ in 0..count {
            out.extend(m.sample_surface(rng).0);
        }
    }))
}

/// Coefficients uniform on the `k`-ball of radius `sigma`.
fn ball_coefficients(rng: &mut Rng, k: usize, sigma: f64) -> Vec<f64> {
    if k == 1 {
        return vec![sigma * (2.0 * rng.random::<f64>() - 1.0)];
    }
    let dir = loop {
        let g: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&g);
        if n > 1e-12 {
            break g.into_iter().map(|c| c / n).collect::<Vec<f64>>();
        }
    };
    let r = sigma * rng.random::<f64>().powf(1.0 / k as f64);
    dir.into_iter().map(|c| r * c).collect()
}

fn offset(rng: &mut Rng, normals: &[Vec<f64>], sigma: f64, dim: usize) -> Vec<f64> {
    let c = ball_coefficients(rng, normals.len(), sigma);
    let mut z = vec![0.0; dim];
    for (ck, nu) in c.iter().zip(normals) {
        for (zi, ni) in z.iter_mut().zip(nu) {
            *zi += ck * ni;
        }
    }
    z
}

/// A draw `Z` from the uniform distribution on the normal ball of radius
/// `sigma` at the manifold point `xi`.
pub fn sample_fiber_noise(m: &ManifoldModel, xi: &[f64], sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if !(sigma >= 0.0) {
        return Err(Error::invalid(format!("sigma must be nonnegative, got {sigma}")));
    }
    if sigma >= m.reach() {
        return Err(Error::NoiseExceedsReach);
    }
    let frame = m.frame_at(xi)?;
    let mut rng = stream_rng(derive_seed(seed, &[TAG_FIBER]), 0);
    Ok(offset(&mut rng, &frame.normals, sigma, m.ambient_dim()))
}

/// `n` observations from `model`, deterministic in `seed` and independent
/// of the number of worker threads.
pub fn sample_observations(model: &NoiseModel, n: usize, seed: u64) -> Result<ObservationSet> {
    require_n(n)?;
    let dim = model.ambient_dim();
    let both = batched(n, derive_seed(seed, &[TAG_OBSERVATIONS]), 2 * dim, |rng, count, out| {
        for _ in 0..count {
            let (xi, normals) = model.manifold.sample_surface(rng);
            let z = offset(rng, &normals, model.sigma, dim);
            out.extend(xi.iter().zip(&z).map(|(a, b)| a + b));
            out.extend(xi);
        }
    });
    let mut y = PointSet::with_capacity(dim, n);
    let mut xi = PointSet::with_capacity(dim, n);
    for p in both.iter() {
        y.push(&p[..dim]);
        xi.push(&p[dim..]);
    }
    Ok(ObservationSet { y, xi: Some(xi), seed, model: model.clone() })
}

/// Estimates the density of `Y` at `y` as the fraction of `n_mc` fresh
/// observations inside `B(y, ε_loc)` divided by the ball volume.
pub fn empirical_density(
    model: &NoiseModel,
    y: &[f64],
    eps_loc: f64,
    n_mc: usize,
    seed: u64,
) -> Result<DensityEstimate> {
    let grid = PointSet::from_points(model.ambient_dim(), [y])?;
    Ok(empirical_density_many(model, &grid, eps_loc, n_mc, seed)?.remove(0))
}

/// [`empirical_density`] at every point of `grid`, sharing one sample of
/// `n_mc` observations.
pub fn empirical_density_many(
    model: &NoiseModel,
    grid: &PointSet,
    eps_loc: f64,
    n_mc: usize,
    seed: u64,
) -> Result<Vec<DensityEstimate>> {
    if !(eps_loc > 0.0) {
        return Err(Error::invalid(format!("ball radius must be positive, got {eps_loc}")));
    }
    if grid.dim() != model.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: model.ambient_dim(), got: grid.dim() });
    }
    let obs = sample_observations(model, n_mc, derive_seed(seed, &[TAG_DENSITY]))?;
    let tree = KdTree::new(&obs.y);
    let vol = unit_ball_volume(model.ambient_dim()) * eps_loc.powi(model.ambient_dim() as i32);
    let r2 = eps_loc * eps_loc;
    Ok(grid
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|q| {
            let mut hits = 0u64;
            tree.for_each_within(q, r2, |_| hits += 1);
            let p = hits as f64 / n_mc as f64;
            DensityEstimate {
                value: p / vol,
                std_error: (p * (1.0 - p) / n_mc as f64).sqrt() / vol,
                ball_radius: eps_loc,
            }
        })
        .collect())
}

/// Extremes over `grid` of the ratio between the estimated density of `Y`
/// and the uniform density `1 / V(M ⊕ σ)` on the support.
pub fn density_ratio_bounds(
    model: &NoiseModel,
    grid: &PointSet,
    eps_loc: f64,
    n_mc: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    grid.require_nonempty()?;
    let tube = model.tube_volume(n_mc, seed)?;
    let q = empirical_density_many(model, grid, eps_loc, n_mc, seed)?;
    let (lo, hi) = q.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
        let r = e.value * tube.value;
        (lo.min(r), hi.max(r))
    });
    Ok((lo, hi))
}

/// Exact density of `Y` for a circle of radius `radius` in the plane:
/// `1 / (4πσr)` at distance `r` from the center inside the annulus.
pub fn circle_noise_density(radius: f64, sigma: f64, y: &[f64]) -> f64 {
    let r = norm(y);
    if (r - radius).abs() <= sigma {
        1.0 / (4.0 * std::f64::consts::PI * sigma * r)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dot;
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    use std::f64::consts::{PI, TAU};

    fn ks_uniform(mut xs: Vec<f64>) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
            .fold(0.0, f64::max)
    }

    /// Critical value of the one-sample KS statistic at level 0.001.
    fn ks_critical(n: usize) -> f64 {
        1.949 / (n as f64).sqrt()
    }

    #[test]
    fn circle_angles_pass_chi_square() {
        let m = ManifoldModel::circle(1.0, 2).unwrap();
        let n = 100_000;
        let xs = sample_manifold_uniform(&m, n, 11).unwrap();
        let mut bins = [0usize; 20];
        for p in xs.iter() {
            let a = p[1].atan2(p[0]).rem_euclid(TAU);
            bins[((a / TAU * 20.0) as usize).min(19)] += 1;
        }
        let e = n as f64 / 20.0;
        let stat: f64 = bins.iter().map(|&o| (o as f64 - e).powi(2) / e).sum();
        let crit = ChiSquared::new(19.0).unwrap().inverse_cdf(0.999);
        assert!(stat < crit, "{stat} >= {crit}");
    }

    #[test]
    fn saucer_samples_spread_by_area() {
        // d = 1: on each side of the axis, two faces of length 1 and a
        // semicircular rim of length πκ.
        let kappa = 0.5;
        let m = ManifoldModel::saucer(kappa, 1, 2).unwrap();
        let n = 100_000;
        let xs = sample_manifold_uniform(&m, n, 12).unwrap();
        let rim = xs.iter().filter(|p| p[0].abs() > 1.0).count() as f64 / n as f64;
        let expect = PI * kappa / (2.0 + PI * kappa);
        assert!((rim - expect).abs() < 4.0 * (expect * (1.0 - expect) / n as f64).sqrt());
        // d = 2: radial CDF of points on the flat top is s².
        let m = ManifoldModel::saucer(kappa, 2, 3).unwrap();
        let xs = sample_manifold_uniform(&m, n, 13).unwrap();
        let top: Vec<f64> = xs
            .iter()
            .filter(|p| p[2] == kappa && p[0].hypot(p[1]) < 1.0)
            .map(|p| p[0].hypot(p[1]).powi(2))
            .collect();
        assert!(ks_uniform(top.clone()) < ks_critical(top.len()));
    }

    #[test]
    fn samples_lie_on_model() {
        for m in [
            ManifoldModel::sphere(2.0, 3, 5).unwrap(),
            ManifoldModel::bump(1.0, 0.2, 2, 4).unwrap(),
        ] {
            let xs = sample_manifold_uniform(&m, 2000, 1).unwrap();
            for p in xs.iter() {
                assert!(m.distance_to_manifold(p).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn sphere_mean_near_zero() {
        let m = ManifoldModel::sphere(1.0, 2, 3).unwrap();
        let n = 50_000;
        let xs = sample_manifold_uniform(&m, n, 2).unwrap();
        for k in 0..3 {
            let mean: f64 = xs.iter().map(|p| p[k]).sum::<f64>() / n as f64;
            assert!(mean.abs() < 4.0 / (n as f64).sqrt());
        }
    }

    #[test]
    fn fiber_noise_radial_laws() {
        let n = 100_000;
        // Codimension 1: |Z| / σ uniform, sign fair.
        let m = ManifoldModel::circle(1.0, 2).unwrap();
        let mut rng = stream_rng(3, 0);
        let normals = m.frame_at(&[1.0, 0.0]).unwrap().normals;
        let zs: Vec<Vec<f64>> = (0..n).map(|_| offset(&mut rng, &normals, 0.3, 2)).collect();
        let r: Vec<f64> = zs.iter().map(|z| norm(z) / 0.3).collect();
        assert!(ks_uniform(r) < ks_critical(n));
        let pos = zs.iter().filter(|z| z[0] > 0.0).count() as f64 / n as f64;
        assert!((pos - 0.5).abs() < 4.0 * 0.5 / (n as f64).sqrt());
        // Codimension 2: (|Z| / σ)² uniform.
        let m = ManifoldModel::circle(1.0, 3).unwrap();
        let normals = m.frame_at(&[0.0, 1.0, 0.0]).unwrap().normals;
        let r: Vec<f64> =
            (0..n).map(|_| (norm(&offset(&mut rng, &normals, 0.3, 3)) / 0.3).powi(2)).collect();
        assert!(ks_uniform(r) < ks_critical(n));
    }

    #[test]
    fn fiber_noise_is_normal_and_bounded() {
        let m = ManifoldModel::bump(1.0, 0.1, 2, 4).unwrap();
        let xs = sample_manifold_uniform(&m, 500, 4).unwrap();
        for (i, x) in xs.iter().enumerate() {
            let z = sample_fiber_noise(&m, x, 0.4, i as u64).unwrap();
            assert!(norm(&z) <= 0.4 + 1e-15);
            for t in &m.frame_at(x).unwrap().tangents {
                assert!(dot(&z, t).abs() <= 1e-9);
            }
        }
        let z = sample_fiber_noise(&m, xs.point(0), 0.0, 0).unwrap();
        assert!(z.iter().all(|&c| c == 0.0));
        assert!(matches!(sample_fiber_noise(&m, xs.point(0), 1.0, 0), Err(Error::NoiseExceedsReach)));
    }

    #[test]
    fn observations_project_back_to_latent_points() {
        let model = NoiseModel::new(ManifoldModel::saucer(1.0, 2, 4).unwrap(), 0.3).unwrap();
        let obs = sample_observations(&model, 3000, 9).unwrap();
        let xi = obs.xi.as_ref().unwrap();
        for (y, x) in obs.y.iter().zip(xi.iter()) {
            assert!(model.manifold().distance_to_manifold(y).unwrap() <= 0.3 + 1e-9);
            let p = model.manifold().project(y).unwrap();
            assert!(crate::geometry::dist2(&p, x).sqrt() <= 1e-8);
        }
        let again = sample_observations(&model, 3000, 9).unwrap();
        assert_eq!(obs.y.as_flat(), again.y.as_flat());
        let other = sample_observations(&model, 3000, 10).unwrap();
        assert_ne!(obs.y.as_flat(), other.y.as_flat());
    }

    #[test]
    fn support_maximum_approaches_sigma() {
        let sigma = 0.25;
        let model = NoiseModel::new(ManifoldModel::circle(1.0, 3).unwrap(), sigma).unwrap();
        let n = 100_000;
        let obs = sample_observations(&model, n, 5).unwrap();
        let sup = obs
            .y
            .iter()
            .map(|y| model.manifold().distance_to_manifold(y).unwrap())
            .fold(0.0, f64::max);
        assert!(sup <= sigma + 1e-12 && sup >= sigma * (1.0 - 10.0 / n as f64), "{sup}");
    }

    #[test]
    fn noise_model_validation() {
        let c = ManifoldModel::circle(1.0, 2).unwrap();
        assert!(matches!(NoiseModel::new(c.clone(), 1.0), Err(Error::NoiseExceedsReach)));
        assert!(NoiseModel::new(c, 0.0).is_err());
    }

    #[test]
    fn circle_density_matches_closed_form() {
        let (radius, sigma) = (1.0, 0.3);
        let model = NoiseModel::new(ManifoldModel::circle(radius, 2).unwrap(), sigma).unwrap();
        let pts: Vec<[f64; 2]> = vec![[0.85, 0.0], [0.0, 1.0], [-0.8, 0.6], [0.9, -0.9]];
        let grid = PointSet::from_points(2, pts.iter().map(|p| p.as_slice())).unwrap();
        let est = empirical_density_many(&model, &grid, 0.04, 1_000_000, 6).unwrap();
        for (p, e) in pts.iter().zip(&est) {
            // The ball average of 1/(4πσr) differs from the center value by
            // O(ε²/r²), well inside the sampling error here.
            let exact = circle_noise_density(radius, sigma, p);
            assert!((e.value - exact).abs() <= 3.0 * e.std_error, "{p:?}: {} vs {exact}", e.value);
        }
        let outside = empirical_density(&model, &[0.0, 0.0], 0.04, 10_000, 6).unwrap();
        assert_eq!(outside.value, 0.0);
    }

    #[test]
    fn density_integrates_to_one() {
        let model = NoiseModel::new(ManifoldModel::circle(1.0, 2).unwrap(), 0.3).unwrap();
        let h = 0.05;
        let m = (2.8 / h) as usize + 1;
        let mut grid = PointSet::new(2);
        for i in 0..m {
            for j in 0..m {
                grid.push(&[-1.4 + h * i as f64, -1.4 + h * j as f64]);
            }
        }
        let est = empirical_density_many(&model, &grid, 0.05, 200_000, 7).unwrap();
        let total: f64 = est.iter().map(|e| e.value * h * h).sum();
        assert!((total - 1.0).abs() < 0.05, "{total}");
    }

    #[test]
    fn circle_density_ratio_window() {
        let (radius, sigma) = (1.0, 0.3);
        let model = NoiseModel::new(ManifoldModel::circle(radius, 2).unwrap(), sigma).unwrap();
        let mut grid = PointSet::new(2);
        for i in 0..40 {
            let th = TAU * i as f64 / 40.0;
            for r in [0.8, 1.0, 1.2] {
                grid.push(&[r * th.cos(), r * th.sin()]);
            }
        }
        let (lo, hi) = density_ratio_bounds(&model, &grid, 0.05, 400_000, 8).unwrap();
        assert!(lo <= hi);
        // Exact ratio: V(tube) / (4πσr) = R / r.
        assert!(lo > 0.2 && hi < 5.0);
        assert!((hi - 1.0 / 0.8).abs() < 0.15 && (lo - 1.0 / 1.2).abs() < 0.15, "{lo} {hi}");
    }

    #[test]
    fn saucer_flat_region_ratio_near_one() {
        let model = NoiseModel::new(ManifoldModel::saucer(1.0, 1, 2).unwrap(), 0.3).unwrap();
        let mut grid = PointSet::new(2);
        for i in 0..10 {
            let s = -0.6 + 0.12 * i as f64;
            for v in [0.85, 1.0, 1.15, -0.85, -1.0, -1.15] {
                grid.push(&[s, v]);
            }
        }
        let (lo, hi) = density_ratio_bounds(&model, &grid, 0.05, 400_000, 9).unwrap();
        assert!(lo >= 0.5 && hi <= 2.0, "{lo} {hi}");
    }
}
