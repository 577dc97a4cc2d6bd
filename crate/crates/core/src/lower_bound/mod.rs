//! The two-point lower-bound construction: a saucer `M0` and a bump `M1`
//! at Hausdorff distance `γ`, with Monte Carlo estimates of how far apart
//! the corresponding observation distributions are.

mod discrete;
mod fit;

use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;

pub use discrete::{
    affinity, affinity_product_bound, hellinger, hellinger_product_identity, hellinger_sq, l1,
    lecam_risk_bound, product_affinity, DiscreteDistribution, MAX_PRODUCT_ORDER,
    MAX_PRODUCT_OUTCOMES,
};
pub use fit::{fit_scaling_exponent, ScalingFit};

use crate::error::{Error, Result};
use crate::geometry::{
    hausdorff, mc_volume, norm, unit_ball_volume, BoundingBox, McEstimate, MC_BATCH, MIN_MC_SAMPLES,
};
use crate::manifold::{bump_half_width, bump_height, dense_net, saucer_height, ManifoldModel};
use crate::rng::{derive_seed, stream_rng};

const TAG_SYM_DIFF: u64 = 11;
const TAG_TUBE: u64 = 12;
const TAG_L1: u64 = 13;
const TAG_NET: u64 = 14;

/// Inner ball samples per outer point in the ℓ1 estimate.
pub const L1_INNER_SAMPLES: usize = 32;

#[derive(Clone, Debug)]
pub struct LeCamPair {
    pub m0: ManifoldModel,
    pub m1: ManifoldModel,
    pub kappa: f64,
    pub gamma: f64,
    pub intrinsic_dim: usize,
    pub ambient_dim: usize,
}

pub fn build_lecam_pair(kappa: f64, gamma: f64, d: usize, ambient: usize) -> Result<LeCamPair> {
    let m0 = ManifoldModel::saucer(kappa, d, ambient)?;
    let m1 = ManifoldModel::bump(kappa, gamma, d, ambient)?;
    let lift = bump_height(kappa, gamma, 0.0)? - saucer_height(kappa, 0.0)?;
    assert!((lift - gamma).abs() <= 1e-12 * kappa, "bump height {lift} differs from gamma {gamma}");
    Ok(LeCamPair { m0, m1, kappa, gamma, intrinsic_dim: d, ambient_dim: ambient })
}

impl LeCamPair {
    /// Box containing every point within `sigma` of exactly one of the two
    /// models: the models agree outside `‖u‖ ≤ w`, where the top sheets
    /// range over heights `[κ, κ + γ]`.
    pub fn sym_diff_box(&self, sigma: f64) -> BoundingBox {
        let d = self.intrinsic_dim;
        let w = bump_half_width(self.kappa, self.gamma);
        let mut lower = vec![-sigma; self.ambient_dim];
        let mut upper = vec![sigma; self.ambient_dim];
        for i in 0..d {
            lower[i] = -(w + sigma);
            upper[i] = w + sigma;
        }
        lower[d] = self.kappa - sigma;
        upper[d] = self.kappa + self.gamma + sigma;
        BoundingBox::new(lower, upper).expect("sigma is positive")
    }

    fn check_sigma(&self, sigma: f64) -> Result<()> {
        if !(sigma > 0.0) {
            return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
        }
        if sigma >= self.kappa - self.gamma {
            return Err(Error::NoiseExceedsReach);
        }
        Ok(())
    }

    fn in_tubes(&self, y: &[f64], sigma: f64) -> (bool, bool) {
        (
            self.m0.distance_to_manifold(y).expect("dimension checked") <= sigma,
            self.m1.distance_to_manifold(y).expect("dimension checked") <= sigma,
        )
    }
}

/// Hausdorff distance between `δ`-nets of the two models.
///
/// Both models are surfaces of revolution about the same axis, so the
/// distance equals that between their planar profiles; for `d ≥ 2` the
/// nets are taken on the one-dimensional pair.
pub fn pair_hausdorff(pair: &LeCamPair, delta: f64) -> Result<f64> {
    if pair.gamma > 0.0 && delta > pair.gamma / 10.0 {
        return Err(Error::invalid(format!(
            "net spacing {delta} too coarse for gamma {} (need at most gamma/10)",
            pair.gamma
        )));
    }
    if pair.intrinsic_dim > 1 || pair.ambient_dim > 2 {
        return pair_hausdorff(&build_lecam_pair(pair.kappa, pair.gamma, 1, 2)?, delta);
    }
    let seed = derive_seed(0, &[TAG_NET]);
    hausdorff(&dense_net(&pair.m0, delta, seed)?, &dense_net(&pair.m1, delta, seed)?)
}

/// Counts of uniform samples in `bbox` falling in each class of `classify`.
fn mc_classes<F>(classify: F, bbox: &BoundingBox, classes: usize, n: usize, seed: u64) -> Vec<u64>
where
    F: Fn(&[f64]) -> Option<usize> + Sync,
{
    let dim = bbox.dim();
    (0..n.div_ceil(MC_BATCH))
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b as u64);
            let mut p = vec![0.0; dim];
            let mut counts = vec![0u64; classes];
            for _ in 0..MC_BATCH.min(n - b * MC_BATCH) {
                for k in 0..dim {
                    p[k] = rng.random_range(bbox.lower()[k]..bbox.upper()[k]);
                }
                if let Some(c) = classify(&p) {
                    counts[c] += 1;
                }
            }
            counts
        })
        .reduce(|| vec![0u64; classes], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect())
}

fn require_samples(n: usize) -> Result<()> {
    if n < MIN_MC_SAMPLES {
        return Err(Error::invalid(format!(
            "need at least {MIN_MC_SAMPLES} Monte Carlo samples, got {n}"
        )));
    }
    Ok(())
}

fn difference_counts(pair: &LeCamPair, sigma: f64, n_mc: usize, seed: u64) -> Result<(BoundingBox, Vec<u64>)> {
    pair.check_sigma(sigma)?;
    require_samples(n_mc)?;
    let bbox = pair.sym_diff_box(sigma);
    let counts = mc_classes(
        |y| match pair.in_tubes(y, sigma) {
            (true, false) => Some(0),
            (false, true) => Some(1),
            _ => None,
        },
        &bbox,
        2,
        n_mc,
        derive_seed(seed, &[TAG_SYM_DIFF]),
    );
    Ok((bbox, counts))
}

/// Volumes of `S0 \ S1` and `S1 \ S0`, with `S_i` the `σ`-tube around `M_i`,
/// from one shared sample.
pub fn tube_differences(pair: &LeCamPair, sigma: f64, n_mc: usize, seed: u64) -> Result<(McEstimate, McEstimate)> {
    let (bbox, counts) = difference_counts(pair, sigma, n_mc, seed)?;
    Ok((
        McEstimate::from_hits(counts[0], n_mc, bbox.volume()),
        McEstimate::from_hits(counts[1], n_mc, bbox.volume()),
    ))
}

/// Volume of the symmetric difference of the two `σ`-tubes.
pub fn symmetric_difference_volume(pair: &LeCamPair, sigma: f64, n_mc: usize, seed: u64) -> Result<McEstimate> {
    let (bbox, counts) = difference_counts(pair, sigma, n_mc, seed)?;
    Ok(McEstimate::from_hits(counts[0] + counts[1], n_mc, bbox.volume()))
}

/// Two estimates of `∫|q0 − q1|` for the uniform distributions on the two
/// tubes.
#[derive(Clone, Debug)]
pub struct L1Estimate {
    /// Integral of the absolute difference of the locally averaged densities
    /// `Q_i(B(y, ε)) / V(B(y, ε))`.
    pub direct: McEstimate,
    /// `V(S0 ∘ S1) / V(S0)`.
    pub proxy: McEstimate,
    pub tube_volume: McEstimate,
    pub ball_radius: f64,
}

/// ℓ1 distance between the uniform distributions on the `σ`-tubes of the
/// pair. The local densities are estimated by Monte Carlo at matched ball
/// points (the same points are tested against both tubes).
pub fn l1_distance_bound(pair: &LeCamPair, sigma: f64, n_mc: usize, seed: u64) -> Result<L1Estimate> {
    pair.check_sigma(sigma)?;
    require_samples(n_mc)?;
    let dim = pair.ambient_dim;
    let eps = sigma / 4.0;

    let tube_box = pair.m0.bounding_box(sigma);
    let v0 = mc_volume(
        |y| pair.m0.distance_to_manifold(y).expect("dimension checked") <= sigma,
        &tube_box,
        n_mc,
        derive_seed(seed, &[TAG_TUBE]),
    )?;
    let (only0, only1) = tube_differences(pair, sigma, n_mc, seed)?;
    let vol0 = v0.value;
    let vol1 = vol0 - only0.value + only1.value;
    let sym = only0.value + only1.value;
    let proxy = McEstimate {
        value: sym / vol0,
        std_error: (only0.std_error.powi(2) + only1.std_error.powi(2)).sqrt() / vol0,
        samples: n_mc,
    };

    // Outside `near` the balls never meet the symmetric difference, so both
    // averaged densities are proportional to the same function there.
    let near = pair.sym_diff_box(sigma).expanded(eps)?;
    let outer = (n_mc / L1_INNER_SAMPLES).max(1000);
    let l1_seed = derive_seed(seed, &[TAG_L1]);
    let (sum, sum_sq, mass0) = (0..outer.div_ceil(MC_BATCH))
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(l1_seed, b as u64);
            let mut y = vec![0.0; dim];
            let mut q = vec![0.0; dim];
            let (mut s, mut s2, mut m0) = (0.0, 0.0, 0.0);
            for _ in 0..MC_BATCH.min(outer - b * MC_BATCH) {
                for k in 0..dim {
                    y[k] = rng.random_range(near.lower()[k]..near.upper()[k]);
                }
                let (mut c0, mut c1) = (0u32, 0u32);
                for _ in 0..L1_INNER_SAMPLES {
                    let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                    let r = eps * rng.random::<f64>().powf(1.0 / dim as f64) / norm(&g);
                    for k in 0..dim {
                        q[k] = y[k] + r * g[k];
                    }
                    let (a, b) = pair.in_tubes(&q, sigma);
                    c0 += a as u32;
                    c1 += b as u32;
                }
                let k = L1_INNER_SAMPLES as f64;
                let g = (c0 as f64 / (k * vol0) - c1 as f64 / (k * vol1)).abs();
                s += g;
                s2 += g * g;
                m0 += c0 as f64 / k;
            }
            (s, s2, m0)
        })
        .reduce(|| (0.0, 0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let n = outer as f64;
    let vt = near.volume();
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    let near_part = vt * mean;
    let near_mass0 = vt * mass0 / n;
    let far_part = (1.0 / vol0 - 1.0 / vol1).abs() * (vol0 - near_mass0).max(0.0);
    let direct = McEstimate {
        value: near_part + far_part,
        std_error: vt * (var / (n - 1.0)).sqrt(),
        samples: outer * L1_INNER_SAMPLES,
    };
    Ok(L1Estimate { direct, proxy, tube_volume: v0, ball_radius: eps })
}

/// Outcome of comparing the ℓ1 distance with the mass a density bounded
/// below by `C_*` puts on a ball of radius `H/2`.
#[derive(Clone, Debug)]
pub struct Calibration {
    pub passed: bool,
    pub l1: McEstimate,
    pub hausdorff: f64,
    /// `C_* · ω_D · (H/2)^D`.
    pub required: f64,
}

pub fn calibration_check(
    pair: &LeCamPair,
    sigma: f64,
    c_star: f64,
    n_mc: usize,
    seed: u64,
) -> Result<Calibration> {
    let h = if pair.gamma > 0.0 { pair_hausdorff(pair, pair.gamma / 20.0)? } else { 0.0 };
    let l1 = l1_distance_bound(pair, sigma, n_mc, seed)?.direct;
    Ok(calibrate(pair.ambient_dim, l1, h, c_star))
}

/// The comparison behind [`calibration_check`] for an already computed ℓ1
/// estimate and Hausdorff distance in ambient dimension `dim`.
pub fn calibrate(dim: usize, l1: McEstimate, hausdorff: f64, c_star: f64) -> Calibration {
    let required = c_star * unit_ball_volume(dim) * (hausdorff / 2.0).powi(dim as i32);
    let passed = l1.value >= required - 3.0 * l1.std_error;
    Calibration { passed, l1, hausdorff, required }
}

#[cfg(test)]
mod tests;
