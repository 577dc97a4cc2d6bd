use rand::Rng;
use rayon::prelude::*;

use super::BoundingBox;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Samples per independent RNG stream. Batch `b` always uses stream `b` of
/// the master seed, so estimates do not depend on the thread count.
pub const MC_BATCH: usize = 1 << 14;

/// Smallest sample budget accepted by [`mc_volume`].
pub const MIN_MC_SAMPLES: usize = 1_000;

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    /// Estimate of `scale · p` from `hits` successes in `samples` trials.
    pub fn from_hits(hits: u64, samples: usize, scale: f64) -> Self {
        let n = samples as f64;
        let p = hits as f64 / n;
        Self {
            value: scale * p,
            std_error: scale * (p * (1.0 - p) / n).sqrt(),
            samples,
        }
    }

    /// True if `target` lies within `k` standard errors of the estimate.
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }
}

/// Volume of `{p ∈ box : membership(p)}` by uniform sampling over the box.
pub fn mc_volume<F>(membership: F, bbox: &BoundingBox, n_samples: usize, seed: u64) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> bool + Sync,
{
    if n_samples < MIN_MC_SAMPLES {
        return Err(Error::invalid(format!(
            "mc_volume needs at least {MIN_MC_SAMPLES} samples, got {n_samples}"
        )));
    }
    let dim = bbox.dim();
    let batches = n_samples.div_ceil(MC_BATCH);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b as u64);
            let count = MC_BATCH.min(n_samples - b * MC_BATCH);
            let mut p = vec![0.0; dim];
            let mut hits = 0u64;
            for _ in 0..count {
                for k in 0..dim {
                    p[k] = rng.random_range(bbox.lower()[k]..bbox.upper()[k]);
                }
                if membership(&p) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    Ok(McEstimate::from_hits(hits, n_samples, bbox.volume()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn whole_box_gives_exact_volume() {
        let b = BoundingBox::new(vec![-1.0, 0.0, 2.0], vec![1.0, 0.5, 5.0]).unwrap();
        let est = mc_volume(|_| true, &b, 5_000, 3).unwrap();
        assert_eq!(est.value, 3.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn unit_disk_area() {
        let b = BoundingBox::centered_cube(2, 1.0).unwrap();
        let est = mc_volume(|p| p[0] * p[0] + p[1] * p[1] <= 1.0, &b, 400_000, 5).unwrap();
        assert!(est.agrees_with(PI, 3.0), "{est:?}");
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let b = BoundingBox::centered_cube(3, 1.0).unwrap();
        let f = |p: &[f64]| p.iter().map(|x| x * x).sum::<f64>() <= 1.0;
        let a = mc_volume(f, &b, 100_000, 9).unwrap();
        let c = mc_volume(f, &b, 100_000, 9).unwrap();
        assert_eq!(a.value.to_bits(), c.value.to_bits());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let d = pool.install(|| mc_volume(f, &b, 100_000, 9).unwrap());
        assert_eq!(a.value.to_bits(), d.value.to_bits());
    }

    #[test]
    fn doubling_samples_shrinks_error_by_sqrt2() {
        let b = BoundingBox::centered_cube(2, 1.0).unwrap();
        let f = |p: &[f64]| p[0] * p[0] + p[1] * p[1] <= 1.0;
        let a = mc_volume(f, &b, 200_000, 1).unwrap();
        let c = mc_volume(f, &b, 400_000, 2).unwrap();
        let ratio = a.std_error / c.std_error;
        assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn rejects_small_budgets() {
        let b = BoundingBox::centered_cube(2, 1.0).unwrap();
        assert!(mc_volume(|_| true, &b, 999, 0).is_err());
    }
}
