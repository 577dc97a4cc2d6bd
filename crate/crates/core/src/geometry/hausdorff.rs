//! Hausdorff distances between finite point sets.

use rayon::prelude::*;

use super::{dist2, KdTree, PointSet};
use crate::error::{Error, Result};

/// Above this many point pairs the directed distance is computed with a
/// kd-tree over the target set.
pub const INDEX_PAIR_THRESHOLD: usize = 1_000_000;

fn check(a: &PointSet, b: &PointSet) -> Result<()> {
    a.require_nonempty()?;
    b.require_nonempty()?;
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// `max_{a∈A} min_{b∈B} ‖a − b‖`.
pub fn directed_hausdorff(a: &PointSet, b: &PointSet) -> Result<f64> {
    check(a, b)?;
    if a.len().saturating_mul(b.len()) > INDEX_PAIR_THRESHOLD {
        directed_hausdorff_indexed(a, b)
    } else {
        directed_hausdorff_brute(a, b)
    }
}

/// Double-loop reference implementation.
pub fn directed_hausdorff_brute(a: &PointSet, b: &PointSet) -> Result<f64> {
    check(a, b)?;
    let worst = a
        .iter()
        .map(|p| b.iter().map(|q| dist2(p, q)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Ok(worst.sqrt())
}

pub fn directed_hausdorff_indexed(a: &PointSet, b: &PointSet) -> Result<f64> {
    check(a, b)?;
    let tree = KdTree::new(b);
    let worst = a
        .as_flat()
        .par_chunks_exact(a.dim())
        .map(|p| tree.nearest(p).map_or(f64::INFINITY, |(_, d)| d))
        .reduce(|| 0.0, f64::max);
    Ok(worst.sqrt())
}

/// Symmetric Hausdorff distance `max(h(A,B), h(B,A))`.
pub fn hausdorff(a: &PointSet, b: &PointSet) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn set(points: &[[f64; 2]]) -> PointSet {
        PointSet::from_points(2, points).unwrap()
    }

    fn random_set(n: usize, dim: usize, rng: &mut impl Rng) -> PointSet {
        let mut s = PointSet::new(dim);
        for _ in 0..n {
            let p: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            s.push(&p);
        }
        s
    }

    #[test]
    fn single_pair() {
        let d = directed_hausdorff(&set(&[[0.0, 0.0]]), &set(&[[3.0, 4.0]])).unwrap();
        assert_eq!(d, 5.0);
    }

    #[test]
    fn asymmetry_resolved_by_max() {
        let a = set(&[[0.0, 0.0]]);
        let b = set(&[[0.0, 0.0], [0.0, 10.0]]);
        assert_eq!(directed_hausdorff(&a, &b).unwrap(), 0.0);
        assert_eq!(directed_hausdorff(&b, &a).unwrap(), 10.0);
        assert_eq!(hausdorff(&a, &b).unwrap(), 10.0);
    }

    #[test]
    fn identical_sets_are_at_zero() {
        let mut rng = stream_rng(11, 0);
        let a = random_set(64, 3, &mut rng);
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn empty_input_is_an_error() {
        let a = set(&[[0.0, 0.0]]);
        let e = PointSet::new(2);
        assert!(matches!(hausdorff(&a, &e), Err(Error::EmptyPointSet)));
        assert!(matches!(hausdorff(&e, &a), Err(Error::EmptyPointSet)));
    }

    #[test]
    fn matches_double_loop_on_random_sets() {
        // Oracle written independently of both code paths.
        let mut rng = stream_rng(12, 0);
        let a = random_set(50, 3, &mut rng);
        let b = random_set(50, 3, &mut rng);
        let mut oracle: f64 = 0.0;
        for p in a.iter() {
            let mut m = f64::INFINITY;
            for q in b.iter() {
                let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
                m = m.min(d);
            }
            oracle = oracle.max(m);
        }
        let got = directed_hausdorff(&a, &b).unwrap();
        assert!((got - oracle).abs() <= 1e-15, "{got} vs {oracle}");
        assert_eq!(got, directed_hausdorff_indexed(&a, &b).unwrap());
    }

    #[test]
    fn triangle_inequality_on_random_triples() {
        let mut rng = stream_rng(13, 0);
        for _ in 0..50 {
            let a = random_set(rng.random_range(1..40), 2, &mut rng);
            let b = random_set(rng.random_range(1..40), 2, &mut rng);
            let c = random_set(rng.random_range(1..40), 2, &mut rng);
            let ab = hausdorff(&a, &b).unwrap();
            let bc = hausdorff(&b, &c).unwrap();
            let ac = hausdorff(&a, &c).unwrap();
            assert!(ac <= ab + bc + 1e-12);
            assert_eq!(ab, hausdorff(&b, &a).unwrap());
            assert!(ab >= 0.0);
        }
    }

    #[test]
    fn indexed_and_brute_agree_bit_for_bit() {
        let mut rng = stream_rng(14, 0);
        for _ in 0..100 {
            let dim = rng.random_range(1..=3);
            let a = random_set(rng.random_range(1..=200), dim, &mut rng);
            let b = random_set(rng.random_range(1..=200), dim, &mut rng);
            assert_eq!(
                directed_hausdorff_brute(&a, &b).unwrap().to_bits(),
                directed_hausdorff_indexed(&a, &b).unwrap().to_bits()
            );
        }
    }
}
