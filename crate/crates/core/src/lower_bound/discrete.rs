//! Divergences between finite distributions and their `n`-fold products,
//! computed by explicit enumeration.

use crate::error::{Error, Result};

/// Largest product order enumerated.
pub const MAX_PRODUCT_ORDER: usize = 6;
/// Largest number of product outcomes enumerated.
pub const MAX_PRODUCT_OUTCOMES: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistribution {
    weights: Vec<f64>,
}

impl DiscreteDistribution {
    /// Weights must be nonnegative and sum to 1 within `1e-12`.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("a distribution needs at least one outcome"));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::invalid("weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(DiscreteDistribution { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Weights of the `n`-fold product, outcomes in lexicographic order.
    pub fn product(&self, n: usize) -> Result<DiscreteDistribution> {
        check_budget(self.len(), n)?;
        let mut w = vec![1.0];
        for _ in 0..n {
            w = w.iter().flat_map(|a| self.weights.iter().map(move |b| a * b)).collect();
        }
        Ok(DiscreteDistribution { weights: w })
    }
}

fn check_budget(support: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("product order must be at least 1"));
    }
    let outcomes = (support as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if n > MAX_PRODUCT_ORDER || outcomes > MAX_PRODUCT_OUTCOMES {
        return Err(Error::EnumerationBudget { outcomes, limit: MAX_PRODUCT_OUTCOMES });
    }
    Ok(())
}

fn same_support(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: q.len() });
    }
    Ok(())
}

/// `Σ (√p − √q)²`, between 0 and 2.
pub fn hellinger_sq(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    same_support(p, q)?;
    Ok(p.weights.iter().zip(&q.weights).map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2)).sum())
}

pub fn hellinger(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    Ok(hellinger_sq(p, q)?.sqrt())
}

/// `Σ |p − q|`, between 0 and 2.
pub fn l1(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    same_support(p, q)?;
    Ok(p.weights.iter().zip(&q.weights).map(|(a, b)| (a - b).abs()).sum())
}

/// `Σ min(p, q)`.
pub fn affinity(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    same_support(p, q)?;
    Ok(p.weights.iter().zip(&q.weights).map(|(a, b)| a.min(*b)).sum())
}

/// Hellinger distance squared of the enumerated `n`-fold products, and the
/// closed form `2(1 − (1 − h²/2)^n)` computed from the factors.
pub fn hellinger_product_identity(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    n: usize,
) -> Result<(f64, f64)> {
    same_support(p, q)?;
    let lhs = hellinger_sq(&p.product(n)?, &q.product(n)?)?;
    let h2 = hellinger_sq(p, q)?;
    let rhs = 2.0 * (1.0 - (1.0 - h2 / 2.0).powi(n as i32));
    Ok((lhs, rhs))
}

/// Affinity of the enumerated `n`-fold products.
pub fn product_affinity(p: &DiscreteDistribution, q: &DiscreteDistribution, n: usize) -> Result<f64> {
    same_support(p, q)?;
    affinity(&p.product(n)?, &q.product(n)?)
}

/// Lower bound `(1/8)(1 − ℓ1/2)^(2n)` on the affinity of `n`-fold products
/// of two distributions at ℓ1 distance `l1`.
pub fn affinity_product_bound(l1: f64, n: usize) -> Result<f64> {
    if !(0.0..=2.0).contains(&l1) {
        return Err(Error::invalid(format!("l1 distance must lie in [0, 2], got {l1}")));
    }
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    Ok((1.0 - l1 / 2.0).powi(2 * n as i32) / 8.0)
}

/// Two-point minimax lower bound: separation `γ` times
/// [`affinity_product_bound`].
pub fn lecam_risk_bound(gamma: f64, l1: f64, n: usize) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::invalid(format!("gamma must be nonnegative, got {gamma}")));
    }
    Ok(gamma * affinity_product_bound(l1, n)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dist(w: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(w.to_vec()).unwrap()
    }

    fn normalized(raw: Vec<f64>) -> Vec<f64> {
        let t: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / t).collect()
    }

    fn pair() -> impl Strategy<Value = (DiscreteDistribution, DiscreteDistribution)> {
        (2usize..6).prop_flat_map(|k| {
            (prop::collection::vec(0.001f64..1.0, k), prop::collection::vec(0.001f64..1.0, k))
                .prop_map(|(a, b)| {
                    (
                        DiscreteDistribution { weights: normalized(a) },
                        DiscreteDistribution { weights: normalized(b) },
                    )
                })
        })
    }

    #[test]
    fn validation() {
        assert!(DiscreteDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(DiscreteDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(DiscreteDistribution::new(vec![]).is_err());
        assert!(matches!(dist(&[0.5, 0.5]).product(7), Err(Error::EnumerationBudget { .. })));
        let big = DiscreteDistribution::new(vec![0.01; 100]).unwrap();
        assert!(matches!(big.product(4), Err(Error::EnumerationBudget { .. })));
        assert!(big.product(3).is_ok());
    }

    #[test]
    fn identity_examples() {
        let p = dist(&[0.5, 0.5]);
        let (l, r) = hellinger_product_identity(&p, &p, 3).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
        let a = dist(&[1.0, 0.0]);
        let b = dist(&[0.0, 1.0]);
        for n in 1..=4 {
            let (l, r) = hellinger_product_identity(&a, &b, n).unwrap();
            assert!((l - 2.0).abs() < 1e-15 && (r - 2.0).abs() < 1e-15);
        }
        // Four outcomes written out by hand.
        let q = dist(&[0.9, 0.1]);
        let pp = [0.25, 0.25, 0.25, 0.25];
        let qq = [0.81, 0.09, 0.09, 0.01];
        let by_hand: f64 = pp.iter().zip(&qq).map(|(a, b): (&f64, &f64)| (a.sqrt() - b.sqrt()).powi(2)).sum();
        let (l, r) = hellinger_product_identity(&p, &q, 2).unwrap();
        assert!((l - by_hand).abs() < 1e-15);
        assert!((l - r).abs() < 1e-12);
    }

    #[test]
    fn bound_examples() {
        for n in [1, 5, 100] {
            assert_eq!(affinity_product_bound(0.0, n).unwrap(), 0.125);
            assert_eq!(affinity_product_bound(2.0, n).unwrap(), 0.0);
        }
        assert!(affinity_product_bound(2.1, 1).is_err());
        assert!(affinity_product_bound(0.5, 0).is_err());
        // ℓ1 = 0.8 exactly.
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.9, 0.1]);
        assert!((l1(&p, &q).unwrap() - 0.8).abs() < 1e-15);
        assert!(product_affinity(&p, &q, 3).unwrap() >= affinity_product_bound(0.8, 3).unwrap());
        assert_eq!(lecam_risk_bound(0.2, 0.0, 10).unwrap(), 0.2 / 8.0);
        let mut prev = f64::INFINITY;
        for n in [1, 10, 100, 1000, 10_000] {
            let b = lecam_risk_bound(0.1, 0.05, n).unwrap();
            assert!(b < prev);
            prev = b;
        }
        assert!(prev < 1e-100);
    }

    #[test]
    fn rate_mechanism() {
        // With ℓ1 = c γ^((d+2)/2) and γ = n^(−2/(d+2)) the exponent stays
        // bounded, so the bound is a fixed fraction of γ.
        let (c, d) = (0.2, 1.0);
        for n in [100usize, 1_000, 10_000, 100_000] {
            let gamma = (n as f64).powf(-2.0 / (d + 2.0));
            let l1 = c * gamma.powf((d + 2.0) / 2.0);
            assert!(lecam_risk_bound(gamma, l1, n).unwrap() >= 0.01 * gamma);
        }
    }

    proptest! {
        #[test]
        fn corrected_chain((p, q) in pair()) {
            let h2 = hellinger_sq(&p, &q).unwrap();
            let l = l1(&p, &q).unwrap();
            prop_assert!(h2 <= l + 1e-12);
            prop_assert!(l <= 2.0 * h2.sqrt() + 1e-12);
        }

        #[test]
        fn affinity_is_one_minus_half_l1((p, q) in pair()) {
            let a = affinity(&p, &q).unwrap();
            prop_assert!((a - (1.0 - l1(&p, &q).unwrap() / 2.0)).abs() <= 1e-12);
        }

        #[test]
        fn product_identity_and_bound((p, q) in pair(), n in 1usize..5) {
            let (lhs, rhs) = hellinger_product_identity(&p, &q, n).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10);
            let bound = affinity_product_bound(l1(&p, &q).unwrap(), n).unwrap();
            prop_assert!(product_affinity(&p, &q, n).unwrap() >= bound);
        }

        #[test]
        fn risk_bound_at_most_gamma(g in 0.0f64..1.0, l in 0.0f64..2.0, n in 1usize..1000) {
            prop_assert!(lecam_risk_bound(g, l, n).unwrap() <= g);
        }
    }
}
