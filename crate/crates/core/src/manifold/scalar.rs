//! Bracketed scalar minimization: a coarse scan locates every local minimum
//! of the sampled objective, then golden-section search refines each one.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    // The interval endpoints may beat the interior when the minimum sits on
    // the boundary of the original bracket.
    [(x, f(x)), (lo, f(lo)), (hi, f(hi))]
        .into_iter()
        .fold((x, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
}

/// Global minimum of `f` on `[lo, hi]`: scan `scan_points` equally spaced
/// values, then refine every local minimum of the scan to width `tol`.
pub fn minimize_scalar<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    scan_points: usize,
    tol: f64,
) -> (f64, f64) {
    assert!(scan_points >= 3 && hi > lo);
    let step = (hi - lo) / (scan_points - 1) as f64;
    let xs: Vec<f64> = (0..scan_points).map(|i| lo + step * i as f64).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut best = (xs[0], fs[0]);
    for i in 0..scan_points {
        let left_ok = i == 0 || fs[i] <= fs[i - 1];
        let right_ok = i == scan_points - 1 || fs[i] <= fs[i + 1];
        if left_ok && right_ok {
            let a = xs[i.saturating_sub(1)];
            let b = xs[(i + 1).min(scan_points - 1)];
            let cand = golden_section(&f, a, b, tol);
            if cand.1 < best.1 {
                best = cand;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_minimum() {
        let (x, fx) = minimize_scalar(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 200, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn finds_boundary_minimum() {
        let (x, _) = minimize_scalar(|x| x, 0.0, 2.0, 200, 1e-10);
        assert!(x.abs() < 1e-10);
        let (x, _) = minimize_scalar(|x| -x, 0.0, 2.0, 200, 1e-10);
        assert!((x - 2.0).abs() < 1e-10);
    }

    #[test]
    fn picks_global_of_two_wells() {
        let f = |x: f64| ((x - 0.2).powi(2) + 0.01).min((x - 0.8).powi(2));
        let (x, _) = minimize_scalar(f, 0.0, 1.0, 200, 1e-10);
        assert!((x - 0.8).abs() < 1e-8);
    }
}
