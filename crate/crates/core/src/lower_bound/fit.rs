//! Least-squares power-law fits.

use crate::error::{Error, Result};

/// Line `log y = intercept + slope · log x` fitted by least squares.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn fit_scaling_exponent(xs: &[f64], ys: &[f64]) -> Result<ScalingFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    if xs.len() < 3 {
        return Err(Error::NotEnoughPoints(xs.len()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid("scaling fits need finite positive values"));
    }
    let points: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("scaling fits need at least two distinct x values"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(ScalingFit { slope, intercept, r_squared, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_powers() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let f = fit_scaling_exponent(&xs, &xs).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12);
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        let f = fit_scaling_exponent(&xs, &ys).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn noisy_fit_has_partial_r_squared() {
        let f = fit_scaling_exponent(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!(f.r_squared > 0.0 && f.r_squared < 1.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(fit_scaling_exponent(&[1.0, 2.0], &[1.0, 2.0]), Err(Error::NotEnoughPoints(2))));
        assert!(fit_scaling_exponent(&[1.0, 2.0, 0.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_scaling_exponent(&[1.0, 2.0, 3.0], &[1.0, -2.0, 3.0]).is_err());
        assert!(fit_scaling_exponent(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }
}
