//! Height functions of the saucer and bump sheets over `s = ‖u‖`.

use crate::error::{Error, Result};

/// Radius of the perturbed region, `√(4γκ − γ²)`.
pub fn bump_half_width(kappa: f64, gamma: f64) -> f64 {
    (4.0 * gamma * kappa - gamma * gamma).max(0.0).sqrt()
}

/// Height `a(s)` of the saucer: flat at `κ` over the unit disk, then a
/// quarter circle of radius `κ` down to the rim at `s = 1 + κ`.
pub fn saucer_height(kappa: f64, s: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::invalid(format!("kappa must be positive, got {kappa}")));
    }
    if !(0.0..=1.0 + kappa).contains(&s) {
        return Err(Error::invalid(format!(
            "s = {s} outside [0, 1 + kappa] = [0, {}]",
            1.0 + kappa
        )));
    }
    Ok(if s <= 1.0 {
        kappa
    } else {
        let t = s - 1.0;
        (kappa * kappa - t * t).max(0.0).sqrt()
    })
}

/// Height `b(s)` of the bump sheet: a cap of the sphere of radius `κ`
/// centered at height `γ`, joined to the flat part by a concave arc of
/// radius `κ`, and equal to [`saucer_height`] for `s ≥ √(4γκ − γ²)`.
pub fn bump_height(kappa: f64, gamma: f64, s: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::invalid(format!("gamma must be nonnegative, got {gamma}")));
    }
    if gamma >= kappa {
        return Err(Error::PerturbationExceedsReach);
    }
    let a = saucer_height(kappa, s)?;
    let w = bump_half_width(kappa, gamma);
    Ok(if s <= w / 2.0 {
        gamma + (kappa * kappa - s * s).max(0.0).sqrt()
    } else if s <= w {
        let t = s - w;
        2.0 * kappa - (kappa * kappa - t * t).max(0.0).sqrt()
    } else {
        a
    })
}
