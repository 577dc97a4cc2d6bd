//! Deterministic δ-nets of the models.

use rand_distr::StandardNormal;
use rand::Rng as _;

use super::ManifoldModel;
use crate::error::{Error, Result};
use crate::geometry::{dot, norm, PointSet};
use crate::rng::stream_rng;

/// A finite subset of the model within Hausdorff distance `δ` of it.
///
/// The profile is sampled at arclength spacing at most `δ` and each profile
/// point `(s, v)` is swept around a net of the `(d−1)`-sphere of radius `s`.
/// For `d ≥ 2` the seed picks a random rotation of the `u` coordinates, so
/// different seeds give different nets of the same quality.
pub fn dense_net(model: &ManifoldModel, delta: f64, seed: u64) -> Result<PointSet> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!("net spacing must be positive, got {delta}")));
    }
    let d = model.intrinsic_dim();
    let dim = model.ambient_dim();
    let rotation = if d >= 2 { Some(random_rotation(d, seed)) } else { None };
    let mut out = PointSet::new(dim);
    let mut x = vec![0.0; dim];
    for piece in model.profile().pieces() {
        let n = (piece.length() / delta).ceil().max(1.0) as usize;
        for i in 0..=n {
            let [sp, vp] = piece.point_at(i as f64 / n as f64);
            x.iter_mut().for_each(|c| *c = 0.0);
            x[d] = vp;
            if sp <= 1e-12 {
                out.push(&x);
                continue;
            }
            for dir in sphere_net(d, 0.5 * delta / sp) {
                let dir = match &rotation {
                    Some(q) => q.iter().map(|row| dot(row, &dir)).collect(),
                    None => dir,
                };
                for j in 0..d {
                    x[j] = sp * dir[j];
                }
                out.push(&x);
            }
        }
    }
    Ok(out)
}

/// Unit vectors of `R^k` such that every point of the unit sphere lies
/// within chordal distance `rho` of one of them.
pub(crate) fn sphere_net(k: usize, rho: f64) -> Vec<Vec<f64>> {
    match k {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            let m = (std::f64::consts::PI / rho).ceil().max(3.0) as usize;
            (0..m)
                .map(|i| {
                    let th = std::f64::consts::TAU * i as f64 / m as f64;
                    vec![th.cos(), th.sin()]
                })
                .collect()
        }
        _ => {
            // Cell centers of a grid on each face of the cube [-1, 1]^k,
            // pushed radially onto the sphere. Radial projection is
            // 1-Lipschitz outside the unit ball.
            let m = (((k - 1) as f64).sqrt() / rho).ceil().max(1.0) as usize;
            let coord = |j: usize| -1.0 + (j as f64 + 0.5) * 2.0 / m as f64;
            let mut out = Vec::new();
            let cells = m.pow((k - 1) as u32);
            for axis in 0..k {
                for sign in [1.0, -1.0] {
                    for mut idx in 0..cells {
                        let mut p = vec![0.0; k];
                        for (c, pc) in p.iter_mut().enumerate() {
                            if c == axis {
                                *pc = sign;
                            } else {
                                *pc = coord(idx % m);
                                idx /= m;
                            }
                        }
                        let n = norm(&p);
                        out.push(p.into_iter().map(|c| c / n).collect());
                    }
                }
            }
            out
        }
    }
}

/// Random `k × k` orthogonal matrix (rows), from Gram–Schmidt applied to a
/// Gaussian matrix.
fn random_rotation(k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = stream_rng(seed, 0x6e65_7400);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(k);
    while rows.len() < k {
        let mut v: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            for r in &rows {
                let c = dot(&v, r);
                v.iter_mut().zip(r).for_each(|(a, b)| *a -= c * b);
            }
        }
        let n = norm(&v);
        if n > 1e-8 {
            rows.push(v.into_iter().map(|c| c / n).collect());
        }
    }
    rows
}
