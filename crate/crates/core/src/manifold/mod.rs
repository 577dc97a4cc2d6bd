//! Compact submanifolds with known reach: round spheres, the saucer and its
//! bump perturbation.
//!
//! Every model is a hypersurface of revolution inside a `(d+1)`-dimensional
//! coordinate subspace of `R^D`. A point `y` splits as `(u, v, z)` with
//! `u ∈ R^d` (the first `d` coordinates), `v = y[d]` the axis of revolution
//! and `z` the remaining `D − d − 1` coordinates, along which every model is
//! flat. The model is the set of `(s·û, v, 0)` with `(s, v)` on a planar
//! profile and `û` a unit vector of `R^d`.

mod heights;
mod net;
mod profile;
mod scalar;

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::StandardNormal;

pub use heights::{bump_half_width, bump_height, saucer_height};
pub use net::dense_net;
pub use scalar::{golden_section, minimize_scalar};

use crate::error::{Error, Result};
use crate::geometry::{norm, BoundingBox};
use crate::rng::Rng;
use profile::Profile;

/// Tolerance for [`ManifoldModel::frame_at`] to accept a point as lying on
/// the manifold.
pub const ON_MANIFOLD_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Circle,
    Sphere,
    Saucer,
    Bump,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Circle => "circle",
            ModelKind::Sphere => "sphere",
            ModelKind::Saucer => "saucer",
            ModelKind::Bump => "bump",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(ModelKind::Circle),
            "sphere" => Ok(ModelKind::Sphere),
            "saucer" => Ok(ModelKind::Saucer),
            "bump" => Ok(ModelKind::Bump),
            other => Err(Error::Config(format!(
                "unknown model `{other}` (expected circle, sphere, saucer or bump)"
            ))),
        }
    }
}

/// Plain description of a model, as read from a configuration file.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub radius: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub intrinsic_dim: usize,
    pub ambient_dim: usize,
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec {
            kind: ModelKind::Circle,
            radius: 1.0,
            kappa: 1.0,
            gamma: 0.0,
            intrinsic_dim: 1,
            ambient_dim: 2,
        }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<ManifoldModel> {
        let (d, dd) = (self.intrinsic_dim, self.ambient_dim);
        match self.kind {
            ModelKind::Circle => {
                if d != 1 {
                    return Err(Error::invalid(format!("a circle has intrinsic_dim 1, got {d}")));
                }
                ManifoldModel::sphere(self.radius, 1, dd)
            }
            ModelKind::Sphere => ManifoldModel::sphere(self.radius, d, dd),
            ModelKind::Saucer => ManifoldModel::saucer(self.kappa, d, dd),
            ModelKind::Bump => ManifoldModel::bump(self.kappa, self.gamma, d, dd),
        }
    }
}

/// Orthonormal tangent and normal bases at a point of a model.
#[derive(Clone, Debug)]
pub struct Frame {
    pub point: Vec<f64>,
    pub tangents: Vec<Vec<f64>>,
    pub normals: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
enum Shape {
    Sphere { radius: f64 },
    Saucer { kappa: f64 },
    Bump { kappa: f64, gamma: f64 },
}

#[derive(Clone, Debug)]
pub struct ManifoldModel {
    kind: ModelKind,
    shape: Shape,
    d: usize,
    ambient: usize,
    profile: Profile,
    /// Cumulative `∫ s^(d−1) dℓ` over the profile pieces.
    cum_mass: Vec<f64>,
    max_s: Vec<f64>,
}

fn check_dims(d: usize, ambient: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::invalid("intrinsic dimension must be at least 1"));
    }
    if ambient <= d {
        return Err(Error::invalid(format!(
            "ambient dimension {ambient} must exceed intrinsic dimension {d}"
        )));
    }
    Ok(())
}

impl ManifoldModel {
    fn from_profile(kind: ModelKind, shape: Shape, d: usize, ambient: usize, profile: Profile) -> Self {
        let mut acc = 0.0;
        let cum_mass = profile
            .pieces()
            .iter()
            .map(|p| {
                acc += p.weighted_length(d as i32 - 1);
                acc
            })
            .collect();
        let max_s = profile.pieces().iter().map(|p| p.max_s()).collect();
        ManifoldModel { kind, shape, d, ambient, profile, cum_mass, max_s }
    }

    /// Circle of radius `r` in the first two coordinates of `R^ambient`.
    pub fn circle(r: f64, ambient: usize) -> Result<Self> {
        Self::sphere(r, 1, ambient)
    }

    /// Round `d`-sphere of radius `r` in the first `d + 1` coordinates.
    pub fn sphere(r: f64, d: usize, ambient: usize) -> Result<Self> {
        check_dims(d, ambient)?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid(format!("radius must be positive, got {r}")));
        }
        let kind = if d == 1 { ModelKind::Circle } else { ModelKind::Sphere };
        Ok(Self::from_profile(kind, Shape::Sphere { radius: r }, d, ambient, profile::half_circle(r)))
    }

    /// The saucer with reach `κ`.
    pub fn saucer(kappa: f64, d: usize, ambient: usize) -> Result<Self> {
        check_dims(d, ambient)?;
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::invalid(format!("kappa must be positive, got {kappa}")));
        }
        Ok(Self::from_profile(
            ModelKind::Saucer,
            Shape::Saucer { kappa },
            d,
            ambient,
            profile::saucer(kappa),
        ))
    }

    /// The saucer with its top sheet raised by `γ` at the axis. Requires
    /// `0 ≤ γ < κ`; `γ = 0` gives back the saucer.
    pub fn bump(kappa: f64, gamma: f64, d: usize, ambient: usize) -> Result<Self> {
        check_dims(d, ambient)?;
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::invalid(format!("kappa must be positive, got {kappa}")));
        }
        if !(gamma >= 0.0) {
            return Err(Error::invalid(format!("gamma must be nonnegative, got {gamma}")));
        }
        if gamma >= kappa {
            return Err(Error::PerturbationExceedsReach);
        }
        let w = bump_half_width(kappa, gamma);
        if w > 1.0 {
            return Err(Error::invalid(format!(
                "bump half width {w} exceeds the flat part of the saucer"
            )));
        }
        Ok(Self::from_profile(
            ModelKind::Bump,
            Shape::Bump { kappa, gamma },
            d,
            ambient,
            profile::bump(kappa, gamma),
        ))
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.d
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Reach of the model.
    pub fn reach(&self) -> f64 {
        match self.shape {
            Shape::Sphere { radius } => radius,
            Shape::Saucer { kappa } | Shape::Bump { kappa, .. } => kappa,
        }
    }

    /// Radius for spheres, `None` otherwise.
    pub fn radius(&self) -> Option<f64> {
        match self.shape {
            Shape::Sphere { radius } => Some(radius),
            _ => None,
        }
    }

    /// `(κ, γ)` for the saucer (`γ = 0`) and the bump.
    pub fn saucer_params(&self) -> Option<(f64, f64)> {
        match self.shape {
            Shape::Saucer { kappa } => Some((kappa, 0.0)),
            Shape::Bump { kappa, gamma } => Some((kappa, gamma)),
            Shape::Sphere { .. } => None,
        }
    }

    /// `d`-dimensional volume of the model.
    pub fn volume(&self) -> f64 {
        let total = *self.cum_mass.last().unwrap_or(&0.0);
        // Surface of revolution: (area of S^(d-1)) · ∫ s^(d-1) dℓ, with the
        // d = 1 "sphere" S^0 counting two points.
        sphere_area(self.d - 1) * total
    }

    /// Axis-aligned box containing the model, enlarged by `margin`.
    pub fn bounding_box(&self, margin: f64) -> BoundingBox {
        let (smax, vlo, vhi) = match self.shape {
            Shape::Sphere { radius } => (radius, -radius, radius),
            Shape::Saucer { kappa } => (1.0 + kappa, -kappa, kappa),
            Shape::Bump { kappa, gamma } => (1.0 + kappa, -kappa, kappa + gamma),
        };
        let mut lower = vec![-margin; self.ambient];
        let mut upper = vec![margin; self.ambient];
        for i in 0..self.d {
            lower[i] = -smax - margin;
            upper[i] = smax + margin;
        }
        lower[self.d] = vlo - margin;
        upper[self.d] = vhi + margin;
        if margin == 0.0 {
            // Keep the box nondegenerate along the flat directions.
            for i in self.d + 1..self.ambient {
                lower[i] = -f64::EPSILON;
                upper[i] = f64::EPSILON;
            }
        }
        BoundingBox::new(lower, upper).expect("model box is nondegenerate")
    }

    fn check_point(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, got: y.len() });
        }
        if y.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("point has non-finite coordinates"));
        }
        Ok(())
    }

    /// `(s, v, ‖z‖²)` of a point.
    fn split(&self, y: &[f64]) -> (f64, f64, f64) {
        let s = norm(&y[..self.d]);
        let z2 = y[self.d + 1..].iter().map(|c| c * c).sum();
        (s, y[self.d], z2)
    }

    fn lift(&self, y: &[f64], s: f64, sp: f64, vp: f64) -> Vec<f64> {
        let mut x = vec![0.0; self.ambient];
        if sp != 0.0 {
            // s > 0 whenever sp > 0 here; the caller rejects the axis case.
            for i in 0..self.d {
                x[i] = sp * y[i] / s;
            }
        }
        x[self.d] = vp;
        x
    }

    /// Euclidean distance from `y` to the model.
    pub fn distance_to_manifold(&self, y: &[f64]) -> Result<f64> {
        self.check_point(y)?;
        let (s, v, z2) = self.split(y);
        Ok((self.profile.closest([s, v]).dist2 + z2).sqrt())
    }

    /// The unique closest point of the model to `y`.
    ///
    /// Fails with [`Error::NonUniqueProjection`] when `y` lies on the medial
    /// axis, e.g. at a sphere center or on the midplane of the saucer.
    pub fn project(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_point(y)?;
        let (s, v, _) = self.split(y);
        let hit = self.profile.closest([s, v]);
        if !hit.unique || (s == 0.0 && hit.point[0] > profile::TIE_TOL) {
            return Err(Error::NonUniqueProjection);
        }
        Ok(self.lift(y, s, hit.point[0], hit.point[1]))
    }

    /// Tangent and normal bases at a point of the model.
    pub fn frame_at(&self, x: &[f64]) -> Result<Frame> {
        self.check_point(x)?;
        let (s, v, z2) = self.split(x);
        let hit = self.profile.closest([s, v]);
        let dist = (hit.dist2 + z2).sqrt();
        if dist > ON_MANIFOLD_TOL {
            return Err(Error::OffManifold(dist));
        }
        let n = self.profile.pieces()[hit.piece].normal_at(hit.t);
        let mut normal = vec![0.0; self.ambient];
        if s > 0.0 {
            for i in 0..self.d {
                normal[i] = n[0] * x[i] / s;
            }
        } else {
            normal[0] = n[0];
        }
        normal[self.d] = n[1];
        let mut normals = vec![normal];
        for j in self.d + 1..self.ambient {
            let mut e = vec![0.0; self.ambient];
            e[j] = 1.0;
            normals.push(e);
        }
        let tangents = complete_basis(&normals, self.ambient);
        Ok(Frame { point: x.to_vec(), tangents, normals })
    }

    /// Great-circle distance between two points of a sphere model; `None`
    /// for other models.
    pub fn geodesic_distance(&self, p: &[f64], q: &[f64]) -> Option<f64> {
        let r = self.radius()?;
        let c = crate::geometry::dot(p, q) / (norm(p) * norm(q));
        Some(r * c.clamp(-1.0, 1.0).acos())
    }

    /// Distance to the model computed independently of the exact profile
    /// geometry: the model is viewed as the union of graphs `v = h(s)` and
    /// the squared distance within the profile plane is minimized over `s`
    /// by a scan followed by golden-section refinement.
    pub fn distance_by_search(&self, y: &[f64]) -> Result<f64> {
        self.check_point(y)?;
        let (s, v, z2) = self.split(y);
        let mut best = f64::INFINITY;
        let sheets: Vec<(f64, Box<dyn Fn(f64) -> f64>)> = match self.shape {
            Shape::Sphere { radius } => vec![
                (radius, Box::new(move |t: f64| (radius * radius - t * t).max(0.0).sqrt())),
                (radius, Box::new(move |t: f64| -(radius * radius - t * t).max(0.0).sqrt())),
            ],
            Shape::Saucer { kappa } => vec![
                (1.0 + kappa, Box::new(move |t| saucer_height(kappa, t).unwrap())),
                (1.0 + kappa, Box::new(move |t| -saucer_height(kappa, t).unwrap())),
            ],
            Shape::Bump { kappa, gamma } => vec![
                (1.0 + kappa, Box::new(move |t| bump_height(kappa, gamma, t).unwrap())),
                (1.0 + kappa, Box::new(move |t| -saucer_height(kappa, t).unwrap())),
            ],
        };
        for (hi, h) in &sheets {
            let f = |t: f64| (s - t).powi(2) + (v - h(t)).powi(2);
            let (_, fx) = minimize_scalar(f, 0.0, *hi, 200, 1e-13);
            best = best.min(fx);
        }
        Ok((best + z2).sqrt())
    }

    /// Draws a point from the uniform (volume) measure on the model along
    /// with an orthonormal basis of its normal space.
    pub(crate) fn sample_surface(&self, rng: &mut Rng) -> (Vec<f64>, Vec<Vec<f64>>) {
        let mut x = vec![0.0; self.ambient];
        let primary = match self.shape {
            Shape::Sphere { radius } => {
                let dir = unit_vector(rng, self.d + 1);
                x[..=self.d].copy_from_slice(&dir);
                for c in &mut x[..=self.d] {
                    *c *= radius;
                }
                let mut n = vec![0.0; self.ambient];
                n[..=self.d].copy_from_slice(&dir);
                n
            }
            _ => {
                let total = *self.cum_mass.last().unwrap();
                let target = rng.random::<f64>() * total;
                let i = self.cum_mass.partition_point(|&m| m <= target).min(self.cum_mass.len() - 1);
                let piece = &self.profile.pieces()[i];
                let k = self.d as i32 - 1;
                let t = loop {
                    let t: f64 = rng.random();
                    if k == 0 {
                        break t;
                    }
                    let ratio = (piece.point_at(t)[0].max(0.0) / self.max_s[i]).powi(k);
                    if rng.random::<f64>() < ratio {
                        break t;
                    }
                };
                let [sp, vp] = piece.point_at(t);
                let nn = piece.normal_at(t);
                let dir = unit_vector(rng, self.d);
                let mut n = vec![0.0; self.ambient];
                for j in 0..self.d {
                    x[j] = sp.max(0.0) * dir[j];
                    n[j] = nn[0] * dir[j];
                }
                x[self.d] = vp;
                n[self.d] = nn[1];
                n
            }
        };
        let mut normals = vec![primary];
        for j in self.d + 1..self.ambient {
            let mut e = vec![0.0; self.ambient];
            e[j] = 1.0;
            normals.push(e);
        }
        (x, normals)
    }

    pub(crate) fn profile(&self) -> &Profile {
        &self.profile
    }
}

/// Surface area of the unit `k`-sphere `S^k ⊂ R^(k+1)`.
pub(crate) fn sphere_area(k: usize) -> f64 {
    (k + 1) as f64 * crate::geometry::unit_ball_volume(k + 1)
}

/// Uniform random unit vector of `R^k` (a random sign when `k = 1`).
pub(crate) fn unit_vector(rng: &mut Rng, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![if rng.random::<bool>() { 1.0 } else { -1.0 }];
    }
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

/// Orthonormal basis of the orthogonal complement of the span of `given`
/// (assumed orthonormal), by Gram–Schmidt on the standard basis.
fn complete_basis(given: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = given.to_vec();
    let mut out = Vec::new();
    for j in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut e = vec![0.0; dim];
        e[j] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = crate::geometry::dot(&e, b);
                for (ei, bi) in e.iter_mut().zip(b) {
                    *ei -= c * bi;
                }
            }
        }
        let n = norm(&e);
        if n > 1e-6 {
            let e: Vec<f64> = e.into_iter().map(|c| c / n).collect();
            basis.push(e.clone());
            out.push(e);
        }
    }
    out
}
