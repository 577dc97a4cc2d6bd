//! Euclidean primitives: point sets, bounding boxes, set distances, Monte
//! Carlo volumes and raster distance fields.

mod distance_field;
mod hausdorff;
mod kdtree;
mod montecarlo;

pub use distance_field::{grid_distance_to_complement, DistanceField, Grid, DEFAULT_CELL_BUDGET};
pub use hausdorff::{
    directed_hausdorff, directed_hausdorff_brute, directed_hausdorff_indexed, hausdorff,
    INDEX_PAIR_THRESHOLD,
};
pub use kdtree::KdTree;
pub use montecarlo::{mc_volume, McEstimate, MC_BATCH, MIN_MC_SAMPLES};

use crate::error::{Error, Result};

/// Squared Euclidean distance, accumulated left to right.
#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Volume of the unit ball in `R^k`.
pub fn unit_ball_volume(k: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_k = 2π/k V_{k-2}
    let mut v = if k % 2 == 0 { 1.0 } else { 2.0 };
    let mut j = if k % 2 == 0 { 2 } else { 3 };
    while j <= k {
        v *= 2.0 * std::f64::consts::PI / j as f64;
        j += 2;
    }
    v
}

/// A finite set of points in `R^D`, stored as one flat coordinate buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "ambient dimension must be positive");
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, n: usize) -> Self {
        assert!(dim > 0, "ambient dimension must be positive");
        Self {
            dim,
            coords: Vec::with_capacity(dim * n),
        }
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("ambient dimension must be positive"));
        }
        if coords.len() % dim != 0 {
            return Err(Error::invalid(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite coordinate"));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points<I, P>(dim: usize, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = P>,
        P: AsRef<[f64]>,
    {
        let mut set = Self::new(dim);
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("non-finite coordinate"));
            }
            set.coords.extend_from_slice(p);
        }
        Ok(set)
    }

    /// Appends a point. Panics if its length differs from the set dimension.
    pub fn push(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        self.coords.extend_from_slice(p);
    }

    pub fn extend(&mut self, other: &PointSet) {
        assert_eq!(other.dim, self.dim, "point dimension mismatch");
        self.coords.extend_from_slice(&other.coords);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Smallest axis-aligned box containing every point, or `None` when the
    /// set is empty or flat along some axis.
    pub fn bounding_box(&self) -> Option<BoundingBox> {
        if self.is_empty() {
            return None;
        }
        let mut lower = vec![f64::INFINITY; self.dim];
        let mut upper = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for k in 0..self.dim {
                lower[k] = lower[k].min(p[k]);
                upper[k] = upper[k].max(p[k]);
            }
        }
        BoundingBox::new(lower, upper).ok()
    }

    /// Axis-aligned extent `(lower, upper)`, allowing zero width.
    pub fn extent(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.is_empty() {
            return None;
        }
        let mut lower = vec![f64::INFINITY; self.dim];
        let mut upper = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for k in 0..self.dim {
                lower[k] = lower[k].min(p[k]);
                upper[k] = upper[k].max(p[k]);
            }
        }
        Some((lower, upper))
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyPointSet)
        } else {
            Ok(())
        }
    }
}

/// Axis-aligned box with `lower[i] < upper[i]` on every axis.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundingBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::invalid("degenerate box: zero dimensions"));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(Error::invalid(format!("degenerate box: [{l}, {u}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The cube `[-half, half]^dim`.
    pub fn centered_cube(dim: usize, half: f64) -> Result<Self> {
        Self::new(vec![-half; dim], vec![half; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .product()
    }

    pub fn expanded(&self, margin: f64) -> Result<Self> {
        Self::new(
            self.lower.iter().map(|l| l - margin).collect(),
            self.upper.iter().map(|u| u + margin).collect(),
        )
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(x, (l, u))| *l <= *x && *x <= *u)
    }

    /// True if `B(p, r)` lies inside the box.
    pub fn contains_ball(&self, p: &[f64], r: f64) -> bool {
        p.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(x, (l, u))| *l <= *x - r && *x + r <= *u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_ball_volumes() {
        let pi = std::f64::consts::PI;
        assert_eq!(unit_ball_volume(0), 1.0);
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - pi).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * pi / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - pi * pi / 2.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_box_is_rejected() {
        assert!(BoundingBox::new(vec![0.0, 0.0], vec![1.0, 0.0]).is_err());
        assert!(BoundingBox::new(vec![0.0], vec![1.0, 2.0]).is_err());
        let b = BoundingBox::new(vec![-1.0, 0.0], vec![1.0, 3.0]).unwrap();
        assert_eq!(b.volume(), 6.0);
        assert!(b.contains(&[0.0, 3.0]));
        assert!(!b.contains(&[0.0, 3.1]));
    }

    #[test]
    fn point_set_rejects_bad_points() {
        assert!(PointSet::from_points(2, [[0.0, 1.0, 2.0]]).is_err());
        assert!(PointSet::from_points(2, [[0.0, f64::NAN]]).is_err());
        let s = PointSet::from_points(2, [[0.0, 1.0], [2.0, 3.0]]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.point(1), &[2.0, 3.0]);
    }
}
