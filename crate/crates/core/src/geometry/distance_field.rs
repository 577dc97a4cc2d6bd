//! Raster distance to the complement of a set.
//!
//! The set is rasterized on cell centers and an exact Euclidean distance
//! transform (separable lower-envelope algorithm of Felzenszwalb and
//! Huttenlocher) gives, for every inside cell, the distance to the nearest
//! outside cell center.

use rayon::prelude::*;

use super::BoundingBox;
use crate::error::{Error, Result};

/// Default limit on the number of raster cells.
pub const DEFAULT_CELL_BUDGET: usize = 20_000_000;

/// Regular grid of cells of width `h`; cell `i` along axis `k` is centered
/// at `lower[k] + (i + 0.5) h`. The last axis varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    lower: Vec<f64>,
    h: f64,
    shape: Vec<usize>,
}

impl Grid {
    pub fn covering(bbox: &BoundingBox, h: f64, cell_budget: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::invalid(format!("grid width must be positive, got {h}")));
        }
        if bbox.dim() > 3 {
            return Err(Error::invalid(format!(
                "raster distance fields support D ≤ 3, got D = {}",
                bbox.dim()
            )));
        }
        let shape: Vec<usize> = bbox
            .lower()
            .iter()
            .zip(bbox.upper())
            .map(|(l, u)| ((u - l) / h).ceil().max(1.0) as usize)
            .collect();
        let cells: u128 = shape.iter().map(|&n| n as u128).product();
        if cells > cell_budget as u128 {
            return Err(Error::GridTooLarge {
                cells,
                budget: cell_budget,
            });
        }
        Ok(Self {
            lower: bbox.lower().to_vec(),
            h,
            shape,
        })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn width(&self) -> f64 {
        self.h
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            idx[k] = flat % self.shape[k];
            flat /= self.shape[k];
        }
        idx
    }

    pub fn center(&self, flat: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.dim()];
        self.center_into(flat, &mut c);
        c
    }

    fn center_into(&self, mut flat: usize, out: &mut [f64]) {
        for k in (0..self.dim()).rev() {
            let i = flat % self.shape[k];
            flat /= self.shape[k];
            out[k] = self.lower[k] + (i as f64 + 0.5) * self.h;
        }
    }

    /// Flat index of the cell containing `p`, if inside the grid.
    pub fn cell_of(&self, p: &[f64]) -> Option<usize> {
        let mut flat = 0;
        for k in 0..self.dim() {
            let t = ((p[k] - self.lower[k]) / self.h).floor();
            if t < 0.0 || t >= self.shape[k] as f64 {
                return None;
            }
            flat = flat * self.shape[k] + t as usize;
        }
        Some(flat)
    }
}

/// Inside/outside raster with distance-to-complement values.
#[derive(Clone, Debug)]
pub struct DistanceField {
    grid: Grid,
    inside: Vec<bool>,
    dist: Vec<f64>,
}

impl DistanceField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn is_inside(&self, flat: usize) -> bool {
        self.inside[flat]
    }

    /// Distance from cell `flat` to the nearest outside cell center; 0 for
    /// outside cells.
    pub fn value(&self, flat: usize) -> f64 {
        self.dist[flat]
    }

    pub fn inside_count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    /// Largest value and the lowest flat index attaining it.
    pub fn argmax(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, (&ins, &d)) in self.inside.iter().zip(&self.dist).enumerate() {
            if ins && best.is_none_or(|(_, b)| d > b) {
                best = Some((i, d));
            }
        }
        best
    }

    /// Flat indices of inside cells, in increasing order.
    pub fn inside_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.inside
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }
}

/// Rasterizes `membership` over `bbox` at width `h` and computes the exact
/// Euclidean distance from every inside cell center to the nearest outside
/// cell center. `D ≤ 3`.
pub fn grid_distance_to_complement<F>(
    membership: F,
    bbox: &BoundingBox,
    h: f64,
    cell_budget: usize,
) -> Result<DistanceField>
where
    F: Fn(&[f64]) -> bool + Sync,
{
    let grid = Grid::covering(bbox, h, cell_budget)?;
    let dim = grid.dim();
    let row = grid.shape[dim - 1];
    let mut inside = vec![false; grid.len()];
    inside
        .par_chunks_mut(row)
        .enumerate()
        .for_each(|(r, chunk)| {
            let mut c = vec![0.0; dim];
            for (j, cell) in chunk.iter_mut().enumerate() {
                grid.center_into(r * row + j, &mut c);
                *cell = membership(&c);
            }
        });
    if inside.iter().all(|&b| b) {
        return Err(Error::invalid(
            "box does not strictly contain the set: no outside cells",
        ));
    }

    // Larger than any squared grid distance, exactly representable.
    let big: f64 = grid.shape.iter().map(|&n| (n as f64 + 1.0).powi(2)).sum::<f64>() + 1.0;
    let mut sq: Vec<f64> = inside.iter().map(|&b| if b { big } else { 0.0 }).collect();
    for axis in 0..dim {
        transform_axis(&mut sq, &grid.shape, axis);
    }
    let dist = sq
        .par_iter()
        .zip(inside.par_iter())
        .map(|(&s, &ins)| if ins { h * s.sqrt() } else { 0.0 })
        .collect();
    Ok(DistanceField { grid, inside, dist })
}

/// One pass of the separable transform along `axis`.
fn transform_axis(sq: &mut [f64], shape: &[usize], axis: usize) {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let block = n * stride;
    // Each block of `n * stride` values holds `stride` independent lines.
    sq.par_chunks_mut(block).for_each(|chunk| {
        let mut f = vec![0.0; n];
        let mut out = vec![0.0; n];
        let mut v = vec![0usize; n];
        let mut z = vec![0.0; n + 1];
        for offset in 0..stride {
            for i in 0..n {
                f[i] = chunk[offset + i * stride];
            }
            lower_envelope(&f, &mut out, &mut v, &mut z);
            for i in 0..n {
                chunk[offset + i * stride] = out[i];
            }
        }
    });
}

/// `out[q] = min_p (q − p)² + f[p]`.
fn lower_envelope(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let parabola = |q: usize| f[q] + (q * q) as f64;
    for q in 1..n {
        let mut s;
        loop {
            let p = v[k];
            s = (parabola(q) - parabola(p)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] {
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}
