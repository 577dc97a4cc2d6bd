//! A static kd-tree over a [`PointSet`].
//!
//! Nearest-neighbour queries return the exact minimum squared distance as
//! computed by [`dist2`], with ties broken by the lowest original index, so
//! results agree bit-for-bit with a brute-force scan.

use super::{dist2, PointSet};

const LEAF_SIZE: usize = 12;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    /// Point coordinates reordered so that every leaf is contiguous.
    coords: Vec<f64>,
    /// `index[i]` is the original index of reordered point `i`.
    index: Vec<usize>,
    nodes: Vec<Node>,
}

impl KdTree {
    pub fn new(points: &PointSet) -> Self {
        let dim = points.dim();
        let mut index: Vec<usize> = (0..points.len()).collect();
        let mut nodes = Vec::new();
        if !index.is_empty() {
            build(points, &mut index, 0, &mut nodes);
        }
        let mut coords = Vec::with_capacity(points.as_flat().len());
        for &i in &index {
            coords.extend_from_slice(points.point(i));
        }
        Self {
            dim,
            coords,
            index,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Nearest point to `q` as `(original index, squared distance)`.
    pub fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        if self.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_in(0, q, &mut best);
        Some(best)
    }

    fn nearest_in(&self, node: usize, q: &[f64], best: &mut (usize, f64)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for i in start..end {
                    let d = dist2(q, self.point(i));
                    let idx = self.index[i];
                    if d < best.1 || (d == best.1 && idx < best.0) {
                        *best = (idx, d);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                let (near, far) = if diff <= 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.nearest_in(near, q, best);
                // Visit on equality: an equal-distance point with a lower
                // index may live on the far side.
                if diff * diff <= best.1 {
                    self.nearest_in(far, q, best);
                }
            }
        }
    }

    /// True if some point lies within squared distance `r2` of `q` (inclusive).
    pub fn any_within(&self, q: &[f64], r2: f64) -> bool {
        !self.is_empty() && self.any_within_in(0, q, r2)
    }

    fn any_within_in(&self, node: usize, q: &[f64], r2: f64) -> bool {
        match self.nodes[node] {
            Node::Leaf { start, end } => (start..end).any(|i| dist2(q, self.point(i)) <= r2),
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                let (near, far) = if diff <= 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.any_within_in(near, q, r2)
                    || (diff * diff <= r2 && self.any_within_in(far, q, r2))
            }
        }
    }

    /// Calls `visit(original index)` for every point within squared distance
    /// `r2` of `q` (inclusive).
    pub fn for_each_within(&self, q: &[f64], r2: f64, mut visit: impl FnMut(usize)) {
        if !self.is_empty() {
            self.within_in(0, q, r2, &mut visit);
        }
    }

    fn within_in(&self, node: usize, q: &[f64], r2: f64, visit: &mut impl FnMut(usize)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for i in start..end {
                    if dist2(q, self.point(i)) <= r2 {
                        visit(self.index[i]);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                if diff <= 0.0 || diff * diff <= r2 {
                    self.within_in(left, q, r2, visit);
                }
                if diff >= 0.0 || diff * diff <= r2 {
                    self.within_in(right, q, r2, visit);
                }
            }
        }
    }
}

fn build(points: &PointSet, idx: &mut [usize], offset: usize, nodes: &mut Vec<Node>) -> usize {
    let id = nodes.len();
    if idx.len() <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            start: offset,
            end: offset + idx.len(),
        });
        return id;
    }
    let dim = points.dim();
    let mut axis = 0;
    let mut widest = f64::NEG_INFINITY;
    for k in 0..dim {
        let (lo, hi) = idx.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            let c = points.point(i)[k];
            (lo.min(c), hi.max(c))
        });
        if hi - lo > widest {
            widest = hi - lo;
            axis = k;
        }
    }
    let mid = idx.len() / 2;
    idx.select_nth_unstable_by(mid, |&a, &b| {
        points.point(a)[axis].total_cmp(&points.point(b)[axis])
    });
    let value = points.point(idx[mid])[axis];
    // Placeholder, patched once the children exist.
    nodes.push(Node::Leaf { start: 0, end: 0 });
    let (lo, hi) = idx.split_at_mut(mid);
    let left = build(points, lo, offset, nodes);
    let right = build(points, hi, offset + mid, nodes);
    nodes[id] = Node::Split {
        axis,
        value,
        left,
        right,
    };
    id
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn random_set(n: usize, dim: usize, seed: u64) -> PointSet {
        let mut rng = stream_rng(seed, 0);
        let mut s = PointSet::new(dim);
        for _ in 0..n {
            let p: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            s.push(&p);
        }
        s
    }

    fn brute_nearest(s: &PointSet, q: &[f64]) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, p) in s.iter().enumerate() {
            let d = dist2(q, p);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    #[test]
    fn nearest_matches_brute_force() {
        let s = random_set(500, 3, 1);
        let tree = KdTree::new(&s);
        let queries = random_set(200, 3, 2);
        for q in queries.iter() {
            assert_eq!(tree.nearest(q).unwrap(), brute_nearest(&s, q));
        }
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let mut s = PointSet::new(2);
        for _ in 0..40 {
            s.push(&[1.0, 0.0]);
        }
        s.push(&[-1.0, 0.0]);
        let tree = KdTree::new(&s);
        assert_eq!(tree.nearest(&[0.0, 0.0]).unwrap(), (0, 1.0));
    }

    #[test]
    fn radius_queries() {
        let s = random_set(300, 2, 3);
        let tree = KdTree::new(&s);
        let q = [0.1, -0.2];
        let r2 = 0.09;
        let mut found = Vec::new();
        tree.for_each_within(&q, r2, |i| found.push(i));
        found.sort_unstable();
        let expected: Vec<usize> = (0..s.len()).filter(|&i| dist2(&q, s.point(i)) <= r2).collect();
        assert_eq!(found, expected);
        assert_eq!(tree.any_within(&q, r2), !expected.is_empty());
        assert!(!tree.any_within(&[5.0, 5.0], 1.0));
    }
}
