//! Planar profiles in the half-plane `{(s, v) : s ≥ 0}` built from line
//! segments and circular arcs. Every model in this crate is the surface
//! swept out by rotating such a profile about the `v` axis.

use std::f64::consts::{PI, TAU};

/// Distance below which two candidate projections count as tied.
pub(crate) const TIE_TOL: f64 = 1e-12;
/// Separation above which two tied candidates count as distinct points.
pub(crate) const DISTINCT_TOL: f64 = 1e-9;

const SIMPSON_INTERVALS: usize = 2048;

#[derive(Clone, Debug)]
pub(crate) enum Piece {
    Segment { a: [f64; 2], b: [f64; 2] },
    /// Points `center + radius·(cos θ, sin θ)` for `θ = start + t·sweep`,
    /// `t ∈ [0, 1]`. `sweep` may be negative.
    Arc { center: [f64; 2], radius: f64, start: f64, sweep: f64 },
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct PieceHit {
    pub dist2: f64,
    pub point: [f64; 2],
    pub t: f64,
    /// The query sits at an arc center, so every arc point is closest.
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct ProfileHit {
    pub piece: usize,
    pub dist2: f64,
    pub point: [f64; 2],
    pub t: f64,
    pub unique: bool,
}

impl Piece {
    pub fn length(&self) -> f64 {
        match *self {
            Piece::Segment { a, b } => ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt(),
            Piece::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn point_at(&self, t: f64) -> [f64; 2] {
        match *self {
            Piece::Segment { a, b } => [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])],
            Piece::Arc { center, radius, start, sweep } => {
                let th = start + t * sweep;
                [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
            }
        }
    }

    /// Unit normal at parameter `t`. The orientation is arbitrary but
    /// consistent along the piece.
    pub fn normal_at(&self, t: f64) -> [f64; 2] {
        match *self {
            Piece::Segment { a, b } => {
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let l = (dx * dx + dy * dy).sqrt();
                [-dy / l, dx / l]
            }
            Piece::Arc { start, sweep, .. } => {
                let th = start + t * sweep;
                [th.cos(), th.sin()]
            }
        }
    }

    pub fn closest(&self, p: [f64; 2]) -> PieceHit {
        match *self {
            Piece::Segment { a, b } => {
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let l2 = dx * dx + dy * dy;
                let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / l2).clamp(0.0, 1.0);
                let q = self.point_at(t);
                PieceHit { dist2: d2(p, q), point: q, t, degenerate: false }
            }
            Piece::Arc { center, radius, start, sweep } => {
                let (rx, ry) = (p[0] - center[0], p[1] - center[1]);
                let r = (rx * rx + ry * ry).sqrt();
                if r == 0.0 {
                    let q = self.point_at(0.0);
                    return PieceHit { dist2: radius * radius, point: q, t: 0.0, degenerate: true };
                }
                let th = ry.atan2(rx);
                let alpha = if sweep >= 0.0 {
                    (th - start).rem_euclid(TAU)
                } else {
                    (start - th).rem_euclid(TAU)
                };
                if alpha <= sweep.abs() {
                    let t = alpha / sweep.abs();
                    let q = [center[0] + radius * rx / r, center[1] + radius * ry / r];
                    PieceHit { dist2: (r - radius).powi(2), point: q, t, degenerate: false }
                } else {
                    let (q0, q1) = (self.point_at(0.0), self.point_at(1.0));
                    let (e0, e1) = (d2(p, q0), d2(p, q1));
                    if e0 <= e1 {
                        PieceHit { dist2: e0, point: q0, t: 0.0, degenerate: false }
                    } else {
                        PieceHit { dist2: e1, point: q1, t: 1.0, degenerate: false }
                    }
                }
            }
        }
    }

    /// Largest `s` coordinate attained on the piece.
    pub fn max_s(&self) -> f64 {
        match *self {
            Piece::Segment { a, b } => a[0].max(b[0]),
            Piece::Arc { center, radius, start, sweep } => {
                let ends = self.point_at(0.0)[0].max(self.point_at(1.0)[0]);
                let alpha = if sweep >= 0.0 {
                    (-start).rem_euclid(TAU)
                } else {
                    start.rem_euclid(TAU)
                };
                if alpha <= sweep.abs() {
                    center[0] + radius
                } else {
                    ends
                }
            }
        }
    }

    /// `∫ s^(k) dℓ` along the piece: proportional to the `k+1`-dimensional
    /// area swept out by rotating the piece about the `v` axis.
    pub fn weighted_length(&self, k: i32) -> f64 {
        if k == 0 {
            return self.length();
        }
        match *self {
            Piece::Segment { a, b } => {
                let l = self.length();
                let (sa, sb) = (a[0].max(0.0), b[0].max(0.0));
                if (sb - sa).abs() < 1e-15 {
                    l * sa.powi(k)
                } else {
                    l * (sb.powi(k + 1) - sa.powi(k + 1)) / ((k + 1) as f64 * (sb - sa))
                }
            }
            Piece::Arc { center, radius, start, sweep } => {
                let n = SIMPSON_INTERVALS;
                let h = sweep / n as f64;
                let f = |i: usize| {
                    let th = start + h * i as f64;
                    (center[0] + radius * th.cos()).max(0.0).powi(k)
                };
                let mut acc = f(0) + f(n);
                for i in 1..n {
                    acc += if i % 2 == 1 { 4.0 * f(i) } else { 2.0 * f(i) };
                }
                radius * (acc * h.abs() / 3.0)
            }
        }
    }
}

fn d2(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
}

#[derive(Clone, Debug)]
pub(crate) struct Profile {
    pieces: Vec<Piece>,
}

impl Profile {
    /// Drops pieces of (numerically) zero length.
    pub fn new(pieces: Vec<Piece>) -> Self {
        let pieces = pieces.into_iter().filter(|p| p.length() > 1e-14).collect();
        Profile { pieces }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn closest(&self, p: [f64; 2]) -> ProfileHit {
        let hits: Vec<PieceHit> = self.pieces.iter().map(|pc| pc.closest(p)).collect();
        let mut best = 0;
        for (i, h) in hits.iter().enumerate() {
            if h.dist2 < hits[best].dist2 {
                best = i;
            }
        }
        let b = hits[best];
        let db = b.dist2.sqrt();
        let mut unique = !b.degenerate;
        for h in &hits {
            if (h.dist2.sqrt() - db).abs() <= TIE_TOL
                && (h.degenerate || d2(h.point, b.point).sqrt() > DISTINCT_TOL)
            {
                unique = false;
            }
        }
        ProfileHit { piece: best, dist2: b.dist2, point: b.point, t: b.t, unique }
    }

    #[cfg(test)]
    pub fn total_length(&self) -> f64 {
        self.pieces.iter().map(Piece::length).sum()
    }
}

/// Half circle of radius `r` about the origin, from the south pole to the
/// north pole through `s > 0`.
pub(crate) fn half_circle(r: f64) -> Profile {
    Profile::new(vec![Piece::Arc { center: [0.0, 0.0], radius: r, start: -PI / 2.0, sweep: PI }])
}

/// Saucer profile: flat top at `v = κ` over `s ≤ 1`, semicircular rim of
/// radius `κ` about `(1, 0)`, flat bottom at `v = −κ`.
pub(crate) fn saucer(kappa: f64) -> Profile {
    Profile::new(saucer_pieces(kappa, 0.0))
}

fn saucer_pieces(kappa: f64, top_from: f64) -> Vec<Piece> {
    vec![
        Piece::Segment { a: [top_from, kappa], b: [1.0, kappa] },
        Piece::Arc { center: [1.0, 0.0], radius: kappa, start: PI / 2.0, sweep: -PI },
        Piece::Segment { a: [1.0, -kappa], b: [0.0, -kappa] },
    ]
}

/// Bump profile: the saucer with its top replaced over `s ≤ w` by a cap of
/// radius `κ` about `(0, γ)` and a concave arc of radius `κ` about `(w, 2κ)`.
pub(crate) fn bump(kappa: f64, gamma: f64) -> Profile {
    let w = super::bump_half_width(kappa, gamma);
    let mid_v = kappa - gamma / 2.0;
    let cap_end = mid_v.atan2(w / 2.0);
    let concave_start = (-mid_v).atan2(-w / 2.0);
    let mut pieces = vec![
        Piece::Arc {
            center: [0.0, gamma],
            radius: kappa,
            start: PI / 2.0,
            sweep: cap_end - PI / 2.0,
        },
        Piece::Arc {
            center: [w, 2.0 * kappa],
            radius: kappa,
            start: concave_start,
            sweep: -PI / 2.0 - concave_start,
        },
    ];
    pieces.extend(saucer_pieces(kappa, w));
    Profile::new(pieces)
}
