//! Geometric primitives shared by every other module.
//!
//! Combinatorial decisions (turn direction, containment, visibility) go through
//! [`orient`], which is exact. Metric quantities use plain `f64` and are compared
//! against [`EPS_GEOM`].

mod bisector;
pub mod envelope;
mod tangent;

pub use bisector::{
    intersect_bisector_segment, make_bisector, strike_distance, strike_distance_point, Bisector,
    BisectorKind, Crossing, WeightedSite,
};
pub(crate) use bisector::all_crossings;
pub use tangent::{
    common_tangent, common_tangent_env, tangent_from_point, Bridge, ConvexChainRef, Orientation,
    TangentSide,
};

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

/// Absolute tolerance for metric comparisons, in plane units.
pub const EPS_GEOM: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Unit vector at angle `theta`.
    pub fn unit(theta: f64) -> Self {
        Point::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn angle(self) -> f64 {
        norm_angle(self.y.atan2(self.x))
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn len(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn at(&self, t: f64) -> Point {
        self.a.lerp(self.b, t)
    }

    /// Parameter of the point of the segment closest to `p`, clamped to `[0, 1]`.
    pub fn closest_param(&self, p: Point) -> f64 {
        let d = self.b - self.a;
        let l2 = d.dot(d);
        if l2 == 0.0 {
            return 0.0;
        }
        ((p - self.a).dot(d) / l2).clamp(0.0, 1.0)
    }

    pub fn closest_point(&self, p: Point) -> Point {
        self.at(self.closest_param(p))
    }

    pub fn dist_to_point(&self, p: Point) -> f64 {
        self.closest_point(p).dist(p)
    }
}

/// Sign of the signed area of triangle `abc`: `+1` for a left turn, `-1` for a
/// right turn, `0` when collinear. Evaluated with adaptive-precision arithmetic,
/// so the sign is exact for all finite inputs.
pub fn orient(a: Point, b: Point, c: Point) -> i8 {
    let det = robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    );
    if det > 0.0 {
        1
    } else if det < 0.0 {
        -1
    } else {
        0
    }
}

/// Twice the signed area of triangle `abc` in plain floating point.
pub fn area2(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Whether closed segments `ab` and `cd` share a point.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0 && (o1 != 0 || o2 != 0) {
        return true;
    }
    if o1 == 0 && on_segment(a, b, c) {
        return true;
    }
    if o2 == 0 && on_segment(a, b, d) {
        return true;
    }
    if o3 == 0 && on_segment(c, d, a) {
        return true;
    }
    if o4 == 0 && on_segment(c, d, b) {
        return true;
    }
    false
}

/// Whether the open segments `ab` and `cd` cross at a single interior point of both.
pub fn segments_cross_properly(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 * o2 < 0 && o3 * o4 < 0
}

/// For `p` collinear with `ab`: whether `p` lies within the closed segment.
pub fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Angle normalized into `[0, 2π)`.
pub fn norm_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Counter-clockwise angular distance from `from` to `to`, in `[0, 2π)`.
pub fn ccw_span(from: f64, to: f64) -> f64 {
    norm_angle(to - from)
}

/// Signed area of a closed ring (positive when counter-clockwise).
pub fn ring_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    let mut s = 0.0;
    for i in 0..n {
        s += ring[i].cross(ring[(i + 1) % n]);
    }
    0.5 * s
}

/// Crossing-number test. Points on the boundary report `None`.
pub fn point_in_ring(ring: &[Point], p: Point) -> Option<bool> {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if orient(a, b, p) == 0 && on_segment(a, b, p) {
            return None;
        }
        if (a.y > p.y) != (b.y > p.y) {
            // Exact side test instead of computing the crossing abscissa.
            let o = orient(a, b, p);
            if (b.y > a.y && o > 0) || (b.y < a.y && o < 0) {
                inside = !inside;
            }
        }
    }
    Some(inside)
}

/// Roots `s` of `wa + |P + s·dir − a| = wb + |P + s·dir − b|` over all reals.
///
/// Squares twice and keeps only the roots consistent with the unsquared
/// equation. Shared by window trimming and I-curve intersection.
pub(crate) fn equal_weighted_distance_roots(
    a: Point,
    wa: f64,
    b: Point,
    wb: f64,
    p0: Point,
    dir: Point,
) -> Vec<f64> {
    // |p-a| - |p-b| = delta
    let delta = wb - wa;
    // L(s) = |p-a|^2 - |p-b|^2 - delta^2, linear in s.
    let pa = p0 - a;
    let pb = p0 - b;
    let l0 = pa.dot(pa) - pb.dot(pb) - delta * delta;
    let l1 = 2.0 * (pa.dot(dir) - pb.dot(dir));
    let mut roots = Vec::new();
    if delta == 0.0 {
        if l1 != 0.0 {
            roots.push(-l0 / l1);
        }
        return roots;
    }
    // 4 delta^2 |p-b|^2 = L(s)^2
    let dd = dir.dot(dir);
    let qa = l1 * l1 - 4.0 * delta * delta * dd;
    let qb = 2.0 * l0 * l1 - 8.0 * delta * delta * pb.dot(dir);
    let qc = l0 * l0 - 4.0 * delta * delta * pb.dot(pb);
    let scale = qa.abs().max(qb.abs()).max(qc.abs()).max(f64::MIN_POSITIVE);
    let mut cand = Vec::new();
    if qa.abs() <= 1e-14 * scale {
        if qb != 0.0 {
            cand.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        let disc = if disc < 0.0 && disc > -1e-12 * qb * qb { 0.0 } else { disc };
        if disc >= 0.0 {
            let sq = disc.sqrt();
            // Numerically stable pair.
            let q = -0.5 * (qb + qb.signum() * sq);
            if q != 0.0 {
                cand.push(q / qa);
                cand.push(qc / q);
            } else {
                cand.push(-qb / (2.0 * qa));
            }
        }
    }
    for s in cand {
        if !s.is_finite() {
            continue;
        }
        let p = p0 + dir * s;
        let f = (wa + p.dist(a)) - (wb + p.dist(b));
        let tol = 1e-7 * (1.0 + wa.abs() + wb.abs() + p.dist(a) + p.dist(b));
        if f.abs() <= tol {
            roots.push(s);
        }
    }
    roots.sort_by(|x, y| x.total_cmp(y));
    roots.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    roots
}
