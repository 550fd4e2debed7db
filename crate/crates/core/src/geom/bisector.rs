use super::{equal_weighted_distance_roots, Point, Segment, EPS_GEOM};
use crate::error::GeomError;
use serde::{Deserialize, Serialize};

/// A point source of the wavefront: points at distance `r` from `center`
/// are reached at global radius `weight + r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSite {
    pub center: Point,
    pub weight: f64,
}

impl WeightedSite {
    pub const fn new(center: Point, weight: f64) -> Self {
        WeightedSite { center, weight }
    }

    /// Global radius at which this site reaches `p`.
    pub fn reach(&self, p: Point) -> f64 {
        self.weight + self.center.dist(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BisectorKind {
    Line,
    HyperbolaBranch,
}

/// Locus of points reached simultaneously by two weighted sites.
///
/// In the local frame (origin at the midpoint of the centers, x-axis toward
/// `right.center`) the curve is `x = sign·α·cosh t, y = β·sinh t`, or the
/// line `x = 0, y = t` when weights agree. `|t|` grows away from the segment
/// joining the centers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bisector {
    pub left: WeightedSite,
    pub right: WeightedSite,
    pub kind: BisectorKind,
    origin: Point,
    ex: Point,
    alpha: f64,
    beta: f64,
    sign: f64,
}

/// A point where a bisector meets a segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    pub point: Point,
    /// Curve parameter of the point.
    pub param: f64,
    /// Position along the segment, in `[0, 1]`.
    pub seg_param: f64,
}

pub fn make_bisector(a: WeightedSite, b: WeightedSite) -> Result<Bisector, GeomError> {
    if a.center == b.center {
        return Err(GeomError::CoincidentSites);
    }
    let d = b.center - a.center;
    let len = d.norm();
    // |p-a| - |p-b| = delta
    let delta = b.weight - a.weight;
    if delta.abs() >= len {
        return Err(GeomError::EmptyBisector);
    }
    let origin = a.center.lerp(b.center, 0.5);
    let ex = d * (1.0 / len);
    let f = 0.5 * len;
    let alpha = 0.5 * delta.abs();
    let beta = (f * f - alpha * alpha).sqrt();
    let kind = if delta == 0.0 {
        BisectorKind::Line
    } else {
        BisectorKind::HyperbolaBranch
    };
    // delta > 0: points on the curve are farther from a, so the branch wraps b.
    let sign = if delta > 0.0 { 1.0 } else { -1.0 };
    Ok(Bisector {
        left: a,
        right: b,
        kind,
        origin,
        ex,
        alpha,
        beta,
        sign,
    })
}

impl Bisector {
    /// `(left reach) - (right reach)`; zero exactly on the curve.
    pub fn eval(&self, p: Point) -> f64 {
        self.left.reach(p) - self.right.reach(p)
    }

    pub fn point_at(&self, t: f64) -> Point {
        let ey = self.ex.perp();
        let (x, y) = match self.kind {
            BisectorKind::Line => (0.0, t),
            BisectorKind::HyperbolaBranch => (self.sign * self.alpha * t.cosh(), self.beta * t.sinh()),
        };
        self.origin + self.ex * x + ey * y
    }

    /// Curve parameter of a point assumed to lie on the curve.
    pub fn param_of(&self, p: Point) -> f64 {
        let y = (p - self.origin).dot(self.ex.perp());
        match self.kind {
            BisectorKind::Line => y,
            BisectorKind::HyperbolaBranch => (y / self.beta).asinh(),
        }
    }

    /// Signed coordinate along the frame's y-axis; monotone in the parameter.
    pub fn frame_y(&self, p: Point) -> f64 {
        (p - self.origin).dot(self.ex.perp())
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Curve parameter at frame coordinate `y`.
    pub fn param_of_y(&self, y: f64) -> f64 {
        match self.kind {
            BisectorKind::Line => y,
            BisectorKind::HyperbolaBranch => (y / self.beta).asinh(),
        }
    }
}

/// Orders crossings by how early the curve reaches them: smaller `|t|`
/// first, ties toward non-negative `t`.
pub(crate) fn earlier(a: f64, b: f64) -> bool {
    let (aa, ab) = (a.abs(), b.abs());
    if aa != ab {
        return aa < ab;
    }
    a >= 0.0 && b < 0.0
}

pub fn intersect_bisector_segment(bis: &Bisector, seg: &Segment) -> Option<Crossing> {
    all_crossings(bis, seg)
        .into_iter()
        .reduce(|x, y| if earlier(y.param, x.param) { y } else { x })
}

pub(crate) fn all_crossings(bis: &Bisector, seg: &Segment) -> Vec<Crossing> {
    let dir = seg.b - seg.a;
    if dir == Point::default() {
        if bis.eval(seg.a).abs() <= EPS_GEOM {
            return vec![Crossing {
                point: seg.a,
                param: bis.param_of(seg.a),
                seg_param: 0.0,
            }];
        }
        return Vec::new();
    }
    let len = dir.norm();
    let slack = EPS_GEOM / len;
    let roots = equal_weighted_distance_roots(
        bis.left.center,
        bis.left.weight,
        bis.right.center,
        bis.right.weight,
        seg.a,
        dir,
    );
    let mut out: Vec<Crossing> = roots
        .into_iter()
        .filter(|s| *s >= -slack && *s <= 1.0 + slack)
        .map(|s| {
            let s = s.clamp(0.0, 1.0);
            let p = seg.at(s);
            Crossing {
                point: p,
                param: bis.param_of(p),
                seg_param: s,
            }
        })
        .collect();
    if out.is_empty() {
        // Endpoints within tolerance of the curve count as grazing contact.
        for (s, p) in [(0.0, seg.a), (1.0, seg.b)] {
            if bis.eval(p).abs() <= EPS_GEOM {
                out.push(Crossing {
                    point: p,
                    param: bis.param_of(p),
                    seg_param: s,
                });
            }
        }
    }
    out
}

/// Smallest global radius at which `site` reaches the segment.
pub fn strike_distance(site: &WeightedSite, target: &Segment) -> f64 {
    site.weight + target.dist_to_point(site.center)
}

pub fn strike_distance_point(site: &WeightedSite, target: Point) -> f64 {
    site.reach(target)
}
