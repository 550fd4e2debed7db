use super::envelope::{merge, separation, Envelope, Piece};
use super::{orient, Point, Segment, EPS_GEOM};
use crate::error::GeomError;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Cw,
    Ccw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TangentSide {
    /// Every chain vertex lies on the closed left of the ray `p → v`.
    Left,
    /// Every chain vertex lies on the closed right of the ray `p → v`.
    Right,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexChainRef {
    pub vertices: Vec<Point>,
    pub orientation: Orientation,
}

impl ConvexChainRef {
    pub fn new(vertices: Vec<Point>, orientation: Orientation) -> Self {
        ConvexChainRef {
            vertices,
            orientation,
        }
    }

    /// Uniform turn direction over consecutive triples, no repeated vertices.
    pub fn is_convex(&self) -> bool {
        let v = &self.vertices;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] == v[j] {
                    return false;
                }
            }
        }
        let want = match self.orientation {
            Orientation::Ccw => 1,
            Orientation::Cw => -1,
        };
        v.windows(3).all(|w| {
            let o = orient(w[0], w[1], w[2]);
            o == 0 || o == want
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Arc length from vertex `i` to vertex `j` along the chain (`i <= j`).
    pub fn perimeter(&self, i: usize, j: usize) -> f64 {
        self.vertices[i..=j]
            .windows(2)
            .map(|w| w[0].dist(w[1]))
            .sum()
    }
}

pub fn tangent_from_point(
    p: Point,
    chain: &ConvexChainRef,
    side: TangentSide,
) -> Result<(usize, Point), GeomError> {
    let v = &chain.vertices;
    if v.is_empty() {
        return Err(GeomError::EmptyChain);
    }
    let want: i8 = match side {
        TangentSide::Left => 1,
        TangentSide::Right => -1,
    };
    let mut best = 0usize;
    for (i, &q) in v.iter().enumerate().skip(1) {
        if q == p || v[best] == p {
            return Err(GeomError::NoTangent);
        }
        let o = orient(p, v[best], q);
        if o == -want || (o == 0 && p.dist(q) < p.dist(v[best])) {
            best = i;
        }
    }
    if v[best] == p {
        return Err(GeomError::NoTangent);
    }
    // A single selection pass is only meaningful when the chain spans less
    // than a half-turn as seen from p; the verification pass rejects the rest.
    for &q in v {
        if orient(p, v[best], q) == -want {
            return Err(GeomError::NoTangent);
        }
    }
    if v.len() >= 3 && strictly_inside_hull(p, v) {
        return Err(GeomError::NoTangent);
    }
    Ok((best, v[best]))
}

fn strictly_inside_hull(p: Point, v: &[Point]) -> bool {
    // Closing the chain gives its hull boundary (the chain is convex).
    let n = v.len();
    let mut sign = 0i8;
    for i in 0..n {
        let o = orient(v[i], v[(i + 1) % n], p);
        if o == 0 {
            return false;
        }
        if sign == 0 {
            sign = o;
        } else if o != sign {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bridge {
    /// Common support segment from a point of the first hull to a point of
    /// the second; both hulls lie on the closed side opposite `normal`.
    Segment { seg: Segment, normal: f64 },
    /// The hulls' interiors overlap.
    Overlap,
    /// One hull contains the other, so no bridge exists.
    Nested,
}

/// Upper bridge from hull `a` (left) to hull `b` (right). Hull pieces are
/// evaluated at radius `d`; arcs grow outward with their offsets.
pub fn common_tangent(a: &[Piece], b: &[Piece], d: f64) -> Bridge {
    let ea = Envelope::from_pieces(a, d);
    let eb = Envelope::from_pieces(b, d);
    common_tangent_env(&ea, &eb)
}

pub fn common_tangent_env(ea: &Envelope, eb: &Envelope) -> Bridge {
    if separation(ea, eb) < -EPS_GEOM {
        return Bridge::Overlap;
    }
    let (_, tr) = merge(ea, eb);
    tr.iter()
        .filter(|t| t.from_tag == 1 && t.to_tag == 0 && t.theta >= 0.0 && t.theta <= PI)
        .min_by(|x, y| {
            (x.theta - PI / 2.0)
                .abs()
                .total_cmp(&(y.theta - PI / 2.0).abs())
        })
        .map(|t| Bridge::Segment {
            seg: t.seg,
            normal: t.theta,
        })
        .unwrap_or(Bridge::Nested)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::WeightedSite;
    use std::f64::consts::TAU;

    fn chain() -> ConvexChainRef {
        ConvexChainRef::new(
            vec![Point::new(-1.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 0.0)],
            Orientation::Cw,
        )
    }

    fn brute(p: Point, c: &ConvexChainRef, side: TangentSide) -> Vec<usize> {
        let want = if side == TangentSide::Left { 1 } else { -1 };
        (0..c.len())
            .filter(|&i| {
                c.vertices[i] != p
                    && c.vertices.iter().all(|&q| orient(p, c.vertices[i], q) != -want)
            })
            .collect()
    }

    #[test]
    fn tangents_from_above() {
        let c = chain();
        assert!(c.is_convex());
        let p = Point::new(0.0, 3.0);
        let (i, v) = tangent_from_point(p, &c, TangentSide::Left).unwrap();
        assert_eq!((i, v), (0, Point::new(-1.0, 0.0)));
        assert_eq!(brute(p, &c, TangentSide::Left), vec![0]);
        let (i, v) = tangent_from_point(p, &c, TangentSide::Right).unwrap();
        assert_eq!((i, v), (2, Point::new(1.0, 0.0)));
        assert_eq!(brute(p, &c, TangentSide::Right), vec![2]);
    }

    #[test]
    fn no_tangent_from_inside() {
        assert_eq!(
            tangent_from_point(Point::new(0.0, 0.5), &chain(), TangentSide::Left),
            Err(GeomError::NoTangent)
        );
    }

    #[test]
    fn point_bridge() {
        let b = common_tangent(
            &[Piece::point(0, Point::new(0.0, 0.0))],
            &[Piece::point(1, Point::new(2.0, 0.0))],
            0.0,
        );
        match b {
            Bridge::Segment { seg, .. } => {
                assert_eq!(seg.a, Point::new(0.0, 0.0));
                assert_eq!(seg.b, Point::new(2.0, 0.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equal_arcs_bridge_is_horizontal() {
        let a = Piece::site(0, WeightedSite::new(Point::new(0.0, 0.0), 0.0), 0.0, TAU);
        let b = Piece::site(1, WeightedSite::new(Point::new(10.0, 0.0), 0.0), 0.0, TAU);
        match common_tangent(&[a], &[b], 1.0) {
            Bridge::Segment { seg, .. } => {
                assert!(seg.a.dist(Point::new(0.0, 1.0)) < 1e-12);
                assert!(seg.b.dist(Point::new(10.0, 1.0)) < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unequal_disks_external_tangent() {
        let a = Piece::disk(0, Point::new(0.0, 0.0), 1.0);
        let b = Piece::disk(1, Point::new(4.0, 0.0), 2.0);
        let Bridge::Segment { seg, normal } = common_tangent(&[a], &[b], 0.0) else {
            panic!("no bridge");
        };
        // Closed form: equal support n·c1 + r1 = n·c2 + r2 gives cos φ = -(r2 - r1)/|c1c2|.
        let phi = (-(2.0f64 - 1.0) / 4.0).acos();
        assert!((normal - phi).abs() < 1e-12, "{normal} vs {phi}");
        let n = Point::unit(normal);
        // Tangency residuals: both contact points on the line, both disks below it.
        let off = seg.a.dot(n);
        assert!((seg.b.dot(n) - off).abs() < EPS_GEOM);
        assert!((Point::new(0.0, 0.0).dot(n) + 1.0 - off).abs() < EPS_GEOM);
        assert!((Point::new(4.0, 0.0).dot(n) + 2.0 - off).abs() < EPS_GEOM);
        // Sampled support test.
        for i in 0..256 {
            let th = TAU * i as f64 / 256.0;
            let q = Point::new(0.0, 0.0) + Point::unit(th);
            let r = Point::new(4.0, 0.0) + Point::unit(th) * 2.0;
            assert!(q.dot(n) <= off + EPS_GEOM && r.dot(n) <= off + EPS_GEOM);
        }
    }

    #[test]
    fn overlapping_hulls_report_overlap() {
        let a = Piece::disk(0, Point::new(0.0, 0.0), 1.0);
        let b = Piece::disk(1, Point::new(1.0, 0.0), 1.0);
        assert_eq!(common_tangent(&[a], &[b], 0.0), Bridge::Overlap);
    }
}
