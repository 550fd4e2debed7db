//! Instances, validation, JSON I/O and the seeded instance generator.

use crate::error::{Error, Result, ValidationError};
use crate::geom::{
    orient, point_in_ring, ring_area, segments_intersect, Point, Segment,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Largest bounding-box diagonal kept without rescaling.
pub const MAX_DIAMETER: f64 = 1000.0;

/// Minimum feature separation in generated instances.
pub const EPS_PLACE: f64 = 1e-3;

/// Half side of the generator's square outer boundary.
pub const GEN_HALF_SIDE: f64 = 350.0;

/// A polygon with holes plus source and target, stored in working units.
///
/// Coordinates are divided by `scale` (a power of two, so the division is
/// exact) whenever the input's bounding box is larger than [`MAX_DIAMETER`].
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub outer: Vec<Point>,
    pub holes: Vec<Vec<Point>>,
    pub s: Point,
    pub t: Point,
    pub scale: f64,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    outer: Vec<Point>,
    #[serde(default)]
    holes: Vec<Vec<Point>>,
    s: Point,
    t: Point,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub distance: f64,
    pub path: Vec<Point>,
    pub counters: BTreeMap<String, u64>,
    #[serde(skip)]
    pub trace: Vec<String>,
}

impl PathResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("path result serializes")
    }
}

impl Instance {
    /// Builds and validates an instance given in input units.
    pub fn new(outer: Vec<Point>, holes: Vec<Vec<Point>>, s: Point, t: Point) -> Result<Self> {
        let mut inst = Instance {
            outer,
            holes,
            s,
            t,
            scale: 1.0,
        };
        inst.normalize_orientation();
        inst.validate()?;
        inst.rescale();
        Ok(inst)
    }

    /// Total number of polygon vertices.
    pub fn n(&self) -> usize {
        self.outer.len() + self.holes.iter().map(Vec::len).sum::<usize>()
    }

    /// Number of holes.
    pub fn m(&self) -> usize {
        self.holes.len()
    }

    pub fn rings(&self) -> impl Iterator<Item = &Vec<Point>> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    fn normalize_orientation(&mut self) {
        if ring_area(&self.outer) < 0.0 {
            self.outer.reverse();
        }
        for h in &mut self.holes {
            if ring_area(h) > 0.0 {
                h.reverse();
            }
        }
    }

    fn rescale(&mut self) {
        let (lo, hi) = bbox(self.rings().flatten().copied().chain([self.s, self.t]));
        let diam = lo.dist(hi);
        let mut scale = 1.0f64;
        while diam / scale > MAX_DIAMETER {
            scale *= 2.0;
        }
        if scale != 1.0 {
            let f = |p: &mut Point| *p = Point::new(p.x / scale, p.y / scale);
            self.outer.iter_mut().for_each(f);
            self.holes.iter_mut().flatten().for_each(f);
            f(&mut self.s);
            f(&mut self.t);
        }
        self.scale = scale;
    }

    /// Point in input units.
    pub fn to_input_units(&self, p: Point) -> Point {
        Point::new(p.x * self.scale, p.y * self.scale)
    }

    /// Checks every instance invariant. Orientation is assumed normalized.
    pub fn validate(&self) -> std::result::Result<(), ValidationError> {
        let name = |i: Option<usize>| match i {
            None => "outer boundary".to_string(),
            Some(h) => format!("hole {h}"),
        };
        let rings: Vec<(Option<usize>, &Vec<Point>)> = std::iter::once((None, &self.outer))
            .chain(self.holes.iter().enumerate().map(|(i, h)| (Some(i), h)))
            .collect();
        for (id, r) in &rings {
            if r.len() < 3 {
                return Err(ValidationError::TooFewVertices { ring: name(*id) });
            }
            if r.iter().any(|p| !p.is_finite()) {
                return Err(ValidationError::NonFinite { ring: name(*id) });
            }
            check_simple(r).map_err(|e| match e {
                SimpleErr::Repeat => ValidationError::RepeatedVertex { ring: name(*id) },
                SimpleErr::Cross => ValidationError::SelfIntersection { ring: name(*id) },
                SimpleErr::Flat => ValidationError::DegenerateRing { ring: name(*id) },
            })?;
        }
        if !self.s.is_finite() || !self.t.is_finite() {
            return Err(ValidationError::NonFinite {
                ring: "source/target".into(),
            });
        }
        for (i, h) in self.holes.iter().enumerate() {
            if rings_touch(&self.outer, h)
                || h.iter().any(|&p| point_in_ring(&self.outer, p) != Some(true))
            {
                return Err(ValidationError::HoleOutsideOuter { hole: i });
            }
        }
        for i in 0..self.holes.len() {
            for j in i + 1..self.holes.len() {
                let (a, b) = (&self.holes[i], &self.holes[j]);
                if rings_touch(a, b)
                    || point_in_ring(a, b[0]) != Some(false)
                    || point_in_ring(b, a[0]) != Some(false)
                {
                    return Err(ValidationError::HolesIntersect { a: i, b: j });
                }
            }
        }
        if !self.in_free_space(self.s) {
            return Err(ValidationError::SourceNotInFreeSpace);
        }
        if !self.in_free_space(self.t) {
            return Err(ValidationError::TargetNotInFreeSpace);
        }
        Ok(())
    }

    /// Strictly inside the outer boundary and strictly outside every hole.
    pub fn in_free_space(&self, p: Point) -> bool {
        point_in_ring(&self.outer, p) == Some(true)
            && self.holes.iter().all(|h| point_in_ring(h, p) == Some(false))
    }

    /// In free space or on its boundary.
    pub fn in_closed_free_space(&self, p: Point) -> bool {
        point_in_ring(&self.outer, p) != Some(false)
            && self.holes.iter().all(|h| point_in_ring(h, p) != Some(true))
    }

    pub fn free_area(&self) -> f64 {
        ring_area(&self.outer) + self.holes.iter().map(|h| ring_area(h)).sum::<f64>()
    }

    /// Instance JSON in input units.
    pub fn to_json(&self) -> String {
        let f = |p: &Point| self.to_input_units(*p);
        let file = InstanceFile {
            outer: self.outer.iter().map(f).collect(),
            holes: self.holes.iter().map(|h| h.iter().map(f).collect()).collect(),
            s: f(&self.s),
            t: f(&self.t),
        };
        serde_json::to_string(&file).expect("instance serializes")
    }
}

fn bbox(pts: impl Iterator<Item = Point>) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

enum SimpleErr {
    Repeat,
    Cross,
    Flat,
}

fn check_simple(r: &[Point]) -> std::result::Result<(), SimpleErr> {
    let n = r.len();
    for i in 0..n {
        for j in i + 1..n {
            if r[i] == r[j] {
                return Err(SimpleErr::Repeat);
            }
        }
    }
    if ring_area(r) == 0.0 || r.windows(3).all(|w| orient(w[0], w[1], w[2]) == 0) {
        return Err(SimpleErr::Flat);
    }
    for i in 0..n {
        let (a, b) = (r[i], r[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (r[j], r[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Consecutive edges may only share their common endpoint.
                let (shared, other_a, other_b) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                if orient(other_a, shared, other_b) == 0 {
                    let back = (other_a - shared).dot(other_b - shared) > 0.0;
                    if back {
                        return Err(SimpleErr::Cross);
                    }
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return Err(SimpleErr::Cross);
            }
        }
    }
    Ok(())
}

fn rings_touch(a: &[Point], b: &[Point]) -> bool {
    let (na, nb) = (a.len(), b.len());
    (0..na).any(|i| {
        let (p, q) = (a[i], a[(i + 1) % na]);
        (0..nb).any(|j| segments_intersect(p, q, b[j], b[(j + 1) % nb]))
    })
}

/// Parses and validates instance JSON.
pub fn parse_instance(text: &[u8]) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_slice(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    Instance::new(file.outer, file.holes, file.s, file.t)
}

/// Deterministic instance with `m` convex `k`-gon holes in a square.
pub fn random_instance(seed: u64, m: usize, k: usize) -> Result<Instance> {
    assert!(k >= 3, "holes need at least three vertices");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = GEN_HALF_SIDE;
    let outer = vec![
        Point::new(-h, -h),
        Point::new(h, -h),
        Point::new(h, h),
        Point::new(-h, h),
    ];
    // Leave corridors at the left and right ends for s and t.
    let (xlo, xhi) = (-h + 110.0, h - 110.0);
    let rmax = (0.9 * h / ((m.max(1) as f64).sqrt() + 1.0)).min(90.0);
    let rmin = 0.35 * rmax;
    let clearance = 2.0 * EPS_PLACE;
    let tries = 20_000;
    let mut disks: Vec<(Point, f64)> = Vec::new();
    let mut holes = Vec::with_capacity(m);
    for hi in 0..m {
        let mut placed = false;
        for _ in 0..tries {
            let r = rng.random_range(rmin..rmax);
            let c = Point::new(
                rng.random_range(xlo + r..xhi - r),
                rng.random_range(-h + r + 5.0..h - r - 5.0),
            );
            if disks.iter().all(|&(c2, r2)| c.dist(c2) >= r + r2 + clearance + 4.0) {
                disks.push((c, r));
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::CouldNotPlace {
                what: format!("hole {hi}"),
                tries,
            });
        }
        let (c, r) = *disks.last().unwrap();
        let step = TAU / k as f64;
        let phase = rng.random_range(0.0..TAU);
        let mut ring: Vec<Point> = (0..k)
            .map(|i| {
                let a = phase + step * (i as f64 + rng.random_range(-0.3..0.3));
                c + Point::unit(a) * r
            })
            .collect();
        ring.reverse();
        holes.push(ring);
    }
    let mut pick = |x0: f64, x1: f64| -> Result<Point> {
        for _ in 0..tries {
            let p = Point::new(rng.random_range(x0..x1), rng.random_range(-h + 5.0..h - 5.0));
            if holes.iter().all(|ring: &Vec<Point>| {
                point_in_ring(ring, p) == Some(false)
                    && (0..ring.len()).all(|i| {
                        Segment::new(ring[i], ring[(i + 1) % ring.len()]).dist_to_point(p) >= clearance
                    })
            }) {
                return Ok(p);
            }
        }
        Err(Error::CouldNotPlace {
            what: "terminal".into(),
            tries,
        })
    };
    let s = pick(-h + 5.0, -h + 100.0)?;
    let t = pick(h - 100.0, h - 5.0)?;
    Instance::new(outer, holes, s, t)
}
