//! First intersection of an I-curve with a sequence of boundary elements.
//!
//! Each element's polyline gets a bounding-box segment tree. A box is skipped
//! when the bisector's `eval` cannot change sign over it; otherwise boxes are
//! searched best-first by a lower bound on `|t|` (the curve parameter grows
//! monotonically with the frame's y coordinate).

use crate::geom::{make_bisector, Bisector, Crossing, Point, Segment, WeightedSite};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Clone, Copy, Debug, PartialEq)]
struct BBox {
    lo: Point,
    hi: Point,
}

impl BBox {
    fn of(pts: &[Point]) -> BBox {
        let mut b = BBox { lo: pts[0], hi: pts[0] };
        for p in pts {
            b.lo = Point::new(b.lo.x.min(p.x), b.lo.y.min(p.y));
            b.hi = Point::new(b.hi.x.max(p.x), b.hi.y.max(p.y));
        }
        b
    }

    fn corners(&self) -> [Point; 4] {
        [
            self.lo,
            Point::new(self.hi.x, self.lo.y),
            self.hi,
            Point::new(self.lo.x, self.hi.y),
        ]
    }

    fn min_dist(&self, p: Point) -> f64 {
        let dx = (self.lo.x - p.x).max(0.0).max(p.x - self.hi.x);
        let dy = (self.lo.y - p.y).max(0.0).max(p.y - self.hi.y);
        dx.hypot(dy)
    }

    fn max_dist(&self, p: Point) -> f64 {
        self.corners().iter().map(|c| c.dist(p)).fold(0.0, f64::max)
    }
}

/// Segment tree over one polyline's edges.
#[derive(Clone, Debug)]
pub struct ElementTree {
    pub pts: Vec<Point>,
    /// `(box, first edge, edge count)`, children of node `i` at `2i+1`, `2i+2`.
    nodes: Vec<Option<(BBox, usize, usize)>>,
}

impl ElementTree {
    pub fn new(pts: Vec<Point>) -> ElementTree {
        let edges = pts.len().saturating_sub(1).max(1);
        let mut t = ElementTree {
            pts,
            nodes: vec![None; 4 * edges],
        };
        t.build(0, 0, edges);
        t
    }

    fn edge(&self, i: usize) -> Segment {
        if self.pts.len() == 1 {
            Segment::new(self.pts[0], self.pts[0])
        } else {
            Segment::new(self.pts[i], self.pts[i + 1])
        }
    }

    fn build(&mut self, node: usize, first: usize, count: usize) {
        let last = (first + count).min(self.pts.len() - 1);
        let b = BBox::of(&self.pts[first..=last]);
        self.nodes[node] = Some((b, first, count));
        if count > 1 {
            let h = count / 2;
            self.build(2 * node + 1, first, h);
            self.build(2 * node + 2, first + h, count - h);
        }
    }
}

/// Whether the crossing `(param, element)` comes before `(param2, element2)`:
/// smaller `|t|`, then `t ≥ 0`, then the lower element index.
fn before(a: (f64, usize), b: (f64, usize)) -> bool {
    let (x, y) = (a.0.abs(), b.0.abs());
    if x != y {
        return x < y;
    }
    if (a.0 >= 0.0) != (b.0 >= 0.0) {
        return a.0 >= 0.0;
    }
    a.1 < b.1
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IHit {
    pub element: usize,
    pub crossing: Crossing,
}

fn better(cur: Option<IHit>, c: Crossing, element: usize) -> Option<IHit> {
    match cur {
        Some(h) if !before((c.param, element), (h.crossing.param, h.element)) => Some(h),
        _ => Some(IHit { element, crossing: c }),
    }
}

#[derive(PartialEq)]
struct Q(f64, usize, usize);

impl Eq for Q {}
impl Ord for Q {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1)).then(o.2.cmp(&self.2))
    }
}
impl PartialOrd for Q {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Lower bound on `|t|` over the box, or `None` when the curve misses it.
fn box_bound(bis: &Bisector, b: &BBox) -> Option<f64> {
    let (l, r) = (bis.left, bis.right);
    let lo = l.weight + b.min_dist(l.center) - r.weight - b.max_dist(r.center);
    let hi = l.weight + b.max_dist(l.center) - r.weight - b.min_dist(r.center);
    let slack = crate::geom::EPS_GEOM;
    if lo > slack || hi < -slack {
        return None;
    }
    let ys: Vec<f64> = b.corners().iter().map(|c| bis.frame_y(*c)).collect();
    let (ymin, ymax) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, &y| (a.0.min(y), a.1.max(y)));
    let y = if ymin <= 0.0 && ymax >= 0.0 { 0.0 } else { ymin.abs().min(ymax.abs()) };
    Some(bis.param_of_y(y).abs() * (1.0 - 1e-12) - 1e-12)
}

/// First crossing of `bis` with the elements, with the stated tie rule.
pub fn iintersect(bis: &Bisector, elements: &[ElementTree]) -> Option<IHit> {
    let mut heap = BinaryHeap::new();
    for (k, el) in elements.iter().enumerate() {
        if let Some((b, _, _)) = el.nodes[0] {
            if let Some(lb) = box_bound(bis, &b) {
                heap.push(Q(lb, k, 0));
            }
        }
    }
    let mut best: Option<IHit> = None;
    while let Some(Q(lb, k, node)) = heap.pop() {
        if let Some(h) = best {
            if lb > h.crossing.param.abs() {
                break;
            }
        }
        let el = &elements[k];
        let (_, first, count) = el.nodes[node].expect("pushed nodes exist");
        if count == 1 {
            for c in crate::geom::all_crossings(bis, &el.edge(first)) {
                best = better(best, c, k);
            }
            continue;
        }
        for child in [2 * node + 1, 2 * node + 2] {
            if let Some((b, _, _)) = el.nodes[child] {
                if let Some(lb) = box_bound(bis, &b) {
                    heap.push(Q(lb, k, child));
                }
            }
        }
    }
    best
}

/// Every edge of every element, in order.
pub fn iintersect_brute(bis: &Bisector, elements: &[Vec<Point>]) -> Option<IHit> {
    let mut best = None;
    for (k, pts) in elements.iter().enumerate() {
        let segs: Vec<Segment> = if pts.len() == 1 {
            vec![Segment::new(pts[0], pts[0])]
        } else {
            pts.windows(2).map(|w| Segment::new(w[0], w[1])).collect()
        };
        for s in segs {
            for c in crate::geom::all_crossings(bis, &s) {
                best = better(best, c, k);
            }
        }
    }
    best
}

/// Bisector of two sites, `None` when one dominates the other.
pub fn icurve(a: WeightedSite, b: WeightedSite) -> Option<Bisector> {
    make_bisector(a, b).ok()
}
