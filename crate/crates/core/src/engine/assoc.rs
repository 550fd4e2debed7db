//! Associating boundary elements with the bunches of two wavefront sections.
//!
//! `assoc_a_to_b` walks the boundary sequence from the end facing section B,
//! handing elements over to B for as long as B strikes them first. The switch
//! position is found by binary search, B's best bunch by a unimodal search,
//! and the element straddling the A/B I-curve is flagged as shared with its
//! split point located by `iintersect`. Both searches are verified by a
//! linear scan; a failed check falls back to the scan and is counted.

use super::iintersect::{icurve, iintersect, ElementTree};
use crate::geom::{Point, WeightedSite};
use crate::hull_trees::polyline_dist;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SBunch {
    pub id: usize,
    pub sites: Vec<WeightedSite>,
}

impl SBunch {
    pub fn strike(&self, pts: &[Point]) -> f64 {
        self.sites
            .iter()
            .map(|s| s.weight + polyline_dist(pts, s.center).0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn reach(&self, p: Point) -> f64 {
        self.sites.iter().map(|s| s.reach(p)).fold(f64::INFINITY, f64::min)
    }

    fn nearest_site(&self, p: Point) -> Option<WeightedSite> {
        self.sites.iter().copied().min_by(|a, b| a.reach(p).total_cmp(&b.reach(p)))
    }
}

pub type Section = Vec<SBunch>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Assoc {
    pub owner: Vec<Option<(Side, usize)>>,
    pub shared: Vec<bool>,
    pub split_point: Vec<Option<Point>>,
}

impl Assoc {
    pub fn new(n: usize) -> Assoc {
        Assoc {
            owner: vec![None; n],
            shared: vec![false; n],
            split_point: vec![None; n],
        }
    }

    /// Each side's elements form one contiguous run (cyclically or not).
    pub fn contiguous(&self, side: Side) -> bool {
        let f: Vec<bool> = self.owner.iter().map(|o| o.map(|x| x.0) == Some(side)).collect();
        let changes = (0..f.len()).filter(|&i| i + 1 < f.len() && f[i] != f[i + 1]).count();
        changes <= 2 && !(changes == 2 && f[0] == f[f.len() - 1] && f[0])
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AssocStats {
    pub calls: u64,
    pub reassigned: u64,
    pub fallbacks: u64,
    pub shared: u64,
}

const TOL: f64 = 1e-12;

/// Best bunch of `sec` for the element by unimodal search over bunch order,
/// checked against the full scan. Ties go to the lower index.
fn best_bunch(sec: &Section, pts: &[Point], stats: &mut AssocStats) -> Option<(usize, f64)> {
    if sec.is_empty() {
        return None;
    }
    let f = |i: usize| sec[i].strike(pts);
    let (mut lo, mut hi) = (0usize, sec.len() - 1);
    while lo < hi {
        let m = (lo + hi) / 2;
        if f(m) <= f(m + 1) {
            hi = m;
        } else {
            lo = m + 1;
        }
    }
    let scan = (0..sec.len())
        .map(|i| (i, f(i)))
        .fold((usize::MAX, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    if f(lo) > scan.1 {
        stats.fallbacks += 1;
        log::warn!("bunch strike distances are not unimodal; using the scan");
        return Some(scan);
    }
    Some((lo, f(lo)))
}

fn strike_of(a: &Section, b: &Section, owner: Option<(Side, usize)>, pts: &[Point]) -> f64 {
    match owner {
        Some((Side::A, i)) => a.get(i).map(|x| x.strike(pts)).unwrap_or(f64::INFINITY),
        Some((Side::B, i)) => b.get(i).map(|x| x.strike(pts)).unwrap_or(f64::INFINITY),
        None => f64::INFINITY,
    }
}

/// Hands elements from side `x` over to side `y` starting at the end of the
/// boundary sequence that faces `y` (`from_end` picks the far end), ordering
/// `y`'s bunches backwards when `rev_y`.
#[allow(clippy::too_many_arguments)]
pub fn assoc_a_to_b(
    a: &Section,
    b: &Section,
    x: Side,
    from_end: bool,
    rev_y: bool,
    elements: &[Vec<Point>],
    trees: &[ElementTree],
    asg: &mut Assoc,
    stats: &mut AssocStats,
) {
    stats.calls += 1;
    let y = x.other();
    let ysec_src = if y == Side::A { a } else { b };
    if ysec_src.is_empty() || elements.is_empty() {
        return;
    }
    let ysec: Section = if rev_y {
        ysec_src.iter().rev().cloned().collect()
    } else {
        ysec_src.clone()
    };
    let unrev = |i: usize| if rev_y { ysec.len() - 1 - i } else { i };
    let n = elements.len();
    let idx = |k: usize| if from_end { n - 1 - k } else { k };

    // P(k): the k-th element from y's end is y's or should become y's.
    let mut local = AssocStats::default();
    let pred = |k: usize, local: &mut AssocStats| -> Option<(usize, f64)> {
        let j = idx(k);
        let o = asg.owner[j];
        let (bi, dy) = best_bunch(&ysec, &elements[j], local)?;
        if o.map(|v| v.0) == Some(y) {
            return Some((bi, dy));
        }
        let dx = strike_of(a, b, o, &elements[j]);
        // An unowned element has dx = inf, where the tolerance would give NaN.
        (dx == f64::INFINITY || dy < dx - TOL * (1.0 + dx.abs())).then_some((bi, dy))
    };
    // First k where P fails, assuming P holds on a prefix.
    let (mut lo, mut hi) = (0usize, n);
    while lo < hi {
        let m = (lo + hi) / 2;
        if pred(m, &mut local).is_some() {
            lo = m + 1;
        } else {
            hi = m;
        }
    }
    let pos = lo;
    let truth: Vec<Option<(usize, f64)>> = (0..n).map(|k| pred(k, &mut local)).collect();
    let monotone = truth.iter().enumerate().all(|(k, t)| t.is_some() == (k < pos));
    if !monotone {
        local.fallbacks += 1;
        log::warn!("switch position is not monotone along the boundary; using the scan");
    }
    stats.fallbacks += local.fallbacks;
    for (k, t) in truth.iter().enumerate() {
        let Some((bi, _)) = *t else {
            if monotone {
                break;
            }
            continue;
        };
        let j = idx(k);
        if asg.owner[j].map(|v| v.0) != Some(y) {
            stats.reassigned += 1;
        }
        asg.owner[j] = Some((y, unrev(bi)));
    }

    // The element straddling the y/x I-curve is one of the two around pos.
    for k in [pos.wrapping_sub(1), pos] {
        if k >= n {
            continue;
        }
        let j = idx(k);
        let pts = &elements[j];
        let Some((side, oi)) = asg.owner[j] else { continue };
        let (own, other) = if side == Side::A { (a, b) } else { (b, a) };
        let Some(ob) = own.get(oi) else { continue };
        // Far ends of the element as seen from its owner's side.
        let ends = [pts[0], pts[pts.len() - 1]];
        let mixed = ends.iter().any(|&p| {
            let mine = ob.reach(p);
            let theirs = other.iter().map(|s| s.reach(p)).fold(f64::INFINITY, f64::min);
            theirs < mine - TOL * (1.0 + mine.abs())
        });
        if !mixed || asg.shared[j] {
            continue;
        }
        asg.shared[j] = true;
        stats.shared += 1;
        asg.split_point[j] = split_point(own, other, pts[pts.len() / 2], &trees[j]);
    }
}

fn nearest_in(sec: &Section, p: Point) -> Option<WeightedSite> {
    sec.iter()
        .filter_map(|s| s.nearest_site(p))
        .min_by(|a, b| a.reach(p).total_cmp(&b.reach(p)))
}

/// Where the I-curve between two sections crosses an element. Starts from
/// the sites nearest to `guess` and re-picks the nearest pair at each
/// crossing found until the pair is stable.
fn split_point(own: &Section, other: &Section, guess: Point, tree: &ElementTree) -> Option<Point> {
    let mut p = guess;
    let mut pair = None;
    for _ in 0..8 {
        let next = (nearest_in(own, p)?, nearest_in(other, p)?);
        if pair == Some(next) {
            return Some(p);
        }
        pair = Some(next);
        let bis = icurve(next.0, next.1)?;
        p = iintersect(&bis, std::slice::from_ref(tree))?.crossing.point;
    }
    None
}

/// Runs `assoc_a_to_b` for both directions and every reversal combination.
pub fn merge(a: &Section, b: &Section, elements: &[Vec<Point>], asg: &mut Assoc, stats: &mut AssocStats) {
    if elements.is_empty() {
        return;
    }
    let trees: Vec<ElementTree> = elements.iter().map(|e| ElementTree::new(e.clone())).collect();
    for x in [Side::A, Side::B] {
        for from_end in [false, true] {
            for rev_y in [false, true] {
                assoc_a_to_b(a, b, x, from_end, rev_y, elements, &trees, asg, stats);
            }
        }
    }
}

/// Owner assignment by brute force: for each element, the bunch of `a ∪ b`
/// with the smallest strike distance (A first on ties).
pub fn brute_owner(a: &Section, b: &Section, elements: &[Vec<Point>]) -> Vec<Option<(Side, usize, f64)>> {
    elements
        .iter()
        .map(|pts| {
            let mut best: Option<(Side, usize, f64)> = None;
            for (side, sec) in [(Side::A, a), (Side::B, b)] {
                for (i, bu) in sec.iter().enumerate() {
                    let d = bu.strike(pts);
                    if best.map(|x| d < x.2).unwrap_or(true) {
                        best = Some((side, i, d));
                    }
                }
            }
            best
        })
        .collect()
}
