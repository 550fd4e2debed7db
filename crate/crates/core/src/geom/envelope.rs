//! Convex hulls of points and circular arcs, represented by their support
//! functions `h(θ) = max_{x∈K} x·u(θ)`.
//!
//! On each span of directions the support function of the hull is one
//! sinusoid `ax·cos θ + ay·sin θ + c`: `(ax, ay)` is an arc center (or a point)
//! and `c` the arc radius (zero for a point). Hull union is a pointwise max,
//! so merging two hulls is a linear sweep over their spans, and the owner
//! switches found during the sweep are exactly the bridges between them.

use super::{norm_angle, Point, Segment, WeightedSite, EPS_GEOM};
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Hull contribution of one wavefront segment, a fixed disk, or a point.
///
/// The radius at global radius `d` is `max(r0 + rate·d, 0)`; the arc covers
/// directions `[lo, lo + span]` (counter-clockwise), a full circle when
/// `span >= 2π`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Piece {
    pub owner: u32,
    pub center: Point,
    pub r0: f64,
    pub rate: f64,
    pub lo: f64,
    pub span: f64,
}

impl Piece {
    pub fn point(owner: u32, p: Point) -> Self {
        Piece {
            owner,
            center: p,
            r0: 0.0,
            rate: 0.0,
            lo: 0.0,
            span: TAU,
        }
    }

    pub fn disk(owner: u32, center: Point, radius: f64) -> Self {
        Piece {
            owner,
            center,
            r0: radius,
            rate: 0.0,
            lo: 0.0,
            span: TAU,
        }
    }

    /// Arc of a wavefront segment centered at `site.center`.
    pub fn site(owner: u32, site: WeightedSite, lo: f64, span: f64) -> Self {
        Piece {
            owner,
            center: site.center,
            r0: -site.weight,
            rate: 1.0,
            lo: norm_angle(lo),
            span: span.clamp(0.0, TAU),
        }
    }

    pub fn radius(&self, d: f64) -> f64 {
        (self.r0 + self.rate * d).max(0.0)
    }

    pub fn is_full(&self) -> bool {
        self.span >= TAU
    }

    pub fn in_range(&self, theta: f64) -> bool {
        self.is_full() || super::ccw_span(self.lo, theta) <= self.span
    }

    pub fn support(&self, theta: f64, d: f64) -> f64 {
        let u = Point::unit(theta);
        let r = self.radius(d);
        if r == 0.0 || self.in_range(theta) {
            return self.center.dot(u) + r;
        }
        let a = self.center + Point::unit(self.lo) * r;
        let b = self.center + Point::unit(self.lo + self.span) * r;
        a.dot(u).max(b.dot(u))
    }

    /// `(lo, hi, sinusoid, part)` with ranges tiling `[lo, lo + 2π)`.
    fn parts(&self, d: f64) -> Vec<(f64, f64, Sin, u8)> {
        let r = self.radius(d);
        let c = self.center;
        if r == 0.0 || self.is_full() {
            return vec![(0.0, TAU, Sin::new(c.x, c.y, r), 0)];
        }
        let lo = self.lo;
        let hi = lo + self.span;
        let mid = hi + 0.5 * (TAU - self.span);
        let pl = c + Point::unit(lo) * r;
        let ph = c + Point::unit(hi) * r;
        vec![
            (lo, hi, Sin::new(c.x, c.y, r), 0),
            (hi, mid, Sin::new(ph.x, ph.y, 0.0), 2),
            (mid, lo + TAU, Sin::new(pl.x, pl.y, 0.0), 1),
        ]
    }
}

/// `ax·cos θ + ay·sin θ + c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sin {
    pub ax: f64,
    pub ay: f64,
    pub c: f64,
}

impl Sin {
    pub const fn new(ax: f64, ay: f64, c: f64) -> Self {
        Sin { ax, ay, c }
    }

    pub fn at(&self, theta: f64) -> f64 {
        self.ax * theta.cos() + self.ay * theta.sin() + self.c
    }

    pub fn support_point(&self, theta: f64) -> Point {
        Point::new(self.ax, self.ay) + Point::unit(theta) * self.c
    }

    fn minus(&self, o: &Sin) -> Sin {
        Sin::new(self.ax - o.ax, self.ay - o.ay, self.c - o.c)
    }

    /// Zeros strictly inside `(lo, hi)`, ascending.
    fn zeros_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let r = self.ax.hypot(self.ay);
        let scale = r + self.c.abs();
        if r <= 1e-15 * scale.max(1e-300) {
            return Vec::new();
        }
        let q = -self.c / r;
        if q.abs() > 1.0 {
            return Vec::new();
        }
        let phi = self.ay.atan2(self.ax);
        let a = q.acos();
        let mut out = Vec::new();
        for base in [phi - a, phi + a] {
            // Bring into [lo, lo + 2π) and keep if inside the open interval.
            let th = lo + norm_angle(base - lo);
            if th > lo && th < hi {
                out.push(th);
            }
        }
        out.sort_by(|x, y| x.total_cmp(y));
        out.dedup();
        out
    }

    /// Maximum over the closed interval `[lo, hi]`.
    pub fn max_on(&self, lo: f64, hi: f64) -> f64 {
        let mut best = self.at(lo).max(self.at(hi));
        let phi = self.ay.atan2(self.ax);
        let th = lo + norm_angle(phi - lo);
        if th <= hi {
            best = best.max(self.at(th));
        }
        best
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Span {
    pub start: f64,
    pub sin: Sin,
    pub owner: u32,
    /// 0: arc body, 1: arc start point, 2: arc end point.
    pub part: u8,
    /// Input side during a merge (0 left, 1 right).
    pub tag: u8,
}

/// A bridge found while merging two hulls: at normal direction `theta` the
/// maximizer switches from one input to the other.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Transition {
    pub theta: f64,
    pub from_tag: u8,
    pub to_tag: u8,
    pub seg: Segment,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Envelope {
    /// Radius at which the spans were evaluated.
    pub d_ref: f64,
    /// Growth of every support value per unit of radius.
    pub rate: f64,
    /// Whether shifting by `rate·Δd` reproduces the hull exactly (full disks
    /// and static points); otherwise a shift is only an outer bound.
    pub exact_shift: bool,
    pub spans: Vec<Span>,
}

fn key(s: &Span) -> (u32, u8) {
    (s.owner, s.part)
}

const TIE: f64 = 1e-12;

impl Envelope {
    pub fn empty(d_ref: f64, rate: f64) -> Self {
        Envelope {
            d_ref,
            rate,
            exact_shift: true,
            spans: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn from_piece(p: &Piece, d: f64) -> Self {
        let mut spans = Vec::new();
        for (lo, hi, sin, part) in p.parts(d) {
            // Normalize a range that may start anywhere in [0, 2π) and wrap.
            let a = norm_angle(lo);
            let len = hi - lo;
            if len <= 0.0 {
                continue;
            }
            let b = a + len;
            let mk = |start| Span {
                start,
                sin,
                owner: p.owner,
                part,
                tag: 0,
            };
            if b <= TAU {
                spans.push((a, mk(a)));
            } else {
                spans.push((a, mk(a)));
                spans.push((0.0, mk(0.0)));
            }
        }
        spans.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut out: Vec<Span> = Vec::new();
        for (_, s) in spans {
            if let Some(last) = out.last() {
                if key(last) == key(&s) && last.sin == s.sin {
                    continue;
                }
                if last.start == s.start {
                    out.pop();
                }
            }
            out.push(s);
        }
        let exact = p.rate == 0.0 || (p.is_full() && p.r0 + p.rate * d >= 0.0);
        Envelope {
            d_ref: d,
            rate: p.rate,
            exact_shift: exact,
            spans: out,
        }
    }

    /// Hull of a set of pieces sharing one growth rate.
    pub fn from_pieces(pieces: &[Piece], d: f64) -> Self {
        let rate = pieces.first().map(|p| p.rate).unwrap_or(0.0);
        let envs: Vec<Envelope> = pieces.iter().map(|p| Envelope::from_piece(p, d)).collect();
        merge_all(envs, d, rate)
    }

    fn end_of(&self, i: usize) -> f64 {
        self.spans.get(i + 1).map(|s| s.start).unwrap_or(TAU)
    }

    fn index_at(&self, theta: f64) -> usize {
        let t = norm_angle(theta);
        match self.spans.binary_search_by(|s| s.start.total_cmp(&t)) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        }
    }

    pub fn span_at(&self, theta: f64) -> &Span {
        &self.spans[self.index_at(theta)]
    }

    /// Support value at the reference radius.
    pub fn eval(&self, theta: f64) -> f64 {
        if self.spans.is_empty() {
            return f64::NEG_INFINITY;
        }
        self.span_at(theta).sin.at(theta)
    }

    /// Support value at radius `d` (an outer bound when not `exact_shift`).
    pub fn eval_at(&self, theta: f64, d: f64) -> f64 {
        self.eval(theta) + self.rate * (d - self.d_ref)
    }

    pub fn support_point(&self, theta: f64) -> Point {
        self.span_at(theta).sin.support_point(theta)
    }

    /// Same hull evaluated at radius `d` by uniform growth.
    pub fn shifted(&self, d: f64) -> Envelope {
        let dc = self.rate * (d - self.d_ref);
        let mut e = self.clone();
        if dc != 0.0 {
            for s in &mut e.spans {
                s.sin.c += dc;
            }
        }
        e.d_ref = d;
        e
    }

    /// Span boundaries, `(start, end)` pairs.
    pub fn ranges(&self) -> impl Iterator<Item = (f64, f64, &Span)> + '_ {
        self.spans
            .iter()
            .enumerate()
            .map(move |(i, s)| (s.start, self.end_of(i), s))
    }

    /// `max_θ (q·u − h(θ))`: distance from `q` to the hull when outside,
    /// minus the depth when inside.
    pub fn signed_dist(&self, q: Point) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for (lo, hi, s) in self.ranges() {
            let f = Sin::new(q.x - s.sin.ax, q.y - s.sin.ay, -s.sin.c);
            best = best.max(f.max_on(lo, hi));
        }
        best
    }

    /// Owner sequence, merged across the 0/2π seam.
    pub fn owner_cycle(&self) -> Vec<(u32, u8)> {
        let mut v: Vec<(u32, u8)> = Vec::new();
        for s in &self.spans {
            if v.last() != Some(&key(s)) {
                v.push(key(s));
            }
        }
        if v.len() > 1 && v.first() == v.last() {
            v.pop();
        }
        v
    }
}

/// Pointwise maximum of two hulls evaluated at the same radius, plus the
/// bridges between them. Equal values go to the lower `(owner, part)`.
pub fn merge(a: &Envelope, b: &Envelope) -> (Envelope, Vec<Transition>) {
    let d = a.d_ref.max(b.d_ref);
    let a = if a.d_ref == d { a.clone() } else { a.shifted(d) };
    let b = if b.d_ref == d { b.clone() } else { b.shifted(d) };
    let exact_shift = a.exact_shift && b.exact_shift;
    let rate = if a.is_empty() { b.rate } else { a.rate };
    if a.is_empty() || b.is_empty() {
        let mut e = if a.is_empty() { b } else { a };
        e.exact_shift = exact_shift;
        return (e, Vec::new());
    }
    let mut cuts: Vec<f64> = a.spans.iter().chain(b.spans.iter()).map(|s| s.start).collect();
    cuts.sort_by(|x, y| x.total_cmp(y));
    cuts.dedup();
    let mut out: Vec<Span> = Vec::new();
    for (ci, &lo) in cuts.iter().enumerate() {
        let hi = cuts.get(ci + 1).copied().unwrap_or(TAU);
        if hi <= lo {
            continue;
        }
        let mut sa = *a.span_at(lo);
        let mut sb = *b.span_at(lo);
        sa.tag = 0;
        sb.tag = 1;
        let diff = sa.sin.minus(&sb.sin);
        let mut pts = vec![lo];
        pts.extend(diff.zeros_in(lo, hi));
        pts.push(hi);
        for w in pts.windows(2) {
            let (x, y) = (w[0], w[1]);
            if y <= x {
                continue;
            }
            let m = 0.5 * (x + y);
            let (va, vb) = (sa.sin.at(m), sb.sin.at(m));
            let scale = 1.0 + va.abs().max(vb.abs());
            let pick_a = if (va - vb).abs() <= TIE * scale {
                key(&sa) <= key(&sb)
            } else {
                va > vb
            };
            let mut s = if pick_a { sa } else { sb };
            s.start = x;
            push_span(&mut out, s);
        }
    }
    let mut transitions = Vec::new();
    let n = out.len();
    for i in 0..n {
        let prev = &out[(i + n - 1) % n];
        let cur = &out[i];
        if n > 1 && prev.tag != cur.tag {
            let th = cur.start;
            let p_prev = prev.sin.support_point(th);
            let p_cur = cur.sin.support_point(th);
            let (pa, pb) = if prev.tag == 0 { (p_prev, p_cur) } else { (p_cur, p_prev) };
            transitions.push(Transition {
                theta: th,
                from_tag: prev.tag,
                to_tag: cur.tag,
                seg: Segment::new(pa, pb),
            });
        }
    }
    (
        Envelope {
            d_ref: d,
            rate,
            exact_shift,
            spans: out,
        },
        transitions,
    )
}

fn push_span(out: &mut Vec<Span>, s: Span) {
    if let Some(last) = out.last() {
        if key(last) == key(&s) && last.tag == s.tag && last.sin == s.sin {
            return;
        }
    }
    out.push(s);
}

/// Balanced pairwise merge of many hulls.
pub fn merge_all(mut envs: Vec<Envelope>, d: f64, rate: f64) -> Envelope {
    if envs.is_empty() {
        return Envelope::empty(d, rate);
    }
    while envs.len() > 1 {
        let mut next = Vec::with_capacity(envs.len().div_ceil(2));
        let mut it = envs.into_iter();
        while let Some(x) = it.next() {
            match it.next() {
                Some(y) => next.push(merge(&x, &y).0),
                None => next.push(x),
            }
        }
        envs = next;
    }
    let mut e = envs.pop().unwrap();
    for s in &mut e.spans {
        s.tag = 0;
    }
    e
}

/// `max_θ (−h_a(θ) − h_b(θ+π))`: the distance between the two hulls when
/// they are disjoint, non-positive when they meet.
pub fn separation(a: &Envelope, b: &Envelope) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let mut cuts: Vec<f64> = a.spans.iter().map(|s| s.start).collect();
    cuts.extend(b.spans.iter().map(|s| norm_angle(s.start - PI)));
    cuts.push(0.0);
    cuts.sort_by(|x, y| x.total_cmp(y));
    cuts.dedup();
    let mut best = f64::NEG_INFINITY;
    for (i, &lo) in cuts.iter().enumerate() {
        let hi = cuts.get(i + 1).copied().unwrap_or(TAU);
        if hi <= lo {
            continue;
        }
        let m = 0.5 * (lo + hi);
        let sa = a.span_at(m).sin;
        let sb = b.span_at(m + PI).sin;
        // h_b(θ+π) = −bx cos θ − by sin θ + bc
        let f = Sin::new(-(sa.ax - sb.ax), -(sa.ay - sb.ay), -(sa.c + sb.c));
        best = best.max(f.max_on(lo, hi));
    }
    best
}

/// Hull of a static polyline (or point, or segment).
pub fn polyline_envelope(owner: u32, pts: &[Point]) -> Envelope {
    let pieces: Vec<Piece> = pts.iter().map(|p| Piece::point(owner, *p)).collect();
    // Distinct owners per point keep ties deterministic; callers only need
    // the geometry.
    let pieces: Vec<Piece> = pieces
        .into_iter()
        .enumerate()
        .map(|(i, mut p)| {
            p.owner = owner.wrapping_add(i as u32);
            p
        })
        .collect();
    Envelope::from_pieces(&pieces, 0.0)
}

/// Brute-force support value of a piece set; the reference the trees are
/// checked against.
pub fn brute_support(pieces: &[Piece], theta: f64, d: f64) -> f64 {
    pieces
        .iter()
        .map(|p| p.support(theta, d))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Directions worth probing when comparing an envelope against brute force:
/// every span start and midpoint plus a uniform grid.
pub fn probe_angles(e: &Envelope, grid: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..grid).map(|i| TAU * i as f64 / grid as f64).collect();
    for (lo, hi, _) in e.ranges() {
        v.push(lo);
        v.push(0.5 * (lo + hi));
    }
    v
}

/// Tolerance used when comparing support values of hulls of size `scale`.
pub fn support_tol(scale: f64) -> f64 {
    EPS_GEOM * (1.0 + scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Piece> {
        v.iter()
            .enumerate()
            .map(|(i, &(x, y))| Piece::point(i as u32, Point::new(x, y)))
            .collect()
    }

    #[test]
    fn square_support() {
        let e = Envelope::from_pieces(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]), 0.0);
        assert_eq!(e.owner_cycle().len(), 4);
        assert!((e.eval(0.0) - 1.0).abs() < 1e-15);
        assert!((e.eval(PI) - 0.0).abs() < 1e-15);
        assert!((e.eval(PI / 4.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((e.signed_dist(Point::new(3.0, 0.5)) - 2.0).abs() < 1e-12);
        assert!((e.signed_dist(Point::new(0.5, 0.5)) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn interior_points_never_own_a_span() {
        let e = Envelope::from_pieces(&pts(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.2), (1.0, 2.0)]), 0.0);
        assert!(e.spans.iter().all(|s| s.owner != 2));
    }

    #[test]
    fn arc_support_matches_brute_force() {
        let p = Piece::site(7, WeightedSite::new(Point::new(1.0, -1.0), 0.5), 0.3, 2.0);
        let e = Envelope::from_piece(&p, 3.0);
        for i in 0..360 {
            let th = i as f64 * TAU / 360.0;
            assert!((e.eval(th) - p.support(th, 3.0)).abs() < 1e-12, "θ={th}");
        }
    }

    #[test]
    fn merge_agrees_with_brute_force() {
        let pieces = vec![
            Piece::site(0, WeightedSite::new(Point::new(0.0, 0.0), 0.0), 0.0, TAU),
            Piece::site(1, WeightedSite::new(Point::new(3.0, 1.0), 1.0), 1.0, 1.5),
            Piece::site(2, WeightedSite::new(Point::new(-2.0, 2.0), 0.5), 4.0, 3.0),
            Piece::site(3, WeightedSite::new(Point::new(1.0, 4.0), 2.5), 5.5, 2.0),
        ];
        let e = Envelope::from_pieces(&pieces, 3.0);
        for th in probe_angles(&e, 720) {
            assert!((e.eval(th) - brute_support(&pieces, th, 3.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn separation_of_unit_disks() {
        let a = Envelope::from_piece(&Piece::disk(0, Point::new(0.0, 0.0), 1.0), 0.0);
        let b = Envelope::from_piece(&Piece::disk(1, Point::new(10.0, 0.0), 1.0), 0.0);
        assert!((separation(&a, &b) - 8.0).abs() < 1e-12);
        let c = Envelope::from_piece(&Piece::disk(1, Point::new(1.0, 0.0), 1.0), 0.0);
        assert!(separation(&a, &c) < 0.0);
    }

    #[test]
    fn transitions_are_bridges() {
        let a = Envelope::from_piece(&Piece::disk(0, Point::new(0.0, 0.0), 1.0), 0.0);
        let b = Envelope::from_piece(&Piece::disk(1, Point::new(10.0, 0.0), 1.0), 0.0);
        let (_, tr) = merge(&a, &b);
        assert_eq!(tr.len(), 2);
        let up = tr.iter().find(|t| t.theta > 0.0 && t.theta < PI).unwrap();
        assert!(up.seg.a.dist(Point::new(0.0, 1.0)) < 1e-12);
        assert!(up.seg.b.dist(Point::new(10.0, 1.0)) < 1e-12);
    }
}
