//! Exact wavefront propagation over the triangulation.
//!
//! A window is an interval of a triangulation edge lit by one source (`s` or a
//! vertex whose free angle is at least π) together with the wedge of rays from
//! that source through the interval. Windows are processed in order of their
//! nearest point and clipped triangle by triangle; windows on a common edge are
//! trimmed against each other so that every point of an edge belongs to at most
//! one window, the one giving the smaller distance.

use crate::geom::{area2, orient, Point};
use crate::triangulate::Triangulation;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Windows shorter than this (in edge parameter) are dropped.
const SLIVER: f64 = 1e-12;
/// Relative angular slack for rays through computed breakpoints.
const RAY_SLACK: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    /// A point on the ray beyond the source.
    pub anchor: Point,
    /// `anchor` is a mesh vertex or lies exactly on the original ray.
    pub exact: bool,
}

impl Ray {
    fn exact(anchor: Point) -> Self {
        Ray { anchor, exact: true }
    }

    fn trim(anchor: Point) -> Self {
        Ray { anchor, exact: false }
    }

    /// Side of `x` relative to the ray from `c`, with slack for trimmed rays.
    fn side(&self, c: Point, x: Point) -> i8 {
        if self.exact {
            return orient(c, self.anchor, x);
        }
        let a = area2(c, self.anchor, x);
        let tol = RAY_SLACK * (self.anchor - c).norm() * (x - c).norm();
        if a.abs() <= tol {
            0
        } else if a > 0.0 {
            1
        } else {
            -1
        }
    }
}

#[derive(Clone, Debug)]
pub struct Window {
    pub edge: usize,
    /// Triangle the window propagates into.
    pub into: usize,
    /// Interval along the edge, measured from `edges[edge].v[0]`.
    pub t0: f64,
    pub t1: f64,
    pub lo: Ray,
    pub hi: Ray,
    /// Source vertex id and its position and distance from `s`.
    pub src: usize,
    pub c: Point,
    pub w: f64,
    /// Smallest distance from `s` over the interval.
    pub key: f64,
    pub bunch: usize,
    pub alive: bool,
    pub processed: bool,
}

/// Something the view layer wants to hear about.
#[derive(Clone, Debug, PartialEq)]
pub enum Happening {
    WindowProcessed { id: usize },
    VertexFinal { v: usize },
    SourceEmitted { v: usize },
    /// Two windows of different bunches overlapped on an edge.
    Contact { a: usize, b: usize, d: f64 },
    BunchEmptied { bunch: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Item {
    Window(usize),
    Vertex(usize),
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    key: f64,
    item: Item,
    seq: u64,
}

impl Entry {
    fn rank(&self) -> (u8, u64) {
        match self.item {
            Item::Window(_) => (0, self.seq),
            Item::Vertex(_) => (1, self.seq),
        }
    }
}

impl PartialEq for Entry {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        // Reversed for a min-heap.
        o.key.total_cmp(&self.key).then_with(|| o.rank().cmp(&self.rank()))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, Debug, Default)]
pub struct WaveStats {
    pub windows_created: u64,
    pub windows_processed: u64,
    pub windows_trimmed: u64,
    pub vertex_labels: u64,
    pub sources: u64,
    pub heap_pops: u64,
}

#[derive(Clone, Debug)]
pub struct Wavefront<'a> {
    pub tri: &'a Triangulation,
    /// Triangles windows may enter.
    pub allowed: Vec<bool>,
    pub windows: Vec<Window>,
    pub on_edge: Vec<Vec<usize>>,
    pub dist: Vec<f64>,
    pub pred: Vec<usize>,
    pub done: Vec<bool>,
    pub bunch_of: Vec<usize>,
    pub bunch_live: Vec<usize>,
    /// Trim only against windows entering the same triangle.
    pub lazy: bool,
    pub stats: WaveStats,
    pub happenings: Vec<Happening>,
    heap: BinaryHeap<Entry>,
    seq: u64,
    pub last_key: f64,
}

impl<'a> Wavefront<'a> {
    pub fn new(tri: &'a Triangulation, allowed: Vec<bool>, lazy: bool) -> Self {
        let nv = tri.vertices.len();
        Wavefront {
            tri,
            allowed,
            windows: Vec::new(),
            on_edge: vec![Vec::new(); tri.edges.len()],
            dist: vec![f64::INFINITY; nv],
            pred: vec![usize::MAX; nv],
            done: vec![false; nv],
            bunch_of: vec![usize::MAX; nv],
            bunch_live: Vec::new(),
            lazy,
            stats: WaveStats::default(),
            happenings: Vec::new(),
            heap: BinaryHeap::new(),
            seq: 0,
            last_key: 0.0,
        }
    }

    /// Seeds the wavefront at vertex `s` with distance zero.
    pub fn seed(&mut self, s: usize) {
        self.label(s, 0.0, s);
    }

    pub fn is_source(&self, v: usize) -> bool {
        Some(v) == self.tri.source || (v < self.tri.polygon_vertices && self.tri.is_reflex(v))
    }

    fn push(&mut self, key: f64, item: Item) {
        self.seq += 1;
        self.heap.push(Entry {
            key,
            item,
            seq: self.seq,
        });
    }

    fn label(&mut self, v: usize, d: f64, from: usize) {
        if self.done[v] || !(d < self.dist[v]) {
            return;
        }
        self.dist[v] = d;
        self.pred[v] = from;
        self.stats.vertex_labels += 1;
        self.push(d, Item::Vertex(v));
    }

    pub fn edge_point(&self, e: usize, t: f64) -> Point {
        let [a, b] = self.tri.edges[e].v;
        let (pa, pb) = (self.tri.vertices[a], self.tri.vertices[b]);
        if t <= 0.0 {
            pa
        } else if t >= 1.0 {
            pb
        } else {
            pa.lerp(pb, t)
        }
    }

    fn window_key(&self, e: usize, t0: f64, t1: f64, c: Point, w: f64) -> f64 {
        let seg = crate::geom::Segment::new(self.edge_point(e, t0), self.edge_point(e, t1));
        w + seg.dist_to_point(c)
    }

    /// Distance from `s` to the point at parameter `t` of window `id`'s edge.
    pub fn value(&self, id: usize, t: f64) -> f64 {
        let win = &self.windows[id];
        win.w + win.c.dist(self.edge_point(win.edge, t))
    }

    /// Pops and handles one heap entry. Returns false once the heap is empty.
    pub fn step(&mut self) -> bool {
        let Some(entry) = self.heap.pop() else {
            return false;
        };
        self.stats.heap_pops += 1;
        match entry.item {
            Item::Window(id) => {
                let win = &self.windows[id];
                if !win.alive || win.processed {
                    return true;
                }
                self.last_key = self.last_key.max(entry.key);
                self.windows[id].processed = true;
                self.stats.windows_processed += 1;
                self.happenings.push(Happening::WindowProcessed { id });
                self.propagate(id);
            }
            Item::Vertex(v) => {
                if self.done[v] || entry.key != self.dist[v] {
                    return true;
                }
                self.last_key = self.last_key.max(entry.key);
                self.done[v] = true;
                self.assign_bunch(v);
                self.happenings.push(Happening::VertexFinal { v });
                if Some(v) != self.tri.target && self.is_source(v) {
                    self.emit(v);
                }
            }
        }
        true
    }

    /// Consecutive chain vertices whose distances telescope share a bunch.
    fn assign_bunch(&mut self, v: usize) {
        let p = self.pred[v];
        let along_chain = p != v
            && v < self.tri.polygon_vertices
            && matches!(self.tri.ring_nbrs[v], Some((a, b)) if a == p || b == p);
        self.bunch_of[v] = if along_chain {
            self.bunch_of[p]
        } else {
            self.bunch_live.push(0);
            self.bunch_live.len() - 1
        };
    }

    fn emit(&mut self, v: usize) {
        self.stats.sources += 1;
        self.happenings.push(Happening::SourceEmitted { v });
        let c = self.tri.vertices[v];
        let w = self.dist[v];
        for &t in &self.tri.vertex_tris[v] {
            if !self.allowed[t] {
                continue;
            }
            let e = self.tri.tri_edges[t][self.tri.corner(t, v).unwrap()];
            let [a, b] = self.tri.edges[e].v;
            self.label(a, w + c.dist(self.tri.vertices[a]), v);
            self.label(b, w + c.dist(self.tri.vertices[b]), v);
            if let Some(next) = self.crossable(e, t) {
                let lo = Ray::exact(self.tri.vertices[a]);
                let hi = Ray::exact(self.tri.vertices[b]);
                self.insert(e, next, 0.0, 1.0, lo, hi, v, c, w, false);
            }
        }
    }

    /// Triangle across `e` from `t`, if windows may cross into it.
    fn crossable(&self, e: usize, t: usize) -> Option<usize> {
        let edge = &self.tri.edges[e];
        if edge.constrained {
            return None;
        }
        edge.other_tri(t).filter(|&n| self.allowed[n])
    }

    fn propagate(&mut self, id: usize) {
        let win = self.windows[id].clone();
        let tri = self.tri;
        let e = win.edge;
        let t = win.into;
        let [ia, ib] = tri.edges[e].v;
        let iq = tri.apex(t, e);
        let (a, b, q) = (tri.vertices[ia], tri.vertices[ib], tri.vertices[iq]);
        let c = win.c;
        let sigma = orient(c, a, b);
        if sigma == 0 {
            return;
        }
        let lo = |x: Point| sigma * win.lo.side(c, x);
        let hi = |x: Point| -sigma * win.hi.side(c, x);
        let cross = |r: &Ray, p: Point, s: Point| -> f64 {
            let fa = area2(c, r.anchor, p);
            let fb = area2(c, r.anchor, s);
            if fa == fb {
                0.5
            } else {
                (fa / (fa - fb)).clamp(0.0, 1.0)
            }
        };
        // Path a → q → b parameterized over [0, 2]. Each ray meets the path
        // in one point besides the window end it passes through; locate it
        // starting from the apex.
        let (la, lq, lb) = (lo(a), lo(q), lo(b));
        let u_lo = if lq > 0 {
            if la >= 0 { 0.0 } else { cross(&win.lo, a, q) }
        } else if lq == 0 {
            if la > 0 { 0.0 } else { 1.0 }
        } else if lb >= 0 {
            1.0 + if lb == 0 { 1.0 } else { cross(&win.lo, q, b) }
        } else {
            return;
        };
        let (ha, hq, hb) = (hi(a), hi(q), hi(b));
        let u_hi = if hq > 0 {
            if hb >= 0 { 2.0 } else { 1.0 + cross(&win.hi, q, b) }
        } else if hq == 0 {
            if hb > 0 { 2.0 } else { 1.0 }
        } else if ha >= 0 {
            if ha == 0 { 0.0 } else { cross(&win.hi, a, q) }
        } else {
            return;
        };
        if u_lo > u_hi {
            return;
        }
        if lq >= 0 && hq >= 0 {
            self.label(iq, win.w + c.dist(q), win.src);
        }
        let qray = Ray::exact(q);
        let e1 = tri.edge_between(ia, iq).expect("triangle edge");
        let e2 = tri.edge_between(iq, ib).expect("triangle edge");
        if u_lo < 1.0 {
            let (s0, s1) = (u_lo, u_hi.min(1.0));
            let r1 = if u_hi >= 1.0 { qray } else { win.hi };
            if let Some(next) = self.crossable(e1, t) {
                self.child(e1, next, ia, s0, s1, win.lo, r1, &win);
            }
        }
        if u_hi > 1.0 {
            let (s0, s1) = (u_lo.max(1.0) - 1.0, u_hi - 1.0);
            let r0 = if u_lo <= 1.0 { qray } else { win.lo };
            if let Some(next) = self.crossable(e2, t) {
                self.child(e2, next, iq, s0, s1, r0, win.hi, &win);
            }
        }
    }

    /// Child window on edge `e` given as the interval `[s0, s1]` measured from
    /// vertex `from`, bounded by rays `r0` (at `s0`) and `r1`.
    #[allow(clippy::too_many_arguments)]
    fn child(&mut self, e: usize, into: usize, from: usize, s0: f64, s1: f64, r0: Ray, r1: Ray, parent: &Window) {
        let (t0, t1, lo, hi) = if self.tri.edges[e].v[0] == from {
            (s0, s1, r0, r1)
        } else {
            (1.0 - s1, 1.0 - s0, r1, r0)
        };
        self.insert(e, into, t0, t1, lo, hi, parent.src, parent.c, parent.w, false);
    }

    #[allow(clippy::too_many_arguments)]
    fn make(&mut self, e: usize, into: usize, t0: f64, t1: f64, lo: Ray, hi: Ray, src: usize, c: Point, w: f64, processed: bool) -> usize {
        let key = self.window_key(e, t0, t1, c, w);
        let bunch = self.bunch_of[src];
        self.windows.push(Window {
            edge: e,
            into,
            t0,
            t1,
            lo,
            hi,
            src,
            c,
            w,
            key,
            bunch,
            alive: true,
            processed,
        });
        let id = self.windows.len() - 1;
        self.on_edge[e].push(id);
        self.bunch_live[bunch] += 1;
        self.stats.windows_created += 1;
        if !processed {
            self.push(key, Item::Window(id));
        }
        id
    }

    fn kill(&mut self, id: usize) {
        let win = &mut self.windows[id];
        if !win.alive {
            return;
        }
        win.alive = false;
        let (e, bunch) = (win.edge, win.bunch);
        self.on_edge[e].retain(|&x| x != id);
        self.bunch_live[bunch] -= 1;
        if self.bunch_live[bunch] == 0 {
            self.happenings.push(Happening::BunchEmptied { bunch });
        }
    }

    /// Inserts a candidate window, trimming it and the windows already on the
    /// edge so that each point keeps the smaller distance. Ties keep the
    /// existing window.
    #[allow(clippy::too_many_arguments)]
    fn insert(&mut self, e: usize, into: usize, t0: f64, t1: f64, lo: Ray, hi: Ray, src: usize, c: Point, w: f64, processed: bool) {
        if t1 - t0 < SLIVER {
            return;
        }
        let (pa, pb) = self.tri.edge_points(e);
        let dir = pb - pa;
        let f_new = |t: f64| w + c.dist(self.edge_point(e, t));
        let mut lose: Vec<(f64, f64)> = Vec::new();
        let mut trims: Vec<(usize, Vec<(f64, f64)>)> = Vec::new();
        let mut contacts = Vec::new();
        let bunch = self.bunch_of[src];
        for &x in &self.on_edge[e] {
            let win = &self.windows[x];
            if self.lazy && win.into != into {
                continue;
            }
            let (a, b) = (t0.max(win.t0), t1.min(win.t1));
            if b - a < SLIVER {
                continue;
            }
            let f_old = |t: f64| win.w + win.c.dist(self.edge_point(e, t));
            let diff = |t: f64| f_new(t) - f_old(t);
            let mut cuts = vec![a];
            if win.c != c || win.w != w {
                for r in crate::geom::equal_weighted_distance_roots(c, w, win.c, win.w, pa, dir) {
                    if r > a && r < b {
                        cuts.push(r);
                    }
                }
            }
            cuts.push(b);
            let mut won = Vec::new();
            let mut meet = f64::INFINITY;
            for k in 0..cuts.len() - 1 {
                let (u, v) = (cuts[k], cuts[k + 1]);
                for (u, v, better) in sign_pieces(&diff, u, v, f_new(u).max(f_old(u))) {
                    if better {
                        won.push((u, v));
                    } else {
                        lose.push((u, v));
                    }
                }
                if k > 0 {
                    meet = meet.min(f_new(u));
                }
            }
            if win.bunch != bunch {
                if meet == f64::INFINITY {
                    meet = f_new(a).max(f_old(a)).min(f_new(b).max(f_old(b)));
                }
                contacts.push((x, meet));
            }
            if !won.is_empty() {
                trims.push((x, won));
            }
        }
        for (x, won) in trims {
            let old = self.windows[x].clone();
            self.stats.windows_trimmed += 1;
            // Remnants first, so the bunch never looks empty in between.
            for (u, v) in subtract(old.t0, old.t1, &won) {
                let l = if u == old.t0 { old.lo } else { Ray::trim(self.edge_point(e, u)) };
                let h = if v == old.t1 { old.hi } else { Ray::trim(self.edge_point(e, v)) };
                self.make(e, old.into, u, v, l, h, old.src, old.c, old.w, old.processed);
            }
            self.kill(x);
        }
        let mut new_ids = Vec::new();
        for (u, v) in subtract(t0, t1, &lose) {
            let l = if u == t0 { lo } else { Ray::trim(self.edge_point(e, u)) };
            let h = if v == t1 { hi } else { Ray::trim(self.edge_point(e, v)) };
            new_ids.push(self.make(e, into, u, v, l, h, src, c, w, processed));
        }
        if let Some(&nid) = new_ids.first() {
            for (x, d) in contacts {
                self.happenings.push(Happening::Contact { a: x, b: nid, d });
            }
        }
    }

    /// Source chain from `v` back to `s`.
    pub fn path_to(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut cur = v;
        while self.pred[cur] != cur {
            cur = self.pred[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    pub fn pending(&self) -> usize {
        self.heap.len()
    }
}

/// Splits `[u, v]` into pieces on which `diff < -tol` (the newcomer is strictly
/// better) or not, refining by bisection where the endpoint signs disagree.
fn sign_pieces(diff: &dyn Fn(f64) -> f64, u: f64, v: f64, scale: f64) -> Vec<(f64, f64, bool)> {
    let tol = 1e-12 * (1.0 + scale.abs());
    let state = |t: f64| {
        let d = diff(t);
        if d.abs() <= tol {
            None
        } else {
            Some(d < 0.0)
        }
    };
    let mid = 0.5 * (u + v);
    let bm = state(mid).unwrap_or(false);
    // Near-ties at the ends (typically at a bisector root) follow the middle.
    let bu = state(u).unwrap_or(bm);
    let bv = state(v).unwrap_or(bm);
    if bu == bm && bm == bv {
        return vec![(u, v, bm)];
    }
    let better = |t: f64| state(t).unwrap_or(bm);
    let pts = [(u, bu), (mid, bm), (v, bv)];
    let mut out: Vec<(f64, f64, bool)> = Vec::new();
    let mut start = u;
    for k in 0..2 {
        let (x0, b0) = pts[k];
        let (x1, b1) = pts[k + 1];
        if b0 != b1 {
            let (mut lo, mut hi) = (x0, x1);
            for _ in 0..80 {
                let m = 0.5 * (lo + hi);
                if better(m) == b0 {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            out.push((start, lo, b0));
            start = lo;
        }
    }
    out.push((start, v, bv));
    out.retain(|p| p.1 - p.0 > 0.0);
    out
}

/// `[t0, t1]` minus a union of intervals, dropping slivers.
fn subtract(t0: f64, t1: f64, cut: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut cut: Vec<(f64, f64)> = cut.to_vec();
    cut.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::new();
    let mut cur = t0;
    for (a, b) in cut {
        if a > cur && a - cur >= SLIVER {
            out.push((cur, a.min(t1)));
        }
        cur = cur.max(b);
        if cur >= t1 {
            break;
        }
    }
    if t1 - cur >= SLIVER {
        out.push((cur, t1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subtract_intervals() {
        assert_eq!(subtract(0.0, 1.0, &[]), vec![(0.0, 1.0)]);
        assert_eq!(subtract(0.0, 1.0, &[(0.25, 0.5)]), vec![(0.0, 0.25), (0.5, 1.0)]);
        assert!(subtract(0.0, 1.0, &[(0.0, 1.0)]).is_empty());
        assert_eq!(subtract(0.0, 1.0, &[(0.5, 1.0), (0.0, 0.25)]), vec![(0.25, 0.5)]);
    }

    #[test]
    fn sign_pieces_finds_a_crossing() {
        let p = sign_pieces(&|t| t - 0.3, 0.0, 1.0, 1.0);
        assert_eq!(p.len(), 2);
        assert!(p[0].2 && !p[1].2);
        // Values within the tie band follow the middle, so the cut sits up to 2e-12 early.
        assert!((p[0].1 - 0.3).abs() <= 4e-12);
    }
}
