//! Randomized drivers shared by the module tests and the acceptance suite.
//! Every reference value here is computed directly from the geometry, not
//! through the structures under test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spw_core::engine::iintersect::{icurve, iintersect, ElementTree};
use spw_core::geom::{Bisector, Point, Segment, WeightedSite};
use spw_core::hull_trees::bht::{classify, resplit};
use spw_core::hull_trees::{bst_min_dist, wst_min_dist, Bht, BstLeaf, Element, HullTree, QueryStats, Strike, Wst, WstLeaf};
use std::f64::consts::TAU;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn point(r: &mut ChaCha8Rng, h: f64) -> Point {
    Point::new(r.random_range(-h..h), r.random_range(-h..h))
}

fn seg_dist(pts: &[Point], p: Point) -> f64 {
    if pts.len() == 1 {
        return pts[0].dist(p);
    }
    pts.windows(2).map(|w| Segment::new(w[0], w[1]).dist_to_point(p)).fold(f64::INFINITY, f64::min)
}

fn angles(extra: impl Iterator<Item = f64>) -> Vec<f64> {
    (0..96).map(|i| TAU * (i as f64 + 0.37) / 96.0).chain(extra).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FuzzReport {
    pub ops: u64,
    pub clean_checks: u64,
    pub dirty_checks: u64,
    pub query_checks: u64,
    pub violations: u64,
}

impl FuzzReport {
    pub fn add(&mut self, o: FuzzReport) {
        self.ops += o.ops;
        self.clean_checks += o.clean_checks;
        self.dirty_checks += o.dirty_checks;
        self.query_checks += o.query_checks;
        self.violations += o.violations;
    }
}

fn random_sites(r: &mut ChaCha8Rng, d: f64) -> Vec<WeightedSite> {
    (0..r.random_range(1..5))
        .map(|_| WeightedSite::new(point(r, 50.0), r.random_range((d - 30.0).max(0.0)..=d)))
        .collect()
}

fn wst_check(wst: &Wst, d: f64, r: &mut ChaCha8Rng, rep: &mut FuzzReport) {
    if !wst.tree.check() {
        rep.violations += 1;
    }
    let sites: Vec<WeightedSite> = wst
        .tree
        .leaves()
        .iter()
        .flat_map(|l| l.sites.iter().copied())
        .filter(|s| s.weight <= d)
        .collect();
    let hull = wst.tree.hull();
    let dirty = wst.tree.is_dirty();
    for th in angles(hull.ranges().map(|(lo, hi, _)| 0.5 * (lo + hi))) {
        let u = Point::unit(th);
        let brute = sites.iter().map(|s| s.center.dot(u) + d - s.weight).fold(f64::NEG_INFINITY, f64::max);
        let got = hull.eval(th);
        let tol = 1e-9 * (1.0 + d + brute.abs().min(1e12));
        let ok = if sites.is_empty() {
            dirty || got == f64::NEG_INFINITY
        } else if dirty {
            got >= brute - tol
        } else {
            (got - brute).abs() <= tol
        };
        if !ok {
            rep.violations += 1;
        }
    }
    if dirty {
        rep.dirty_checks += 1;
    } else {
        rep.clean_checks += 1;
    }
    let target: Vec<Point> = (0..r.random_range(1..3)).map(|_| point(r, 80.0)).collect();
    let mut st = QueryStats::default();
    let got = wst_min_dist(wst, &target, d, &mut st).map(|h| h.radius);
    let brute = sites.iter().map(|s| s.weight + seg_dist(&target, s.center)).fold(f64::INFINITY, f64::min);
    rep.query_checks += 1;
    match got {
        None if sites.is_empty() => {}
        Some(x) if (x - brute).abs() <= 1e-9 * (1.0 + brute.abs()) => {}
        _ => rep.violations += 1,
    }
}

/// One random operation sequence on a WST: insertions, deletions,
/// split/merge round trips, shrinking (which dirties bridges), radius
/// advances and refreshes.
pub fn wst_sequence(seed: u64) -> FuzzReport {
    let mut r = rng(seed);
    let mut wst = Wst::new();
    let mut rep = FuzzReport::default();
    let mut d = r.random_range(0.0..20.0);
    wst.advance(d);
    let mut next = 0u32;
    for _ in 0..r.random_range(5..30) {
        let n = wst.tree.len();
        match r.random_range(0..8) {
            0..=2 => {
                let leaf = WstLeaf {
                    bunch: next,
                    key: r.random_range(0.0..1000.0),
                    sites: random_sites(&mut r, d),
                };
                next += 1;
                if wst.insert(leaf).is_err() {
                    rep.violations += 1;
                }
            }
            3 if n > 0 => {
                wst.tree.delete(r.random_range(0..n)).unwrap();
            }
            4 => {
                let i = r.random_range(0..=n);
                let right = wst.tree.split_off(i).unwrap();
                if wst.tree.len() != i || right.len() != n - i {
                    rep.violations += 1;
                }
                wst.tree.merge(right).unwrap();
            }
            5 if n > 0 => {
                let bunch = wst.tree.get(r.random_range(0..n)).unwrap().bunch;
                let cut = r.random_range(0.0..=d);
                wst.shrink(bunch, |s| s.weight >= cut).unwrap();
            }
            6 => {
                d += r.random_range(0.0..10.0);
                wst.advance(d);
            }
            _ => wst.tree.refresh(),
        }
        rep.ops += 1;
        wst_check(&wst, d, &mut r, &mut rep);
    }
    rep
}

fn bst_check(bst: &HullTree<BstLeaf>, r: &mut ChaCha8Rng, rep: &mut FuzzReport) {
    if !bst.check() {
        rep.violations += 1;
    }
    let leaves = bst.leaves();
    let pts: Vec<Point> = leaves.iter().flat_map(|l| l.pts.iter().copied()).collect();
    let hull = bst.hull();
    for th in angles(hull.ranges().map(|(lo, hi, _)| 0.5 * (lo + hi))) {
        let u = Point::unit(th);
        let brute = pts.iter().map(|p| p.dot(u)).fold(f64::NEG_INFINITY, f64::max);
        let got = hull.eval(th);
        let ok = if pts.is_empty() { got == f64::NEG_INFINITY } else { (got - brute).abs() <= 1e-9 * (1.0 + brute.abs()) };
        if !ok {
            rep.violations += 1;
        }
    }
    rep.clean_checks += 1;
    let d = r.random_range(0.0..60.0);
    let sites = random_sites(r, d);
    let mut st = QueryStats::default();
    let got = bst_min_dist(bst, &sites, d, &mut st);
    let brute = leaves
        .iter()
        .flat_map(|l| sites.iter().map(move |s| (s.weight + seg_dist(&l.pts, s.center), l.element)))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    rep.query_checks += 1;
    match (got, brute) {
        (None, None) => {}
        (Some(h), Some((x, _))) if (h.radius - x).abs() <= 1e-9 * (1.0 + x.abs()) => {}
        _ => rep.violations += 1,
    }
}

/// One random operation sequence on a BST of static boundary polylines.
pub fn bst_sequence(seed: u64) -> FuzzReport {
    let mut r = rng(seed);
    let mut bst: HullTree<BstLeaf> = HullTree::new();
    let mut rep = FuzzReport::default();
    let mut next = 0usize;
    for _ in 0..r.random_range(5..30) {
        let n = bst.len();
        match r.random_range(0..5) {
            0..=2 => {
                let start = point(&mut r, 60.0);
                let mut pts = vec![start];
                for _ in 0..r.random_range(0..4) {
                    let p = *pts.last().unwrap() + point(&mut r, 15.0);
                    pts.push(p);
                }
                let leaf = BstLeaf {
                    element: Element::Door(next),
                    key: r.random_range(0.0..1000.0),
                    pts,
                };
                next += 1;
                if bst.insert(leaf).is_err() {
                    rep.violations += 1;
                }
            }
            3 if n > 0 => {
                bst.delete(r.random_range(0..n)).unwrap();
            }
            _ => {
                let i = r.random_range(0..=n);
                let right = bst.split_off(i).unwrap();
                bst.merge(right).unwrap();
            }
        }
        rep.ops += 1;
        bst_check(&bst, &mut r, &mut rep);
    }
    rep
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BhtReport {
    pub checks: u64,
    pub strikes: u64,
    pub resplits: u64,
    pub mismatches: u64,
}

/// A bunch scenario replayed in time order. The reference keeps, for every
/// chain vertex, the radius at which the wavefront reaches it along the
/// chain; a strike that beats it rewrites the suffix from the struck vertex.
pub fn bht_scenario(seed: u64) -> BhtReport {
    let mut r = rng(seed);
    let len = r.random_range(3..40);
    let (c, rad) = (point(&mut r, 50.0), r.random_range(5.0..60.0));
    let mut a = r.random_range(0.0..TAU);
    let verts: Vec<(usize, Point)> = (0..len)
        .map(|k| {
            a += r.random_range(0.01..(TAU / len as f64));
            (1000 + k, c + Point::unit(a) * rad)
        })
        .collect();
    // Prefix perimeter from vertex 0.
    let mut per = vec![0.0; len];
    for k in 1..len {
        per[k] = per[k - 1] + verts[k - 1].1.dist(verts[k].1);
    }
    let mut reach: Vec<f64> = vec![f64::INFINITY; len];
    let mut start: Vec<bool> = vec![false; len];
    let mut rep = BhtReport::default();
    let mut trees: Vec<Bht> = Vec::new();

    let z0 = r.random_range(0..len - 1);
    let mut now = r.random_range(0.0..50.0);
    trees.push(Bht::build(0, &verts, z0, now).unwrap());
    for k in z0..len {
        reach[k] = now + (per[k] - per[z0]);
    }
    start[z0] = true;

    let valid = |reach: &[f64], start: &[bool], k: usize, now: f64| reach[k] < now || (start[k] && now >= reach[k]);
    for _ in 0..r.random_range(10..40) {
        match r.random_range(0..4) {
            0 => now += r.random_range(0.0..per[len - 1] / 4.0 + 1e-3),
            1 => {
                let cand: Vec<usize> = (0..trees.len()).filter(|&i| trees[i].len() >= 2).collect();
                if let Some(&i) = cand.get(r.random_range(0..cand.len().max(1))) {
                    let p = r.random_range(1..trees[i].len());
                    let right = trees[i].split_off(p).unwrap();
                    start[right.first_index().unwrap()] = true;
                    trees.push(right);
                }
            }
            _ => {
                rep.strikes += 1;
                let z = r.random_range(0..len);
                let got = classify(trees.iter().enumerate(), z, now);
                let cover = trees.iter().position(|b| b.covers(z));
                let want = match cover {
                    Some(i) if valid(&reach, &start, z, now) => Strike::Covered(i),
                    Some(i) => Strike::Resplit(i),
                    None => match (0..trees.len())
                        .filter(|&i| trees[i].first_index().unwrap() > z)
                        .min_by_key(|&i| trees[i].first_index().unwrap())
                    {
                        Some(i) => Strike::Downstream(i),
                        None => Strike::Build,
                    },
                };
                if got != want {
                    rep.mismatches += 1;
                }
                match want {
                    Strike::Covered(_) => {}
                    Strike::Resplit(i) => {
                        rep.resplits += 1;
                        let right = resplit(&mut trees[i], z, now).unwrap();
                        for k in z..=right.last_index().unwrap() {
                            reach[k] = now + (per[k] - per[z]);
                        }
                        start[z] = true;
                        if trees[i].is_empty() {
                            trees.remove(i);
                        }
                        trees.push(right);
                    }
                    Strike::Downstream(_) | Strike::Build => {
                        let limit = trees
                            .iter()
                            .filter_map(|b| b.first_index())
                            .filter(|&f| f > z)
                            .min()
                            .unwrap_or(len);
                        trees.push(Bht::build(0, &verts[..limit], z, now).unwrap());
                        for k in z..limit {
                            reach[k] = now + (per[k] - per[z]);
                        }
                        start[z] = true;
                    }
                }
            }
        }
        // Only bunch starts count as "first leaf".
        for k in 0..len {
            if !trees.iter().any(|b| b.first_index() == Some(k)) {
                start[k] = false;
            }
        }
        for b in &trees {
            let leaves = b.tree.leaves();
            let mut count = 0;
            for l in &leaves {
                rep.checks += 1;
                let want = valid(&reach, &start, l.index, now);
                if b.is_valid(l, now) != want {
                    rep.mismatches += 1;
                }
                count += usize::from(want);
                let w = b.weight(l);
                if (w - reach[l.index]).abs() > 1e-9 * (1.0 + w.abs()) {
                    rep.mismatches += 1;
                }
            }
            if b.valid_count(now) != count {
                rep.mismatches += 1;
            }
        }
    }
    rep
}

fn reach_gap(bis: &Bisector, p: Point) -> f64 {
    bis.left.reach(p) - bis.right.reach(p)
}

/// First crossing of the bisector with the boundary sequence, located by
/// sign changes of the reach difference along every edge.
pub fn brute_first_crossing(bis: &Bisector, elements: &[Vec<Point>]) -> Option<(usize, Point, f64)> {
    const SAMPLES: usize = 2048;
    let mut best: Option<(usize, Point, f64)> = None;
    let mut offer = |k: usize, p: Point| {
        let t = bis.param_of(p);
        let better = match best {
            None => true,
            Some((bk, _, bt)) => {
                let (x, y) = (t.abs(), bt.abs());
                x < y || (x == y && ((t >= 0.0) != (bt >= 0.0)) && t >= 0.0) || (x == y && (t >= 0.0) == (bt >= 0.0) && k < bk)
            }
        };
        if better {
            best = Some((k, p, t));
        }
    };
    for (k, pts) in elements.iter().enumerate() {
        if pts.len() == 1 {
            if reach_gap(bis, pts[0]).abs() <= 1e-12 {
                offer(k, pts[0]);
            }
            continue;
        }
        for w in pts.windows(2) {
            let at = |s: f64| w[0].lerp(w[1], s);
            let f = |s: f64| reach_gap(bis, at(s));
            let mut prev = f(0.0);
            if prev == 0.0 {
                offer(k, at(0.0));
            }
            for i in 1..=SAMPLES {
                let s1 = i as f64 / SAMPLES as f64;
                let cur = f(s1);
                if cur == 0.0 {
                    offer(k, at(s1));
                } else if prev != 0.0 && (prev < 0.0) != (cur < 0.0) {
                    let (mut lo, mut hi) = ((i - 1) as f64 / SAMPLES as f64, s1);
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if (f(mid) < 0.0) == (prev < 0.0) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    offer(k, at(0.5 * (lo + hi)));
                }
                prev = cur;
            }
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub enum IOutcome {
    Agree { hit: bool },
    Mismatch(String),
}

/// A random bisector against a random contiguous boundary sequence.
pub fn iintersect_case(seed: u64) -> IOutcome {
    let mut r = rng(seed);
    let bis = loop {
        let (ca, cb) = (point(&mut r, 40.0), point(&mut r, 40.0));
        let gap = ca.dist(cb);
        let wa = r.random_range(0.0..20.0);
        let wb = (wa + r.random_range(-0.9..0.9) * gap).max(0.0);
        if let Some(b) = icurve(WeightedSite::new(ca, wa), WeightedSite::new(cb, wb)) {
            break b;
        }
    };
    let mut cur = point(&mut r, 60.0);
    let mut elements = Vec::new();
    for _ in 0..r.random_range(1..9) {
        let mut pts = vec![cur];
        for _ in 0..r.random_range(0..6) {
            let a = r.random_range(0.0..TAU);
            cur = cur + Point::unit(a) * r.random_range(3.0..40.0);
            pts.push(cur);
        }
        elements.push(pts);
    }
    let trees: Vec<ElementTree> = elements.iter().map(|e| ElementTree::new(e.clone())).collect();
    let got = iintersect(&bis, &trees);
    let want = brute_first_crossing(&bis, &elements);
    let scale = 1.0 + elements.iter().flatten().map(|p| p.norm()).fold(0.0, f64::max);
    match (got, want) {
        (None, None) => IOutcome::Agree { hit: false },
        (Some(h), Some((_, p, _))) if h.crossing.point.dist(p) <= 1e-9 * scale => IOutcome::Agree { hit: true },
        (g, w) => IOutcome::Mismatch(format!("seed {seed}: iintersect {g:?}, brute {w:?}")),
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Touched {
    pub insert: f64,
    pub delete: f64,
    pub split: f64,
    pub merge: f64,
}

impl Touched {
    pub fn get(&self, op: &str) -> f64 {
        match op {
            "insert" => self.insert,
            "delete" => self.delete,
            "split" => self.split,
            _ => self.merge,
        }
    }
}

pub const TREE_OPS: [&str; 4] = ["insert", "delete", "split", "merge"];

/// Mean node recomputations per operation on a WST of `m` bunches with `k`
/// sites each.
pub fn touched_profile(m: usize, k: usize, reps: usize, seed: u64) -> Touched {
    let mut r = rng(seed);
    let leaf = |r: &mut ChaCha8Rng, bunch: u32, key: f64| WstLeaf {
        bunch,
        key,
        sites: (0..k).map(|_| WeightedSite::new(point(r, 100.0), r.random_range(0.0..10.0))).collect(),
    };
    let mut tree: HullTree<WstLeaf> = HullTree::from_leaves((0..m).map(|i| leaf(&mut r, i as u32, i as f64)).collect(), 10.0).unwrap();
    let mut acc = Touched::default();
    for rep in 0..reps {
        let t0 = tree.touched;
        let key = r.random_range(0..m) as f64 + 0.5;
        let i = tree.insert(leaf(&mut r, (m + rep) as u32, key)).unwrap();
        acc.insert += (tree.touched - t0) as f64;
        let t0 = tree.touched;
        tree.delete(i).unwrap();
        acc.delete += (tree.touched - t0) as f64;
        let t0 = tree.touched;
        let right = tree.split_off(r.random_range(1..m)).unwrap();
        acc.split += (tree.touched - t0) as f64;
        let t0 = tree.touched;
        tree.merge(right).unwrap();
        acc.merge += (tree.touched - t0) as f64;
    }
    let n = reps as f64;
    Touched {
        insert: acc.insert / n,
        delete: acc.delete / n,
        split: acc.split / n,
        merge: acc.merge / n,
    }
}

/// Least-squares `y = a·x + b`.
pub fn fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let a = sxy / sxx;
    (a, my - a * mx)
}
