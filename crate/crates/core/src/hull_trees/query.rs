//! Branch-and-bound distance queries between a WST and a BST.
//!
//! A node's hull contains everything below it, so `d + separation` with the
//! other side is a lower bound on any strike radius inside it. Descending into
//! a node splits its bridge; a second split of the same bridge (before the
//! node is rebuilt) counts as a re-split.

use super::tree::{HullLeaf, HullTree, Node};
use super::{polyline_dist, BstLeaf, Element, Wst};
use crate::geom::envelope::{polyline_envelope, separation, Envelope};
use crate::geom::{Point, WeightedSite};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub splits: u64,
    pub resplits: u64,
    pub leaves: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit<T> {
    /// Radius at which the first contact happens (may be below the query
    /// radius when the target is already inside the hull).
    pub radius: f64,
    pub what: T,
    pub site: WeightedSite,
    pub point: Point,
}

impl<T> Hit<T> {
    /// Extra radius needed beyond `d`.
    pub fn additional(&self, d: f64) -> f64 {
        (self.radius - d).max(0.0)
    }
}

struct Q<'a, L>(f64, &'a Node<L>);

impl<L> PartialEq for Q<'_, L> {
    fn eq(&self, o: &Self) -> bool {
        self.0 == o.0
    }
}
impl<L> Eq for Q<'_, L> {}
impl<L> Ord for Q<'_, L> {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0)
    }
}
impl<L> PartialOrd for Q<'_, L> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn search<'a, L: HullLeaf, T>(
    tree: &'a HullTree<L>,
    other: &Envelope,
    d: f64,
    exact: impl Fn(&L) -> Option<Hit<T>>,
    stats: &mut QueryStats,
) -> Option<Hit<T>> {
    let root = tree.root.as_deref()?;
    let lb = |n: &Node<L>| d + separation(&n.cache().env.shifted(tree.d), other);
    let mut heap = BinaryHeap::new();
    heap.push(Q(lb(root), root));
    let mut best: Option<Hit<T>> = None;
    while let Some(Q(b, n)) = heap.pop() {
        if best.as_ref().map(|h| b >= h.radius).unwrap_or(false) {
            break;
        }
        match n {
            Node::Leaf { leaf, .. } => {
                stats.leaves += 1;
                if let Some(h) = exact(leaf) {
                    if best.as_ref().map(|x| h.radius < x.radius).unwrap_or(true) {
                        best = Some(h);
                    }
                }
            }
            Node::Inner { l, r, c } => {
                stats.splits += 1;
                if c.split_seen.replace(true) {
                    stats.resplits += 1;
                }
                heap.push(Q(lb(l), l));
                heap.push(Q(lb(r), r));
            }
        }
    }
    best
}

fn sites_hull(sites: &[WeightedSite], d: f64) -> Envelope {
    use crate::geom::envelope::Piece;
    let p: Vec<Piece> = sites
        .iter()
        .enumerate()
        .filter(|(_, s)| s.weight <= d)
        .map(|(i, s)| Piece::site(i as u32, *s, 0.0, std::f64::consts::TAU))
        .collect();
    Envelope::from_pieces(&p, d)
}

fn closest(sites: &[WeightedSite], pts: &[Point], d: f64) -> Option<(f64, WeightedSite, Point)> {
    sites
        .iter()
        .filter(|s| s.weight <= d)
        .map(|s| {
            let (dist, q) = polyline_dist(pts, s.center);
            (s.weight + dist, *s, q)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

/// First boundary element of `bst` struck by the bunch `sites` (valid at
/// radius `d`, full disks).
pub fn bst_min_dist(
    bst: &HullTree<BstLeaf>,
    sites: &[WeightedSite],
    d: f64,
    stats: &mut QueryStats,
) -> Option<Hit<Element>> {
    let hull = sites_hull(sites, d);
    if hull.is_empty() {
        return None;
    }
    search(
        bst,
        &hull,
        d,
        |leaf| {
            closest(sites, &leaf.pts, d).map(|(r, site, point)| Hit {
                radius: r,
                what: leaf.element,
                site,
                point,
            })
        },
        stats,
    )
}

/// First bunch of `wst` to reach the polyline `target` (a point, a door or a
/// chain), at query radius `d`.
pub fn wst_min_dist(wst: &Wst, target: &[Point], d: f64, stats: &mut QueryStats) -> Option<Hit<u32>> {
    let e = wst.effective(d);
    if e < 0.0 {
        return None;
    }
    let env = polyline_envelope(0, target);
    search(
        &wst.tree,
        &env,
        e,
        |leaf| {
            closest(&leaf.sites, target, e).map(|(r, site, point)| Hit {
                radius: r,
                what: leaf.bunch,
                site,
                point,
            })
        },
        stats,
    )
    .map(|mut h| {
        // The search ran in effective radii; report in query radii.
        h.radius -= wst.offset;
        h
    })
}
