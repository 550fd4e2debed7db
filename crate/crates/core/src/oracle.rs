//! Visibility graph over the obstacle vertices plus `s` and `t`, searched with
//! Dijkstra. Deliberately naive: every pair is tested against every edge.

use crate::domain::{Instance, PathResult};
use crate::error::{Error, Result};
use crate::geom::{on_segment, orient, point_in_ring, segments_cross_properly, Point};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

#[derive(Clone, Debug)]
pub struct VisGraph {
    /// Ring vertices in ring order, then `s`, then `t`.
    pub nodes: Vec<Point>,
    pub adj: Vec<Vec<(usize, f64)>>,
}

impl VisGraph {
    pub fn source(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn target(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].iter().any(|&(w, _)| w == v)
    }
}

/// Whether the closed segment `uv` stays in the closed free space of `inst`.
/// Contact with the boundary, including running along an edge, is allowed.
pub fn visible(inst: &Instance, u: Point, v: Point) -> bool {
    let rings: Vec<&[Point]> = inst.rings().map(|r| r.as_slice()).collect();
    visible_in(&rings, u, v)
}

/// Closed free space of `rings[0]` minus the interiors of the other rings.
pub fn in_closed_region(rings: &[&[Point]], p: Point) -> bool {
    point_in_ring(rings[0], p) != Some(false) && rings[1..].iter().all(|h| point_in_ring(h, p) != Some(true))
}

/// [`visible`] for an explicit list of rings, outer ring first.
pub fn visible_in(rings: &[&[Point]], u: Point, v: Point) -> bool {
    if u == v {
        return true;
    }
    let d = v - u;
    let mut cuts: Vec<(f64, Point)> = vec![(0.0, u), (1.0, v)];
    for ring in rings {
        let n = ring.len();
        for i in 0..n {
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            if segments_cross_properly(u, v, a, b) {
                return false;
            }
            if a != u && a != v && orient(u, v, a) == 0 && on_segment(u, v, a) {
                cuts.push(((a - u).dot(d) / d.dot(d), a));
            }
        }
    }
    cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
    // No ring vertex lies inside any piece and no edge crosses it, so each
    // piece either runs along a ring edge or is entirely free or blocked.
    cuts.windows(2).all(|w| {
        let (p, q) = (w[0].1, w[1].1);
        p == q || on_ring_edge(rings, p, q) || in_closed_region(rings, p.lerp(q, 0.5))
    })
}

/// Whether the segment `pq` is contained in some ring edge (exact).
fn on_ring_edge(rings: &[&[Point]], p: Point, q: Point) -> bool {
    rings.iter().any(|ring| {
        let n = ring.len();
        (0..n).any(|i| {
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            orient(a, b, p) == 0 && orient(a, b, q) == 0 && on_segment(a, b, p) && on_segment(a, b, q)
        })
    })
}

/// Shortest path between two ring vertices inside the region bounded by
/// `rings`, over the visibility graph of all ring vertices.
pub fn ring_geodesic(rings: &[&[Point]], from: Point, to: Point) -> Option<f64> {
    let mut nodes: Vec<Point> = rings.iter().flat_map(|r| r.iter().copied()).collect();
    nodes.push(from);
    nodes.push(to);
    let mut adj = vec![Vec::new(); nodes.len()];
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if visible_in(rings, nodes[i], nodes[j]) {
                let w = nodes[i].dist(nodes[j]);
                adj[i].push((j, w));
                adj[j].push((i, w));
            }
        }
    }
    let g = VisGraph { nodes, adj };
    shortest_path(&g, g.source(), g.target()).map(|(d, _)| d)
}

pub fn visibility_graph(inst: &Instance) -> VisGraph {
    let mut nodes: Vec<Point> = inst.rings().flatten().copied().collect();
    nodes.push(inst.s);
    nodes.push(inst.t);
    let mut adj = vec![Vec::new(); nodes.len()];
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if visible(inst, nodes[i], nodes[j]) {
                let w = nodes[i].dist(nodes[j]);
                adj[i].push((j, w));
                adj[j].push((i, w));
            }
        }
    }
    VisGraph { nodes, adj }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Dijkstra from `from`; equal distances keep the lower-index predecessor.
pub fn shortest_path(g: &VisGraph, from: usize, to: usize) -> Option<(f64, Vec<usize>)> {
    let n = g.nodes.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[from] = 0.0;
    heap.push(Entry(0.0, from));
    while let Some(Entry(d, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == to {
            break;
        }
        for &(v, w) in &g.adj[u] {
            let nd = d + w;
            if !done[v] && (nd < dist[v] || (nd == dist[v] && u < pred[v])) {
                dist[v] = nd;
                pred[v] = u;
                heap.push(Entry(nd, v));
            }
        }
    }
    if !done[to] {
        return None;
    }
    let mut path = vec![to];
    while *path.last().unwrap() != from {
        path.push(pred[*path.last().unwrap()]);
    }
    path.reverse();
    Some((dist[to], path))
}

/// Shortest `s`–`t` path on the visibility graph, in input units.
pub fn oracle_distance(inst: &Instance) -> Result<PathResult> {
    let g = visibility_graph(inst);
    let (d, ids) = shortest_path(&g, g.source(), g.target()).ok_or(Error::Disconnected)?;
    let mut counters = BTreeMap::new();
    counters.insert("vis_nodes".to_string(), g.nodes.len() as u64);
    counters.insert("vis_edges".to_string(), g.edge_count() as u64);
    Ok(PathResult {
        distance: d * inst.scale,
        path: ids.iter().map(|&i| inst.to_input_units(g.nodes[i])).collect(),
        counters,
        trace: Vec::new(),
    })
}

/// Whether every segment of `path` (in the instance's working units) stays in
/// the closed free space.
pub fn path_is_valid(inst: &Instance, path: &[Point]) -> bool {
    match path {
        [] => false,
        [p] => *p == inst.s && inst.s == inst.t,
        _ => {
            path[0] == inst.s
                && path[path.len() - 1] == inst.t
                && path.windows(2).all(|w| visible(inst, w[0], w[1]))
        }
    }
}

pub fn path_length(path: &[Point]) -> f64 {
    path.windows(2).map(|w| w[0].dist(w[1])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(h: f64) -> Vec<Point> {
        vec![
            Point::new(-h, -h),
            Point::new(h, -h),
            Point::new(h, h),
            Point::new(-h, h),
        ]
    }

    fn square_hole() -> Instance {
        Instance::new(square(4.0), vec![square(0.5)], Point::new(-2.0, 0.0), Point::new(2.0, 0.0)).unwrap()
    }

    #[test]
    fn free_space_is_straight() {
        let inst = Instance::new(square(4.0), vec![], Point::new(-2.0, 0.0), Point::new(2.0, 0.0)).unwrap();
        let r = oracle_distance(&inst).unwrap();
        assert_eq!(r.distance, 4.0);
        assert_eq!(r.path.len(), 2);
    }

    #[test]
    fn square_hole_visibility() {
        let inst = square_hole();
        let g = visibility_graph(&inst);
        assert_eq!(g.nodes.len(), inst.n() + 2);
        let id = |p: Point| g.nodes.iter().position(|&q| q == p).unwrap();
        let s = g.source();
        assert!(g.has_edge(s, id(Point::new(-0.5, 0.5))));
        assert!(g.has_edge(s, id(Point::new(-0.5, -0.5))));
        assert!(!g.has_edge(s, id(Point::new(0.5, 0.5))));
        assert!(!g.has_edge(s, id(Point::new(0.5, -0.5))));
        for u in 0..g.nodes.len() {
            for &(v, _) in &g.adj[u] {
                assert!(g.has_edge(v, u));
            }
        }
    }

    #[test]
    fn square_hole_distance() {
        let r = oracle_distance(&square_hole()).unwrap();
        let want = 1.0 + 2.0 * 2.5f64.sqrt();
        assert!((r.distance - want).abs() < 1e-12, "{}", r.distance);
        assert_eq!(r.path.len(), 4);
    }

    #[test]
    fn walking_along_an_edge_is_visible() {
        let inst = square_hole();
        assert!(visible(&inst, Point::new(-0.5, 0.5), Point::new(0.5, 0.5)));
        assert!(!visible(&inst, Point::new(-0.5, 0.5), Point::new(0.5, -0.5)));
    }
}
