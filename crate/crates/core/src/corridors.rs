//! Junction/corridor decomposition of the triangulation dual.
//!
//! Dual edges across edges incident to `s` or `t` are cut, so the triangles
//! around `s` (resp. `t`) hang off the degenerate unit `S` (resp. `T`).
//! Dead-end pockets are pruned and folded into the unit they hang from. The
//! remaining degree-3 triangles are junctions, and maximal runs of degree ≤ 2
//! triangles are corridors.

use crate::error::{Error, Result};
use crate::geom::{orient, ConvexChainRef, Orientation, Point};
use crate::triangulate::Triangulation;
use serde::Serialize;
use std::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CorridorKind {
    Open,
    Closed,
}

#[derive(Clone, Debug, Serialize)]
pub struct Junction {
    pub triangle: usize,
    pub edges: [usize; 3],
    /// Units across each edge, `None` for boundary or cut edges.
    pub units: [Option<Unit>; 3],
    pub pockets: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Funnel {
    pub apex: usize,
    /// Both chains start at the apex.
    pub chains: [Vec<usize>; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct Hourglass {
    pub kind: CorridorKind,
    /// Taut paths between the door endpoints on either side.
    pub sides: [Vec<usize>; 2],
    /// Convex chains: the two sides when open, the four funnel chains when closed.
    pub chains: Vec<Vec<usize>>,
    pub funnels: Vec<Funnel>,
    pub apex_distance: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Corridor {
    /// Core triangle path, door 0 first.
    pub triangles: Vec<usize>,
    pub pockets: Vec<usize>,
    /// Door edges at either end (equal only for a one-triangle loop).
    pub doors: [usize; 2],
    /// Portal edges between consecutive core triangles.
    pub portals: Vec<usize>,
    pub hourglass: Hourglass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Unit {
    Junction(usize),
    Corridor(usize),
    S,
    T,
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub junctions: Vec<Junction>,
    pub corridors: Vec<Corridor>,
    /// Unit owning each triangle.
    pub unit_of: Vec<Unit>,
    /// Unit graph edges with the triangulation edge realizing each adjacency
    /// (`None` for the attachment of `S`/`T` through a fan triangle).
    pub graph: Vec<(Unit, Unit, Option<usize>)>,
    pub useful_units: Vec<Unit>,
    pub useful_edges: Vec<bool>,
}

impl Decomposition {
    pub fn unit_index(&self, u: Unit) -> usize {
        let (j, c) = (self.junctions.len(), self.corridors.len());
        match u {
            Unit::Junction(i) => i,
            Unit::Corridor(i) => j + i,
            Unit::S => j + c,
            Unit::T => j + c + 1,
        }
    }

    pub fn unit_count(&self) -> usize {
        self.junctions.len() + self.corridors.len() + 2
    }

    pub fn is_useful(&self, u: Unit) -> bool {
        self.useful_units.contains(&u)
    }

    /// Per-triangle flag: the triangle belongs to a useful unit.
    pub fn useful_triangles(&self) -> Vec<bool> {
        self.unit_of.iter().map(|u| self.is_useful(*u)).collect()
    }

    pub fn triangles_of(&self, u: Unit) -> Vec<usize> {
        match u {
            Unit::Junction(i) => {
                let mut v = vec![self.junctions[i].triangle];
                v.extend(&self.junctions[i].pockets);
                v
            }
            Unit::Corridor(i) => {
                let mut v = self.corridors[i].triangles.clone();
                v.extend(&self.corridors[i].pockets);
                v
            }
            Unit::S | Unit::T => Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serializes")
    }
}

/// Whether triangulation edge `e` touches `s` or `t`.
fn is_cut(tri: &Triangulation, e: usize) -> bool {
    let edge = &tri.edges[e];
    [tri.source, tri.target].iter().flatten().any(|&v| edge.has_vertex(v))
}

fn touches_site(tri: &Triangulation, t: usize) -> bool {
    [tri.source, tri.target]
        .iter()
        .flatten()
        .any(|&v| tri.triangles[t].contains(&v))
}

/// Dual neighbours of `t` across uncut, unconstrained edges.
fn dual_nbrs(tri: &Triangulation, t: usize) -> Vec<(usize, usize)> {
    (0..3)
        .filter_map(|i| {
            let e = tri.tri_edges[t][i];
            if tri.edges[e].constrained || is_cut(tri, e) {
                None
            } else {
                tri.adjacency[t][i].map(|n| (n, e))
            }
        })
        .collect()
}

pub fn build_decomposition(tri: &Triangulation) -> Result<Decomposition> {
    let nt = tri.triangles.len();
    let nbrs: Vec<Vec<(usize, usize)>> = (0..nt).map(|t| dual_nbrs(tri, t)).collect();

    // Prune dead-end pockets; remember which core triangle each hangs from.
    let mut alive = vec![true; nt];
    let mut deg: Vec<usize> = nbrs.iter().map(Vec::len).collect();
    let mut hangs_from = vec![usize::MAX; nt];
    let mut queue: VecDeque<usize> = (0..nt).filter(|&t| deg[t] <= 1 && !touches_site(tri, t)).collect();
    let mut order = Vec::new();
    while let Some(t) = queue.pop_front() {
        if !alive[t] || deg[t] > 1 || touches_site(tri, t) {
            continue;
        }
        alive[t] = false;
        order.push(t);
        for &(n, _) in &nbrs[t] {
            if alive[n] {
                hangs_from[t] = n;
                deg[n] -= 1;
                if deg[n] <= 1 {
                    queue.push_back(n);
                }
            }
        }
    }
    let core_nbrs = |t: usize| -> Vec<(usize, usize)> { nbrs[t].iter().copied().filter(|&(n, _)| alive[n]).collect() };

    let mut unit_of: Vec<Option<Unit>> = vec![None; nt];
    let mut junctions = Vec::new();
    for t in 0..nt {
        if alive[t] && core_nbrs(t).len() == 3 {
            unit_of[t] = Some(Unit::Junction(junctions.len()));
            junctions.push(Junction {
                triangle: t,
                edges: tri.tri_edges[t],
                units: [None; 3],
                pockets: Vec::new(),
            });
        }
    }

    // Corridors: walk maximal runs of non-junction core triangles.
    let mut raw: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; nt];
    for t in 0..nt {
        if !alive[t] || unit_of[t].is_some() || seen[t] {
            continue;
        }
        let run_nbrs = |x: usize| -> Vec<usize> {
            core_nbrs(x).into_iter().map(|(n, _)| n).filter(|&n| unit_of[n].is_none()).collect()
        };
        // Walk to one end of the run containing t; a closed run starts at t.
        let (mut prev, mut cur) = (usize::MAX, t);
        loop {
            match run_nbrs(cur).into_iter().find(|&n| n != prev) {
                Some(n) if n != t => {
                    prev = cur;
                    cur = n;
                }
                Some(_) => {
                    cur = t;
                    break;
                }
                None => break,
            }
        }
        let mut path = vec![cur];
        seen[cur] = true;
        while let Some(n) = run_nbrs(cur).into_iter().find(|&n| !seen[n]) {
            seen[n] = true;
            path.push(n);
            cur = n;
        }
        raw.push(path);
    }
    raw.sort();
    let mut corridors = Vec::new();
    for (ci, path) in raw.into_iter().enumerate() {
        for &t in &path {
            unit_of[t] = Some(Unit::Corridor(ci));
        }
        let (doors, portals) = doors_and_portals(tri, &path, &unit_of, &core_nbrs);
        let hourglass = hourglass_of(tri, &path, doors, &portals);
        corridors.push(Corridor {
            triangles: path,
            pockets: Vec::new(),
            doors,
            portals,
            hourglass,
        });
    }

    // Fold pockets into the unit they hang from, innermost last.
    for &t in order.iter().rev() {
        let h = hangs_from[t];
        let u = if h == usize::MAX { None } else { unit_of[h] };
        let u = u.ok_or_else(|| Error::Triangulation(format!("pocket {t} has no owner")))?;
        unit_of[t] = Some(u);
        match u {
            Unit::Junction(i) => junctions[i].pockets.push(t),
            Unit::Corridor(i) => corridors[i].pockets.push(t),
            _ => unreachable!(),
        }
    }
    // A free space pruned to nothing (no sites) leaves orphan triangles.
    let unit_of: Vec<Unit> = unit_of
        .into_iter()
        .map(|u| u.ok_or_else(|| Error::Triangulation("unassigned triangle".into())))
        .collect::<Result<_>>()?;

    for j in &mut junctions {
        for i in 0..3 {
            let e = j.edges[i];
            if let Some(n) = tri.edges[e].other_tri(j.triangle) {
                if !tri.edges[e].constrained && !is_cut(tri, e) {
                    j.units[i] = Some(unit_of[n]);
                }
            }
        }
    }

    let mut graph = Vec::new();
    for (e, edge) in tri.edges.iter().enumerate() {
        if edge.constrained || is_cut(tri, e) {
            continue;
        }
        if let [Some(a), Some(b)] = edge.tris {
            let (ua, ub) = (unit_of[a], unit_of[b]);
            if ua != ub && alive[a] && alive[b] {
                graph.push((ua.min(ub), ua.max(ub), Some(e)));
            }
        }
    }
    for (site, unit) in [(tri.source, Unit::S), (tri.target, Unit::T)] {
        let Some(v) = site else { continue };
        for &t in &tri.vertex_tris[v] {
            graph.push((unit_of[t].min(unit), unit_of[t].max(unit), None));
        }
    }
    graph.sort_by_key(|g| (g.0, g.1, g.2));

    let mut d = Decomposition {
        junctions,
        corridors,
        unit_of,
        graph,
        useful_units: Vec::new(),
        useful_edges: Vec::new(),
    };
    mark_useful(&mut d)?;
    Ok(d)
}

fn doors_and_portals(
    tri: &Triangulation,
    path: &[usize],
    unit_of: &[Option<Unit>],
    core_nbrs: &dyn Fn(usize) -> Vec<(usize, usize)>,
) -> ([usize; 2], Vec<usize>) {
    let portals: Vec<usize> = path
        .windows(2)
        .map(|w| {
            core_nbrs(w[0])
                .into_iter()
                .find(|&(n, _)| n == w[1])
                .map(|(_, e)| e)
                .expect("consecutive corridor triangles share an edge")
        })
        .collect();
    let end_door = |t: usize, inner: Option<usize>, taken: Option<usize>| -> usize {
        // Prefer an edge to a junction, then an s/t edge, then any other edge.
        let jn = core_nbrs(t)
            .into_iter()
            .filter(|&(n, e)| matches!(unit_of[n], Some(Unit::Junction(_))) && Some(e) != taken)
            .map(|(_, e)| e)
            .min();
        let cut = tri.tri_edges[t]
            .iter()
            .copied()
            .filter(|&e| is_cut(tri, e) && Some(e) != taken && Some(e) != inner)
            .min();
        let any = tri.tri_edges[t]
            .iter()
            .copied()
            .filter(|&e| Some(e) != taken && Some(e) != inner)
            .min();
        jn.or(cut).or(any).expect("triangle has a free edge")
    };
    let first = path[0];
    let last = *path.last().unwrap();
    let d0 = end_door(first, portals.first().copied(), None);
    let d1 = end_door(last, portals.last().copied(), if path.len() == 1 { Some(d0) } else { None });
    ([d0, d1], portals)
}

/// Door or portal edge oriented as (left, right) when entering triangle `t`.
fn entering(tri: &Triangulation, t: usize, e: usize) -> (usize, usize) {
    let k = tri.side(t, e).expect("edge of triangle");
    let tr = tri.triangles[t];
    (tr[(k + 1) % 3], tr[(k + 2) % 3])
}

fn hourglass_of(tri: &Triangulation, path: &[usize], doors: [usize; 2], portals: &[usize]) -> Hourglass {
    let pts = &tri.vertices;
    let (l0, r0) = entering(tri, path[0], doors[0]);
    let (rk, lk) = entering(tri, *path.last().unwrap(), doors[1]);
    let mut gates: Vec<(usize, usize)> = portals
        .iter()
        .zip(path.iter().skip(1))
        .map(|(&e, &t)| entering(tri, t, e))
        .collect();
    let left = {
        gates.push((lk, lk));
        let p = funnel(pts, l0, &gates);
        gates.pop();
        p
    };
    let right = {
        gates.push((rk, rk));
        let p = funnel(pts, r0, &gates);
        gates.pop();
        p
    };
    let shared: Vec<usize> = left.iter().copied().filter(|v| right.contains(v)).collect();
    if shared.is_empty() {
        return Hourglass {
            kind: CorridorKind::Open,
            chains: vec![left.clone(), right.clone()],
            sides: [left, right],
            funnels: Vec::new(),
            apex_distance: None,
        };
    }
    let (v1, v2) = (shared[0], *shared.last().unwrap());
    let i1 = left.iter().position(|&v| v == v1).unwrap();
    let i2 = left.iter().position(|&v| v == v2).unwrap();
    let apex_distance: f64 = left[i1..=i2].windows(2).map(|w| pts[w[0]].dist(pts[w[1]])).sum();
    let j1 = right.iter().position(|&v| v == v1).unwrap();
    let j2 = right.iter().position(|&v| v == v2).unwrap();
    let rev = |s: &[usize]| s.iter().rev().copied().collect::<Vec<_>>();
    let f1 = Funnel {
        apex: v1,
        chains: [rev(&left[..=i1]), rev(&right[..=j1])],
    };
    let f2 = Funnel {
        apex: v2,
        chains: [left[i2..].to_vec(), right[j2..].to_vec()],
    };
    Hourglass {
        kind: CorridorKind::Closed,
        chains: vec![f1.chains[0].clone(), f1.chains[1].clone(), f2.chains[0].clone(), f2.chains[1].clone()],
        sides: [left, right],
        funnels: vec![f1, f2],
        apex_distance: Some(apex_distance),
    }
}

/// Funnel (string-pulling) shortest path from vertex `start` through a
/// sequence of (left, right) gates; the last gate is the degenerate target.
pub fn funnel(pts: &[Point], start: usize, gates: &[(usize, usize)]) -> Vec<usize> {
    let mut path = vec![start];
    let (mut apex, mut left, mut right) = (start, start, start);
    let (mut li, mut ri) = (0usize, 0usize);
    let mut i = 0usize;
    while i < gates.len() {
        let (l, r) = gates[i];
        let p = |v: usize| pts[v];
        // Tighten the right side.
        if r == right || orient(p(apex), p(right), p(r)) >= 0 {
            if apex == right || orient(p(apex), p(left), p(r)) < 0 {
                right = r;
                ri = i;
            } else {
                apex = left;
                path.push(apex);
                right = apex;
                ri = li;
                i = li + 1;
                continue;
            }
        }
        // Tighten the left side.
        if l == left || orient(p(apex), p(left), p(l)) <= 0 {
            if apex == left || orient(p(apex), p(right), p(l)) > 0 {
                left = l;
                li = i;
            } else {
                apex = right;
                path.push(apex);
                left = apex;
                li = ri;
                i = ri + 1;
                continue;
            }
        }
        i += 1;
    }
    let end = gates.last().map(|g| g.0).unwrap_or(start);
    if *path.last().unwrap() != end {
        path.push(end);
    }
    path.dedup();
    path
}

/// Whether segment `pq` passes through every portal of corridor `c`.
pub fn sleeve_visible(tri: &Triangulation, c: &Corridor, p: Point, q: Point) -> bool {
    c.portals.iter().all(|&e| {
        let (a, b) = tri.edge_points(e);
        orient(p, q, a) * orient(p, q, b) <= 0 && orient(a, b, p) * orient(a, b, q) <= 0
    })
}

pub fn chain_ref(tri: &Triangulation, chain: &[usize]) -> ConvexChainRef {
    let pts: Vec<Point> = chain.iter().map(|&v| tri.vertices[v]).collect();
    let o = pts
        .windows(3)
        .map(|w| orient(w[0], w[1], w[2]))
        .find(|&o| o != 0)
        .unwrap_or(1);
    ConvexChainRef::new(pts, if o < 0 { Orientation::Cw } else { Orientation::Ccw })
}

/// Marks units and unit-graph edges lying on some simple `S`–`T` path: those
/// in the biconnected block that contains an added virtual `S`–`T` edge.
pub fn mark_useful(d: &mut Decomposition) -> Result<()> {
    let n = d.unit_count();
    let mut edges: Vec<(usize, usize)> = d
        .graph
        .iter()
        .map(|&(a, b, _)| (d.unit_index(a), d.unit_index(b)))
        .collect();
    let (si, ti) = (d.unit_index(Unit::S), d.unit_index(Unit::T));
    edges.push((si, ti));
    let virt = edges.len() - 1;
    let comp = biconnected_edges(n, &edges);
    let block = comp[virt];
    let useful_edges: Vec<bool> = comp[..virt].iter().map(|&c| c == block).collect();
    let mut on = vec![false; n];
    for (k, &(a, b)) in edges[..virt].iter().enumerate() {
        if useful_edges[k] {
            on[a] = true;
            on[b] = true;
        }
    }
    if !on[si] || !on[ti] {
        return Err(Error::Disconnected);
    }
    let mut units = Vec::new();
    for j in 0..d.junctions.len() {
        if on[d.unit_index(Unit::Junction(j))] {
            units.push(Unit::Junction(j));
        }
    }
    for c in 0..d.corridors.len() {
        if on[d.unit_index(Unit::Corridor(c))] {
            units.push(Unit::Corridor(c));
        }
    }
    units.push(Unit::S);
    units.push(Unit::T);
    d.useful_units = units;
    d.useful_edges = useful_edges;
    Ok(())
}

/// Biconnected component id of every edge of a multigraph (iterative Tarjan).
pub fn biconnected_edges(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for (k, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, k));
        adj[b].push((a, k));
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut comp = vec![usize::MAX; edges.len()];
    let mut stack: Vec<usize> = Vec::new();
    let mut time = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        // Frames: (vertex, edge used to reach it, next adjacency index).
        let mut frames: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(&mut (v, pe, ref mut i)) = frames.last_mut() {
            if *i < adj[v].len() {
                let (w, k) = adj[v][*i];
                *i += 1;
                if k == pe {
                    continue;
                }
                if disc[w] == usize::MAX {
                    stack.push(k);
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    frames.push((w, k, 0));
                } else if disc[w] < disc[v] {
                    stack.push(k);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                frames.pop();
                if let Some(&(u, _, _)) = frames.last() {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        while let Some(k) = stack.pop() {
                            comp[k] = ncomp;
                            if k == pe {
                                break;
                            }
                        }
                        ncomp += 1;
                    }
                }
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_of_a_triangle_with_a_tail() {
        // Triangle 0-1-2 plus bridge 2-3 plus a parallel pair 3-4.
        let edges = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (3, 4)];
        let c = biconnected_edges(5, &edges);
        assert_eq!(c[0], c[1]);
        assert_eq!(c[1], c[2]);
        assert_ne!(c[2], c[3]);
        assert_eq!(c[4], c[5]);
        assert_ne!(c[3], c[4]);
    }

    #[test]
    fn funnel_around_a_corner() {
        // L-shaped sleeve: from (0,0) up then right, bending at (1,1).
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 2.0),
            Point::new(3.0, 1.5),
            Point::new(-1.0, 1.0),
        ];
        // Gates seen walking upward then right: right side is (1,1).
        let gates = vec![(4, 1), (2, 1), (3, 3)];
        let p = funnel(&pts, 0, &gates);
        assert_eq!(p, vec![0, 1, 3]);
    }
}
