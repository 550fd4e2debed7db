//! Constrained triangulation of the free space with `s` and `t` as vertices.

use crate::domain::Instance;
use crate::error::{Error, Result};
use crate::geom::{orient, point_in_ring, Point};
use serde::Serialize;
use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation as _};
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    /// Endpoints, lower index first.
    pub v: [usize; 2],
    /// Incident free-space triangles.
    pub tris: [Option<usize>; 2],
    /// Lies on the outer boundary or a hole boundary.
    pub constrained: bool,
}

impl Edge {
    pub fn other_tri(&self, t: usize) -> Option<usize> {
        if self.tris[0] == Some(t) {
            self.tris[1]
        } else if self.tris[1] == Some(t) {
            self.tris[0]
        } else {
            None
        }
    }

    pub fn has_vertex(&self, v: usize) -> bool {
        self.v[0] == v || self.v[1] == v
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Triangulation {
    pub vertices: Vec<Point>,
    /// Counter-clockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// `tri_edges[t][i]` is the edge opposite `triangles[t][i]`.
    pub tri_edges: Vec<[usize; 3]>,
    /// `adjacency[t][i]` is the triangle across `tri_edges[t][i]`.
    pub adjacency: Vec<[Option<usize>; 3]>,
    pub edges: Vec<Edge>,
    /// Triangle ids around each vertex.
    pub vertex_tris: Vec<Vec<usize>>,
    /// Number of polygon vertices; sites follow.
    pub polygon_vertices: usize,
    pub source: Option<usize>,
    pub target: Option<usize>,
    /// Previous and next vertex on the boundary ring, for polygon vertices.
    pub ring_nbrs: Vec<Option<(usize, usize)>>,
}

impl Triangulation {
    pub fn point(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn tri_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn edge_points(&self, e: usize) -> (Point, Point) {
        let [a, b] = self.edges[e].v;
        (self.vertices[a], self.vertices[b])
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.tri_points(t);
        0.5 * (b - a).cross(c - a)
    }

    /// Index (0..3) of vertex `v` in triangle `t`.
    pub fn corner(&self, t: usize, v: usize) -> Option<usize> {
        self.triangles[t].iter().position(|&x| x == v)
    }

    /// Index (0..3) of edge `e` in triangle `t`.
    pub fn side(&self, t: usize, e: usize) -> Option<usize> {
        self.tri_edges[t].iter().position(|&x| x == e)
    }

    /// Vertex of `t` not on edge `e`.
    pub fn apex(&self, t: usize, e: usize) -> usize {
        self.triangles[t][self.side(t, e).expect("edge of triangle")]
    }

    /// Whether the free-space angle at polygon vertex `v` is at least π.
    pub fn is_reflex(&self, v: usize) -> bool {
        match self.ring_nbrs[v] {
            Some((p, n)) => orient(self.vertices[p], self.vertices[v], self.vertices[n]) <= 0,
            None => true,
        }
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.vertex_tris[a].iter().find_map(|&t| {
            self.tri_edges[t]
                .iter()
                .copied()
                .find(|&e| self.edges[e].has_vertex(a) && self.edges[e].has_vertex(b))
        })
    }

    /// Triangle containing `p`; points on shared edges go to the lowest id.
    pub fn locate(&self, p: Point) -> Result<usize> {
        (0..self.triangles.len())
            .find(|&t| {
                let [a, b, c] = self.tri_points(t);
                orient(a, b, p) >= 0 && orient(b, c, p) >= 0 && orient(c, a, p) >= 0
            })
            .ok_or(Error::OutsideFreeSpace)
    }

    /// OFF-style dump: header, vertices, triangles.
    pub fn to_off(&self) -> String {
        let mut s = format!("OFF\n{} {} 0\n", self.vertices.len(), self.triangles.len());
        for p in &self.vertices {
            s.push_str(&format!("{} {} 0\n", p.x, p.y));
        }
        for t in &self.triangles {
            s.push_str(&format!("3 {} {} {}\n", t[0], t[1], t[2]));
        }
        s
    }
}

pub fn triangulate(inst: &Instance) -> Result<Triangulation> {
    let rings: Vec<&[Point]> = inst.rings().map(|r| r.as_slice()).collect();
    triangulate_rings(&rings, &[inst.s, inst.t])
}

/// Triangulates the region inside `rings[0]` and outside the other rings,
/// with `sites` as extra interior vertices.
pub fn triangulate_rings(rings: &[&[Point]], sites: &[Point]) -> Result<Triangulation> {
    let mut vertices: Vec<Point> = Vec::new();
    let mut ring_nbrs = Vec::new();
    for r in rings {
        let base = vertices.len();
        let n = r.len();
        for i in 0..n {
            vertices.push(r[i]);
            ring_nbrs.push(Some((base + (i + n - 1) % n, base + (i + 1) % n)));
        }
    }
    let polygon_vertices = vertices.len();
    for &s in sites {
        vertices.push(s);
        ring_nbrs.push(None);
    }

    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let mut handle_to_vertex: HashMap<usize, usize> = HashMap::new();
    let mut handles = Vec::with_capacity(vertices.len());
    for (i, p) in vertices.iter().enumerate() {
        let h = cdt
            .insert(Point2::new(p.x, p.y))
            .map_err(|e| Error::Triangulation(format!("{e:?}")))?;
        if handle_to_vertex.insert(h.index(), i).is_some() {
            return Err(Error::Triangulation(format!("duplicate vertex {i}")));
        }
        handles.push(h);
    }
    for (i, nb) in ring_nbrs.iter().enumerate() {
        if let Some((_, next)) = nb {
            cdt.add_constraint(handles[i], handles[*next]);
        }
    }

    let mut triangles = Vec::new();
    for f in cdt.inner_faces() {
        let vs = f.vertices();
        let tri = [
            handle_to_vertex[&vs[0].fix().index()],
            handle_to_vertex[&vs[1].fix().index()],
            handle_to_vertex[&vs[2].fix().index()],
        ];
        let [a, b, c] = tri.map(|v| vertices[v]);
        let centroid = Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0);
        let inside = point_in_ring(rings[0], centroid) == Some(true)
            && rings[1..].iter().all(|h| point_in_ring(h, centroid) == Some(false));
        if inside {
            triangles.push(canonical(tri, &vertices));
        }
    }
    triangles.sort();
    build(vertices, triangles, polygon_vertices, sites.len(), ring_nbrs)
}

fn canonical(mut t: [usize; 3], v: &[Point]) -> [usize; 3] {
    if orient(v[t[0]], v[t[1]], v[t[2]]) < 0 {
        t.swap(1, 2);
    }
    let k = (0..3).min_by_key(|&i| t[i]).unwrap();
    [t[k], t[(k + 1) % 3], t[(k + 2) % 3]]
}

fn build(
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    polygon_vertices: usize,
    nsites: usize,
    ring_nbrs: Vec<Option<(usize, usize)>>,
) -> Result<Triangulation> {
    let mut edge_id: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut tri_edges = Vec::with_capacity(triangles.len());
    for (t, tri) in triangles.iter().enumerate() {
        let mut te = [0usize; 3];
        for i in 0..3 {
            let (a, b) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
            let key = (a.min(b), a.max(b));
            let id = *edge_id.entry(key).or_insert_with(|| {
                let constrained = matches!(ring_nbrs[key.0], Some((p, n)) if p == key.1 || n == key.1);
                edges.push(Edge {
                    v: [key.0, key.1],
                    tris: [None, None],
                    constrained,
                });
                edges.len() - 1
            });
            let slot = if edges[id].tris[0].is_none() { 0 } else { 1 };
            if edges[id].tris[slot].is_some() {
                return Err(Error::Triangulation(format!("edge {key:?} has three triangles")));
            }
            edges[id].tris[slot] = Some(t);
            te[i] = id;
        }
        tri_edges.push(te);
    }
    let adjacency = tri_edges
        .iter()
        .enumerate()
        .map(|(t, te)| te.map(|e| edges[e].other_tri(t)))
        .collect();
    let mut vertex_tris = vec![Vec::new(); vertices.len()];
    for (t, tri) in triangles.iter().enumerate() {
        for &v in tri {
            vertex_tris[v].push(t);
        }
    }
    let (source, target) = match nsites {
        0 => (None, None),
        1 => (Some(polygon_vertices), None),
        _ => (Some(polygon_vertices), Some(polygon_vertices + 1)),
    };
    Ok(Triangulation {
        vertices,
        triangles,
        tri_edges,
        adjacency,
        edges,
        vertex_tris,
        polygon_vertices,
        source,
        target,
        ring_nbrs,
    })
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

    fn euler_holds(tri: &Triangulation, holes: usize) -> bool {
        let v = tri.vertices.len() as i64;
        let e = tri.edges.len() as i64;
        let f = tri.triangles.len() as i64 + 1 + holes as i64;
        v - e + f == 2
    }

    #[test]
    fn square_without_sites() {
        let sq = square(1.0);
        let tri = triangulate_rings(&[&sq], &[]).unwrap();
        assert_eq!(tri.triangles.len(), 2);
        assert!(euler_holds(&tri, 0));
    }

    #[test]
    fn square_with_sites() {
        let sq = square(4.0);
        let tri = triangulate_rings(&[&sq], &[Point::new(-2.0, 0.0), Point::new(2.0, 0.0)]).unwrap();
        // T = 2V - B - 2 for a triangulated disk.
        assert_eq!(tri.triangles.len(), 2 * 6 - 4 - 2);
        assert!(euler_holds(&tri, 0));
        assert_eq!(tri.source, Some(4));
        assert_eq!(tri.target, Some(5));
    }

    #[test]
    fn locate_rules() {
        let sq = square(4.0);
        let hole = vec![
            Point::new(-1.0, -1.0),
            Point::new(-1.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, -1.0),
        ];
        let tri = triangulate_rings(&[&sq, &hole], &[Point::new(-2.0, 0.0), Point::new(2.0, 0.0)]).unwrap();
        assert!(euler_holds(&tri, 1));
        let [a, b, c] = tri.tri_points(0);
        let g = Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0);
        assert_eq!(tri.locate(g).unwrap(), 0);
        // A shared edge goes to the lower of its two triangles.
        let e = tri.edges.iter().find(|e| e.tris[0].is_some() && e.tris[1].is_some()).unwrap();
        let (p, q) = (tri.point(e.v[0]), tri.point(e.v[1]));
        let mid = p.lerp(q, 0.5);
        let lo = e.tris[0].unwrap().min(e.tris[1].unwrap());
        assert!(tri.locate(mid).unwrap() <= lo);
        assert!(tri.locate(Point::new(0.0, 0.0)).is_err());
        let area: f64 = (0..tri.triangles.len()).map(|t| tri.area(t)).sum();
        assert!((area - (64.0 - 4.0)).abs() < 1e-9);
    }
}
