use super::{fixture, sleeve_ring, FIXTURES};
use spw_core::corridors::{CorridorKind, Decomposition, Unit};
use spw_core::domain::{random_instance, Instance};
use spw_core::geom::{orient, Point};
use spw_core::oracle::{ring_geodesic, visible_in};
use spw_core::triangulate::Triangulation;
use std::collections::BTreeSet;

/// Fixtures plus 100 seeded random instances.
pub fn instances() -> Vec<(String, Instance)> {
    let mut v: Vec<(String, Instance)> = FIXTURES.iter().map(|n| (n.to_string(), fixture(n))).collect();
    for seed in 0..100u64 {
        let m = 1 + (seed % 6) as usize;
        v.push((format!("random {seed} m={m}"), random_instance(seed, m, 6).unwrap()));
    }
    v
}

fn touches_endpoint(tri: &Triangulation, e: usize) -> bool {
    [tri.source, tri.target].into_iter().flatten().any(|v| tri.edges[e].has_vertex(v))
}

pub fn check_cover(name: &str, tri: &Triangulation, dec: &Decomposition) {
    let mut seen = vec![0usize; tri.triangles.len()];
    let units = (0..dec.junctions.len())
        .map(Unit::Junction)
        .chain((0..dec.corridors.len()).map(Unit::Corridor));
    for u in units {
        for t in dec.triangles_of(u) {
            seen[t] += 1;
            assert_eq!(dec.unit_of[t], u, "{name}: unit_of disagrees for triangle {t}");
        }
    }
    for (t, &k) in seen.iter().enumerate() {
        // Fan triangles around s and t may hang off S/T instead.
        match dec.unit_of[t] {
            Unit::S | Unit::T => assert_eq!(k, 0, "{name}: S/T triangle {t} also owned by a unit"),
            _ => assert_eq!(k, 1, "{name}: triangle {t} covered {k} times"),
        }
    }
}

pub fn check_doors(name: &str, tri: &Triangulation, dec: &Decomposition) {
    for (i, c) in dec.corridors.iter().enumerate() {
        let ends = [c.triangles[0], *c.triangles.last().unwrap()];
        for (k, &e) in c.doors.iter().enumerate() {
            let edge = tri.edges[e];
            assert!(edge.tris.contains(&Some(ends[k])), "{name}: door {k} of corridor {i} not on its end triangle");
            assert!(!edge.constrained, "{name}: door on the boundary");
            let across = edge.other_tri(ends[k]).unwrap();
            let ok = touches_endpoint(tri, e)
                || matches!(dec.unit_of[across], Unit::Junction(_) | Unit::S | Unit::T)
                || (c.triangles.len() == 1 && c.doors[0] == c.doors[1]);
            assert!(ok, "{name}: door {k} of corridor {i} leads to {:?}", dec.unit_of[across]);
        }
        for (w, &p) in c.portals.iter().enumerate() {
            let edge = tri.edges[p];
            assert!(edge.tris.contains(&Some(c.triangles[w])) && edge.tris.contains(&Some(c.triangles[w + 1])));
        }
    }
}

pub fn check_chains(name: &str, tri: &Triangulation, dec: &Decomposition) {
    for (i, c) in dec.corridors.iter().enumerate() {
        for chain in &c.hourglass.chains {
            let turns: BTreeSet<i8> = chain
                .windows(3)
                .map(|w| orient(tri.vertices[w[0]], tri.vertices[w[1]], tri.vertices[w[2]]))
                .filter(|&o| o != 0)
                .collect();
            assert!(turns.len() <= 1, "{name}: chain of corridor {i} is not convex");
        }
    }
}

fn door_samples(tri: &Triangulation, e: usize) -> Vec<Point> {
    let (a, b) = tri.edge_points(e);
    (0..64).map(|i| a.lerp(b, (i as f64 + 0.5) / 64.0)).collect()
}

pub fn check_kinds(name: &str, tri: &Triangulation, dec: &Decomposition) -> [usize; 2] {
    let mut kinds = [0, 0];
    for (i, c) in dec.corridors.iter().enumerate() {
        if c.doors[0] == c.doors[1] {
            continue;
        }
        let ring = sleeve_ring(tri, c);
        let rings: [&[Point]; 1] = [&ring];
        let (p, q) = (door_samples(tri, c.doors[0]), door_samples(tri, c.doors[1]));
        let sampled_open = p.iter().any(|&a| q.iter().any(|&b| visible_in(&rings, a, b)));
        kinds[usize::from(c.hourglass.kind == CorridorKind::Closed)] += 1;
        if sampled_open {
            assert_eq!(c.hourglass.kind, CorridorKind::Open, "{name}: corridor {i} has visible doors but is closed");
        }
        if c.hourglass.kind == CorridorKind::Closed {
            let f = &c.hourglass.funnels;
            let (a, b) = (tri.vertices[f[0].apex], tri.vertices[f[1].apex]);
            let want = ring_geodesic(&rings, a, b).expect("apexes on the sleeve");
            let got = c.hourglass.apex_distance.unwrap();
            assert!((got - want).abs() <= 1e-6 * want.max(1.0), "{name}: corridor {i} apex distance {got} vs {want}");
        } else {
            assert!(c.hourglass.apex_distance.is_none());
        }
    }
    kinds
}

/// All of the above; returns open/closed corridor counts.
pub fn check_all(name: &str, inst: &Instance, tri: &Triangulation, dec: &Decomposition) -> [usize; 2] {
    check_cover(name, tri, dec);
    check_doors(name, tri, dec);
    check_chains(name, tri, dec);
    let kinds = check_kinds(name, tri, dec);
    let m = inst.m() + 2;
    assert!(dec.junctions.len() <= 2 * m + 2, "{name}: {} junctions", dec.junctions.len());
    kinds
}
