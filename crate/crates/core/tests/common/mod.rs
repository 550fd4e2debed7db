#![allow(dead_code)]

pub mod decomp;
pub mod harness;

use spw_core::corridors::Corridor;
use spw_core::domain::{parse_instance, Instance};
use spw_core::geom::Point;
use spw_core::triangulate::Triangulation;
use std::collections::BTreeMap;
use std::path::PathBuf;

pub const FIXTURES: [&str; 9] = [
    "free_space",
    "square_hole",
    "two_bars",
    "nonconvex",
    "comb",
    "pocket",
    "split",
    "split_restart",
    "l_room",
];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> Instance {
    parse_instance(&std::fs::read(fixture_path(name)).unwrap()).unwrap()
}

/// Boundary of the union of a corridor's core triangles, as one ring.
pub fn sleeve_ring(tri: &Triangulation, c: &Corridor) -> Vec<Point> {
    let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut directed = Vec::new();
    for &t in &c.triangles {
        let v = tri.triangles[t];
        for i in 0..3 {
            let (a, b) = (v[i], v[(i + 1) % 3]);
            *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            directed.push((a, b));
        }
    }
    let next: BTreeMap<usize, usize> = directed
        .into_iter()
        .filter(|&(a, b)| count[&(a.min(b), a.max(b))] == 1)
        .collect();
    let start = *next.keys().next().unwrap();
    let mut ring = vec![start];
    let mut v = next[&start];
    while v != start {
        ring.push(v);
        v = next[&v];
        assert!(ring.len() <= next.len(), "sleeve boundary is not a single ring");
    }
    ring.iter().map(|&v| tri.vertices[v]).collect()
}
