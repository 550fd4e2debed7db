//! Continuous Dijkstra over the useful part of the decomposition.
//!
//! [`window::Wavefront`] propagates exact windows and settles distances;
//! [`view::View`] follows it event by event and keeps the corridor-level
//! structures (bunches, hull trees, boundary cycles, gateways) in step.

pub mod assoc;
pub mod cycles;
pub mod iintersect;
pub mod trace;
pub mod view;
pub mod window;

use crate::corridors::build_decomposition;
use crate::domain::{Instance, PathResult};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::triangulate::triangulate;
use std::collections::BTreeMap;
pub use view::RewindMode;
use view::View;
use window::Wavefront;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EngineOptions {
    pub rewind: RewindMode,
    /// Trim windows only against windows entering the same triangle, which
    /// defers contact handling.
    pub lazy: bool,
    /// Keep one record per event in the result's trace.
    pub trace: bool,
    /// Append a dump of every hull tree to the trace.
    pub dump_trees: bool,
}

pub fn run(inst: &Instance) -> Result<PathResult> {
    run_with(inst, EngineOptions::default())
}

pub fn run_with(inst: &Instance, opts: EngineOptions) -> Result<PathResult> {
    if inst.s == inst.t {
        return Ok(PathResult {
            distance: 0.0,
            path: vec![inst.to_input_units(inst.s)],
            counters: BTreeMap::new(),
            trace: Vec::new(),
        });
    }
    let tri = triangulate(inst)?;
    let (s, t) = (tri.source.expect("s is a vertex"), tri.target.expect("t is a vertex"));
    let dec = build_decomposition(&tri)?;
    let mut wf = Wavefront::new(&tri, dec.useful_triangles(), opts.lazy);
    let mut view = View::new(&tri, &dec, opts.trace || opts.dump_trees, opts.rewind);
    let mut checkpoints: BTreeMap<usize, Wavefront> = BTreeMap::new();
    let mut monotone = true;
    let mut last = f64::NEG_INFINITY;
    wf.seed(s);
    while !wf.done[t] {
        if !wf.step() {
            break;
        }
        if wf.last_key < last {
            monotone = false;
        }
        last = wf.last_key;
        let sig = view.observe(&mut wf);
        for g in sig.checkpoints {
            checkpoints.insert(g, wf.clone());
        }
        for g in sig.replays {
            if let Some(cp) = checkpoints.remove(&g) {
                let same = replay(cp, &wf);
                *view.counters.entry("replays".into()).or_insert(0) += 1;
                if !same {
                    *view.counters.entry("replay_mismatches".into()).or_insert(0) += 1;
                }
            }
        }
    }
    if !wf.done[t] {
        return Err(Error::Disconnected);
    }
    view.finish();
    let mut trace: Vec<String> = view.events.iter().map(|e| e.to_line()).collect();
    if opts.dump_trees {
        trace.push(serde_json::json!({"trees": view.dump_trees()}).to_string());
    }
    let mut counters = view.counters;
    counters.insert("key_order_violations".into(), u64::from(!monotone));
    for (k, v) in [
        ("windows_created", wf.stats.windows_created),
        ("windows_processed", wf.stats.windows_processed),
        ("windows_trimmed", wf.stats.windows_trimmed),
        ("vertex_labels", wf.stats.vertex_labels),
        ("sources", wf.stats.sources),
        ("heap_pops", wf.stats.heap_pops),
        ("triangles", tri.triangles.len() as u64),
        ("junctions", dec.junctions.len() as u64),
        ("corridors", dec.corridors.len() as u64),
    ] {
        counters.insert(k.into(), v);
    }
    let path = wf.path_to(t);
    Ok(PathResult {
        distance: wf.dist[t] * inst.scale,
        path: path.iter().map(|&v| inst.to_input_units(tri.vertices[v])).collect(),
        counters,
        trace,
    })
}

/// Runs a checkpoint forward to the current radius and checks that every
/// vertex it settles got exactly the same distance.
fn replay(mut cp: Wavefront, now: &Wavefront) -> bool {
    cp.happenings.clear();
    while cp.last_key < now.last_key && cp.step() {
        cp.happenings.clear();
    }
    (0..cp.done.len()).all(|v| !cp.done[v] || !now.done[v] || cp.dist[v] == now.dist[v])
}

/// Every wavefront source (`s` and the reflex vertices the wavefront has
/// reached) with distance below `radius`, in working units.
pub fn sources_within(inst: &Instance, radius: f64) -> Result<Vec<(Point, f64)>> {
    let tri = triangulate(inst)?;
    let s = tri.source.expect("s is a vertex");
    let dec = build_decomposition(&tri)?;
    let mut wf = Wavefront::new(&tri, dec.useful_triangles(), false);
    wf.seed(s);
    while wf.last_key <= radius && wf.step() {
        wf.happenings.clear();
    }
    Ok((0..tri.vertices.len())
        .filter(|&v| wf.done[v] && wf.dist[v] < radius && (v == s || wf.is_source(v)))
        .map(|v| (tri.vertices[v], wf.dist[v]))
        .collect())
}
