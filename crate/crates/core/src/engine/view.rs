//! Event-level view of a wavefront run.
//!
//! The window engine settles distances; this layer replays what it does in
//! terms of the corridor structure: door strikes (Types I and II), tangent
//! strikes on corridor chains (Type III), first contact between bunches
//! (Type IV), the bunch hull trees, boundary cycles with their splits and
//! gateways, and section merges. Every structure it keeps is checked against
//! the engine as it goes; disagreements are counted, never silently fixed.

use super::assoc::{merge, Assoc, AssocStats, SBunch, Section};
use super::cycles::{Boundaries, CycleState, EnterOutcome};
use super::trace::{EventRecord, EventType};
use super::window::{Happening, Wavefront};
use crate::corridors::{CorridorKind, Decomposition, Unit};
use crate::geom::{Point, WeightedSite, EPS_GEOM};
use crate::hull_trees::bht::{classify, resplit};
use crate::hull_trees::{bst_min_dist, wst_min_dist, Bht, BstLeaf, HullTree, QueryStats, Strike, Wst, WstLeaf};
use crate::triangulate::Triangulation;
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RewindMode {
    /// Collected sections re-enter with a negative root offset.
    #[default]
    Offset,
    /// Re-run the engine from a checkpoint taken at the split.
    Replay,
}

/// A convex chain of a useful corridor, in both directions.
#[derive(Clone, Debug)]
struct Chain {
    verts: Vec<(usize, Point)>,
}

/// What the run loop must do after an observation.
#[derive(Clone, Debug, Default)]
pub struct Signals {
    pub checkpoints: Vec<usize>,
    pub replays: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct View<'a> {
    tri: &'a Triangulation,
    dec: &'a Decomposition,
    pub bnd: Boundaries,
    pub cycles: CycleState,
    pub wst: Wst,
    bsts: BTreeMap<usize, HullTree<BstLeaf>>,
    chains: Vec<Chain>,
    chain_at: BTreeMap<usize, Vec<(usize, usize)>>,
    /// Live BHTs per `(chain, direction)`, keyed by a running id.
    bhts: BTreeMap<(usize, bool), Vec<(usize, Bht)>>,
    next_bht: usize,
    door_seen: BTreeSet<(usize, usize)>,
    bunch_unit_seen: BTreeSet<(usize, usize)>,
    contacts: BTreeSet<(usize, usize)>,
    neighbours: BTreeSet<(usize, usize)>,
    struck: BTreeMap<usize, BTreeSet<usize>>,
    unit_struck_by: BTreeMap<usize, BTreeSet<usize>>,
    apex_due: BTreeMap<usize, f64>,
    pub counters: BTreeMap<String, u64>,
    pub events: Vec<EventRecord>,
    pub record: bool,
    pub rewind: RewindMode,
    query: QueryStats,
    assoc: AssocStats,
    seq: u64,
}

fn key(s: &str) -> String {
    s.to_string()
}

impl<'a> View<'a> {
    pub fn new(tri: &'a Triangulation, dec: &'a Decomposition, record: bool, rewind: RewindMode) -> View<'a> {
        let bnd = Boundaries::new(tri, dec);
        let cycles = CycleState::new(tri, dec, &bnd);
        let mut chains = Vec::new();
        let mut chain_at: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        let mut apex_due = BTreeMap::new();
        for (ci, c) in dec.corridors.iter().enumerate() {
            if !dec.is_useful(Unit::Corridor(ci)) {
                continue;
            }
            for ch in &c.hourglass.chains {
                if ch.len() < 2 {
                    continue;
                }
                let id = chains.len();
                for (pos, &v) in ch.iter().enumerate() {
                    chain_at.entry(v).or_default().push((id, pos));
                }
                chains.push(Chain {
                    verts: ch.iter().map(|&v| (v, tri.vertices[v])).collect(),
                });
            }
            if c.hourglass.kind == CorridorKind::Closed {
                if let (Some(ad), [f1, f2]) = (c.hourglass.apex_distance, c.hourglass.funnels.as_slice()) {
                    apex_due.insert(f1.apex, ad);
                    apex_due.insert(f2.apex, ad);
                }
            }
        }
        let mut v = View {
            tri,
            dec,
            bnd,
            cycles,
            wst: Wst::new(),
            bsts: BTreeMap::new(),
            chains,
            chain_at,
            bhts: BTreeMap::new(),
            next_bht: 0,
            door_seen: BTreeSet::new(),
            bunch_unit_seen: BTreeSet::new(),
            contacts: BTreeSet::new(),
            neighbours: BTreeSet::new(),
            struck: BTreeMap::new(),
            unit_struck_by: BTreeMap::new(),
            apex_due,
            counters: BTreeMap::new(),
            events: Vec::new(),
            record,
            rewind,
            query: QueryStats::default(),
            assoc: AssocStats::default(),
            seq: 0,
        };
        for k in [
            "type1", "type2", "type3", "type4", "splits", "restarts", "merges", "gateways", "bunches_created",
            "bunch_peak", "bunch_deletions", "sweeps",
        ] {
            v.counters.insert(key(k), 0);
        }
        v.counters.insert(key("cycles"), v.cycles.cycles.len() as u64);
        v
    }

    fn bump(&mut self, k: &str, by: u64) {
        *self.counters.entry(key(k)).or_insert(0) += by;
    }

    fn emit(&mut self, d: f64, kind: EventType, payload: serde_json::Value) {
        self.bump(kind.name(), 1);
        self.seq += 1;
        if self.record {
            let snapshot = ["type1", "type2", "type3", "type4"]
                .iter()
                .map(|k| (key(k), self.counters[*k]))
                .collect();
            self.events.push(EventRecord {
                seq: self.seq,
                d,
                kind,
                payload,
                counters: snapshot,
            });
        }
    }

    fn unit_index_of_tri(&self, t: usize) -> usize {
        self.dec.unit_index(self.dec.unit_of[t])
    }

    /// Handles every happening the engine produced since the last call.
    pub fn observe(&mut self, wf: &mut Wavefront) -> Signals {
        let hs = std::mem::take(&mut wf.happenings);
        let mut sig = Signals::default();
        for h in hs {
            match h {
                Happening::WindowProcessed { id } => self.on_window(wf, id, &mut sig),
                Happening::VertexFinal { v } => self.on_vertex(wf, v),
                Happening::SourceEmitted { v } => self.on_source(wf, v),
                Happening::Contact { a, b, d } => self.on_contact(wf, a, b, d),
                Happening::BunchEmptied { bunch } => self.on_bunch_emptied(wf, bunch),
            }
        }
        sig
    }

    fn on_window(&mut self, wf: &Wavefront, id: usize, sig: &mut Signals) {
        let win = &wf.windows[id];
        let (e, into, d, bunch) = (win.edge, win.into, win.key, win.bunch);
        let ui = self.unit_index_of_tri(into);
        let from = self.tri.edges[e].other_tri(into).map(|t| self.unit_index_of_tri(t));
        if from == Some(ui) {
            self.bump("sweeps", 1);
            return;
        }
        self.struck.entry(e).or_default().insert(bunch);
        self.unit_struck_by.entry(ui).or_default().insert(bunch);
        if self.bunch_unit_seen.insert((bunch, ui)) {
            self.check_bst(ui, bunch, d);
        }
        if !self.door_seen.insert((e, ui)) {
            return;
        }
        let kind = match self.dec.unit_of[into] {
            Unit::Junction(_) => EventType::I,
            _ => EventType::II,
        };
        self.emit(d, kind, json!({"edge": e, "unit": ui, "bunch": bunch}));
        let out = self.cycles.enter(self.tri, self.dec, &self.bnd, ui, d);
        self.after_enter(bunch, ui, d, out, sig);
    }

    fn after_enter(&mut self, bunch: usize, ui: usize, d: f64, out: EnterOutcome, sig: &mut Signals) {
        self.bump("degenerate_cycles", out.degenerate as u64);
        self.counters.insert(key("cycles"), self.cycles.cycles.len() as u64);
        if !self.cycles.orientation_ok() {
            self.bump("orientation_violations", 1);
        }
        if !self.cycles.tree.is_forest() {
            self.bump("cycle_tree_violations", 1);
        }
        for g in out.new_gateways {
            self.bump("gateways", 1);
            let child = self.cycles.gateways[g].child;
            self.emit(d, EventType::Split, json!({"unit": ui, "gateway": g, "child": child}));
            self.merge_at(ui, bunch);
            if self.rewind == RewindMode::Replay {
                sig.checkpoints.push(g);
            }
        }
        for g in out.exhausted {
            self.restart(g, d, sig);
        }
        self.wst.advance(d);
        if self.wst.tree.is_dirty() {
            self.wst.tree.refresh();
            self.bump("wst_refreshes", 1);
        }
    }

    fn section_of(&self, bunches: &BTreeSet<usize>) -> Section {
        self.wst
            .tree
            .leaves()
            .iter()
            .filter(|l| bunches.contains(&(l.bunch as usize)))
            .map(|l| SBunch {
                id: l.bunch as usize,
                sites: l.sites.clone(),
            })
            .collect()
    }

    /// A boundary split at unit `ui`: the bunch that just entered meets the
    /// bunches that struck the unit before.
    fn merge_at(&mut self, ui: usize, bunch: usize) {
        let by = self.unit_struck_by.get(&ui).cloned().unwrap_or_default();
        let (a_ids, b_ids): (BTreeSet<usize>, BTreeSet<usize>) = by.iter().partition(|&&b| b == bunch);
        let a = self.section_of(&a_ids);
        let b = self.section_of(&b_ids);
        let elements: Vec<Vec<Point>> = self.bnd.unit_elements[ui].iter().map(|(_, p)| p.clone()).collect();
        let mut asg = Assoc::new(elements.len());
        for (j, pts) in elements.iter().enumerate() {
            let best = a
                .iter()
                .enumerate()
                .map(|(i, s)| (i, s.strike(pts)))
                .min_by(|x, y| x.1.total_cmp(&y.1));
            asg.owner[j] = best.map(|(i, _)| (super::assoc::Side::A, i));
        }
        merge(&a, &b, &elements, &mut asg, &mut self.assoc);
        self.bump("merges", 1);
    }

    fn restart(&mut self, g: usize, d: f64, sig: &mut Signals) {
        let gw = &self.cycles.gateways[g];
        let mut collected: BTreeSet<usize> = BTreeSet::new();
        for e in &gw.edges {
            if let Some(s) = self.struck.get(e) {
                collected.extend(s);
            }
        }
        let offset = gw.restart_time - d;
        let unit = gw.unit;
        self.emit(d, EventType::Restart, json!({"gateway": g, "restart_time": gw.restart_time, "offset": offset, "bunches": collected.len()}));
        match self.rewind {
            RewindMode::Offset => {
                let mut b = Wst::new();
                b.offset = offset;
                for l in self.wst.tree.leaves() {
                    if collected.contains(&(l.bunch as usize)) {
                        let _ = b.insert(l.clone());
                    }
                }
                b.advance(d);
                if !b.is_live(d) {
                    self.bump("offset_violations", 1);
                }
                let gw = &mut self.cycles.gateways[g];
                gw.offset = offset;
                gw.collected = collected.iter().copied().collect();
                let a_ids: BTreeSet<usize> = self
                    .unit_struck_by
                    .get(&unit)
                    .map(|s| s.difference(&collected).copied().collect())
                    .unwrap_or_default();
                let a = self.section_of(&a_ids);
                let bsec = self.section_of(&collected);
                let elements: Vec<Vec<Point>> = self.bnd.unit_elements[unit].iter().map(|(_, p)| p.clone()).collect();
                let mut asg = Assoc::new(elements.len());
                merge(&a, &bsec, &elements, &mut asg, &mut self.assoc);
                self.bump("merges", 1);
            }
            RewindMode::Replay => sig.replays.push(g),
        }
        self.cycles.gateways[g].restarted = true;
    }

    /// A bunch strikes unit `ui` for the first time: the BST query over the
    /// unit's boundary must find a strike no later than the engine's window.
    fn check_bst(&mut self, ui: usize, bunch: usize, d: f64) {
        let Some(pos) = self.wst.position_of(bunch as u32) else { return };
        let sites: Vec<WeightedSite> = self.wst.tree.get(pos).unwrap().sites.iter().filter(|s| s.weight <= d).copied().collect();
        if sites.is_empty() {
            return;
        }
        self.bump("bst_queries", 1);
        let bnd = &self.bnd;
        let bst = self.bsts.entry(ui).or_insert_with(|| bnd.bst(ui));
        if let Some(h) = bst_min_dist(bst, &sites, d, &mut self.query) {
            if h.radius > d + EPS_GEOM * (1.0 + d) {
                self.bump("bst_violations", 1);
            }
        }
    }

    fn on_vertex(&mut self, wf: &Wavefront, v: usize) {
        let d = wf.dist[v];
        if let Some(ad) = self.apex_due.get(&v).copied() {
            // The other apex of the same closed corridor is due no later than
            // d + apex_distance.
            for c in &self.dec.corridors {
                if let [f1, f2] = c.hourglass.funnels.as_slice() {
                    let other = if f1.apex == v { Some(f2.apex) } else if f2.apex == v { Some(f1.apex) } else { None };
                    if let Some(o) = other {
                        if o != v && wf.done[o] && d > wf.dist[o] + ad + EPS_GEOM * (1.0 + d) {
                            self.bump("apex_violations", 1);
                        }
                    }
                }
            }
        }
        if Some(v) == self.tri.source || !wf.is_source(v) {
            return;
        }
        let Some(places) = self.chain_at.get(&v).cloned() else { return };
        let p = wf.pred[v];
        let pb = wf.bunch_of.get(p).copied().unwrap_or(usize::MAX);
        // The bunch of the predecessor reaches v exactly at d.
        self.wst.advance(d);
        if self.wst.position_of(pb as u32).is_some() {
            self.bump("wst_queries", 1);
            let hit = wst_min_dist(&self.wst, &[self.tri.vertices[v]], d, &mut self.query);
            if hit.map(|h| h.radius > d + EPS_GEOM * (1.0 + d)).unwrap_or(true) {
                self.bump("wst_violations", 1);
            }
        }
        for (ci, pos) in places {
            let verts = &self.chains[ci].verts;
            let n = verts.len();
            if (pos > 0 && verts[pos - 1].0 == p) || (pos + 1 < n && verts[pos + 1].0 == p) {
                self.bump("type3_telescoped", 1);
                continue;
            }
            // Propagate along the chain away from the predecessor.
            let pp = self.tri.vertices[p];
            let here = verts[pos].1;
            let ahead = |q: Point| (q - here).dot(here - pp);
            let fwd = match (pos + 1 < n, pos > 0) {
                (true, true) => ahead(verts[pos + 1].1) >= ahead(verts[pos - 1].1),
                (f, _) => f,
            };
            let dir_verts: Vec<(usize, Point)> = if fwd { verts.clone() } else { verts.iter().rev().copied().collect() };
            let z = if fwd { pos } else { n - 1 - pos };
            self.tangent_strike(ci, fwd, &dir_verts, z, d, v);
        }
    }

    fn tangent_strike(&mut self, ci: usize, fwd: bool, verts: &[(usize, Point)], z: usize, d: f64, v: usize) {
        let list = self.bhts.entry((ci, fwd)).or_default();
        let case = classify(list.iter().map(|(id, b)| (*id, b)), z, d);
        let (label, n) = match case {
            Strike::Build => {
                let b = Bht::build(ci, verts, z, d).expect("z is on the chain");
                list.push((self.next_bht, b));
                self.next_bht += 1;
                ("case1", 1)
            }
            Strike::Downstream(_) => ("case2", 2),
            Strike::Covered(_) => ("case3", 3),
            Strike::Resplit(id) => {
                let i = list.iter().position(|(x, _)| *x == id).unwrap();
                let before = list[i].1.len();
                let right = resplit(&mut list[i].1, z, d).expect("covered index");
                let prefix = list[i].1.len();
                list.remove(i);
                if prefix + right.len() != before {
                    self.bump("bht_violations", 1);
                }
                let list = self.bhts.get_mut(&(ci, fwd)).unwrap();
                list.push((self.next_bht, right));
                self.next_bht += 1;
                ("case4", 4)
            }
        };
        self.bump(&format!("type3_{label}"), 1);
        self.emit(d, EventType::III, json!({"vertex": v, "chain": ci, "forward": fwd, "index": z, "case": n}));
    }

    fn on_source(&mut self, wf: &Wavefront, v: usize) {
        let b = wf.bunch_of[v];
        let site = WeightedSite::new(self.tri.vertices[v], wf.dist[v]);
        match self.wst.position_of(b as u32) {
            Some(i) => {
                // Telescoping nests the new disk in the bunch's hull.
                let _ = self.wst.tree.shrink_leaf(i, |l| l.sites.push(site));
            }
            None => {
                let _ = self.wst.insert(WstLeaf {
                    bunch: b as u32,
                    key: b as f64,
                    sites: vec![site],
                });
                self.bump("bunches_created", 1);
                let live = self.wst.tree.len() as u64;
                if live > self.counters["bunch_peak"] {
                    self.counters.insert(key("bunch_peak"), live);
                }
            }
        }
    }

    fn on_contact(&mut self, wf: &Wavefront, a: usize, b: usize, d: f64) {
        let (ba, bb) = (wf.windows[a].bunch, wf.windows[b].bunch);
        if ba == bb {
            return;
        }
        // Overlap while heading the same way is the I-curve between
        // neighbouring bunches; only fronts crossing in opposite directions
        // collide.
        if wf.windows[a].into == wf.windows[b].into {
            if self.neighbours.insert((ba.min(bb), ba.max(bb))) {
                self.bump("neighbour_contacts", 1);
            }
            return;
        }
        if !self.contacts.insert((ba.min(bb), ba.max(bb))) {
            return;
        }
        let at = wf.last_key;
        self.emit(at, EventType::IV, json!({"bunches": [ba.min(bb), ba.max(bb)], "radius": d}));
    }

    fn on_bunch_emptied(&mut self, _wf: &Wavefront, bunch: usize) {
        if let Ok(Some(_)) = self.wst.remove(bunch as u32) {
            self.bump("bunch_deletions", 1);
        }
    }

    /// Current state of every hull tree the view keeps.
    pub fn dump_trees(&self) -> serde_json::Value {
        let bhts: Vec<serde_json::Value> = self
            .bhts
            .iter()
            .flat_map(|(&(chain, fwd), v)| {
                v.iter().map(move |(id, b)| {
                    json!({
                        "id": id,
                        "chain": chain,
                        "forward": fwd,
                        "shortestdist": b.shortestdist,
                        "tangentstart": b.tangentstart,
                        "split_flag": b.split_flag,
                        "base_offset": b.base_offset,
                        "tree": b.tree.dump(),
                    })
                })
            })
            .collect();
        let bsts: BTreeMap<String, serde_json::Value> = self.bsts.iter().map(|(u, t)| (u.to_string(), t.dump())).collect();
        json!({
            "wst": {"offset": self.wst.offset, "tree": self.wst.tree.dump()},
            "bhts": bhts,
            "bsts": bsts,
        })
    }

    /// Folds query, association and tree statistics into the counters.
    pub fn finish(&mut self) {
        let q = self.query;
        let a = self.assoc;
        self.bump("hull_splits", q.splits);
        self.bump("hull_resplits", q.resplits);
        self.bump("assoc_calls", a.calls);
        self.bump("assoc_reassigned", a.reassigned);
        self.bump("assoc_fallbacks", a.fallbacks);
        self.bump("assoc_shared", a.shared);
        self.bump("wst_touched", self.wst.tree.touched);
        self.counters.insert(key("cycle_tree_nodes"), self.cycles.tree.nodes.len() as u64);
    }
}
