//! Boundary cycles of the traversed region.
//!
//! The traversed region `R` is the union of the units the wavefront has
//! entered. Each boundary component of `R` is a cycle of elements: doors
//! (unblocked mesh edges leading to untraversed units) and walls (maximal runs
//! of blocked edges of one unit). Entering a unit along two or more frontier
//! doors splits a cycle; the piece away from `t` gets a gateway toward the
//! piece that keeps `t` (or the old gateway), forming the cycle tree.

use crate::corridors::{Decomposition, Unit};
use crate::geom::Point;
use crate::hull_trees::{BstLeaf, Element, HullTree};
use crate::triangulate::Triangulation;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Static boundary data shared by all cycle computations.
#[derive(Clone, Debug)]
pub struct Boundaries {
    pub useful_tri: Vec<bool>,
    /// Edge is a wall: constrained, or its far side is not useful.
    pub blocked: Vec<bool>,
    /// Wall run of each blocked edge bordering a useful triangle.
    pub wall_of: BTreeMap<usize, (usize, u32)>,
    /// Per unit index: boundary elements in order with their polylines.
    pub unit_elements: Vec<Vec<(Element, Vec<Point>)>>,
    /// Per unit index: neighbouring unit indices across unblocked edges.
    pub adj: Vec<BTreeSet<usize>>,
    pub t_units: BTreeSet<usize>,
    pub s_units: BTreeSet<usize>,
}

/// Directed boundary edge `a → b` of triangle `t` through mesh edge `e`.
#[derive(Clone, Copy, Debug)]
struct Half {
    a: usize,
    b: usize,
    e: usize,
    t: usize,
}

/// Boundary walks of the triangle set `inside` where `is_boundary(e, t)`
/// tells whether edge `e` of triangle `t` bounds the set. Each walk keeps the
/// set on its left; pinch vertices are resolved by rotating through the fan.
fn walks(tri: &Triangulation, inside: &[bool], is_boundary: impl Fn(usize, usize) -> bool) -> Vec<Vec<Half>> {
    let mut halves: Vec<Half> = Vec::new();
    for (t, tr) in tri.triangles.iter().enumerate() {
        if !inside[t] {
            continue;
        }
        for i in 0..3 {
            let e = tri.tri_edges[t][i];
            if is_boundary(e, t) {
                halves.push(Half {
                    a: tr[(i + 1) % 3],
                    b: tr[(i + 2) % 3],
                    e,
                    t,
                });
            }
        }
    }
    let index: BTreeMap<(usize, usize), usize> = halves.iter().enumerate().map(|(i, h)| ((h.e, h.t), i)).collect();
    let mut used = vec![false; halves.len()];
    let mut out = Vec::new();
    for start in 0..halves.len() {
        if used[start] {
            continue;
        }
        let mut walk = Vec::new();
        let mut cur = start;
        while !used[cur] {
            used[cur] = true;
            walk.push(halves[cur]);
            let Half { b, t, .. } = halves[cur];
            // Rotate around b from t until a boundary edge leaves b.
            let mut tt = t;
            cur = loop {
                let tr = tri.triangles[tt];
                let j = tr.iter().position(|&x| x == b).expect("b is a corner");
                let e = tri.tri_edges[tt][(j + 2) % 3];
                if let Some(&h) = index.get(&(e, tt)) {
                    break h;
                }
                tt = tri.edges[e].other_tri(tt).expect("interior edge has two sides");
            };
        }
        out.push(walk);
    }
    out
}

impl Boundaries {
    pub fn new(tri: &Triangulation, dec: &Decomposition) -> Boundaries {
        let useful_tri = dec.useful_triangles();
        let nu = dec.unit_count();
        let blocked: Vec<bool> = tri
            .edges
            .iter()
            .map(|e| match e.tris {
                [Some(a), Some(b)] => e.constrained || !useful_tri[a] || !useful_tri[b],
                _ => true,
            })
            .collect();
        let mut wall_of = BTreeMap::new();
        let mut unit_elements = vec![Vec::new(); nu];
        let mut adj = vec![BTreeSet::new(); nu];
        for (e, edge) in tri.edges.iter().enumerate() {
            if let [Some(a), Some(b)] = edge.tris {
                let (ua, ub) = (dec.unit_index(dec.unit_of[a]), dec.unit_index(dec.unit_of[b]));
                if !blocked[e] && ua != ub {
                    adj[ua].insert(ub);
                    adj[ub].insert(ua);
                }
            }
        }
        let units = (0..dec.junctions.len())
            .map(Unit::Junction)
            .chain((0..dec.corridors.len()).map(Unit::Corridor));
        for u in units {
            if !dec.is_useful(u) {
                continue;
            }
            let ui = dec.unit_index(u);
            let mut inside = vec![false; tri.triangles.len()];
            for t in dec.triangles_of(u) {
                inside[t] = true;
            }
            let mut run = 0u32;
            for walk in walks(tri, &inside, |e, t| {
                blocked[e] || tri.edges[e].other_tri(t).map(|o| !inside[o]).unwrap_or(true)
            }) {
                // Start just after a door so that no wall run wraps around.
                let n = walk.len();
                let first = (0..n).find(|&i| !blocked[walk[i].e]).map(|i| (i + 1) % n).unwrap_or(0);
                let mut cur: Option<(Element, Vec<Point>)> = None;
                for k in 0..n {
                    let h = walk[(first + k) % n];
                    let (pa, pb) = (tri.vertices[h.a], tri.vertices[h.b]);
                    if blocked[h.e] {
                        match &mut cur {
                            Some((Element::Wall(..), pts)) => pts.push(pb),
                            _ => {
                                if let Some(x) = cur.take() {
                                    unit_elements[ui].push(x);
                                }
                                cur = Some((Element::Wall(ui, run), vec![pa, pb]));
                                run += 1;
                            }
                        }
                        if let Some((Element::Wall(_, r), _)) = cur {
                            wall_of.insert(h.e, (ui, r));
                        }
                    } else {
                        if let Some(x) = cur.take() {
                            unit_elements[ui].push(x);
                        }
                        unit_elements[ui].push((Element::Door(h.e), vec![pa, pb]));
                    }
                }
                if let Some(x) = cur.take() {
                    unit_elements[ui].push(x);
                }
            }
        }
        let site_units = |v: Option<usize>| -> BTreeSet<usize> {
            v.map(|v| {
                tri.vertex_tris[v]
                    .iter()
                    .filter(|&&t| useful_tri[t])
                    .map(|&t| dec.unit_index(dec.unit_of[t]))
                    .collect()
            })
            .unwrap_or_default()
        };
        Boundaries {
            s_units: site_units(tri.source),
            t_units: site_units(tri.target),
            useful_tri,
            blocked,
            wall_of,
            unit_elements,
            adj,
        }
    }

    /// Boundary-section tree of one unit.
    pub fn bst(&self, unit_index: usize) -> HullTree<BstLeaf> {
        let leaves = self.unit_elements[unit_index]
            .iter()
            .enumerate()
            .map(|(i, (el, pts))| BstLeaf {
                element: *el,
                key: i as f64,
                pts: pts.clone(),
            })
            .collect();
        HullTree::from_leaves(leaves, 0.0).expect("keys are increasing")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Cycle {
    pub id: usize,
    pub elements: Vec<Element>,
    pub contains_t: bool,
    /// Has a door leading to an untraversed unit.
    pub live: bool,
    pub gateway: Option<usize>,
}

impl Cycle {
    pub fn doors(&self) -> impl Iterator<Item = usize> + '_ {
        self.elements.iter().filter_map(|e| match e {
            Element::Door(d) => Some(*d),
            Element::Wall(..) => None,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Gateway {
    pub id: usize,
    pub unit: usize,
    /// Doors of the gateway unit on the child cycle.
    pub edges: Vec<usize>,
    pub restart_time: f64,
    pub child: usize,
    pub parent: usize,
    pub restarted: bool,
    /// Root offset of the collected section once restarted.
    pub offset: f64,
    pub collected: Vec<usize>,
}

/// Regions as nodes, gateways as arcs toward the `t` region.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CycleTree {
    pub nodes: BTreeSet<usize>,
    /// `(child, parent, gateway)`.
    pub arcs: Vec<(usize, usize, usize)>,
}

impl CycleTree {
    /// Every node has at most one outgoing arc and following arcs never
    /// revisits a node.
    pub fn is_forest(&self) -> bool {
        let mut out: BTreeMap<usize, usize> = BTreeMap::new();
        for &(c, p, _) in &self.arcs {
            if out.insert(c, p).is_some() {
                return false;
            }
        }
        out.keys().all(|&start| {
            let mut seen = BTreeSet::new();
            let mut x = start;
            while let Some(&p) = out.get(&x) {
                if !seen.insert(x) {
                    return false;
                }
                x = p;
            }
            true
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct EnterOutcome {
    pub new_gateways: Vec<usize>,
    pub exhausted: Vec<usize>,
    pub degenerate: usize,
}

#[derive(Clone, Debug)]
pub struct CycleState {
    pub entered: Vec<bool>,
    pub in_r: Vec<bool>,
    pub cycles: Vec<Cycle>,
    pub gateways: Vec<Gateway>,
    pub tree: CycleTree,
    next_id: usize,
}

impl CycleState {
    /// Starts from the units around `s`.
    pub fn new(tri: &Triangulation, dec: &Decomposition, b: &Boundaries) -> CycleState {
        let mut st = CycleState {
            entered: vec![false; dec.unit_count()],
            in_r: vec![false; tri.triangles.len()],
            cycles: Vec::new(),
            gateways: Vec::new(),
            tree: CycleTree::default(),
            next_id: 0,
        };
        for &u in &b.s_units {
            st.mark(dec, u);
        }
        let cycles = st.compute(tri, dec, b);
        for mut c in cycles {
            c.id = st.fresh();
            st.tree.nodes.insert(c.id);
            st.cycles.push(c);
        }
        st
    }

    fn fresh(&mut self) -> usize {
        self.next_id += 1;
        self.next_id - 1
    }

    fn mark(&mut self, dec: &Decomposition, ui: usize) {
        self.entered[ui] = true;
        let unit = unit_from_index(dec, ui);
        for t in dec.triangles_of(unit) {
            self.in_r[t] = true;
        }
    }

    fn compute(&self, tri: &Triangulation, dec: &Decomposition, b: &Boundaries) -> Vec<Cycle> {
        let in_r = &self.in_r;
        let mut out = Vec::new();
        for walk in walks(tri, in_r, |e, t| {
            b.blocked[e] || tri.edges[e].other_tri(t).map(|o| !in_r[o]).unwrap_or(true)
        }) {
            let mut els: Vec<Element> = Vec::new();
            for h in &walk {
                let el = if b.blocked[h.e] {
                    let (u, r) = b.wall_of[&h.e];
                    Element::Wall(u, r)
                } else {
                    Element::Door(h.e)
                };
                if els.last() != Some(&el) {
                    els.push(el);
                }
            }
            if els.len() > 1 && els.first() == els.last() {
                els.pop();
            }
            let (contains_t, live) = self.reach(tri, dec, b, &els);
            out.push(Cycle {
                id: usize::MAX,
                elements: els,
                contains_t,
                live,
                gateway: None,
            });
        }
        out
    }

    /// Flood from the cycle's doors through untraversed units.
    fn reach(&self, tri: &Triangulation, dec: &Decomposition, b: &Boundaries, els: &[Element]) -> (bool, bool) {
        let mut seen = BTreeSet::new();
        let mut q = VecDeque::new();
        for el in els {
            if let Element::Door(e) = el {
                for t in tri.edges[*e].tris.iter().flatten() {
                    let u = dec.unit_index(dec.unit_of[*t]);
                    if !self.entered[u] && seen.insert(u) {
                        q.push_back(u);
                    }
                }
            }
        }
        let live = !seen.is_empty();
        while let Some(u) = q.pop_front() {
            if b.t_units.contains(&u) {
                return (true, live);
            }
            for &v in &b.adj[u] {
                if !self.entered[v] && seen.insert(v) {
                    q.push_back(v);
                }
            }
        }
        (false, live)
    }

    pub fn live_count(&self) -> usize {
        self.cycles.iter().filter(|c| c.live).count()
    }

    /// Enters unit `ui` at radius `d`.
    pub fn enter(&mut self, tri: &Triangulation, dec: &Decomposition, b: &Boundaries, ui: usize, d: f64) -> EnterOutcome {
        let mut out = EnterOutcome::default();
        if self.entered[ui] {
            return out;
        }
        let unit_doors: BTreeSet<usize> = b.unit_elements[ui]
            .iter()
            .filter_map(|(e, _)| match e {
                Element::Door(x) => Some(*x),
                Element::Wall(..) => None,
            })
            .collect();
        self.mark(dec, ui);
        let old = std::mem::take(&mut self.cycles);
        let mut fresh = self.compute(tri, dec, b);
        let doors_of = |c: &Cycle| c.doors().collect::<BTreeSet<usize>>();
        let overlap = |a: &Cycle, b: &Cycle| a.elements.iter().filter(|e| b.elements.contains(e)).count();

        // Each old cycle passes its id to the best-overlapping new piece.
        let mut taken = vec![false; fresh.len()];
        let mut heirs: Vec<(usize, Option<usize>)> = Vec::new();
        for (oi, o) in old.iter().enumerate() {
            let mut best: Option<(usize, usize)> = None;
            for (ni, n) in fresh.iter().enumerate() {
                if taken[ni] {
                    continue;
                }
                let k = overlap(o, n);
                // Prefer the piece that keeps t, then the one holding the
                // old gateway's unit doors, then the largest overlap.
                let pref = if o.contains_t && n.contains_t {
                    usize::MAX
                } else if let Some(g) = o.gateway {
                    if doors_of(n).intersection(&self.gateways[g].edges.iter().copied().collect()).next().is_some() {
                        usize::MAX - 1
                    } else {
                        k
                    }
                } else {
                    k
                };
                if k > 0 && best.map(|(_, p)| pref > p).unwrap_or(true) {
                    best = Some((ni, pref));
                }
            }
            if let Some((ni, _)) = best {
                taken[ni] = true;
                fresh[ni].id = o.id;
                fresh[ni].gateway = o.gateway;
                // Once t's unit is traversed the heir still faces t.
                fresh[ni].contains_t |= o.contains_t;
            }
            heirs.push((oi, best.map(|b| b.0)));
        }

        // Unclaimed pieces are new cycles split off some old cycle.
        for ni in 0..fresh.len() {
            if taken[ni] {
                continue;
            }
            let id = self.fresh();
            fresh[ni].id = id;
            self.tree.nodes.insert(id);
            if !fresh[ni].live {
                out.degenerate += 1;
                continue;
            }
            if fresh[ni].contains_t {
                continue;
            }
            // The heir of the cycle this piece split from carries that
            // cycle's id, and with it the way toward t.
            let parent = old
                .iter()
                .filter(|o| overlap(o, &fresh[ni]) > 0)
                .max_by_key(|o| (overlap(o, &fresh[ni]), std::cmp::Reverse(o.id)))
                .map(|o| o.id);
            let Some(parent) = parent else { continue };
            let gid = self.gateways.len();
            let edges: Vec<usize> = doors_of(&fresh[ni]).intersection(&unit_doors).copied().collect();
            self.gateways.push(Gateway {
                id: gid,
                unit: ui,
                edges,
                restart_time: d,
                child: id,
                parent,
                restarted: false,
                offset: 0.0,
                collected: Vec::new(),
            });
            self.tree.arcs.push((id, parent, gid));
            fresh[ni].gateway = Some(gid);
            out.new_gateways.push(gid);
        }

        // A cycle that had untraversed space behind it and now has none is
        // exhausted; its gateway restarts the wavefront toward the parent.
        for (oi, heir) in heirs {
            let o = &old[oi];
            let still_live = heir.map(|ni| fresh[ni].live).unwrap_or(false);
            if o.live && !still_live {
                if let Some(g) = o.gateway {
                    if !self.gateways[g].restarted {
                        out.exhausted.push(g);
                    }
                }
            }
        }
        self.cycles = fresh;
        out
    }

    /// Every live cycle either contains `t` or has an outgoing gateway, not
    /// both.
    pub fn orientation_ok(&self) -> bool {
        self.cycles
            .iter()
            .filter(|c| c.live)
            .all(|c| c.contains_t != c.gateway.is_some())
    }
}

pub fn unit_from_index(dec: &Decomposition, i: usize) -> Unit {
    let (j, c) = (dec.junctions.len(), dec.corridors.len());
    if i < j {
        Unit::Junction(i)
    } else if i < j + c {
        Unit::Corridor(i - j)
    } else if i == j + c {
        Unit::S
    } else {
        Unit::T
    }
}
