//! Leaf-oriented AVL tree whose internal nodes cache the hull of their
//! subtree and the bridges found when merging the two child hulls.
//!
//! Join and split follow the usual height-difference recursion, so every
//! operation recomputes O(log n) nodes; `touched` counts those recomputations.

use crate::error::{Error, Result};
use crate::geom::envelope::{merge, Envelope, Transition};
use std::cell::Cell;

pub trait HullLeaf: Clone {
    /// Ordering key; leaves are kept sorted by it.
    fn key(&self) -> f64;
    /// Hull of the leaf's content at radius `d`.
    fn envelope(&self, d: f64) -> Envelope;
    /// Value aggregated as max/min over subtrees.
    fn value(&self) -> f64 {
        0.0
    }
}

#[derive(Clone, Debug)]
pub struct Cache {
    pub env: Envelope,
    pub bridges: Vec<Transition>,
    /// The cached hull was built from content that has since shrunk.
    pub dirty: bool,
    pub height: u32,
    pub size: usize,
    pub min_key: f64,
    pub max_key: f64,
    pub vmax: f64,
    pub vmin: f64,
    /// Set once a query has descended through this node's bridge.
    pub split_seen: Cell<bool>,
}

#[derive(Clone, Debug)]
pub enum Node<L> {
    Leaf { leaf: L, c: Cache },
    Inner { l: Box<Node<L>>, r: Box<Node<L>>, c: Cache },
}

impl<L: HullLeaf> Node<L> {
    pub fn cache(&self) -> &Cache {
        match self {
            Node::Leaf { c, .. } | Node::Inner { c, .. } => c,
        }
    }

    fn height(&self) -> u32 {
        self.cache().height
    }

    pub fn size(&self) -> usize {
        self.cache().size
    }
}

fn leaf_node<L: HullLeaf>(leaf: L, d: f64, touched: &mut u64) -> Box<Node<L>> {
    *touched += 1;
    let env = leaf.envelope(d);
    let (k, v) = (leaf.key(), leaf.value());
    Box::new(Node::Leaf {
        leaf,
        c: Cache {
            env,
            bridges: Vec::new(),
            dirty: false,
            height: 1,
            size: 1,
            min_key: k,
            max_key: k,
            vmax: v,
            vmin: v,
            split_seen: Cell::new(false),
        },
    })
}

fn inner_node<L: HullLeaf>(l: Box<Node<L>>, r: Box<Node<L>>, touched: &mut u64) -> Box<Node<L>> {
    *touched += 1;
    let (a, b) = (l.cache(), r.cache());
    let (env, bridges) = merge(&a.env, &b.env);
    let c = Cache {
        env,
        bridges,
        dirty: a.dirty || b.dirty,
        height: 1 + a.height.max(b.height),
        size: a.size + b.size,
        min_key: a.min_key,
        max_key: b.max_key,
        vmax: a.vmax.max(b.vmax),
        vmin: a.vmin.min(b.vmin),
        split_seen: Cell::new(false),
    };
    Box::new(Node::Inner { l, r, c })
}

fn children<L>(n: Box<Node<L>>) -> (Box<Node<L>>, Box<Node<L>>) {
    match *n {
        Node::Inner { l, r, .. } => (l, r),
        Node::Leaf { .. } => unreachable!("leaf has no children"),
    }
}

/// Node over `l` and `r` whose heights differ by at most 2, rotated back
/// into balance.
fn balance<L: HullLeaf>(l: Box<Node<L>>, r: Box<Node<L>>, t: &mut u64) -> Box<Node<L>> {
    let (hl, hr) = (l.height(), r.height());
    if hl > hr + 1 {
        let (ll, lr) = children(l);
        if ll.height() >= lr.height() {
            let r = inner_node(lr, r, t);
            inner_node(ll, r, t)
        } else {
            let (lrl, lrr) = children(lr);
            let a = inner_node(ll, lrl, t);
            let b = inner_node(lrr, r, t);
            inner_node(a, b, t)
        }
    } else if hr > hl + 1 {
        let (rl, rr) = children(r);
        if rr.height() >= rl.height() {
            let l = inner_node(l, rl, t);
            inner_node(l, rr, t)
        } else {
            let (rll, rlr) = children(rl);
            let a = inner_node(l, rll, t);
            let b = inner_node(rlr, rr, t);
            inner_node(a, b, t)
        }
    } else {
        inner_node(l, r, t)
    }
}

/// Concatenates two trees, every key of `a` preceding every key of `b`.
fn join<L: HullLeaf>(a: Box<Node<L>>, b: Box<Node<L>>, t: &mut u64) -> Box<Node<L>> {
    let (ha, hb) = (a.height(), b.height());
    if ha > hb + 1 {
        let (l, r) = children(a);
        let r = join(r, b, t);
        balance(l, r, t)
    } else if hb > ha + 1 {
        let (l, r) = children(b);
        let l = join(a, l, t);
        balance(l, r, t)
    } else {
        inner_node(a, b, t)
    }
}

fn join_opt<L: HullLeaf>(a: Option<Box<Node<L>>>, b: Option<Box<Node<L>>>, t: &mut u64) -> Option<Box<Node<L>>> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(join(a, b, t)),
    }
}

/// First `k` leaves and the rest.
type Halves<L> = (Option<Box<Node<L>>>, Option<Box<Node<L>>>);

fn split<L: HullLeaf>(n: Box<Node<L>>, k: usize, t: &mut u64) -> Halves<L> {
    if k == 0 {
        return (None, Some(n));
    }
    if k >= n.size() {
        return (Some(n), None);
    }
    let (l, r) = children(n);
    let ls = l.size();
    if k <= ls {
        let (a, b) = split(l, k, t);
        (a, join_opt(b, Some(r), t))
    } else {
        let (a, b) = split(r, k - ls, t);
        (join_opt(Some(l), a, t), b)
    }
}

fn refresh<L: HullLeaf>(n: Box<Node<L>>, d: f64, t: &mut u64) -> Box<Node<L>> {
    if !n.cache().dirty {
        return n;
    }
    match *n {
        Node::Leaf { leaf, .. } => leaf_node(leaf, d, t),
        Node::Inner { l, r, .. } => {
            let l = refresh(l, d, t);
            let r = refresh(r, d, t);
            inner_node(l, r, t)
        }
    }
}

#[derive(Clone, Debug)]
pub struct HullTree<L> {
    pub root: Option<Box<Node<L>>>,
    /// Current radius; new and refreshed hulls are evaluated here.
    pub d: f64,
    /// Node recomputations since creation.
    pub touched: u64,
}

impl<L: HullLeaf> Default for HullTree<L> {
    fn default() -> Self {
        Self::new()
    }
}

impl<L: HullLeaf> HullTree<L> {
    pub fn new() -> Self {
        HullTree {
            root: None,
            d: 0.0,
            touched: 0,
        }
    }

    pub fn from_leaves(leaves: Vec<L>, d: f64) -> Result<Self> {
        let mut t = HullTree { root: None, d, touched: 0 };
        for l in leaves {
            t.push_back(l)?;
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.root.as_ref().map(|r| r.size()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn height(&self) -> u32 {
        self.root.as_ref().map(|r| r.height()).unwrap_or(0)
    }

    pub fn is_dirty(&self) -> bool {
        self.root.as_ref().map(|r| r.cache().dirty).unwrap_or(false)
    }

    /// Stored root hull evaluated at the current radius.
    pub fn hull(&self) -> Envelope {
        match &self.root {
            Some(r) => r.cache().env.shifted(self.d),
            None => Envelope::empty(self.d, 0.0),
        }
    }

    pub fn advance(&mut self, d: f64) {
        self.d = d;
    }

    pub fn leaves(&self) -> Vec<&L> {
        let mut out = Vec::with_capacity(self.len());
        fn walk<'a, L>(n: &'a Node<L>, out: &mut Vec<&'a L>) {
            match n {
                Node::Leaf { leaf, .. } => out.push(leaf),
                Node::Inner { l, r, .. } => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        if let Some(r) = &self.root {
            walk(r, &mut out);
        }
        out
    }

    pub fn get(&self, mut i: usize) -> Option<&L> {
        let mut n = self.root.as_deref()?;
        if i >= n.size() {
            return None;
        }
        loop {
            match n {
                Node::Leaf { leaf, .. } => return Some(leaf),
                Node::Inner { l, r, .. } => {
                    if i < l.size() {
                        n = l;
                    } else {
                        i -= l.size();
                        n = r;
                    }
                }
            }
        }
    }

    /// Number of leaves whose key is below `key`.
    pub fn rank(&self, key: f64) -> usize {
        let Some(mut n) = self.root.as_deref() else {
            return 0;
        };
        let mut acc = 0;
        loop {
            match n {
                Node::Leaf { leaf, .. } => return acc + usize::from(leaf.key() < key),
                Node::Inner { l, r, .. } => {
                    if key <= l.cache().max_key {
                        n = l;
                    } else {
                        acc += l.size();
                        n = r;
                    }
                }
            }
        }
    }

    pub fn push_back(&mut self, leaf: L) -> Result<()> {
        let i = self.len();
        self.insert_at(i, leaf)
    }

    /// Inserts by key; equal keys are an order violation.
    pub fn insert(&mut self, leaf: L) -> Result<usize> {
        let i = self.rank(leaf.key());
        if self.get(i).map(|x| x.key() == leaf.key()).unwrap_or(false) {
            return Err(Error::OrderViolation { key: leaf.key() });
        }
        self.insert_at(i, leaf)?;
        Ok(i)
    }

    /// Inserts at position `i`; the key must fall strictly between the
    /// neighbours' keys.
    pub fn insert_at(&mut self, i: usize, leaf: L) -> Result<()> {
        let n = self.len();
        if i > n {
            return Err(Error::OutOfRange { index: i, len: n });
        }
        let k = leaf.key();
        let before_ok = i == 0 || self.get(i - 1).map(|x| x.key() < k).unwrap_or(true);
        let after_ok = i == n || self.get(i).map(|x| k < x.key()).unwrap_or(true);
        if !before_ok || !after_ok {
            return Err(Error::OrderViolation { key: k });
        }
        let t = &mut self.touched;
        let node = leaf_node(leaf, self.d, t);
        let (a, b) = match self.root.take() {
            Some(r) => split(r, i, t),
            None => (None, None),
        };
        self.root = join_opt(join_opt(a, Some(node), t), b, t);
        Ok(())
    }

    pub fn delete(&mut self, i: usize) -> Result<L> {
        let n = self.len();
        if i >= n {
            return Err(Error::OutOfRange { index: i, len: n });
        }
        let t = &mut self.touched;
        let (a, b) = split(self.root.take().unwrap(), i, t);
        let (mid, c) = split(b.unwrap(), 1, t);
        self.root = join_opt(a, c, t);
        match *mid.unwrap() {
            Node::Leaf { leaf, .. } => Ok(leaf),
            Node::Inner { .. } => unreachable!("single-leaf split"),
        }
    }

    /// Splits off the leaves from position `i` onwards.
    pub fn split_off(&mut self, i: usize) -> Result<HullTree<L>> {
        let n = self.len();
        if i > n {
            return Err(Error::OutOfRange { index: i, len: n });
        }
        let t = &mut self.touched;
        let (a, b) = match self.root.take() {
            Some(r) => split(r, i, t),
            None => (None, None),
        };
        self.root = a;
        Ok(HullTree {
            root: b,
            d: self.d,
            touched: 0,
        })
    }

    /// Appends `other`, whose keys must all exceed this tree's keys.
    pub fn merge(&mut self, other: HullTree<L>) -> Result<()> {
        if let (Some(a), Some(b)) = (&self.root, &other.root) {
            if a.cache().max_key >= b.cache().min_key {
                return Err(Error::OrderViolation { key: b.cache().min_key });
            }
        }
        self.touched += other.touched;
        self.d = self.d.max(other.d);
        let t = &mut self.touched;
        self.root = join_opt(self.root.take(), other.root, t);
        Ok(())
    }

    /// Replaces the content of leaf `i` and marks its root path dirty without
    /// recomputing anything. Callers only ever shrink content, so the stale
    /// hulls above still contain the true ones.
    pub fn shrink_leaf(&mut self, i: usize, f: impl FnOnce(&mut L)) -> Result<()> {
        let n = self.len();
        if i >= n {
            return Err(Error::OutOfRange { index: i, len: n });
        }
        let mut node = self.root.as_deref_mut().unwrap();
        let mut i = i;
        loop {
            match node {
                Node::Leaf { leaf, c } => {
                    c.dirty = true;
                    f(leaf);
                    return Ok(());
                }
                Node::Inner { l, r, c } => {
                    c.dirty = true;
                    if i < l.size() {
                        node = l;
                    } else {
                        i -= l.size();
                        node = r;
                    }
                }
            }
        }
    }

    /// Recomputes every dirty node at the current radius.
    pub fn refresh(&mut self) {
        let d = self.d;
        let t = &mut self.touched;
        self.root = self.root.take().map(|r| refresh(r, d, t));
    }

    /// Every bridge in the tree, in-order.
    pub fn bridges(&self) -> Vec<Transition> {
        let mut out = Vec::new();
        fn walk<L: HullLeaf>(n: &Node<L>, out: &mut Vec<Transition>) {
            if let Node::Inner { l, r, c } = n {
                walk(l, out);
                out.extend(c.bridges.iter().copied());
                walk(r, out);
            }
        }
        if let Some(r) = &self.root {
            walk(r, &mut out);
        }
        out
    }

    /// Checks heights, sizes, balance and key order.
    /// Node-by-node JSON: keys, sizes, dirty flags and bridge endpoints.
    pub fn dump(&self) -> serde_json::Value {
        fn walk<L: HullLeaf>(n: &Node<L>) -> serde_json::Value {
            match n {
                Node::Leaf { leaf, c } => serde_json::json!({"key": leaf.key(), "dirty": c.dirty}),
                Node::Inner { l, r, c } => serde_json::json!({
                    "keys": [c.min_key, c.max_key],
                    "size": c.size,
                    "height": c.height,
                    "dirty": c.dirty,
                    "bridges": c.bridges.iter().map(|b| [[b.seg.a.x, b.seg.a.y], [b.seg.b.x, b.seg.b.y]]).collect::<Vec<_>>(),
                    "left": walk(l),
                    "right": walk(r),
                }),
            }
        }
        serde_json::json!({"radius": self.d, "root": self.root.as_deref().map(walk)})
    }

    pub fn check(&self) -> bool {
        fn walk<L: HullLeaf>(n: &Node<L>) -> Option<(u32, usize, f64, f64)> {
            match n {
                Node::Leaf { leaf, c } => {
                    (c.height == 1 && c.size == 1).then_some((1, 1, leaf.key(), leaf.key()))
                }
                Node::Inner { l, r, c } => {
                    let (hl, sl, lo, lmax) = walk(l)?;
                    let (hr, sr, rmin, hi) = walk(r)?;
                    let ok = lmax < rmin
                        && hl.abs_diff(hr) <= 1
                        && c.height == 1 + hl.max(hr)
                        && c.size == sl + sr;
                    ok.then_some((c.height, c.size, lo, hi))
                }
            }
        }
        self.root.as_deref().map(|r| walk(r).is_some()).unwrap_or(true)
    }
}
