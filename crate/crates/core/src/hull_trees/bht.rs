//! Bunch hull tree: the telescoping segments `w(v_z), w(v_{z+1}), ...` that
//! one tangent strike spawns along a convex chain.
//!
//! Leaves store `wp = −perimeter(v_z → v_k)`. The segment of `v_k` exists at
//! radius `d` once `d − shortestdist + (wp − base_offset) > 0`; since `wp`
//! decreases along the chain the valid leaves form a prefix.

use super::tree::{HullLeaf, HullTree};
use crate::error::{Error, Result};
use crate::geom::envelope::{Envelope, Piece};
use crate::geom::Point;
use std::f64::consts::TAU;

#[derive(Clone, Debug, PartialEq)]
pub struct BhtLeaf {
    /// Position on the chain.
    pub index: usize,
    /// Mesh vertex id.
    pub vertex: usize,
    pub center: Point,
    pub wp: f64,
}

impl HullLeaf for BhtLeaf {
    fn key(&self) -> f64 {
        self.index as f64
    }

    /// Evaluated at the local radius `d − shortestdist − base_offset`, so that
    /// changing the root fields never touches a leaf.
    fn envelope(&self, rho: f64) -> Envelope {
        let p = Piece {
            owner: self.vertex as u32,
            center: self.center,
            r0: self.wp,
            rate: 1.0,
            lo: 0.0,
            span: TAU,
        };
        if rho + self.wp >= 0.0 {
            Envelope::from_piece(&p, rho)
        } else {
            Envelope::empty(rho, 1.0)
        }
    }

    fn value(&self) -> f64 {
        self.wp
    }
}

#[derive(Clone, Debug)]
pub struct Bht {
    pub tree: HullTree<BhtLeaf>,
    pub chain: usize,
    pub shortestdist: f64,
    /// Chain index of the first leaf.
    pub tangentstart: usize,
    pub split_flag: bool,
    pub base_offset: f64,
}

/// How a tangent strike at chain vertex `z` relates to the live bunches on
/// that chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strike {
    /// Nothing covers `z`: build a new tree from `z`.
    Build,
    /// A bunch already starts further along the chain.
    Downstream(usize),
    /// A bunch covers `z` and its segment at `z` already exists.
    Covered(usize),
    /// A bunch covers `z` but has not reached it: split it at `z`.
    Resplit(usize),
}

impl Bht {
    /// Leaves `z..` of `chain` (vertex ids and points), first segment at
    /// distance `sd`.
    pub fn build(chain: usize, verts: &[(usize, Point)], z: usize, sd: f64) -> Result<Bht> {
        if z >= verts.len() {
            return Err(Error::OutOfRange { index: z, len: verts.len() });
        }
        let mut wp = 0.0;
        let mut leaves = Vec::with_capacity(verts.len() - z);
        for k in z..verts.len() {
            if k > z {
                wp -= verts[k - 1].1.dist(verts[k].1);
            }
            leaves.push(BhtLeaf {
                index: k,
                vertex: verts[k].0,
                center: verts[k].1,
                wp,
            });
        }
        Ok(Bht {
            tree: HullTree::from_leaves(leaves, 0.0)?,
            chain,
            shortestdist: sd,
            tangentstart: z,
            split_flag: false,
            base_offset: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn first_index(&self) -> Option<usize> {
        self.tree.get(0).map(|l| l.index)
    }

    pub fn last_index(&self) -> Option<usize> {
        self.tree.get(self.len().checked_sub(1)?).map(|l| l.index)
    }

    pub fn covers(&self, index: usize) -> bool {
        matches!((self.first_index(), self.last_index()), (Some(a), Some(b)) if a <= index && index <= b)
    }

    pub fn local_radius(&self, d: f64) -> f64 {
        d - self.shortestdist - self.base_offset
    }

    fn valid_wp(&self, wp: f64, d: f64) -> bool {
        let x = d - self.shortestdist + (wp - self.base_offset);
        x > 0.0 || (wp == self.base_offset && d >= self.shortestdist)
    }

    pub fn is_valid(&self, leaf: &BhtLeaf, d: f64) -> bool {
        self.valid_wp(leaf.wp, d)
    }

    /// Telescoped distance of leaf `leaf`.
    pub fn weight(&self, leaf: &BhtLeaf) -> f64 {
        self.shortestdist + self.base_offset - leaf.wp
    }

    /// Number of valid leaves at radius `d`, found by descending on the
    /// aggregated minimum of `wp`.
    pub fn valid_count(&self, d: f64) -> usize {
        use super::tree::Node;
        let Some(mut n) = self.tree.root.as_deref() else {
            return 0;
        };
        let mut acc = 0;
        loop {
            match n {
                Node::Leaf { leaf, .. } => return acc + usize::from(self.valid_wp(leaf.wp, d)),
                Node::Inner { l, r, .. } => {
                    if self.valid_wp(l.cache().vmin, d) {
                        acc += l.size();
                        n = r;
                    } else {
                        n = l;
                    }
                }
            }
        }
    }

    /// Centers and weights of the valid leaves.
    pub fn valid_sites(&self, d: f64) -> Vec<(usize, Point, f64)> {
        let k = self.valid_count(d);
        self.tree.leaves()[..k]
            .iter()
            .map(|l| (l.vertex, l.center, self.weight(l)))
            .collect()
    }

    /// Hull of the valid segments at radius `d`. Telescoping nests every
    /// later disk inside the first one, so the first leaf alone is the hull.
    pub fn hull(&self, d: f64) -> Envelope {
        match self.tree.get(0) {
            Some(l) if self.is_valid(l, d) => l.envelope(self.local_radius(d)).shifted(d),
            _ => Envelope::empty(d, 1.0),
        }
    }

    /// Splits off the leaves from tree position `k`; the new tree's first
    /// segment keeps its telescoped distance.
    pub fn split_off(&mut self, k: usize) -> Result<Bht> {
        let right = self.tree.split_off(k)?;
        let first = right
            .get(0)
            .cloned()
            .ok_or(Error::OutOfRange { index: k, len: self.len() })?;
        Ok(Bht {
            chain: self.chain,
            shortestdist: self.shortestdist + (self.base_offset - first.wp),
            tangentstart: first.index,
            split_flag: true,
            base_offset: first.wp,
            tree: right,
        })
    }

    /// Position of chain index `index` among the leaves.
    pub fn position(&self, index: usize) -> Option<usize> {
        let i = self.tree.rank(index as f64);
        (self.tree.get(i)?.index == index).then_some(i)
    }
}

/// Classifies a strike at chain index `z` reached at distance `d` against the
/// live bunches `(id, tree)` on the same chain.
pub fn classify<'a>(live: impl IntoIterator<Item = (usize, &'a Bht)>, z: usize, d: f64) -> Strike {
    let mut downstream: Option<(usize, usize)> = None;
    for (id, b) in live {
        if b.covers(z) {
            let pos = b.position(z).expect("covered index is a leaf");
            let leaf = b.tree.get(pos).unwrap();
            return if b.is_valid(leaf, d) {
                Strike::Covered(id)
            } else {
                Strike::Resplit(id)
            };
        }
        if let Some(f) = b.first_index() {
            if f > z && downstream.map(|(_, g)| f < g).unwrap_or(true) {
                downstream = Some((id, f));
            }
        }
    }
    match downstream {
        Some((id, _)) => Strike::Downstream(id),
        None => Strike::Build,
    }
}

/// Case 4: the strike at `z` with distance `d` beats the telescoped
/// distance. The prefix before `z` is dropped and the suffix restarts at `z`.
pub fn resplit(b: &mut Bht, z: usize, d: f64) -> Result<Bht> {
    let pos = b.position(z).ok_or(Error::OutOfRange { index: z, len: b.len() })?;
    let mut right = b.split_off(pos)?;
    right.shortestdist = d;
    Ok(right)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Vec<(usize, Point)> {
        (0..12)
            .map(|i| {
                let a = 0.25 * i as f64;
                (100 + i, Point::new(a.cos() * 5.0, a.sin() * 5.0))
            })
            .collect()
    }

    #[test]
    fn validity_is_a_prefix_and_telescopes() {
        let v = chain();
        let b = Bht::build(3, &v, 2, 7.0).unwrap();
        assert_eq!(b.len(), 10);
        assert_eq!(b.valid_count(6.9), 0);
        assert_eq!(b.valid_count(7.0), 1);
        let leaves = b.tree.leaves();
        for (i, l) in leaves.iter().enumerate() {
            let w = b.weight(l);
            let mut want = 7.0;
            for k in 2..l.index {
                want += v[k].1.dist(v[k + 1].1);
            }
            assert!((w - want).abs() < 1e-12);
            assert_eq!(b.valid_count(w + 1e-9), i + 1);
        }
    }

    #[test]
    fn split_keeps_weights() {
        let v = chain();
        let mut b = Bht::build(0, &v, 0, 1.0).unwrap();
        let before: Vec<f64> = b.tree.leaves().iter().map(|l| b.weight(l)).collect();
        let r = b.split_off(5).unwrap();
        assert!(r.split_flag);
        assert_eq!(r.tangentstart, 5);
        let after: Vec<f64> = b
            .tree
            .leaves()
            .iter()
            .map(|l| b.weight(l))
            .chain(r.tree.leaves().iter().map(|l| r.weight(l)))
            .collect();
        for (x, y) in before.iter().zip(&after) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(r.valid_count(before[5]), 1);
    }

    #[test]
    fn strike_cases() {
        let v = chain();
        let b = Bht::build(0, &v, 4, 10.0).unwrap();
        let live = [(7usize, &b)];
        assert_eq!(classify(live, 1, 5.0), Strike::Downstream(7));
        assert_eq!(classify([], 1, 5.0), Strike::Build);
        assert_eq!(classify(live, 4, 10.0), Strike::Covered(7));
        assert_eq!(classify(live, 6, 10.5), Strike::Resplit(7));
        let mut b = b;
        let r = resplit(&mut b, 6, 10.5).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(r.first_index(), Some(6));
        assert_eq!(r.valid_count(10.5), 1);
        assert_eq!(r.base_offset, r.tree.get(0).unwrap().wp);
    }
}
