//! Wavefront section tree: one leaf per bunch, ordered along the wavefront.
//! A leaf's hull is the union of the full disks of its valid sites, growing
//! at rate 1.

use super::tree::{HullLeaf, HullTree};
use crate::error::Result;
use crate::geom::envelope::{Envelope, Piece};
use crate::geom::WeightedSite;
use std::f64::consts::TAU;

#[derive(Clone, Debug, PartialEq)]
pub struct WstLeaf {
    pub bunch: u32,
    pub key: f64,
    pub sites: Vec<WeightedSite>,
}

impl WstLeaf {
    pub fn pieces(&self, d: f64) -> Vec<Piece> {
        self.sites
            .iter()
            .filter(|s| s.weight <= d)
            .map(|s| Piece::site(self.bunch, *s, 0.0, TAU))
            .collect()
    }
}

impl HullLeaf for WstLeaf {
    fn key(&self) -> f64 {
        self.key
    }

    fn envelope(&self, d: f64) -> Envelope {
        let p = self.pieces(d);
        if p.is_empty() {
            Envelope::empty(d, 1.0)
        } else {
            Envelope::from_pieces(&p, d)
        }
    }
}

/// A WST plus its rewind offset. Radii seen by the leaves are
/// `d + offset`; a negative effective radius means the section is not live.
#[derive(Clone, Debug, Default)]
pub struct Wst {
    pub tree: HullTree<WstLeaf>,
    pub offset: f64,
}

impl Wst {
    pub fn new() -> Self {
        Wst::default()
    }

    pub fn effective(&self, d: f64) -> f64 {
        d + self.offset
    }

    pub fn is_live(&self, d: f64) -> bool {
        self.effective(d) >= 0.0
    }

    pub fn advance(&mut self, d: f64) {
        let e = self.effective(d);
        self.tree.advance(e);
    }

    pub fn insert(&mut self, leaf: WstLeaf) -> Result<usize> {
        self.tree.insert(leaf)
    }

    pub fn position_of(&self, bunch: u32) -> Option<usize> {
        self.tree.leaves().iter().position(|l| l.bunch == bunch)
    }

    /// Drops the sites of `bunch` failing `keep`; the hulls above go stale
    /// until the next refresh.
    pub fn shrink(&mut self, bunch: u32, keep: impl Fn(&WeightedSite) -> bool) -> Result<bool> {
        match self.position_of(bunch) {
            Some(i) => {
                self.tree.shrink_leaf(i, |l| l.sites.retain(|s| keep(s)))?;
                Ok(true)
            }
            None => Ok(false),
        }
    }

    pub fn remove(&mut self, bunch: u32) -> Result<Option<WstLeaf>> {
        match self.position_of(bunch) {
            Some(i) => Ok(Some(self.tree.delete(i)?)),
            None => Ok(None),
        }
    }

    /// Every valid piece, for brute-force comparison.
    pub fn pieces(&self, d: f64) -> Vec<Piece> {
        let e = self.effective(d);
        self.tree.leaves().iter().flat_map(|l| l.pieces(e)).collect()
    }
}
