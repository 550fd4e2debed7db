//! Boundary section tree: static chains and doors in boundary order.

use super::tree::HullLeaf;
use crate::geom::envelope::{polyline_envelope, Envelope};
use crate::geom::Point;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Element {
    /// A door edge (mesh edge id).
    Door(usize),
    /// A maximal run of blocked edges on a unit's boundary: `(unit index, run)`.
    Wall(usize, u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BstLeaf {
    pub element: Element,
    pub key: f64,
    pub pts: Vec<Point>,
}

impl HullLeaf for BstLeaf {
    fn key(&self) -> f64 {
        self.key
    }

    fn envelope(&self, _d: f64) -> Envelope {
        let owner = match self.element {
            Element::Door(e) => e as u32,
            Element::Wall(u, r) => (u as u32).wrapping_mul(65_599).wrapping_add(r),
        };
        polyline_envelope(owner, &self.pts)
    }
}
