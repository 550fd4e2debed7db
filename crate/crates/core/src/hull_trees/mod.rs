//! Balanced hull trees over wavefront bunches and boundary elements.
//!
//! All three share one AVL core ([`tree::HullTree`]); they differ only in what
//! a leaf holds and how its hull grows with the radius.

pub mod bht;
pub mod bst;
pub mod query;
pub mod tree;
pub mod wst;

pub use bht::{Bht, BhtLeaf, Strike};
pub use bst::{BstLeaf, Element};
pub use query::{bst_min_dist, wst_min_dist, Hit, QueryStats};
pub use tree::{HullLeaf, HullTree};
pub use wst::{Wst, WstLeaf};

use crate::geom::{Point, Segment};

/// Distance from `p` to a polyline (a single point when `pts.len() == 1`).
pub fn polyline_dist(pts: &[Point], p: Point) -> (f64, Point) {
    match pts {
        [] => (f64::INFINITY, p),
        [a] => (a.dist(p), *a),
        _ => pts
            .windows(2)
            .map(|w| {
                let s = Segment::new(w[0], w[1]);
                let q = s.closest_point(p);
                (q.dist(p), q)
            })
            .fold((f64::INFINITY, p), |a, b| if b.0 < a.0 { b } else { a }),
    }
}
