//! SVG renders of instances, decompositions, paths and wavefronts.
//!
//! Output is a pure function of the input: fixed element order, fixed
//! number formatting, no timestamps.

use crate::corridors::{build_decomposition, CorridorKind, Unit};
use crate::domain::{Instance, PathResult};
use crate::engine::sources_within;
use crate::error::Result;
use crate::geom::Point;
use crate::oracle::visible;
use crate::triangulate::triangulate;
use std::f64::consts::TAU;
use std::fmt::Write;

const PALETTE: [&str; 6] = ["#8ecae6", "#a8dadc", "#b5e48c", "#cdb4db", "#ffc8dd", "#bde0fe"];
const ARC_SAMPLES: usize = 720;

fn fmt(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn pts(inst: &Instance, ring: &[Point]) -> String {
    ring.iter()
        .map(|&p| {
            let q = inst.to_input_units(p);
            format!("{},{}", fmt(q.x), fmt(q.y))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

struct Svg {
    body: String,
    inst: Instance,
}

impl Svg {
    fn new(inst: &Instance) -> Svg {
        Svg {
            body: String::new(),
            inst: inst.clone(),
        }
    }

    fn finish(self) -> String {
        let o: Vec<Point> = self.inst.outer.iter().map(|&p| self.inst.to_input_units(p)).collect();
        let (mut lo, mut hi) = (o[0], o[0]);
        for p in &o {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let pad = 0.02 * (hi.x - lo.x).max(hi.y - lo.y);
        let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
        let stroke = fmt(0.002 * w.max(h));
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"800\" height=\"{}\">\n\
             <g transform=\"scale(1,-1)\" stroke-width=\"{stroke}\">\n{}</g>\n</svg>\n",
            fmt(lo.x - pad),
            fmt(-hi.y - pad),
            fmt(w),
            fmt(h),
            (800.0 * h / w).round() as i64,
            self.body
        )
    }

    fn domain(&mut self) {
        let outer = pts(&self.inst, &self.inst.outer);
        let _ = writeln!(self.body, "<polygon class=\"outer\" points=\"{outer}\" fill=\"#ffffff\" stroke=\"#000000\"/>");
        for h in self.inst.holes.clone() {
            let p = pts(&self.inst, &h);
            let _ = writeln!(self.body, "<polygon class=\"hole\" points=\"{p}\" fill=\"#555555\" stroke=\"#000000\"/>");
        }
    }

    fn marker(&mut self, class: &str, p: Point, r: f64) {
        let q = self.inst.to_input_units(p);
        let _ = writeln!(self.body, "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>", fmt(q.x), fmt(q.y), fmt(r));
    }

    fn endpoints(&mut self) {
        let r = 0.005 * self.inst.scale * diameter(&self.inst);
        let (s, t) = (self.inst.s, self.inst.t);
        self.marker("s", s, r);
        self.marker("t", t, r);
    }
}

fn diameter(inst: &Instance) -> f64 {
    let mut d: f64 = 0.0;
    for a in &inst.outer {
        for b in &inst.outer {
            d = d.max(a.dist(*b));
        }
    }
    d
}

pub fn render_domain(inst: &Instance) -> String {
    let mut svg = Svg::new(inst);
    svg.domain();
    svg.endpoints();
    svg.finish()
}

/// Triangles filled by unit: junctions orange, useful corridors from a
/// palette (closed ones outlined in red), useless units grey.
pub fn render_decomposition(inst: &Instance) -> Result<String> {
    let tri = triangulate(inst)?;
    let dec = build_decomposition(&tri)?;
    let mut svg = Svg::new(inst);
    svg.domain();
    for (t, unit) in dec.unit_of.iter().enumerate() {
        let ring: Vec<Point> = tri.tri_points(t).to_vec();
        let (fill, stroke) = match *unit {
            u if !dec.is_useful(u) => ("#dddddd", "#bbbbbb"),
            Unit::Junction(_) => ("#f4a261", "#888888"),
            Unit::Corridor(i) => {
                let closed = dec.corridors[i].hourglass.kind == CorridorKind::Closed;
                (PALETTE[i % PALETTE.len()], if closed { "#d62828" } else { "#888888" })
            }
            Unit::S | Unit::T => ("#ffffff", "#888888"),
        };
        let p = pts(inst, &ring);
        let _ = writeln!(svg.body, "<polygon class=\"triangle\" data-unit=\"{unit:?}\" points=\"{p}\" fill=\"{fill}\" stroke=\"{stroke}\"/>");
    }
    svg.endpoints();
    Ok(svg.finish())
}

pub fn render_path(inst: &Instance, result: &PathResult) -> String {
    let mut svg = Svg::new(inst);
    svg.domain();
    let p = result
        .path
        .iter()
        .map(|q| format!("{},{}", fmt(q.x), fmt(q.y)))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(svg.body, "<polyline class=\"path\" points=\"{p}\" fill=\"none\" stroke=\"#d62828\"/>");
    svg.endpoints();
    svg.finish()
}

/// The wavefront at geodesic radius `d` (input units): one arc element per
/// maximal run of a source's circle that the source owns.
///
/// A point at radius `d` belongs to the visible source that reaches it first,
/// ties going to the source with the smaller distance.
pub fn render_wavefront(inst: &Instance, d: f64) -> Result<String> {
    let dw = d / inst.scale;
    let sources = sources_within(inst, dw)?;
    let mut svg = Svg::new(inst);
    svg.domain();
    let tol = 1e-9 * (1.0 + dw);
    for (k, &(c, w)) in sources.iter().enumerate() {
        let r = dw - w;
        let at = |i: usize| {
            let a = TAU * i as f64 / ARC_SAMPLES as f64;
            Point::new(c.x + r * a.cos(), c.y + r * a.sin())
        };
        let owned: Vec<bool> = (0..ARC_SAMPLES)
            .map(|i| {
                let p = at(i);
                inst.in_closed_free_space(p)
                    && visible(inst, c, p)
                    && sources.iter().enumerate().all(|(j, &(u, wu))| {
                        if j == k {
                            return true;
                        }
                        let x = wu + u.dist(p);
                        let beats = x < dw - tol || (x <= dw + tol && wu < w);
                        !(beats && visible(inst, u, p))
                    })
            })
            .collect();
        svg.marker("source", c, 0.003 * inst.scale * diameter(inst));
        for (i0, len) in runs(&owned) {
            let rr = fmt(r * inst.scale);
            let p0 = inst.to_input_units(at(i0));
            let mut path = format!("M {} {}", fmt(p0.x), fmt(p0.y));
            if len == ARC_SAMPLES {
                let p1 = inst.to_input_units(at(ARC_SAMPLES / 2));
                let _ = write!(path, " A {rr} {rr} 0 1 1 {} {} A {rr} {rr} 0 1 1 {} {}", fmt(p1.x), fmt(p1.y), fmt(p0.x), fmt(p0.y));
            } else {
                let p1 = inst.to_input_units(at((i0 + len - 1) % ARC_SAMPLES));
                let large = u8::from(2 * (len - 1) > ARC_SAMPLES);
                let _ = write!(path, " A {rr} {rr} 0 {large} 1 {} {}", fmt(p1.x), fmt(p1.y));
            }
            let _ = writeln!(svg.body, "<path class=\"arc\" d=\"{path}\" fill=\"none\" stroke=\"#0077b6\"/>");
        }
    }
    svg.endpoints();
    Ok(svg.finish())
}

/// Maximal cyclic runs of `true` as `(start, length)`.
fn runs(f: &[bool]) -> Vec<(usize, usize)> {
    let n = f.len();
    if f.iter().all(|&x| x) {
        return vec![(0, n)];
    }
    let Some(start) = (0..n).find(|&i| !f[i]) else { return Vec::new() };
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let j = (start + i) % n;
        if f[j] {
            let mut len = 0;
            while i < n && f[(start + i) % n] {
                len += 1;
                i += 1;
            }
            out.push((j, len));
        } else {
            i += 1;
        }
    }
    out
}
