//! Procedural masters for a small demo glyph set.
//!
//! Each master is drawn by expanding a fixed skeleton with a pen whose
//! parameters sit at the extremes of the three axes: weight sets the stem
//! width, contrast thins horizontal strokes, structure removes serifs and
//! squares the bowls. Every master of a glyph is built by the same code
//! path, so node structure is identical across corners.

use std::collections::BTreeMap;

use crate::coords::Corner;
use crate::outline::{Contour, GlyphNode, GlyphOutline};
use crate::space::{AxisMeta, DesignSpace, SpaceDocument, StartCorner};

/// The committed fixture, generated by [`generate_document`].
pub const DEMO_SPACE_JSON: &str = include_str!("../data/demo-space.json");

/// Content digest of [`DEMO_SPACE_JSON`].
pub const DEMO_SPACE_HASH: &str = "ae83bc8ebbee5624c5c599a6b26ff58a34281db81342f08c461ad689d5c8d44a";

pub const DEMO_GLYPHS: [&str; 6] = ["i", "l", "o", "space", "v", "z"];

#[derive(Debug, Clone, Copy)]
struct Pen {
    stem: f64,
    hair: f64,
    serif: f64,
    squareness: f64,
}

impl Pen {
    fn at(corner: Corner) -> Self {
        let t = |axis| if corner.is_set(axis) { 1.0 } else { 0.0 };
        let stem = 40.0 + 140.0 * t(0);
        Pen {
            stem,
            hair: stem * (1.0 - 0.7 * t(1)),
            serif: 70.0 * (1.0 - t(2)),
            squareness: 0.5523 + 0.18 * t(2),
        }
    }
}

fn r(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn on(x: f64, y: f64) -> GlyphNode<f64> {
    GlyphNode::on(r(x), r(y))
}

fn off(x: f64, y: f64) -> GlyphNode<f64> {
    GlyphNode::off(r(x), r(y))
}

fn polygon(points: &[(f64, f64)]) -> Contour<f64> {
    Contour::closed(points.iter().map(|&(x, y)| on(x, y)).collect())
}

/// Four cubic quarter arcs, counter-clockwise from the rightmost point.
fn ellipse(cx: f64, cy: f64, rx: f64, ry: f64, k: f64, clockwise: bool) -> Contour<f64> {
    let mut nodes = vec![
        on(cx + rx, cy),
        off(cx + rx, cy + k * ry),
        off(cx + k * rx, cy + ry),
        on(cx, cy + ry),
        off(cx - k * rx, cy + ry),
        off(cx - rx, cy + k * ry),
        on(cx - rx, cy),
        off(cx - rx, cy - k * ry),
        off(cx - k * rx, cy - ry),
        on(cx, cy - ry),
        off(cx + k * rx, cy - ry),
        off(cx + rx, cy - k * ry),
    ];
    if clockwise {
        nodes[1..].reverse();
    }
    Contour::closed(nodes)
}

const SIDEBEARING: f64 = 50.0;
const X_HEIGHT: f64 = 500.0;
const ASCENDER: f64 = 720.0;

fn glyph_o(p: Pen) -> (f64, Vec<Contour<f64>>) {
    let rx = 210.0;
    let ry = X_HEIGHT / 2.0;
    let cx = SIDEBEARING + rx + p.stem / 2.0;
    let cy = ry;
    let outer = ellipse(cx, cy, rx + p.stem / 2.0, ry + p.hair / 2.0, p.squareness, false);
    let inner = ellipse(cx, cy, rx - p.stem / 2.0, ry - p.hair / 2.0, p.squareness, true);
    (2.0 * (cx), vec![outer, inner])
}

/// Stem with symmetric slab serifs at both ends.
fn serifed_stem(x0: f64, width: f64, top: f64, p: Pen) -> Contour<f64> {
    let x1 = x0 + width;
    let s = p.serif;
    let h = p.hair.max(12.0);
    polygon(&[
        (x0 - s, 0.0),
        (x1 + s, 0.0),
        (x1 + s, h),
        (x1, h),
        (x1, top - h),
        (x1 + s, top - h),
        (x1 + s, top),
        (x0 - s, top),
        (x0 - s, top - h),
        (x0, top - h),
        (x0, h),
        (x0 - s, h),
    ])
}

fn glyph_l(p: Pen) -> (f64, Vec<Contour<f64>>) {
    let x0 = SIDEBEARING + p.serif;
    (x0 + p.stem + p.serif + SIDEBEARING, vec![serifed_stem(x0, p.stem, ASCENDER, p)])
}

fn glyph_i(p: Pen) -> (f64, Vec<Contour<f64>>) {
    let x0 = SIDEBEARING + p.serif;
    let stem = serifed_stem(x0, p.stem, X_HEIGHT, p);
    let radius = 0.6 * p.stem + 10.0;
    let xc = x0 + p.stem / 2.0;
    let dot = ellipse(xc, X_HEIGHT + 80.0 + radius, radius, radius, p.squareness, false);
    (x0 + p.stem + p.serif + SIDEBEARING, vec![stem, dot])
}

fn glyph_v(p: Pen) -> (f64, Vec<Contour<f64>>) {
    let width = 380.0 + p.stem;
    let left = SIDEBEARING;
    let right = left + width;
    let cx = left + width / 2.0;
    let foot = (p.stem + p.hair) * 0.55;
    let notch = 90.0 + (p.stem + p.hair) * 1.1;
    let contour = polygon(&[
        (left, X_HEIGHT),
        (left + p.stem, X_HEIGHT),
        (cx, notch),
        (right - p.hair, X_HEIGHT),
        (right, X_HEIGHT),
        (cx + foot / 2.0, 0.0),
        (cx - foot / 2.0, 0.0),
    ]);
    (right + SIDEBEARING, vec![contour])
}

fn glyph_z(p: Pen) -> (f64, Vec<Contour<f64>>) {
    let width = 340.0 + 0.5 * p.stem;
    let (l, rgt) = (SIDEBEARING, SIDEBEARING + width);
    let h = p.hair.max(12.0);
    let d = p.stem * 1.2;
    let contour = polygon(&[
        (l, X_HEIGHT),
        (rgt, X_HEIGHT),
        (rgt, X_HEIGHT - h),
        (l + d, h),
        (rgt, h),
        (rgt, 0.0),
        (l, 0.0),
        (l, h),
        (rgt - d, X_HEIGHT - h),
        (l, X_HEIGHT - h),
    ]);
    (rgt + SIDEBEARING, vec![contour])
}

fn glyph_space(p: Pen) -> (f64, Vec<Contour<f64>>) {
    (220.0 + 0.3 * p.stem, vec![])
}

fn master(name: &str, corner: Corner) -> GlyphOutline<f64> {
    let pen = Pen::at(corner);
    let (advance, contours) = match name {
        "i" => glyph_i(pen),
        "l" => glyph_l(pen),
        "o" => glyph_o(pen),
        "v" => glyph_v(pen),
        "z" => glyph_z(pen),
        "space" => glyph_space(pen),
        _ => unreachable!("not a demo glyph"),
    };
    GlyphOutline {
        glyph_name: name.to_string(),
        advance_width: r(advance),
        contours,
    }
}

pub fn demo_axes() -> [AxisMeta; 3] {
    [
        AxisMeta::new(0, "weight", "light", "regular", "bold"),
        AxisMeta::new(1, "contrast", "monoline", "moderate", "contrasted"),
        AxisMeta::new(2, "structure", "serif", "semi-serif", "sans-serif"),
    ]
}

/// Builds the demo space from scratch.
pub fn generate() -> DesignSpace<f64> {
    let glyphs: BTreeMap<String, [GlyphOutline<f64>; 8]> = DEMO_GLYPHS
        .iter()
        .map(|&name| (name.to_string(), Corner::ALL.map(|c| master(name, c))))
        .collect();
    let starts = [
        StartCorner {
            corner: Corner::ALL[0],
            labels: ["serif".into(), "light".into()],
        },
        StartCorner {
            corner: Corner::ALL[7],
            labels: ["sans-serif".into(), "bold".into()],
        },
    ];
    DesignSpace::new(demo_axes(), glyphs, starts).expect("procedural masters are compatible")
}

pub fn generate_document() -> SpaceDocument {
    generate().to_document()
}

/// Pretty-printed fixture text, byte-for-byte what is committed.
pub fn fixture_text() -> String {
    let mut s = serde_json::to_string_pretty(&generate_document()).expect("serializable");
    s.push('\n');
    s
}

/// Loads the committed demo fixture.
pub fn demo_space() -> DesignSpace<f64> {
    DesignSpace::load(DEMO_SPACE_JSON).expect("shipped fixture is valid")
}

/// Maps a text character to a demo glyph name.
pub fn glyph_for_char(ch: char) -> String {
    match ch {
        ' ' => "space".to_string(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_matches_generator() {
        assert_eq!(fixture_text(), DEMO_SPACE_JSON);
    }

    #[test]
    fn fixture_hash_is_committed() {
        let space = demo_space();
        assert_eq!(space.space_hash(), DEMO_SPACE_HASH);
        assert_eq!(generate().space_hash(), DEMO_SPACE_HASH);
        assert_eq!(space.axes().len(), 3);
    }

    #[test]
    fn masters_differ_along_axes() {
        let s = generate();
        let light = s.master("l", Corner::ALL[0]).unwrap();
        let bold = s.master("l", Corner::ALL[1]).unwrap();
        assert!(bold.advance_width > light.advance_width);
        assert_eq!(light.node_count(), bold.node_count());
    }
}
