//! Glyph outlines made of on-curve and off-curve nodes.
//!
//! Coordinates are em units (1000 per em). Between two consecutive on-curve
//! nodes a contour carries either no off-curve node (a straight line) or two
//! (a cubic Bézier).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Units per em used throughout.
pub const UNITS_PER_EM: f64 = 1000.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OutlineError {
    #[error("contour {contour}: closed contour needs at least 2 nodes, found {found}")]
    TooFewNodes { contour: usize, found: usize },
    #[error("contour {contour}: no on-curve node")]
    NoOnCurve { contour: usize },
    #[error("contour {contour}: {count} off-curve nodes before node {node}, expected 0 or 2")]
    BadSegment {
        contour: usize,
        node: usize,
        count: usize,
    },
    #[error("contour {contour}: open contour must start and end on-curve")]
    OpenEndpoint { contour: usize },
    #[error("contour {contour}, node {node}: non-finite coordinate")]
    NonFinite { contour: usize, node: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    OnCurve,
    OffCurve,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlyphNode<T> {
    pub x: T,
    pub y: T,
    pub kind: NodeKind,
}

impl<T> GlyphNode<T> {
    pub fn on(x: T, y: T) -> Self {
        Self {
            x,
            y,
            kind: NodeKind::OnCurve,
        }
    }

    pub fn off(x: T, y: T) -> Self {
        Self {
            x,
            y,
            kind: NodeKind::OffCurve,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour<T> {
    pub closed: bool,
    pub nodes: Vec<GlyphNode<T>>,
}

/// One drawing step of a contour, with the absolute points it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment<T> {
    Line { to: (T, T) },
    Cubic { c1: (T, T), c2: (T, T), to: (T, T) },
}

impl<T: Scalar> Contour<T> {
    pub fn closed(nodes: Vec<GlyphNode<T>>) -> Self {
        Self {
            closed: true,
            nodes,
        }
    }

    /// Checks the segment grammar. `index` is only used in error reports.
    pub fn validate(&self, index: usize) -> Result<(), OutlineError> {
        for (i, n) in self.nodes.iter().enumerate() {
            if !n.x.is_number() || !n.y.is_number() || !finite(n.x) || !finite(n.y) {
                return Err(OutlineError::NonFinite {
                    contour: index,
                    node: i,
                });
            }
        }
        if self.closed && self.nodes.len() < 2 {
            return Err(OutlineError::TooFewNodes {
                contour: index,
                found: self.nodes.len(),
            });
        }
        if self.nodes.is_empty() {
            return Ok(());
        }
        let first_on = self
            .nodes
            .iter()
            .position(|n| n.kind == NodeKind::OnCurve)
            .ok_or(OutlineError::NoOnCurve { contour: index })?;
        if !self.closed
            && (self.nodes[0].kind != NodeKind::OnCurve
                || self.nodes[self.nodes.len() - 1].kind != NodeKind::OnCurve)
        {
            return Err(OutlineError::OpenEndpoint { contour: index });
        }
        let n = self.nodes.len();
        let steps = if self.closed { n } else { n - 1 };
        let mut run = 0usize;
        for step in 1..=steps {
            let idx = (first_on + step) % n;
            match self.nodes[idx].kind {
                NodeKind::OffCurve => run += 1,
                NodeKind::OnCurve => {
                    if run != 0 && run != 2 {
                        return Err(OutlineError::BadSegment {
                            contour: index,
                            node: idx,
                            count: run,
                        });
                    }
                    run = 0;
                }
            }
        }
        Ok(())
    }

    /// Start point and segments, beginning at the first on-curve node. A
    /// closed contour ends with a segment back to its start point.
    /// Assumes [`Contour::validate`] passed.
    pub fn segments(&self) -> Option<((T, T), Vec<Segment<T>>)> {
        let n = self.nodes.len();
        let first_on = self
            .nodes
            .iter()
            .position(|n| n.kind == NodeKind::OnCurve)?;
        let start = (self.nodes[first_on].x, self.nodes[first_on].y);
        let steps = if self.closed { n } else { n - 1 };
        let mut out = Vec::new();
        let mut pending: Vec<(T, T)> = Vec::with_capacity(2);
        for step in 1..=steps {
            let node = &self.nodes[(first_on + step) % n];
            let p = (node.x, node.y);
            match node.kind {
                NodeKind::OffCurve => pending.push(p),
                NodeKind::OnCurve => {
                    match pending.as_slice() {
                        [] => out.push(Segment::Line { to: p }),
                        [c1, c2] => out.push(Segment::Cubic {
                            c1: *c1,
                            c2: *c2,
                            to: p,
                        }),
                        _ => return None,
                    }
                    pending.clear();
                }
            }
        }
        pending.is_empty().then_some((start, out))
    }
}

fn finite<T: Scalar>(v: T) -> bool {
    v.to_f64().is_finite()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GlyphOutline<T> {
    pub glyph_name: String,
    pub advance_width: T,
    pub contours: Vec<Contour<T>>,
}

impl<T: Scalar> GlyphOutline<T> {
    pub fn validate(&self) -> Result<(), OutlineError> {
        self.contours
            .iter()
            .enumerate()
            .try_for_each(|(i, c)| c.validate(i))
    }

    pub fn node_count(&self) -> usize {
        self.contours.iter().map(|c| c.nodes.len()).sum()
    }

    /// Converts every coordinate to another scalar type.
    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(T) -> U) -> GlyphOutline<U> {
        GlyphOutline {
            glyph_name: self.glyph_name.clone(),
            advance_width: f(self.advance_width),
            contours: self
                .contours
                .iter()
                .map(|c| Contour {
                    closed: c.closed,
                    nodes: c
                        .nodes
                        .iter()
                        .map(|n| GlyphNode {
                            x: f(n.x),
                            y: f(n.y),
                            kind: n.kind,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Largest absolute coordinate difference against a structurally equal outline.
    pub fn max_deviation(&self, other: &GlyphOutline<T>) -> Option<f64> {
        if self.contours.len() != other.contours.len() {
            return None;
        }
        let mut worst = (self.advance_width - other.advance_width).to_f64().abs();
        for (a, b) in self.contours.iter().zip(&other.contours) {
            if a.nodes.len() != b.nodes.len() {
                return None;
            }
            for (p, q) in a.nodes.iter().zip(&b.nodes) {
                worst = worst
                    .max((p.x - q.x).to_f64().abs())
                    .max((p.y - q.y).to_f64().abs());
            }
        }
        Some(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Contour<f64> {
        Contour::closed(vec![
            GlyphNode::on(0.0, 0.0),
            GlyphNode::on(1000.0, 0.0),
            GlyphNode::on(1000.0, 1000.0),
            GlyphNode::on(0.0, 1000.0),
        ])
    }

    #[test]
    fn square_is_four_lines() {
        let c = square();
        c.validate(0).unwrap();
        let (start, segs) = c.segments().unwrap();
        assert_eq!(start, (0.0, 0.0));
        assert_eq!(segs.len(), 4);
        assert!(segs.iter().all(|s| matches!(s, Segment::Line { .. })));
        assert_eq!(segs[3], Segment::Line { to: (0.0, 0.0) });
    }

    #[test]
    fn cubic_wraps_around_start() {
        let c = Contour::closed(vec![
            GlyphNode::off(0.0, 50.0),
            GlyphNode::on(0.0, 100.0),
            GlyphNode::on(100.0, 100.0),
            GlyphNode::off(100.0, 0.0),
        ]);
        c.validate(0).unwrap();
        let (start, segs) = c.segments().unwrap();
        assert_eq!(start, (0.0, 100.0));
        assert_eq!(
            segs[1],
            Segment::Cubic {
                c1: (100.0, 0.0),
                c2: (0.0, 50.0),
                to: (0.0, 100.0)
            }
        );
    }

    #[test]
    fn single_off_curve_rejected() {
        let c = Contour::closed(vec![
            GlyphNode::on(0.0, 0.0),
            GlyphNode::off(5.0, 5.0),
            GlyphNode::on(10.0, 0.0),
        ]);
        assert!(matches!(
            c.validate(3),
            Err(OutlineError::BadSegment {
                contour: 3,
                count: 1,
                ..
            })
        ));
    }

    #[test]
    fn degenerate_contours() {
        let one = Contour::closed(vec![GlyphNode::on(0.0, 0.0)]);
        assert!(matches!(
            one.validate(0),
            Err(OutlineError::TooFewNodes { found: 1, .. })
        ));
        let offs = Contour::closed(vec![GlyphNode::off(0.0, 0.0), GlyphNode::off(1.0, 0.0)]);
        assert_eq!(offs.validate(1), Err(OutlineError::NoOnCurve { contour: 1 }));
        let open = Contour {
            closed: false,
            nodes: vec![GlyphNode::on(0.0, 0.0), GlyphNode::off(1.0, 0.0)],
        };
        assert_eq!(open.validate(0), Err(OutlineError::OpenEndpoint { contour: 0 }));
        let nan = Contour::closed(vec![GlyphNode::on(f64::NAN, 0.0), GlyphNode::on(1.0, 0.0)]);
        assert!(matches!(nan.validate(0), Err(OutlineError::NonFinite { .. })));
    }

    #[test]
    fn node_kind_serializes_kebab() {
        let s = serde_json::to_string(&GlyphNode::off(1.0, 2.0)).unwrap();
        assert_eq!(s, r#"{"x":1.0,"y":2.0,"kind":"off-curve"}"#);
    }
}
