//! The three-axis glyph design space spanned by eight corner masters.
//!
//! Master `b` sits at the cube vertex whose coordinates are the bits of `b`
//! (bit `i` set means axis `i` at 1.0). Any interior instance is the
//! multilinear blend of the eight masters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical;
use crate::coords::{Corner, DesignCoords};
use crate::outline::{Contour, GlyphNode, GlyphOutline, OutlineError};
use crate::scalar::Scalar;

pub const DOCUMENT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("malformed space document: {0}")]
    Malformed(String),
    #[error("space has no glyphs")]
    NoGlyphs,
    #[error("glyph {glyph:?}: expected 8 masters, found {found}")]
    MasterCount { glyph: String, found: usize },
    #[error("glyph {glyph:?}, master {master}: {source}")]
    Outline {
        glyph: String,
        master: u8,
        #[source]
        source: OutlineError,
    },
    #[error("glyph {glyph:?}, master {master}, contour {contour:?}, node {node:?}: not point-compatible with master 0 ({reason})")]
    Incompatible {
        glyph: String,
        master: u8,
        contour: Option<usize>,
        node: Option<usize>,
        reason: String,
    },
    #[error("start corners {0} and {1} are not antipodal")]
    NotAntipodal(u8, u8),
    #[error("invalid axes: {0}")]
    Axes(String),
    #[error("unknown glyph {0:?}")]
    UnknownGlyph(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AxisMeta {
    pub index: usize,
    pub name: String,
    pub word_low: String,
    pub word_mid: String,
    pub word_high: String,
}

impl AxisMeta {
    pub fn new(index: usize, name: &str, low: &str, mid: &str, high: &str) -> Self {
        Self {
            index,
            name: name.into(),
            word_low: low.into(),
            word_mid: mid.into(),
            word_high: high.into(),
        }
    }

    /// Low below 1/3, high above 2/3, mid otherwise (both edges inclusive).
    pub fn word_for<T: Scalar>(&self, v: T) -> &str {
        let three = T::one() + T::one() + T::one();
        let scaled = three * v;
        if scaled < T::one() {
            &self.word_low
        } else if scaled > T::one() + T::one() {
            &self.word_high
        } else {
            &self.word_mid
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StartCorner {
    pub corner: Corner,
    pub labels: [String; 2],
}

/// On-disk form of a space. Also used, with all masters equal, for a single
/// downloaded instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpaceDocument {
    pub v: u32,
    pub axes: Vec<AxisMeta>,
    pub glyphs: BTreeMap<String, Vec<MasterDocument>>,
    pub start_corners: Vec<StartCorner>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MasterDocument {
    pub advance_width: f64,
    pub contours: Vec<Contour<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub coords: DesignCoords<f64>,
    pub descriptor: [String; 3],
}

/// Validated design space. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSpace<T: Scalar> {
    axes: [AxisMeta; 3],
    glyphs: BTreeMap<String, [GlyphOutline<T>; 8]>,
    start_corners: [StartCorner; 2],
    space_hash: String,
}

impl<T: Scalar> DesignSpace<T> {
    pub fn new(
        axes: [AxisMeta; 3],
        glyphs: BTreeMap<String, [GlyphOutline<T>; 8]>,
        start_corners: [StartCorner; 2],
    ) -> Result<Self, SpaceError> {
        validate_axes(&axes)?;
        if glyphs.is_empty() {
            return Err(SpaceError::NoGlyphs);
        }
        for (name, masters) in &glyphs {
            check_compatible(name, masters)?;
        }
        let (a, b) = (start_corners[0].corner, start_corners[1].corner);
        if a.bits() ^ b.bits() != 7 {
            return Err(SpaceError::NotAntipodal(a.bits(), b.bits()));
        }
        let mut space = Self {
            axes,
            glyphs,
            start_corners,
            space_hash: String::new(),
        };
        let doc = space.to_document();
        space.space_hash = content_hash(&doc)?;
        Ok(space)
    }

    pub fn axes(&self) -> &[AxisMeta; 3] {
        &self.axes
    }

    pub fn start_corners(&self) -> &[StartCorner; 2] {
        &self.start_corners
    }

    pub fn space_hash(&self) -> &str {
        &self.space_hash
    }

    pub fn glyph_names(&self) -> impl Iterator<Item = &str> {
        self.glyphs.keys().map(String::as_str)
    }

    pub fn masters(&self, glyph: &str) -> Result<&[GlyphOutline<T>; 8], SpaceError> {
        self.glyphs
            .get(glyph)
            .ok_or_else(|| SpaceError::UnknownGlyph(glyph.into()))
    }

    pub fn master(&self, glyph: &str, corner: Corner) -> Result<&GlyphOutline<T>, SpaceError> {
        Ok(&self.masters(glyph)?[corner.bits() as usize])
    }

    pub fn interpolate_glyph(
        &self,
        glyph: &str,
        coords: &DesignCoords<T>,
    ) -> Result<GlyphOutline<T>, SpaceError> {
        Ok(interpolate_masters(self.masters(glyph)?, coords))
    }

    pub fn descriptor_words(&self, coords: &DesignCoords<T>) -> [String; 3] {
        [0, 1, 2].map(|i| self.axes[i].word_for(coords.get(i)).to_string())
    }

    /// Lossy `f64` view of the space in document form.
    pub fn to_document(&self) -> SpaceDocument {
        SpaceDocument {
            v: DOCUMENT_VERSION,
            axes: self.axes.to_vec(),
            glyphs: self
                .glyphs
                .iter()
                .map(|(name, masters)| {
                    let docs = masters
                        .iter()
                        .map(|m| {
                            let m = m.map_scalar(Scalar::to_f64);
                            MasterDocument {
                                advance_width: m.advance_width,
                                contours: m.contours,
                            }
                        })
                        .collect();
                    (name.clone(), docs)
                })
                .collect(),
            start_corners: self.start_corners.to_vec(),
            instance: None,
        }
    }
}

impl DesignSpace<f64> {
    pub fn from_document(doc: SpaceDocument) -> Result<Self, SpaceError> {
        if doc.v != DOCUMENT_VERSION {
            return Err(SpaceError::Malformed(format!("unsupported version {}", doc.v)));
        }
        let axes: [AxisMeta; 3] = doc
            .axes
            .try_into()
            .map_err(|a: Vec<AxisMeta>| SpaceError::Axes(format!("expected 3 axes, found {}", a.len())))?;
        let start_corners: [StartCorner; 2] = doc.start_corners.try_into().map_err(|s: Vec<StartCorner>| {
            SpaceError::Malformed(format!("expected 2 start corners, found {}", s.len()))
        })?;
        let mut glyphs = BTreeMap::new();
        for (name, masters) in doc.glyphs {
            let found = masters.len();
            let outlines: Vec<GlyphOutline<f64>> = masters
                .into_iter()
                .map(|m| GlyphOutline {
                    glyph_name: name.clone(),
                    advance_width: m.advance_width,
                    contours: m.contours,
                })
                .collect();
            let arr: [GlyphOutline<f64>; 8] = outlines.try_into().map_err(|_| SpaceError::MasterCount {
                glyph: name.clone(),
                found,
            })?;
            glyphs.insert(name, arr);
        }
        Self::new(axes, glyphs, start_corners)
    }

    /// Parses and validates a JSON space document.
    pub fn load(json: &str) -> Result<Self, SpaceError> {
        let doc: SpaceDocument =
            serde_json::from_str(json).map_err(|e| SpaceError::Malformed(e.to_string()))?;
        Self::from_document(doc)
    }

    /// A document holding one instance: every master equals the blend at `coords`.
    /// It loads back as a (degenerate) space.
    pub fn instance_document(&self, coords: &DesignCoords<f64>) -> SpaceDocument {
        let mut doc = self.to_document();
        for (name, masters) in doc.glyphs.iter_mut() {
            let inst = interpolate_masters(&self.glyphs[name], coords);
            let m = MasterDocument {
                advance_width: inst.advance_width,
                contours: inst.contours,
            };
            *masters = vec![m; 8];
        }
        doc.instance = Some(InstanceInfo {
            coords: *coords,
            descriptor: self.descriptor_words(coords),
        });
        doc
    }
}

fn content_hash(doc: &SpaceDocument) -> Result<String, SpaceError> {
    canonical::digest(doc).map_err(|e| SpaceError::Malformed(e.to_string()))
}

fn validate_axes(axes: &[AxisMeta; 3]) -> Result<(), SpaceError> {
    for (i, a) in axes.iter().enumerate() {
        if a.index != i {
            return Err(SpaceError::Axes(format!("axis at position {i} has index {}", a.index)));
        }
        if a.word_low == a.word_mid || a.word_mid == a.word_high || a.word_low == a.word_high {
            return Err(SpaceError::Axes(format!("axis {i} words are not distinct")));
        }
    }
    Ok(())
}

fn check_compatible<T: Scalar>(glyph: &str, masters: &[GlyphOutline<T>; 8]) -> Result<(), SpaceError> {
    for (b, m) in masters.iter().enumerate() {
        m.validate().map_err(|source| SpaceError::Outline {
            glyph: glyph.into(),
            master: b as u8,
            source,
        })?;
    }
    let reference = &masters[0];
    for (b, m) in masters.iter().enumerate().skip(1) {
        let err = |contour, node, reason: String| SpaceError::Incompatible {
            glyph: glyph.into(),
            master: b as u8,
            contour,
            node,
            reason,
        };
        if m.contours.len() != reference.contours.len() {
            return Err(err(
                None,
                None,
                format!("{} contours vs {}", m.contours.len(), reference.contours.len()),
            ));
        }
        for (ci, (c, r)) in m.contours.iter().zip(&reference.contours).enumerate() {
            if c.nodes.len() != r.nodes.len() {
                return Err(err(
                    Some(ci),
                    None,
                    format!("{} nodes vs {}", c.nodes.len(), r.nodes.len()),
                ));
            }
            if c.closed != r.closed {
                return Err(err(Some(ci), None, "closed flag differs".into()));
            }
            if let Some(ni) = c.nodes.iter().zip(&r.nodes).position(|(p, q)| p.kind != q.kind) {
                return Err(err(Some(ci), Some(ni), "node kind differs".into()));
            }
        }
    }
    Ok(())
}

/// Multilinear corner weights; entry `b` is `prod_i (c_i if bit i of b else 1 - c_i)`.
pub fn corner_weights<T: Scalar>(coords: &DesignCoords<T>) -> [T; 8] {
    let c = coords.as_array();
    let mut w = [T::one(); 8];
    for (b, wb) in w.iter_mut().enumerate() {
        for (i, ci) in c.iter().enumerate() {
            *wb = *wb * if b >> i & 1 == 1 { *ci } else { T::one() - *ci };
        }
    }
    w
}

/// Node-wise weighted sum of point-compatible masters. Node kinds, contour
/// flags and the glyph name come from master 0.
pub fn interpolate_masters<T: Scalar>(masters: &[GlyphOutline<T>; 8], coords: &DesignCoords<T>) -> GlyphOutline<T> {
    let w = corner_weights(coords);
    let blend = |f: &dyn Fn(&GlyphOutline<T>) -> T| {
        masters
            .iter()
            .zip(w.iter())
            .fold(T::zero(), |acc, (m, wb)| acc + *wb * f(m))
    };
    let base = &masters[0];
    let contours = base
        .contours
        .iter()
        .enumerate()
        .map(|(ci, contour)| Contour {
            closed: contour.closed,
            nodes: contour
                .nodes
                .iter()
                .enumerate()
                .map(|(ni, node)| GlyphNode {
                    x: blend(&|m| m.contours[ci].nodes[ni].x),
                    y: blend(&|m| m.contours[ci].nodes[ni].y),
                    kind: node.kind,
                })
                .collect(),
        })
        .collect();
    GlyphOutline {
        glyph_name: base.glyph_name.clone(),
        advance_width: blend(&|m| m.advance_width),
        contours,
    }
}
