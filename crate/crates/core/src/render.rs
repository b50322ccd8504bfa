//! SVG 1.1 output: glyphs, text settings, specimen sheets and selection overlays.
//!
//! Every number is written with six fractional digits so identical inputs
//! give byte-identical documents.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::{AnalysisReport, TraceGeometry};
use crate::coords::DesignCoords;
use crate::demo::glyph_for_char;
use crate::hex::{project, HexPoint};
use crate::outline::{Contour, GlyphOutline, OutlineError, Segment, UNITS_PER_EM};
use crate::scalar::Scalar;
use crate::space::{DesignSpace, SpaceError};

const XML_DECL: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
/// Document height in em, leaving room for descenders below the baseline.
const EM_HEIGHT: f64 = 1.2;
/// Advance of the missing-glyph box, in font units.
const PLACEHOLDER_ADVANCE: f64 = 500.0;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error(transparent)]
    Outline(#[from] OutlineError),
    #[error("unknown glyph {0:?}")]
    UnknownGlyph(String),
    #[error("lattice step must be 1, 0.5 or 0.25, got {0}")]
    BadStep(f64),
}

/// Fixed six-digit formatting; negative zero prints as zero.
pub fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn open_svg(out: &mut String, width: f64, height: f64) {
    out.push_str(XML_DECL);
    let (w, h) = (num(width), num(height));
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
}

fn close_svg(out: &mut String) {
    out.push_str("</svg>\n");
}

/// Path data for one contour; `map` takes font units to screen pixels.
fn contour_d<T: Scalar>(contour: &Contour<T>, map: &impl Fn(f64, f64) -> (f64, f64)) -> String {
    let Some((start, segs)) = contour.segments() else {
        return String::new();
    };
    let pt = |p: (T, T)| {
        let (x, y) = map(p.0.to_f64(), p.1.to_f64());
        format!("{} {}", num(x), num(y))
    };
    let mut d = format!("M {}", pt(start));
    for s in segs {
        match s {
            Segment::Line { to } => {
                let _ = write!(d, " L {}", pt(to));
            }
            Segment::Cubic { c1, c2, to } => {
                let _ = write!(d, " C {} {} {}", pt(c1), pt(c2), pt(to));
            }
        }
    }
    if contour.closed {
        d.push_str(" Z");
    }
    d
}

fn outline_paths<T: Scalar>(out: &mut String, outline: &GlyphOutline<T>, map: impl Fn(f64, f64) -> (f64, f64)) {
    for c in &outline.contours {
        let fill = if c.closed { "#000000" } else { "none" };
        let stroke = if c.closed { "" } else { " stroke=\"#000000\"" };
        let _ = writeln!(out, "<path d=\"{}\" fill=\"{fill}\"{stroke}/>", contour_d(c, &map));
    }
}

/// One glyph at `size_px` per em: baseline at `size_px` from the top, y up in font units.
pub fn glyph_svg<T: Scalar>(outline: &GlyphOutline<T>, size_px: f64) -> Result<String, RenderError> {
    outline.validate()?;
    let s = size_px / UNITS_PER_EM;
    let mut out = String::new();
    open_svg(&mut out, outline.advance_width.to_f64() * s, EM_HEIGHT * size_px);
    let _ = writeln!(out, "<g id=\"glyph-{}\">", escape(&outline.glyph_name));
    outline_paths(&mut out, outline, |x, y| (x * s, (UNITS_PER_EM - y) * s));
    out.push_str("</g>\n");
    close_svg(&mut out);
    Ok(out)
}

/// Layout parameters for [`text_svg`], all in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TextLayout {
    pub size_px: f64,
    pub letter_spacing: f64,
    pub line_spacing: f64,
}

impl Default for TextLayout {
    fn default() -> Self {
        Self {
            size_px: 64.0,
            letter_spacing: 0.0,
            line_spacing: 80.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TextRendering {
    pub svg: String,
    /// Pen x position of every placed glyph, line by line.
    pub offsets: Vec<Vec<f64>>,
    pub line_widths: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Sets `text` in the instance at `coords`. Letter spacing is added between
/// glyphs only; unknown characters become placeholder boxes with a warning.
pub fn text_svg(
    space: &DesignSpace<f64>,
    coords: &DesignCoords<f64>,
    text: &str,
    layout: TextLayout,
) -> TextRendering {
    let s = layout.size_px / UNITS_PER_EM;
    let mut body = String::new();
    let mut offsets = Vec::new();
    let mut line_widths = Vec::new();
    let mut warnings = Vec::new();
    for (row, line) in text.split('\n').enumerate() {
        let baseline = layout.size_px + row as f64 * layout.line_spacing;
        let mut pen = 0.0;
        let mut xs = Vec::new();
        for (i, ch) in line.chars().enumerate() {
            if i > 0 {
                pen += layout.letter_spacing;
            }
            xs.push(pen);
            let x0 = pen;
            match space.interpolate_glyph(&glyph_for_char(ch), coords) {
                Ok(g) => {
                    let _ = writeln!(body, "<g data-char=\"{}\">", escape(&ch.to_string()));
                    outline_paths(&mut body, &g, |x, y| (x0 + x * s, baseline - y * s));
                    body.push_str("</g>\n");
                    pen += g.advance_width * s;
                }
                Err(_) => {
                    warnings.push(format!("line {}, column {}: no glyph for {ch:?}", row + 1, i + 1));
                    let w = PLACEHOLDER_ADVANCE * s;
                    let _ = writeln!(
                        body,
                        "<rect data-missing=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000000\"/>",
                        escape(&ch.to_string()),
                        num(x0 + 0.1 * w),
                        num(baseline - 0.7 * layout.size_px),
                        num(0.8 * w),
                        num(0.7 * layout.size_px)
                    );
                    pen += w;
                }
            }
        }
        offsets.push(xs);
        line_widths.push(pen);
    }
    let width = line_widths.iter().copied().fold(0.0, f64::max);
    let height = EM_HEIGHT * layout.size_px + (line_widths.len() - 1) as f64 * layout.line_spacing;
    let mut svg = String::new();
    open_svg(&mut svg, width, height);
    if !warnings.is_empty() {
        svg.push_str("<metadata>\n");
        for w in &warnings {
            let _ = writeln!(svg, "<warning>{}</warning>", escape(w));
        }
        svg.push_str("</metadata>\n");
    }
    svg.push_str(&body);
    close_svg(&mut svg);
    TextRendering {
        svg,
        offsets,
        line_widths,
        warnings,
    }
}

/// Grid of interpolated glyphs at every lattice point of the given step.
pub fn specimen_sheet(space: &DesignSpace<f64>, glyph_names: &[&str], step: f64) -> Result<String, RenderError> {
    let per_axis = match step {
        s if s == 1.0 => 2,
        s if s == 0.5 => 3,
        s if s == 0.25 => 5,
        other => return Err(RenderError::BadStep(other)),
    };
    for g in glyph_names {
        space.masters(g).map_err(|_| RenderError::UnknownGlyph(g.to_string()))?;
    }
    const CELL_W: f64 = 180.0;
    const CELL_H: f64 = 150.0;
    const GLYPH_PX: f64 = 72.0;
    let s = GLYPH_PX / UNITS_PER_EM;
    let rows_per_glyph = per_axis * per_axis;
    let mut body = String::new();
    let mut y_top = 0.0;
    for g in glyph_names {
        let _ = writeln!(body, "<g data-glyph=\"{}\">", escape(g));
        for r in 0..rows_per_glyph {
            for col in 0..per_axis {
                let c = [col as f64 * step, (r % per_axis) as f64 * step, (r / per_axis) as f64 * step];
                let coords = DesignCoords::new(c).expect("lattice point is in range");
                let outline = space.interpolate_glyph(g, &coords).map_err(|e| match e {
                    SpaceError::UnknownGlyph(n) => RenderError::UnknownGlyph(n),
                    other => RenderError::UnknownGlyph(other.to_string()),
                })?;
                let words = space.descriptor_words(&coords).join(" ");
                let (x0, y0) = (col as f64 * CELL_W, y_top + r as f64 * CELL_H);
                let _ = writeln!(
                    body,
                    "<g data-kind=\"specimen-cell\" data-coords=\"{}\" data-words=\"{}\">",
                    escape(&coords.to_string()),
                    escape(&words)
                );
                let base = y0 + 12.0 + GLYPH_PX;
                outline_paths(&mut body, &outline, |x, y| (x0 + 10.0 + x * s, base - y * s));
                let _ = writeln!(
                    body,
                    "<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>",
                    num(x0 + 10.0),
                    num(y0 + CELL_H - 26.0),
                    escape(&coords.to_string())
                );
                let _ = writeln!(
                    body,
                    "<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>",
                    num(x0 + 10.0),
                    num(y0 + CELL_H - 12.0),
                    escape(&words)
                );
                body.push_str("</g>\n");
            }
        }
        body.push_str("</g>\n");
        y_top += rows_per_glyph as f64 * CELL_H;
    }
    let mut out = String::new();
    open_svg(&mut out, per_axis as f64 * CELL_W, y_top);
    out.push_str(&body);
    close_svg(&mut out);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Overlays

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OverlayArea {
    pub center: HexPoint<f64>,
    pub radius: f64,
    pub level: u8,
}

/// Selection trace drawn in the hexagonal plane, centered on the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OverlayModel {
    pub outer_hex_radius: f64,
    pub areas: Vec<OverlayArea>,
    pub path: Vec<HexPoint<f64>>,
    pub start_dot: HexPoint<f64>,
    pub end_dot: HexPoint<f64>,
}

impl OverlayModel {
    /// Area `i` (zoom level `i + 1`) becomes a hexagon of radius `R * 2 * halfWidth`,
    /// the projected size of its sub-cube, centered at `R * project(focus)`.
    pub fn from_geometry(geo: &TraceGeometry, outer_hex_radius: f64) -> Self {
        let r = outer_hex_radius;
        let at = |c: &DesignCoords<f64>| project(c) * r;
        let path: Vec<HexPoint<f64>> = geo.path.iter().map(at).collect();
        Self {
            outer_hex_radius: r,
            areas: geo
                .areas
                .iter()
                .enumerate()
                .map(|(i, a)| OverlayArea {
                    center: at(&a.center),
                    radius: r * 2.0 * a.half_width,
                    level: i as u8 + 1,
                })
                .collect(),
            start_dot: at(&geo.start),
            end_dot: geo.end.as_ref().map(at).or(path.last().copied()).unwrap_or(at(&geo.start)),
            path,
        }
    }

    pub fn empty(outer_hex_radius: f64) -> Self {
        Self {
            outer_hex_radius,
            areas: Vec::new(),
            path: Vec::new(),
            start_dot: HexPoint::default(),
            end_dot: HexPoint::default(),
        }
    }
}

/// Colors for overlays. Level 1 areas use `shallow`; deeper levels use `deep`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OverlayPalette {
    pub outer: String,
    pub shallow: String,
    pub deep: String,
    pub path: String,
    pub dot: String,
}

impl Default for OverlayPalette {
    fn default() -> Self {
        Self {
            outer: "#fbd9b0".into(),
            shallow: "#a8dba8".into(),
            deep: "#5b2c83".into(),
            path: "#444444".into(),
            dot: "#000000".into(),
        }
    }
}

impl OverlayPalette {
    pub fn area_fill(&self, level: u8) -> &str {
        if level <= 1 {
            &self.shallow
        } else {
            &self.deep
        }
    }
}

/// Vertices at 0, 60, ... 300 degrees, matching the projected cube outline.
fn hexagon_points(center: HexPoint<f64>, radius: f64, origin: (f64, f64)) -> String {
    (0..6)
        .map(|k| {
            let a = std::f64::consts::FRAC_PI_3 * k as f64;
            let (x, y) = screen(center + HexPoint::new(a.cos(), a.sin()) * radius, origin);
            format!("{},{}", num(x), num(y))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn screen(p: HexPoint<f64>, origin: (f64, f64)) -> (f64, f64) {
    (origin.0 + p.u, origin.1 - p.v)
}

fn overlay_group(out: &mut String, models: &[&OverlayModel], palette: &OverlayPalette, origin: (f64, f64), id: &str, attrs: &str) {
    let r = models.first().map_or(1.0, |m| m.outer_hex_radius);
    let opacity = if models.len() > 1 { " fill-opacity=\"0.35\"" } else { "" };
    let outer = hexagon_points(HexPoint::default(), r, origin);
    let _ = writeln!(out, "<g id=\"{id}\"{attrs}>");
    let _ = writeln!(out, "<clipPath id=\"{id}-clip\"><polygon points=\"{outer}\"/></clipPath>");
    let _ = writeln!(out, "<polygon data-role=\"outer\" points=\"{outer}\" fill=\"{}\"/>", palette.outer);
    let _ = writeln!(out, "<g clip-path=\"url(#{id}-clip)\">");
    for m in models {
        for a in &m.areas {
            let _ = writeln!(
                out,
                "<polygon data-role=\"area\" data-level=\"{}\" points=\"{}\" fill=\"{}\"{opacity}/>",
                a.level,
                hexagon_points(a.center, a.radius, origin),
                palette.area_fill(a.level)
            );
        }
    }
    out.push_str("</g>\n");
    let dot_r = r / 18.0;
    for m in models {
        if m.path.len() >= 2 {
            let pts = m
                .path
                .iter()
                .map(|p| {
                    let (x, y) = screen(*p, origin);
                    format!("{},{}", num(x), num(y))
                })
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(
                out,
                "<polyline data-role=\"path\" points=\"{pts}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>",
                palette.path,
                num(r / 60.0)
            );
        }
        for (role, p) in [("start", m.start_dot), ("end", m.end_dot)] {
            let (x, y) = screen(p, origin);
            let _ = writeln!(
                out,
                "<circle data-role=\"{role}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
                num(x),
                num(y),
                num(dot_r),
                palette.dot
            );
        }
    }
    out.push_str("</g>\n");
}

pub fn overlay_svg(model: &OverlayModel) -> String {
    overlay_svg_with(model, &OverlayPalette::default())
}

pub fn overlay_svg_with(model: &OverlayModel, palette: &OverlayPalette) -> String {
    let r = model.outer_hex_radius;
    let margin = r / 10.0;
    let (w, h) = (2.0 * (r + margin), 2.0 * (r + margin));
    let mut out = String::new();
    open_svg(&mut out, w, h);
    overlay_group(&mut out, &[model], palette, (w / 2.0, h / 2.0), "overlay", "");
    close_svg(&mut out);
    out
}

/// Users as rows, tasks as columns, with aggregate margins: one extra column
/// per user and one extra row per task, each drawing every trace of that group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OverlayGrid {
    pub users: Vec<String>,
    pub tasks: Vec<String>,
    pub cells: BTreeMap<String, BTreeMap<String, OverlayModel>>,
    pub user_scores: BTreeMap<String, f64>,
    pub task_scores: BTreeMap<String, f64>,
}

impl OverlayGrid {
    pub fn from_report(report: &AnalysisReport, outer_hex_radius: f64) -> Self {
        let mut cells: BTreeMap<String, BTreeMap<String, OverlayModel>> = BTreeMap::new();
        let mut users = Vec::new();
        let mut tasks = Vec::new();
        for t in &report.per_trace {
            if let Some(geo) = &t.geometry {
                cells
                    .entry(t.user_id.clone())
                    .or_default()
                    .insert(t.task_id.clone(), OverlayModel::from_geometry(geo, outer_hex_radius));
                users.push(t.user_id.clone());
                tasks.push(t.task_id.clone());
            }
        }
        users.sort();
        users.dedup();
        tasks.sort();
        tasks.dedup();
        Self {
            users,
            tasks,
            cells,
            user_scores: report
                .per_user
                .iter()
                .filter_map(|(u, s)| s.coherence.map(|c| (u.clone(), c)))
                .collect(),
            task_scores: report
                .per_task
                .iter()
                .filter_map(|(t, s)| s.overlap.map(|o| (t.clone(), o)))
                .collect(),
        }
    }

    pub fn cell(&self, user: &str, task: &str) -> Option<&OverlayModel> {
        self.cells.get(user).and_then(|m| m.get(task))
    }
}

pub fn overlay_grid_svg(grid: &OverlayGrid, radius: f64, palette: &OverlayPalette) -> String {
    let pitch = 2.0 * radius * 1.15;
    let label_w = 60.0;
    let label_h = 30.0;
    let cols = grid.tasks.len() + 1;
    let rows = grid.users.len() + 1;
    let w = label_w + cols as f64 * pitch;
    let h = label_h + rows as f64 * pitch + 20.0;
    let center = |row: usize, col: usize| {
        (
            label_w + (col as f64 + 0.5) * pitch,
            label_h + (row as f64 + 0.5) * pitch,
        )
    };
    let empty = OverlayModel::empty(radius);
    let mut out = String::new();
    open_svg(&mut out, w, h);
    for (col, t) in grid.tasks.iter().enumerate() {
        let (x, _) = center(0, col);
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            num(x),
            num(label_h - 10.0),
            escape(t)
        );
    }
    for (row, u) in grid.users.iter().enumerate() {
        let (_, y) = center(row, 0);
        let _ = writeln!(
            out,
            "<text x=\"4\" y=\"{}\" font-size=\"12\">{}</text>",
            num(y),
            escape(u)
        );
        for (col, t) in grid.tasks.iter().enumerate() {
            let model = grid.cell(u, t);
            let attrs = format!(
                " data-kind=\"cell\" data-user=\"{}\" data-task=\"{}\"{}",
                escape(u),
                escape(t),
                if model.is_none() { " data-empty=\"true\"" } else { "" }
            );
            let id = format!("cell-{row}-{col}");
            overlay_group(&mut out, &[model.unwrap_or(&empty)], palette, center(row, col), &id, &attrs);
        }
        let models: Vec<&OverlayModel> = grid.cells.get(u).map(|m| m.values().collect()).unwrap_or_default();
        let score = grid.user_scores.get(u).map(|s| format!(" data-score=\"{}\"", num(*s))).unwrap_or_default();
        let attrs = format!(" data-kind=\"user-margin\" data-user=\"{}\"{score}", escape(u));
        overlay_group(&mut out, &models, palette, center(row, grid.tasks.len()), &format!("user-{row}"), &attrs);
    }
    for (col, t) in grid.tasks.iter().enumerate() {
        let models: Vec<&OverlayModel> = grid.cells.values().filter_map(|m| m.get(t)).collect();
        let score = grid.task_scores.get(t).map(|s| format!(" data-score=\"{}\"", num(*s))).unwrap_or_default();
        let attrs = format!(" data-kind=\"task-margin\" data-task=\"{}\"{score}", escape(t));
        overlay_group(&mut out, &models, palette, center(grid.users.len(), col), &format!("task-{col}"), &attrs);
        if let Some(s) = grid.task_scores.get(t) {
            let (x, y) = center(grid.users.len(), col);
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
                num(x),
                num(y + radius + 14.0),
                num(*s)
            );
        }
    }
    close_svg(&mut out);
    out
}
