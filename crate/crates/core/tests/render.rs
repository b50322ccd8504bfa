use typespace_core::analytics::{analyze, simulate_cohort, simulate_trace, trace_geometry, PatternLabel};
use typespace_core::coords::DesignCoords;
use typespace_core::demo;
use typespace_core::hex::project;
use typespace_core::outline::{Contour, GlyphNode, GlyphOutline};
use typespace_core::render::{
    glyph_svg, overlay_grid_svg, overlay_svg, specimen_sheet, text_svg, OverlayGrid, OverlayModel, OverlayPalette,
    TextLayout,
};
use typespace_core::Space;

fn space() -> &'static Space {
    static SPACE: std::sync::OnceLock<Space> = std::sync::OnceLock::new();
    SPACE.get_or_init(demo::demo_space)
}

fn unit_square() -> GlyphOutline<f64> {
    GlyphOutline {
        glyph_name: "square".into(),
        advance_width: 1000.0,
        contours: vec![Contour::closed(vec![
            GlyphNode::on(0.0, 0.0),
            GlyphNode::on(1000.0, 0.0),
            GlyphNode::on(1000.0, 1000.0),
            GlyphNode::on(0.0, 1000.0),
        ])],
    }
}

fn parse(svg: &str) -> roxmltree::Document<'_> {
    roxmltree::Document::parse(svg).expect("well-formed XML")
}

fn count(doc: &roxmltree::Document, attr: &str, value: &str) -> usize {
    doc.descendants().filter(|n| n.attribute(attr) == Some(value)).count()
}

#[test]
fn unit_square_matches_golden() {
    let svg = glyph_svg(&unit_square(), 100.0).unwrap();
    assert_eq!(svg, include_str!("golden/unit_square.svg"));
    let doc = parse(&svg);
    let path = doc.descendants().find(|n| n.has_tag_name("path")).unwrap();
    let d = path.attribute("d").unwrap();
    assert_eq!(d.matches(" L ").count(), 4);
    assert!(d.ends_with(" Z"));
}

#[test]
fn every_demo_glyph_renders() {
    for g in demo::DEMO_GLYPHS {
        let outline = space().interpolate_glyph(g, &DesignCoords::new([0.3, 0.7, 0.1]).unwrap()).unwrap();
        let svg = glyph_svg(&outline, 120.0).unwrap();
        let doc = parse(&svg);
        assert_eq!(doc.descendants().filter(|n| n.has_tag_name("path")).count(), outline.contours.len());
    }
}

#[test]
fn text_total_advance_is_sum_of_advances() {
    let c = DesignCoords::new([0.25, 0.5, 0.75]).unwrap();
    let layout = TextLayout {
        size_px: 48.0,
        letter_spacing: 3.5,
        line_spacing: 60.0,
    };
    let text = "viz lo\noil";
    let r = text_svg(space(), &c, text, layout);
    parse(&r.svg);
    for (line, width) in text.split('\n').zip(&r.line_widths) {
        let n = line.chars().count();
        let sum: f64 = line
            .chars()
            .map(|ch| space().interpolate_glyph(&demo::glyph_for_char(ch), &c).unwrap().advance_width * 0.048)
            .sum();
        assert!((width - sum - layout.letter_spacing * (n - 1) as f64).abs() < 1e-9);
    }
}

#[test]
fn overlay_centers_follow_projection() {
    let t = simulate_trace(space(), PatternLabel::Wandering, "T1", "U01", 3);
    let geo = trace_geometry(&t).unwrap();
    let model = OverlayModel::from_geometry(&geo, 80.0);
    for (area, src) in model.areas.iter().zip(&geo.areas) {
        assert!(area.center.distance(project(&src.center) * 80.0) < 1e-9);
    }
    let doc_text = overlay_svg(&model);
    let doc = parse(&doc_text);
    assert_eq!(count(&doc, "data-role", "area"), 3);
}

#[test]
fn nested_zooms_shrink() {
    let t = simulate_trace(space(), PatternLabel::Convergent, "T1", "U01", 11);
    let model = OverlayModel::from_geometry(&trace_geometry(&t).unwrap(), 80.0);
    assert!(model.areas.len() >= 2);
    assert!(model.areas[0].radius > model.areas[1].radius);
    let svg = overlay_svg(&model);
    let p = OverlayPalette::default();
    assert!(svg.contains("data-level=\"1\" points="));
    assert!(svg.contains(&p.shallow) && svg.contains(&p.deep));
}

#[test]
fn empty_overlay_is_hexagon_and_dots() {
    let doc_text = overlay_svg(&OverlayModel::empty(50.0));
    let doc = parse(&doc_text);
    assert_eq!(count(&doc, "data-role", "outer"), 1);
    assert_eq!(count(&doc, "data-role", "area"), 0);
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("circle")).count(), 2);
}

#[test]
fn cohort_grid_layout() {
    let traces = simulate_cohort(space(), 21, 6, 7);
    let report = analyze(&traces);
    let grid = OverlayGrid::from_report(&report, 30.0);
    let svg = overlay_grid_svg(&grid, 30.0, &OverlayPalette::default());
    let doc = parse(&svg);
    assert_eq!(count(&doc, "data-kind", "cell"), 126);
    assert_eq!(count(&doc, "data-kind", "user-margin"), 21);
    assert_eq!(count(&doc, "data-kind", "task-margin"), 6);
    assert_eq!(svg, overlay_grid_svg(&grid, 30.0, &OverlayPalette::default()));
}

#[test]
fn specimen_annotations_use_descriptor_words() {
    let svg = specimen_sheet(space(), &["i", "o"], 0.5).unwrap();
    let doc = parse(&svg);
    let cells: Vec<_> = doc
        .descendants()
        .filter(|n| n.attribute("data-kind") == Some("specimen-cell"))
        .collect();
    assert_eq!(cells.len(), 54);
    for cell in cells.iter().take(27) {
        let words = cell.attribute("data-words").unwrap();
        let texts: Vec<_> = cell.descendants().filter_map(|n| n.text()).collect();
        assert!(texts.contains(&words));
    }
    let c = DesignCoords::new([0.0, 0.0, 0.0]).unwrap();
    assert_eq!(cells[0].attribute("data-words").unwrap(), space().descriptor_words(&c).join(" "));
}
