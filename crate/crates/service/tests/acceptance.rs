//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run alone with `cargo test -p typespace --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use axum::http::StatusCode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use typespace_core::analytics::{
    classify, coherence_score, detect_extreme_sweeps, simulate_cohort, simulate_control_trace, simulate_exploration,
    simulate_shared_octant_cohort, simulate_trace, simulate_uniform_cohort, within_task_overlap, CorpusStats,
    PatternLabel,
};
use typespace_core::catalog::{audit_guidelines, demo_flow, select_category, DisplayState, RuleId, MAX_ZOOM};
use typespace_core::demo::{demo_space, DEMO_GLYPHS};
use typespace_core::hex::{collides, project};
use typespace_core::outline::{Contour, GlyphNode, GlyphOutline, UNITS_PER_EM};
use typespace_core::render::{
    glyph_svg, overlay_grid_svg, overlay_svg, specimen_sheet, text_svg, OverlayGrid, OverlayModel, OverlayPalette,
    TextLayout,
};
use typespace_core::session::{
    replay, EventKind, InterfaceKind, Recorder, SessionHeader, TRACE_VERSION,
};
use typespace_core::space::corner_weights;
use typespace_core::store::{canonical_file_text, session_file_path, SessionStore};
use typespace_core::{Coords, Corner, EngineError, SessionTrace, Space};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn c(x: f64, y: f64, z: f64) -> Coords {
    Coords::new([x, y, z]).unwrap()
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    if took > limit {
        Err(format!("took {took:.2?}, limit {limit:?}"))
    } else {
        Ok(took)
    }
}

// ---------------------------------------------------------------------------
// Interpolation

const EM_TOL: f64 = 1e-12;

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}

fn corner_exactness(space: &Space) -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for g in DEMO_GLYPHS {
        for corner in Corner::ALL {
            let got = space.interpolate_glyph(g, &corner.coords()).map_err(|e| e.to_string())?;
            let dev = got.max_deviation(space.master(g, corner).unwrap()).ok_or("shape mismatch")?;
            worst = worst.max(dev / UNITS_PER_EM);
        }
    }
    ensure!(worst <= EM_TOL, "max deviation {worst:e} em");
    let took = within(t, Duration::from_secs(1))?;
    Ok(format!("{} glyph-corners, max deviation {worst:e} em, {took:.2?}", DEMO_GLYPHS.len() * 8))
}

fn multilinearity(space: &Space) -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let mut worst_mid = 0.0f64;
    let mut worst_sum = 0.0f64;
    for i in 0..1000 {
        let a = c(rng.random(), rng.random(), rng.random());
        let b = a.with_axis(rng.random_range(0..3), rng.random()).unwrap();
        let g = DEMO_GLYPHS[i % DEMO_GLYPHS.len()];
        let ia = space.interpolate_glyph(g, &a).unwrap();
        let ib = space.interpolate_glyph(g, &b).unwrap();
        let im = space.interpolate_glyph(g, &a.midpoint(&b)).unwrap();
        worst_mid = worst_mid.max((im.advance_width - (ia.advance_width + ib.advance_width) / 2.0).abs());
        for ((cm, ca), cb) in im.contours.iter().zip(&ia.contours).zip(&ib.contours) {
            for ((m, p), q) in cm.nodes.iter().zip(&ca.nodes).zip(&cb.nodes) {
                worst_mid = worst_mid
                    .max((m.x - (p.x + q.x) / 2.0).abs())
                    .max((m.y - (p.y + q.y) / 2.0).abs());
            }
        }
        for p in [a, b] {
            worst_sum = worst_sum.max((corner_weights(&p).iter().sum::<f64>() - 1.0).abs());
        }
        // Independent check of the weights by nested one-axis blends.
        let w = corner_weights(&a);
        let v = a.as_array();
        for (bit, wb) in w.iter().enumerate() {
            let one_hot: [f64; 8] = std::array::from_fn(|k| if k == bit { 1.0 } else { 0.0 });
            let x: Vec<f64> = (0..4).map(|k| lerp(one_hot[2 * k], one_hot[2 * k + 1], v[0])).collect();
            let nested = lerp(lerp(x[0], x[1], v[1]), lerp(x[2], x[3], v[1]), v[2]);
            ensure!((nested - wb).abs() <= 1e-12, "weight {bit} at {a}: {wb} vs {nested}");
        }
    }
    let worst_mid = worst_mid / UNITS_PER_EM;
    ensure!(worst_mid <= EM_TOL, "midpoint deviation {worst_mid:e} em");
    ensure!(worst_sum <= 1e-12, "weight sum deviation {worst_sum:e}");
    let took = within(t, Duration::from_secs(5))?;
    Ok(format!(
        "1000 pairs, midpoint {worst_mid:e} em, weight sum {worst_sum:e}, {took:.2?}"
    ))
}

// ---------------------------------------------------------------------------
// Projection

fn projection_geometry() -> Outcome {
    for corner in [0u8, 7] {
        let p = project(&Corner::new(corner).unwrap().coords::<f64>());
        ensure!(p.norm() <= 1e-12, "corner {corner} projects to {p:?}");
    }
    let mut angles = Vec::new();
    for corner in &Corner::ALL[1..7] {
        let p = project(&corner.coords::<f64>());
        ensure!((p.norm() - 1.0).abs() <= 1e-9, "corner {corner:?} radius {}", p.norm());
        angles.push(p.angle().to_degrees().rem_euclid(360.0));
    }
    angles.sort_by(f64::total_cmp);
    for w in angles.windows(2) {
        ensure!((w[1] - w[0] - 60.0).abs() <= 1e-9, "spacing {angles:?}");
    }
    ensure!((angles[0] + 360.0 - angles[5] - 60.0).abs() <= 1e-9, "wrap spacing {angles:?}");
    let lattice: Vec<Coords> = (0..125)
        .map(|i| c((i % 5) as f64 / 4.0, (i / 5 % 5) as f64 / 4.0, (i / 25) as f64 / 4.0))
        .collect();
    let mut pairs = 0;
    let mut hits = 0;
    for a in &lattice {
        for b in &lattice {
            let d = [0, 1, 2].map(|i| a.get(i) - b.get(i));
            let kernel = d[0] == d[1] && d[1] == d[2];
            ensure!(collides(a, b, 1e-6) == kernel, "{a} vs {b}");
            pairs += 1;
            hits += kernel as usize;
        }
    }
    Ok(format!("6 vertices at radius 1 / 60 deg, {pairs} lattice pairs ({hits} collisions) agree with the diagonal test"))
}

// ---------------------------------------------------------------------------
// Navigation

fn positions_consistent(s: &DisplayState) -> Result<(), String> {
    for i in s.shown.iter().chain(&s.occluded) {
        let want = project(&i.coords) * s.scale + s.pan_offset;
        ensure!(i.pos.distance(want) <= 1e-9, "{} at {:?}, expected {:?}", i.coords, i.pos, want);
    }
    Ok(())
}

fn navigation(space: &Space) -> Outcome {
    let s0 = select_category(space, Corner::new(0).unwrap()).map_err(|e| e.to_string())?;
    let s1 = s0.zoom_in(&c(0.0, 0.0, 0.0)).map_err(|e| e.to_string())?;
    let added: BTreeSet<[u64; 3]> = s1
        .shown
        .iter()
        .filter(|i| !s0.is_shown(&i.coords))
        .map(|i| i.coords.as_array().map(f64::to_bits))
        .collect();
    let want: BTreeSet<[u64; 3]> = [
        [0.5, 0.0, 0.0],
        [0.0, 0.5, 0.0],
        [0.0, 0.0, 0.5],
        [0.5, 0.5, 0.0],
        [0.5, 0.0, 0.5],
        [0.0, 0.5, 0.5],
    ]
    .into_iter()
    .map(|a| a.map(f64::to_bits))
    .collect();
    ensure!(added == want, "first zoom added {} other instances", added.len());

    let mut deep = s1.clone();
    while deep.zoom_level < MAX_ZOOM {
        deep = deep.zoom_in(&deep.center()).map_err(|e| e.to_string())?;
    }
    ensure!(deep.zoom_in(&deep.center()) == Err(EngineError::MaxZoom), "zoom past level {MAX_ZOOM}");

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut states = 0usize;
    for _ in 0..10_000 {
        let corner = Corner::new(if rng.random_bool(0.5) { 0 } else { 7 }).unwrap();
        let mut s = select_category(space, corner).unwrap();
        positions_consistent(&s)?;
        for _ in 0..rng.random_range(1..=16) {
            let pick = s.shown[rng.random_range(0..s.shown.len())].coords;
            s = match rng.random_range(0..8) {
                0..=2 => s.zoom_in(&pick).unwrap_or(s),
                3 => s.click(&pick).map_err(|e| e.to_string())?,
                4 => match s.fine_tune_target {
                    Some(b) => s.fine_tune(&b, rng.random_range(0..3), rng.random()).unwrap().0,
                    None => s,
                },
                5 => s.show_all(),
                6 => {
                    let back = s.toggle_start().toggle_start();
                    ensure!(back.approx_eq(&s, 1e-9), "toggle_start twice changed the state");
                    s.toggle_start()
                }
                _ => {
                    s.hover_preview(&pick).map_err(|e| e.to_string())?;
                    s
                }
            };
            positions_consistent(&s)?;
            states += 1;
        }
    }
    Ok(format!(
        "6 midpoints on first zoom, cap at level {MAX_ZOOM}, involution and positions hold over 10000 sequences ({states} states)"
    ))
}

// ---------------------------------------------------------------------------
// Audit

fn audit(space: &Space) -> Outcome {
    let (opening, states) = demo_flow(space);
    let report = audit_guidelines(&opening, &states);
    ensure!(report.all_passed(), "demo flow failed: {:?}", report.checks);
    let mut mutated = opening.clone();
    mutated.selected_index = Some(0);
    let bad = audit_guidelines(&mutated, &states);
    ensure!(!bad.check(RuleId::R1).passed, "preselected opening passed R1");
    Ok(format!(
        "demo flow passes {} rules; preselected opening fails R1",
        report.checks.len()
    ))
}

// ---------------------------------------------------------------------------
// Analytics

fn catalog_trace(space: &Space, user: &str, corner: u8, foci: &[Coords]) -> SessionTrace {
    let header = SessionHeader {
        v: TRACE_VERSION,
        session_id: format!("{user}-T1"),
        user_id: user.into(),
        task_id: "T1".into(),
        interface_kind: InterfaceKind::Catalog,
        space_hash: space.space_hash().into(),
    };
    let mut rec = Recorder::new(header, 0);
    let corner = Corner::new(corner).unwrap();
    let mut s = select_category(space, corner).unwrap();
    let mut t = 0;
    let mut step = |rec: &mut Recorder, k: EventKind| {
        t += 100;
        rec.record(t, k);
    };
    step(&mut rec, EventKind::CategorySelect { corner });
    for f in foci {
        s = s.zoom_in(f).unwrap();
        step(&mut rec, EventKind::ZoomIn { coords: *f });
    }
    step(&mut rec, EventKind::Download { coords: s.current_selection() });
    rec.finish()
}

fn analytics(space: &Space) -> Outcome {
    let t = Instant::now();
    for a in PatternLabel::ARCHETYPES {
        for seed in 0..250 {
            let trace = simulate_trace(space, a, "T1", "U01", seed);
            let labels = classify(&trace).map_err(|e| e.to_string())?.labels;
            ensure!(labels.contains(&a), "{a:?} seed {seed} classified as {labels:?}");
        }
    }

    let corpus_traces = simulate_cohort(space, 21, 6, 7);
    let corpus = CorpusStats::from_traces(&corpus_traces);
    let one = simulate_trace(space, PatternLabel::Wandering, "T1", "U01", 5);
    let mut twin = one.clone();
    twin.header.task_id = "T2".into();
    let coherence = coherence_score(&[one, twin], &corpus).map_err(|e| e.to_string())?;
    ensure!((coherence - 1.0).abs() <= 1e-9, "duplicated traces coherence {coherence}");

    let base = simulate_trace(space, PatternLabel::Convergent, "T1", "U01", 3);
    let identical: Vec<SessionTrace> = (0..5)
        .map(|i| {
            let mut t = base.clone();
            t.header.user_id = format!("U{i}");
            t
        })
        .collect();
    let same = within_task_overlap(&identical).map_err(|e| e.to_string())?;
    ensure!(same == 1.0, "identical-area cohort {same}");

    // Three nested zooms on each cube vertex: every trace stays in its own octant.
    let disjoint: Vec<SessionTrace> = Corner::ALL
        .iter()
        .map(|v| {
            let start = if v.bits() == 7 { 7 } else { 0 };
            let f: Coords = v.coords();
            catalog_trace(space, &format!("V{}", v.bits()), start, &[f, f, f])
        })
        .collect();
    let apart = within_task_overlap(&disjoint).map_err(|e| e.to_string())?;
    ensure!(apart == 0.0, "disjoint-octant cohort {apart}");

    const SHARED_SEED: u64 = 11;
    const UNIFORM_SEED: u64 = 12;
    let shared = within_task_overlap(&simulate_shared_octant_cohort(space, 21, SHARED_SEED)).unwrap();
    let uniform = within_task_overlap(&simulate_uniform_cohort(space, 21, UNIFORM_SEED)).unwrap();
    ensure!(shared >= 0.5, "shared-octant cohort {shared}");
    ensure!(uniform <= 0.2, "uniform cohort {uniform}");
    let took = within(t, Duration::from_secs(30))?;
    Ok(format!(
        "1000/1000 archetypes recovered, coherence {coherence}, overlap identical {same} / disjoint {apart} / shared {shared:.3} / uniform {uniform:.3}, {took:.2?}"
    ))
}

// ---------------------------------------------------------------------------
// Blind selection

fn slider_trace(values: &[f64]) -> SessionTrace {
    let header = SessionHeader {
        v: TRACE_VERSION,
        session_id: "ctl".into(),
        user_id: "U01".into(),
        task_id: "T1".into(),
        interface_kind: InterfaceKind::Control,
        space_hash: "h".into(),
    };
    let mut rec = Recorder::new(header, 0);
    for (i, v) in values.iter().enumerate() {
        rec.record(100 * (i as u64 + 1), EventKind::SliderMove { axis: 1, value: *v });
    }
    rec.finish()
}

fn blind_selection() -> Outcome {
    let cases: [(&[f64], usize, bool); 3] = [
        (&[0.0, 1.0, 0.0, 1.0], 3, true),
        (&[0.0, 0.6], 0, false),
        (&[0.0, 0.96, 0.04], 2, false),
    ];
    for (path, sweeps, flag) in cases {
        let r = detect_extreme_sweeps(&slider_trace(path)).map_err(|e| e.to_string())?;
        ensure!(
            r.total == sweeps && r.blind_selection == flag,
            "path {path:?}: {} sweeps, flag {}",
            r.total,
            r.blind_selection
        );
    }
    Ok("paths give (3, flagged), (0), (2, not flagged)".into())
}

// ---------------------------------------------------------------------------
// Persistence

fn persistence(space: &Space) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let store = SessionStore::open_with(dir.path(), typespace_core::store::Durability::Flush).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut traces = Vec::with_capacity(1000);
    for i in 0..1000u64 {
        let seed = rng.random::<u64>();
        let user = format!("U{:02}", i % 21);
        let t = match i % 6 {
            0..=3 => simulate_trace(space, PatternLabel::ARCHETYPES[(i % 4) as usize], "T1", &user, seed),
            4 => simulate_exploration(space, "T1", &user, seed),
            _ => simulate_control_trace(space, "T1", &user, seed, rng.random_bool(0.5)),
        };
        t.validate().map_err(|e| format!("{}: {e}", t.header.session_id))?;
        store.import(&t).map_err(|e| e.to_string())?;
        if i % 2 == 0 {
            store.close(&t.header.session_id).map_err(|e| e.to_string())?;
        }
        traces.push(t);
    }
    drop(store);
    let reopened = SessionStore::open(dir.path()).map_err(|e| e.to_string())?;
    let mut events = 0;
    for (i, t) in traces.iter().enumerate() {
        let id = &t.header.session_id;
        let path = session_file_path(&reopened, id).ok_or("missing session file")?;
        let bytes = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        ensure!(bytes == canonical_file_text(t, i % 2 == 0), "{id}: stored bytes differ");
        let loaded = reopened.load_trace(id).map_err(|e| e.to_string())?;
        ensure!(&loaded == t, "{id}: reloaded trace differs");
        let a = replay(space, t).map_err(|e| format!("{id}: {e}"))?;
        let b = replay(space, &loaded).map_err(|e| format!("{id}: {e}"))?;
        ensure!(a == b, "{id}: replay not deterministic");
        let d = t.download().ok_or("no download")?;
        let fin = a.final_coords.ok_or("no final coords")?;
        ensure!(fin.approx_eq(&d, 1e-9), "{id}: download {d} vs replay {fin}");
        events += t.events.len();
    }
    Ok(format!("1000 streams ({events} events) byte-identical after reload, replay deterministic"))
}

// ---------------------------------------------------------------------------
// Rendering

fn well_formed(svg: &str, what: &str) -> Result<(), String> {
    roxmltree::Document::parse(svg).map(|_| ()).map_err(|e| format!("{what}: {e}"))
}

fn rendering(space: &Space) -> Outcome {
    let square = GlyphOutline {
        glyph_name: "square".into(),
        advance_width: 1000.0,
        contours: vec![Contour::closed(vec![
            GlyphNode::on(0.0, 0.0),
            GlyphNode::on(1000.0, 0.0),
            GlyphNode::on(1000.0, 1000.0),
            GlyphNode::on(0.0, 1000.0),
        ])],
    };
    let golden = include_str!("../../core/tests/golden/unit_square.svg");
    let svg = glyph_svg(&square, 100.0).map_err(|e| e.to_string())?;
    ensure!(svg == golden, "unit square differs from golden:\n{svg}");

    let traces = simulate_cohort(space, 21, 6, 7);
    let report = typespace_core::analytics::analyze(&traces);
    let grid = OverlayGrid::from_report(&report, 30.0);
    let grid_svg = overlay_grid_svg(&grid, 30.0, &OverlayPalette::default());
    let doc = roxmltree::Document::parse(&grid_svg).map_err(|e| e.to_string())?;
    let kind = |k: &str| doc.descendants().filter(|n| n.attribute("data-kind") == Some(k)).count();
    let (cells, users, tasks) = (kind("cell"), kind("user-margin"), kind("task-margin"));
    ensure!((cells, users, tasks) == (126, 21, 6), "grid has {cells} cells, {users} user and {tasks} task margins");

    let mid = c(0.5, 0.5, 0.5);
    for g in DEMO_GLYPHS {
        well_formed(&glyph_svg(&space.interpolate_glyph(g, &mid).unwrap(), 80.0).unwrap(), g)?;
    }
    well_formed(&text_svg(space, &mid, "viz\nlo&<>", TextLayout::default()).svg, "text")?;
    for step in [1.0, 0.5, 0.25] {
        well_formed(&specimen_sheet(space, &DEMO_GLYPHS, step).unwrap(), "specimen")?;
    }
    for t in traces.iter().take(12) {
        let geo = typespace_core::analytics::trace_geometry(t).unwrap();
        well_formed(&overlay_svg(&OverlayModel::from_geometry(&geo, 60.0)), "overlay")?;
    }
    Ok(format!(
        "golden match, {cells}-cell grid with {users} user and {tasks} task margins, all documents parse"
    ))
}

// ---------------------------------------------------------------------------
// End to end through the HTTP API

struct Client {
    app: axum::Router,
    id: String,
    seq: u64,
    t: u64,
}

impl Client {
    async fn send(&mut self, kind: Value) -> Result<Value, String> {
        self.seq += 1;
        self.t += 400;
        let mut ev = kind;
        ev["seq"] = json!(self.seq);
        ev["tMs"] = json!(self.t);
        let uri = format!("/api/session/{}/events", self.id);
        let (status, body) = common::call(&self.app, "POST", &uri, Some(&json!({ "events": [ev] }))).await;
        ensure!(status == StatusCode::OK, "event {} rejected: {body}", self.seq);
        Ok(body["replay"].clone())
    }
}

fn shown(replay: &Value, pred: impl Fn(&Value) -> bool) -> Result<Value, String> {
    replay["state"]["shown"]
        .as_array()
        .ok_or("no display state")?
        .iter()
        .find(|i| pred(i))
        .map(|i| i["coords"].clone())
        .ok_or_else(|| "no matching instance".to_string())
}

async fn end_to_end(space: &Space) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let app = common::app(dir.path());
    let (_, info) = common::call(&app, "GET", "/api/space", None).await;
    ensure!(info["opening"]["selectedIndex"].is_null(), "opening screen has a selection");
    let corner = info["opening"]["options"][0]["corner"].clone();
    let new = json!({"userId": "U01", "taskId": "T1", "interfaceKind": "inbetween"});
    let (status, created) = common::call(&app, "POST", "/api/session", Some(&new)).await;
    ensure!(status == StatusCode::OK, "create: {created}");
    let mut client = Client {
        app: app.clone(),
        id: created["sessionId"].as_str().ok_or("no id")?.to_string(),
        seq: 0,
        t: 0,
    };
    client.send(json!({"kind": "SessionStart"})).await?;
    let r = client.send(json!({"kind": "CategorySelect", "corner": corner})).await?;
    let start = shown(&r, |i| i["isCenter"] == true)?;
    let other = shown(&r, |i| i["isCenter"] == false)?;
    client.send(json!({"kind": "Hover", "coords": other})).await?;
    let r = client.send(json!({"kind": "ZoomIn", "coords": start})).await?;
    let next = shown(&r, |i| i["revealedAtLevel"] == 1)?;
    let r = client.send(json!({"kind": "ZoomIn", "coords": next})).await?;
    let pick = shown(&r, |i| i["revealedAtLevel"] == 2)?;
    client.send(json!({"kind": "Click", "coords": pick})).await?;
    let value = if start[0].as_f64() == Some(0.0) { 0.1 } else { 0.9 };
    let r = client.send(json!({"kind": "FineTune", "axis": 0, "value": value})).await?;
    let fin = r["finalCoords"].clone();
    let r = client.send(json!({"kind": "Download", "coords": fin})).await?;
    ensure!(r["download"] == fin, "download {} vs {}", r["download"], fin);
    let close = format!("/api/session/{}/close", client.id);
    ensure!(common::call(&app, "POST", &close, None).await.0 == StatusCode::OK, "close failed");

    let (status, analysis) = common::call(&app, "GET", &format!("/api/analysis/session/{}", client.id), None).await;
    ensure!(status == StatusCode::OK, "analysis: {analysis}");
    let labels: BTreeSet<PatternLabel> =
        serde_json::from_value(analysis["report"]["pattern"]["labels"].clone()).map_err(|e| e.to_string())?;
    ensure!(labels.contains(&PatternLabel::Convergent), "labels {labels:?} lack Convergent");
    ensure!(!labels.contains(&PatternLabel::MinimalInteraction), "labels {labels:?} include MinimalInteraction");

    let store = SessionStore::open(dir.path()).map_err(|e| e.to_string())?;
    let stored = store.load_trace(&client.id).map_err(|e| e.to_string())?;
    ensure!(classify(&stored).unwrap().labels == labels, "service labels differ from local classification");
    ensure!(replay(space, &stored).is_ok(), "stored trace does not replay");

    let c = stored.download().unwrap().as_array();
    let uri = format!("/api/download?x={}&y={}&z={}", c[0], c[1], c[2]);
    let (_, doc) = common::call(&app, "GET", &uri, None).await;
    let doc = serde_json::from_value(doc).map_err(|e| e.to_string())?;
    Space::from_document(doc).map_err(|e| format!("download does not reload: {e}"))?;
    Ok(format!(
        "{} events through the API, labels {labels:?}, download reloads as a space",
        stored.events.len()
    ))
}

fn main() {
    let total = Instant::now();
    let space = demo_space();
    let rt = tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .unwrap();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("corner exactness", Box::new(|| corner_exactness(&space))),
        ("multilinearity and normalization", Box::new(|| multilinearity(&space))),
        ("projection geometry", Box::new(projection_geometry)),
        ("navigation semantics", Box::new(|| navigation(&space))),
        ("guideline audit", Box::new(|| audit(&space))),
        ("analytics oracle", Box::new(|| analytics(&space))),
        ("blind-selection detection", Box::new(blind_selection)),
        ("replay and persistence", Box::new(|| persistence(&space))),
        ("rendering", Box::new(|| rendering(&space))),
        ("end-to-end headless", Box::new(|| rt.block_on(end_to_end(&space)))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(format!("panicked: {p:?}")));
        match outcome {
            Ok(detail) => println!("PASS  {:>2} {name}: {detail} [{:.2?}]", i + 1, t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2} {name}: {why} [{:.2?}]", i + 1, t.elapsed());
            }
        }
    }
    let elapsed = total.elapsed();
    if elapsed > Duration::from_secs(120) {
        failed += 1;
        println!("FAIL  suite runtime {elapsed:.2?} exceeds 2 min");
    }
    println!(
        "acceptance: {} passed, {failed} failed in {elapsed:.2?}",
        criteria.len() - failed.min(criteria.len())
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
