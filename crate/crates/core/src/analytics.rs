//! Selection processes as decision-tree traversals: pattern labels, cohort
//! metrics, blind-selection detection and a seeded trace simulator.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{select_category, DisplayState, MAX_ZOOM};
use crate::coords::{Corner, DesignCoords};
use crate::session::{
    EventKind, InterfaceKind, Recorder, SessionEvent, SessionHeader, SessionTrace, ToggleId, TRACE_VERSION,
};
use crate::space::DesignSpace;

type Coords = DesignCoords<f64>;

pub const REPORT_VERSION: u32 = 1;

/// Every threshold the classifiers and metrics use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalyticsConfig {
    /// L-infinity radius around the first zoom focus (and the start) that counts as converging.
    pub convergence_radius: f64,
    /// Distinct octants of zoom foci that count as wandering.
    pub wandering_octants: usize,
    /// Cells per axis of the overlap grid.
    pub overlap_grid: usize,
    /// Slider moves per axis inspected for sweeps.
    pub sweep_window: usize,
    pub sweep_low: f64,
    pub sweep_high: f64,
    /// Total sweeps that flag blind selection.
    pub blind_min_sweeps: usize,
}

impl Default for AnalyticsConfig {
    fn default() -> Self {
        Self {
            convergence_radius: 0.5,
            wandering_octants: 3,
            overlap_grid: 4,
            sweep_window: 20,
            sweep_low: 0.05,
            sweep_high: 0.95,
            blind_min_sweeps: 3,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("session {0}: expected a catalog trace, found a control trace")]
    ControlTrace(String),
    #[error("session {0}: expected a control trace, found a catalog trace")]
    CatalogTrace(String),
    #[error("session {0}: no category was selected")]
    NoCategory(String),
    #[error("session {0}: no download")]
    MissingDownload(String),
    #[error("need at least 2 traces, got {0}")]
    TooFewTraces(usize),
    #[error("traces do not share one {0}")]
    MixedGroup(&'static str),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeNode {
    pub coords: Coords,
    pub level: u8,
    pub first_seq: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecisionTree {
    pub nodes: Vec<TreeNode>,
    /// `(parent, child)` node indices.
    pub edges: Vec<(usize, usize)>,
    pub traversal_order: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InterestArea {
    pub center: Coords,
    pub half_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PatternLabel {
    NonSelection,
    MinimalInteraction,
    Convergent,
    Wandering,
    Other,
}

impl PatternLabel {
    pub const ARCHETYPES: [PatternLabel; 4] = [
        PatternLabel::NonSelection,
        PatternLabel::MinimalInteraction,
        PatternLabel::Convergent,
        PatternLabel::Wandering,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Features {
    pub zoom_count: usize,
    pub octant_count: usize,
    pub path_length: f64,
    pub end_start_dist_linf: f64,
    pub fine_tune_count: usize,
    pub start_corner: Corner,
}

impl Features {
    pub fn vector(&self) -> [f64; 5] {
        [
            self.zoom_count as f64,
            self.octant_count as f64,
            self.path_length,
            self.end_start_dist_linf,
            self.fine_tune_count as f64,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternReport {
    pub labels: BTreeSet<PatternLabel>,
    pub features: Features,
}

/// Start, path and areas of one catalog trace, in design coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceGeometry {
    pub start: Coords,
    pub end: Option<Coords>,
    pub path: Vec<Coords>,
    pub areas: Vec<InterestArea>,
}

fn require_catalog(trace: &SessionTrace) -> Result<(), AnalyticsError> {
    match trace.header.interface_kind {
        InterfaceKind::Catalog => Ok(()),
        InterfaceKind::Control => Err(AnalyticsError::ControlTrace(trace.header.session_id.clone())),
    }
}

/// Category corner and the events after it, within the final attempt.
fn walk(trace: &SessionTrace) -> Result<(Corner, u64, &[SessionEvent]), AnalyticsError> {
    require_catalog(trace)?;
    let events = trace.final_attempt();
    let (i, corner, seq) = events
        .iter()
        .enumerate()
        .rev()
        .find_map(|(i, e)| match e.kind {
            EventKind::CategorySelect { corner } => Some((i, corner, e.seq)),
            _ => None,
        })
        .ok_or_else(|| AnalyticsError::NoCategory(trace.header.session_id.clone()))?;
    Ok((corner, seq, &events[i + 1..]))
}

fn zoom_foci(events: &[SessionEvent]) -> Vec<(u64, Coords)> {
    events
        .iter()
        .filter_map(|e| match e.kind {
            EventKind::ZoomIn { coords } => Some((e.seq, coords)),
            _ => None,
        })
        .collect()
}

pub fn build_tree(trace: &SessionTrace) -> Result<DecisionTree, AnalyticsError> {
    let (corner, seq, rest) = walk(trace)?;
    let mut nodes = vec![TreeNode {
        coords: corner.coords(),
        level: 0,
        first_seq: seq,
    }];
    let mut edges = Vec::new();
    for (seq, focus) in zoom_foci(rest) {
        let parent = nodes.len() - 1;
        nodes.push(TreeNode {
            coords: focus,
            level: nodes[parent].level + 1,
            first_seq: seq,
        });
        edges.push((parent, nodes.len() - 1));
    }
    let traversal_order = (0..nodes.len()).collect();
    Ok(DecisionTree {
        nodes,
        edges,
        traversal_order,
    })
}

pub fn interest_areas(trace: &SessionTrace) -> Result<Vec<InterestArea>, AnalyticsError> {
    let (_, _, rest) = walk(trace)?;
    Ok(zoom_foci(rest)
        .into_iter()
        .enumerate()
        .map(|(i, (_, center))| InterestArea {
            center,
            half_width: 0.5f64.powi(i as i32 + 1),
        })
        .collect())
}

pub fn trace_geometry(trace: &SessionTrace) -> Result<TraceGeometry, AnalyticsError> {
    let (corner, _, rest) = walk(trace)?;
    let start: Coords = corner.coords();
    let mut path = vec![start];
    let mut target: Option<Coords> = None;
    let mut end = None;
    for e in rest {
        match &e.kind {
            EventKind::ZoomIn { coords } => path.push(*coords),
            EventKind::Click { coords } => {
                target = Some(*coords);
                path.push(*coords);
            }
            EventKind::FineTune { axis, value } => {
                if let Some(t) = target.and_then(|t| t.with_axis(*axis, *value).ok()) {
                    target = Some(t);
                    path.push(t);
                }
            }
            EventKind::DisplayToggle {
                toggle: ToggleId::StartCorner,
            } => target = target.map(|t| t.antipode()),
            EventKind::Download { coords } => {
                end = Some(*coords);
                path.push(*coords);
            }
            _ => {}
        }
    }
    Ok(TraceGeometry {
        start,
        end,
        path,
        areas: interest_areas(trace)?,
    })
}

impl AnalyticsConfig {
    pub fn features(&self, trace: &SessionTrace) -> Result<Features, AnalyticsError> {
        let (corner, _, rest) = walk(trace)?;
        let geo = trace_geometry(trace)?;
        let end = geo
            .end
            .ok_or_else(|| AnalyticsError::MissingDownload(trace.header.session_id.clone()))?;
        let foci = zoom_foci(rest);
        let octants: BTreeSet<u8> = foci.iter().map(|(_, c)| c.octant()).collect();
        Ok(Features {
            zoom_count: foci.len(),
            octant_count: octants.len(),
            path_length: geo.path.windows(2).map(|w| w[0].l2(&w[1])).sum(),
            end_start_dist_linf: end.linf(&geo.start),
            fine_tune_count: rest
                .iter()
                .filter(|e| matches!(e.kind, EventKind::FineTune { .. }))
                .count(),
            start_corner: corner,
        })
    }

    pub fn classify(&self, trace: &SessionTrace) -> Result<PatternReport, AnalyticsError> {
        let features = self.features(trace)?;
        let (_, _, rest) = walk(trace)?;
        let foci = zoom_foci(rest);
        let mut labels = BTreeSet::new();
        if features.zoom_count == 0 {
            labels.insert(PatternLabel::NonSelection);
            return Ok(PatternReport { labels, features });
        }
        let first_zoom = rest
            .iter()
            .position(|e| matches!(e.kind, EventKind::ZoomIn { .. }))
            .expect("zoom_count > 0");
        let sliders_only = features.zoom_count == 1
            && rest[first_zoom + 1..].iter().all(|e| {
                matches!(
                    e.kind,
                    EventKind::Click { .. }
                        | EventKind::FineTune { .. }
                        | EventKind::TextEdit { .. }
                        | EventKind::Download { .. }
                )
            });
        if sliders_only {
            labels.insert(PatternLabel::MinimalInteraction);
        }
        let wandering = features.octant_count >= self.wandering_octants;
        if wandering {
            labels.insert(PatternLabel::Wandering);
        }
        let first = foci[0].1;
        let contained = foci.iter().all(|(_, c)| c.linf(&first) <= self.convergence_radius);
        if !wandering && contained && features.end_start_dist_linf <= self.convergence_radius {
            labels.insert(PatternLabel::Convergent);
        }
        if labels.is_empty() {
            labels.insert(PatternLabel::Other);
        }
        Ok(PatternReport { labels, features })
    }

    /// Mean pairwise cosine similarity of standardized feature vectors,
    /// mapped from [-1, 1] to [0, 1].
    pub fn coherence_score(&self, traces: &[SessionTrace], corpus: &CorpusStats) -> Result<f64, AnalyticsError> {
        if traces.len() < 2 {
            return Err(AnalyticsError::TooFewTraces(traces.len()));
        }
        if traces.iter().any(|t| t.header.user_id != traces[0].header.user_id) {
            return Err(AnalyticsError::MixedGroup("userId"));
        }
        let vectors = traces
            .iter()
            .map(|t| self.features(t).map(|f| corpus.standardize(&f)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(mean_pairwise(&vectors, |a, b| (cosine(a, b) + 1.0) / 2.0))
    }

    fn cells(&self, areas: &[InterestArea]) -> BTreeSet<(usize, usize, usize)> {
        let n = self.overlap_grid;
        let center = |i: usize| (i as f64 + 0.5) / n as f64;
        let mut out = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let p = [center(i), center(j), center(k)];
                    let inside = areas.iter().any(|a| {
                        let c = a.center.as_array();
                        (0..3).all(|d| (p[d] - c[d]).abs() <= a.half_width)
                    });
                    if inside {
                        out.insert((i, j, k));
                    }
                }
            }
        }
        out
    }

    /// Mean pairwise Jaccard index of the grid cells covered by each trace's interest areas.
    pub fn within_task_overlap(&self, traces: &[SessionTrace]) -> Result<f64, AnalyticsError> {
        if traces.len() < 2 {
            return Err(AnalyticsError::TooFewTraces(traces.len()));
        }
        if traces.iter().any(|t| t.header.task_id != traces[0].header.task_id) {
            return Err(AnalyticsError::MixedGroup("taskId"));
        }
        let sets = traces
            .iter()
            .map(|t| interest_areas(t).map(|a| self.cells(&a)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(mean_pairwise(&sets, jaccard))
    }

    pub fn detect_extreme_sweeps(&self, trace: &SessionTrace) -> Result<SweepReport, AnalyticsError> {
        if trace.header.interface_kind != InterfaceKind::Control {
            return Err(AnalyticsError::CatalogTrace(trace.header.session_id.clone()));
        }
        let mut per_axis = [0usize; 3];
        for (axis, count) in per_axis.iter_mut().enumerate() {
            let values = trace
                .events
                .iter()
                .filter_map(|e| match e.kind {
                    EventKind::SliderMove { axis: a, value } if a == axis => Some(value),
                    _ => None,
                })
                .take(self.sweep_window);
            // Sliders start at their minimum.
            let mut at_high = false;
            for v in values {
                if !at_high && v >= self.sweep_high {
                    at_high = true;
                    *count += 1;
                } else if at_high && v <= self.sweep_low {
                    at_high = false;
                    *count += 1;
                }
            }
        }
        let total = per_axis.iter().sum();
        Ok(SweepReport {
            per_axis,
            total,
            blind_selection: total >= self.blind_min_sweeps,
        })
    }
}

pub fn features(trace: &SessionTrace) -> Result<Features, AnalyticsError> {
    AnalyticsConfig::default().features(trace)
}

pub fn classify(trace: &SessionTrace) -> Result<PatternReport, AnalyticsError> {
    AnalyticsConfig::default().classify(trace)
}

pub fn coherence_score(traces: &[SessionTrace], corpus: &CorpusStats) -> Result<f64, AnalyticsError> {
    AnalyticsConfig::default().coherence_score(traces, corpus)
}

pub fn within_task_overlap(traces: &[SessionTrace]) -> Result<f64, AnalyticsError> {
    AnalyticsConfig::default().within_task_overlap(traces)
}

pub fn detect_extreme_sweeps(trace: &SessionTrace) -> Result<SweepReport, AnalyticsError> {
    AnalyticsConfig::default().detect_extreme_sweeps(trace)
}

fn mean_pairwise<T>(items: &[T], f: impl Fn(&T, &T) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            sum += f(&items[i], &items[j]);
            n += 1;
        }
    }
    (sum / n as f64).clamp(0.0, 1.0)
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    match (na == 0.0, nb == 0.0) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => {
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            (dot / (na * nb)).clamp(-1.0, 1.0)
        }
    }
}

fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Corpus-wide feature means and standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub mean: [f64; 5],
    pub std: [f64; 5],
}

const MIN_STD: f64 = 1e-12;

impl CorpusStats {
    /// Population statistics over the traces that have features; others are skipped.
    pub fn from_traces<'a>(traces: impl IntoIterator<Item = &'a SessionTrace>) -> Self {
        let vs: Vec<[f64; 5]> = traces
            .into_iter()
            .filter_map(|t| features(t).ok())
            .map(|f| f.vector())
            .collect();
        Self::from_vectors(&vs)
    }

    pub fn from_vectors(vs: &[[f64; 5]]) -> Self {
        let n = vs.len().max(1) as f64;
        let mut mean = [0.0; 5];
        let mut std = [0.0; 5];
        for d in 0..5 {
            mean[d] = vs.iter().map(|v| v[d]).sum::<f64>() / n;
            std[d] = (vs.iter().map(|v| (v[d] - mean[d]).powi(2)).sum::<f64>() / n).sqrt();
        }
        Self { mean, std }
    }

    /// Z-scores, dropping features with zero corpus variance.
    pub fn standardize(&self, f: &Features) -> Vec<f64> {
        let v = f.vector();
        (0..5)
            .filter(|&d| self.std[d] > MIN_STD)
            .map(|d| (v[d] - self.mean[d]) / self.std[d])
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepReport {
    pub per_axis: [usize; 3],
    pub total: usize,
    pub blind_selection: bool,
}

// ---------------------------------------------------------------------------
// Simulation

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mix_str(seed: u64, s: &str) -> u64 {
    s.bytes().fold(splitmix(seed), |acc, b| splitmix(acc ^ b as u64))
}

struct Sim<'a> {
    space: &'a DesignSpace<f64>,
    rng: ChaCha8Rng,
    rec: Recorder,
    t: u64,
}

impl Sim<'_> {
    fn tick(&mut self) -> u64 {
        self.t += self.rng.random_range(60..1500);
        self.t
    }

    fn rec(&mut self, kind: EventKind) {
        let t = self.tick();
        self.rec.record(t, kind);
    }

    fn hovers(&mut self, state: &DisplayState, max: usize) {
        let n = self.rng.random_range(0..=max);
        for _ in 0..n {
            let pick = state.shown.choose(&mut self.rng).expect("display is never empty").coords;
            self.rec(EventKind::Hover { coords: pick });
        }
    }

    fn category(&mut self) -> (Corner, DisplayState) {
        let corner = self.space.start_corners()[self.rng.random_range(0..2)].corner;
        self.category_at(corner)
    }

    fn category_at(&mut self, corner: Corner) -> (Corner, DisplayState) {
        self.rec(EventKind::CategorySelect { corner });
        (corner, select_category(self.space, corner).expect("start corner"))
    }

    fn zoom(&mut self, state: &DisplayState, focus: Coords) -> DisplayState {
        self.rec(EventKind::ZoomIn { coords: focus });
        state.zoom_in(&focus).expect("simulated zoom is legal")
    }

    fn click(&mut self, state: &DisplayState, target: Coords) -> DisplayState {
        self.rec(EventKind::Click { coords: target });
        state.click(&target).expect("simulated click is legal")
    }

    /// Fine-tunes with values drawn from `range`.
    fn fine_tunes(&mut self, mut state: DisplayState, n: usize, range: std::ops::RangeInclusive<f64>) -> DisplayState {
        for _ in 0..n {
            let axis = self.rng.random_range(0..3);
            let value = (self.rng.random_range(range.clone()) * 1000.0).round() / 1000.0;
            let base = state.fine_tune_target.expect("clicked before fine-tuning");
            self.rec(EventKind::FineTune { axis, value });
            state = state.fine_tune(&base, axis, value).expect("simulated fine-tune is legal").0;
        }
        state
    }

    fn download(mut self, state: &DisplayState) -> SessionTrace {
        self.rec(EventKind::Download {
            coords: state.current_selection(),
        });
        self.rec.finish()
    }
}

/// Fine-tune value range that stays on the start corner's side of every axis.
fn near_side(corner: Corner) -> std::ops::RangeInclusive<f64> {
    if corner.bits() == 0 {
        0.0..=0.45
    } else {
        0.55..=1.0
    }
}

/// Generates a valid catalog trace that exhibits `archetype`. Deterministic in all inputs.
pub fn simulate_trace(
    space: &DesignSpace<f64>,
    archetype: PatternLabel,
    task_id: &str,
    user_id: &str,
    seed: u64,
) -> SessionTrace {
    simulate(space, archetype, task_id, user_id, seed, None)
}

fn simulate(
    space: &DesignSpace<f64>,
    archetype: PatternLabel,
    task_id: &str,
    user_id: &str,
    seed: u64,
    corner: Option<Corner>,
) -> SessionTrace {
    let header = SessionHeader {
        v: TRACE_VERSION,
        session_id: format!("sim-{user_id}-{task_id}-{seed:016x}"),
        user_id: user_id.into(),
        task_id: task_id.into(),
        interface_kind: InterfaceKind::Catalog,
        space_hash: space.space_hash().into(),
    };
    let mut sim = Sim {
        space,
        rng: ChaCha8Rng::seed_from_u64(seed),
        rec: Recorder::new(header, 0),
        t: 0,
    };
    let (corner, mut state) = match corner {
        Some(c) => sim.category_at(c),
        None => sim.category(),
    };
    let start: Coords = corner.coords();
    match archetype {
        PatternLabel::NonSelection => {
            sim.hovers(&state, 4);
            if sim.rng.random_bool(0.3) {
                sim.rec(EventKind::DisplayToggle {
                    toggle: ToggleId::Contrast,
                });
            }
            let pick = state.shown.choose(&mut sim.rng).expect("shown").coords;
            state = sim.click(&state, pick);
            sim.download(&state)
        }
        PatternLabel::MinimalInteraction => {
            sim.hovers(&state, 3);
            let focus = state.shown.choose(&mut sim.rng).expect("shown").coords;
            state = sim.zoom(&state, focus);
            let pick = state.shown.choose(&mut sim.rng).expect("shown").coords;
            state = sim.click(&state, pick);
            if sim.rng.random_bool(0.3) {
                sim.rec(EventKind::TextEdit { text: "vio".into() });
            }
            let n = sim.rng.random_range(1..=3);
            state = sim.fine_tunes(state, n, 0.0..=1.0);
            sim.download(&state)
        }
        PatternLabel::Convergent => {
            sim.hovers(&state, 2);
            state = sim.zoom(&state, start);
            let zooms = sim.rng.random_range(1..MAX_ZOOM as usize);
            for _ in 0..zooms {
                sim.hovers(&state, 2);
                let near: Vec<Coords> = state
                    .shown
                    .iter()
                    .map(|i| i.coords)
                    .filter(|c| c.linf(&start) < 0.5)
                    .collect();
                let focus = *near.choose(&mut sim.rng).expect("start stays shown");
                state = sim.zoom(&state, focus);
            }
            let near: Vec<Coords> = state
                .shown
                .iter()
                .map(|i| i.coords)
                .filter(|c| c.linf(&start) < 0.5)
                .collect();
            let pick = *near.choose(&mut sim.rng).expect("start stays shown");
            state = sim.click(&state, pick);
            let n = sim.rng.random_range(0..=2);
            state = sim.fine_tunes(state, n, near_side(corner));
            sim.download(&state)
        }
        PatternLabel::Wandering | PatternLabel::Other => {
            let vertices: Vec<Coords> = state
                .shown
                .iter()
                .filter(|i| !i.is_center)
                .map(|i| i.coords)
                .collect();
            let picks: Vec<Coords> = vertices.choose_multiple(&mut sim.rng, 3).copied().collect();
            for focus in picks {
                sim.hovers(&state, 2);
                state = sim.zoom(&state, focus);
            }
            let pick = state.shown.choose(&mut sim.rng).expect("shown").coords;
            state = sim.click(&state, pick);
            let n = sim.rng.random_range(0..=2);
            state = sim.fine_tunes(state, n, 0.0..=1.0);
            sim.download(&state)
        }
    }
}

/// Random walk: a random category, then `MAX_ZOOM` zooms on uniformly chosen
/// shown instances, then a download of a random shown instance.
pub fn simulate_random_walk(space: &DesignSpace<f64>, task_id: &str, user_id: &str, seed: u64) -> SessionTrace {
    let header = SessionHeader {
        v: TRACE_VERSION,
        session_id: format!("walk-{user_id}-{task_id}-{seed:016x}"),
        user_id: user_id.into(),
        task_id: task_id.into(),
        interface_kind: InterfaceKind::Catalog,
        space_hash: space.space_hash().into(),
    };
    let mut sim = Sim {
        space,
        rng: ChaCha8Rng::seed_from_u64(seed),
        rec: Recorder::new(header, 0),
        t: 0,
    };
    let (_, mut state) = sim.category();
    for _ in 0..MAX_ZOOM {
        let focus = state.shown.choose(&mut sim.rng).expect("shown").coords;
        state = sim.zoom(&state, focus);
    }
    let pick = state.shown.choose(&mut sim.rng).expect("shown").coords;
    state = sim.click(&state, pick);
    sim.download(&state)
}

/// Unscripted catalog session mixing every event kind, including resets and
/// display toggles, and ending in a download. Used for fuzzing.
pub fn simulate_exploration(space: &DesignSpace<f64>, task_id: &str, user_id: &str, seed: u64) -> SessionTrace {
    let header = SessionHeader {
        v: TRACE_VERSION,
        session_id: format!("exp-{user_id}-{task_id}-{seed:016x}"),
        user_id: user_id.into(),
        task_id: task_id.into(),
        interface_kind: InterfaceKind::Catalog,
        space_hash: space.space_hash().into(),
    };
    let mut sim = Sim {
        space,
        rng: ChaCha8Rng::seed_from_u64(seed),
        rec: Recorder::new(header, 0),
        t: 0,
    };
    let (_, mut state) = sim.category();
    let steps = sim.rng.random_range(0..40);
    for _ in 0..steps {
        let pick = state.shown.choose(&mut sim.rng).expect("shown").coords;
        match sim.rng.random_range(0..10) {
            0 | 1 => sim.rec(EventKind::Hover { coords: pick }),
            2 | 3 if !state.show_all_active() && state.zoom_level < MAX_ZOOM => state = sim.zoom(&state, pick),
            4 => state = sim.click(&state, pick),
            5 if state.fine_tune_target.is_some() => {
                let n = sim.rng.random_range(1..=2);
                state = sim.fine_tunes(state, n, 0.0..=1.0);
            }
            6 => {
                let toggle = *[ToggleId::Contrast, ToggleId::ShowAll, ToggleId::StartCorner]
                    .choose(&mut sim.rng)
                    .expect("non-empty");
                sim.rec(EventKind::DisplayToggle { toggle });
                state = match toggle {
                    ToggleId::Contrast => state,
                    ToggleId::ShowAll => state.show_all(),
                    ToggleId::StartCorner => state.toggle_start(),
                };
            }
            7 => {
                let text = ["vio", "zoo", "lo", "oil"].choose(&mut sim.rng).expect("non-empty").to_string();
                sim.rec(EventKind::TextEdit { text });
            }
            8 if sim.rng.random_bool(0.3) => {
                sim.rec(EventKind::Reset);
                state = sim.category().1;
            }
            _ => {}
        }
    }
    sim.download(&state)
}

/// Seeded control-interface trace: `moves` slider moves, then a download.
pub fn simulate_control_trace(
    space: &DesignSpace<f64>,
    task_id: &str,
    user_id: &str,
    seed: u64,
    blind: bool,
) -> SessionTrace {
    let header = SessionHeader {
        v: TRACE_VERSION,
        session_id: format!("ctl-{user_id}-{task_id}-{seed:016x}"),
        user_id: user_id.into(),
        task_id: task_id.into(),
        interface_kind: InterfaceKind::Control,
        space_hash: space.space_hash().into(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rec = Recorder::new(header, 0);
    let mut t = 0;
    let mut coords = Coords::origin();
    let moves = rng.random_range(4..12);
    for i in 0..moves {
        t += rng.random_range(60..900);
        let axis = rng.random_range(0..3);
        let value = if blind {
            if i % 2 == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            (rng.random_range(0.1..0.9f64) * 1000.0).round() / 1000.0
        };
        coords = coords.with_axis(axis, value).expect("axis in range");
        rec.record(t, EventKind::SliderMove { axis, value });
    }
    rec.record(t + 500, EventKind::Download { coords });
    rec.finish()
}

pub fn user_id(i: usize) -> String {
    format!("U{:02}", i + 1)
}

pub fn task_id(i: usize) -> String {
    format!("T{}", i + 1)
}

/// Synthetic cohort: each user has a habitual archetype used in most tasks.
pub fn simulate_cohort(space: &DesignSpace<f64>, users: usize, tasks: usize, seed: u64) -> Vec<SessionTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(users * tasks);
    for u in 0..users {
        let habit = *PatternLabel::ARCHETYPES.choose(&mut rng).expect("non-empty");
        for t in 0..tasks {
            let archetype = if rng.random_bool(0.8) {
                habit
            } else {
                *PatternLabel::ARCHETYPES.choose(&mut rng).expect("non-empty")
            };
            let (uid, tid) = (user_id(u), task_id(t));
            let s = mix_str(mix_str(seed, &uid), &tid);
            out.push(simulate_trace(space, archetype, &tid, &uid, s));
        }
    }
    out
}

/// One task, `n` users who all converge on the same start corner.
pub fn simulate_shared_octant_cohort(space: &DesignSpace<f64>, n: usize, seed: u64) -> Vec<SessionTrace> {
    let corner = space.start_corners()[(splitmix(seed) % 2) as usize].corner;
    (0..n)
        .map(|u| {
            let uid = user_id(u);
            let s = mix_str(seed, &uid);
            simulate(space, PatternLabel::Convergent, "T1", &uid, s, Some(corner))
        })
        .collect()
}

/// One task, `n` users each doing an independent random walk.
pub fn simulate_uniform_cohort(space: &DesignSpace<f64>, n: usize, seed: u64) -> Vec<SessionTrace> {
    (0..n)
        .map(|u| {
            let uid = user_id(u);
            simulate_random_walk(space, "T1", &uid, mix_str(seed, &uid))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceReport {
    pub session_id: String,
    pub user_id: String,
    pub task_id: String,
    pub interface_kind: InterfaceKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweeps: Option<SweepReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<TraceGeometry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UserSummary {
    pub traces: usize,
    pub coherence: Option<f64>,
    pub labels: BTreeMap<PatternLabel, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TaskSummary {
    pub traces: usize,
    pub overlap: Option<f64>,
    /// Most frequent start corner; ties go to the lower bitmask.
    pub start_corner_mode: Option<Corner>,
}

/// Versioned analysis document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisReport {
    pub v: u32,
    pub config: AnalyticsConfig,
    pub per_trace: Vec<TraceReport>,
    pub per_user: BTreeMap<String, UserSummary>,
    pub per_task: BTreeMap<String, TaskSummary>,
}

impl AnalyticsConfig {
    pub fn trace_report(&self, trace: &SessionTrace) -> TraceReport {
        let h = &trace.header;
        let mut report = TraceReport {
            session_id: h.session_id.clone(),
            user_id: h.user_id.clone(),
            task_id: h.task_id.clone(),
            interface_kind: h.interface_kind,
            pattern: None,
            sweeps: None,
            geometry: None,
            error: None,
        };
        let result = match h.interface_kind {
            InterfaceKind::Catalog => self.classify(trace).and_then(|p| {
                report.pattern = Some(p);
                report.geometry = Some(trace_geometry(trace)?);
                Ok(())
            }),
            InterfaceKind::Control => self.detect_extreme_sweeps(trace).map(|s| report.sweeps = Some(s)),
        };
        if let Err(e) = result {
            report.error = Some(e.to_string());
        }
        report
    }

    /// Full cohort analysis. Cohort metrics use catalog traces that classify
    /// cleanly; sorting makes the result independent of input order.
    pub fn analyze(&self, traces: &[SessionTrace]) -> AnalysisReport {
        let mut sorted: Vec<&SessionTrace> = traces.iter().collect();
        sorted.sort_by(|a, b| a.header.session_id.cmp(&b.header.session_id));
        let per_trace: Vec<TraceReport> = sorted.iter().map(|t| self.trace_report(t)).collect();
        let usable: Vec<&SessionTrace> = sorted
            .iter()
            .zip(&per_trace)
            .filter(|(_, r)| r.pattern.is_some())
            .map(|(t, _)| *t)
            .collect();
        let corpus = CorpusStats::from_traces(usable.iter().copied());

        let mut by_user: BTreeMap<String, Vec<SessionTrace>> = BTreeMap::new();
        let mut by_task: BTreeMap<String, Vec<SessionTrace>> = BTreeMap::new();
        for t in &usable {
            by_user.entry(t.header.user_id.clone()).or_default().push((*t).clone());
            by_task.entry(t.header.task_id.clone()).or_default().push((*t).clone());
        }
        let per_user = by_user
            .iter()
            .map(|(u, ts)| {
                let mut labels = BTreeMap::new();
                for r in per_trace.iter().filter(|r| &r.user_id == u) {
                    for l in r.pattern.iter().flat_map(|p| p.labels.iter()) {
                        *labels.entry(*l).or_insert(0) += 1;
                    }
                }
                let summary = UserSummary {
                    traces: ts.len(),
                    coherence: self.coherence_score(ts, &corpus).ok(),
                    labels,
                };
                (u.clone(), summary)
            })
            .collect();
        let per_task = by_task
            .iter()
            .map(|(task, ts)| {
                let mut counts = [0usize; 8];
                for t in ts {
                    if let Ok(f) = self.features(t) {
                        counts[f.start_corner.bits() as usize] += 1;
                    }
                }
                let best = counts.iter().copied().max().unwrap_or(0);
                let mode = (best > 0)
                    .then(|| Corner::ALL[counts.iter().position(|&c| c == best).expect("max exists")]);
                let summary = TaskSummary {
                    traces: ts.len(),
                    overlap: self.within_task_overlap(ts).ok(),
                    start_corner_mode: mode,
                };
                (task.clone(), summary)
            })
            .collect();
        AnalysisReport {
            v: REPORT_VERSION,
            config: *self,
            per_trace,
            per_user,
            per_task,
        }
    }
}

pub fn analyze(traces: &[SessionTrace]) -> AnalysisReport {
    AnalyticsConfig::default().analyze(traces)
}
