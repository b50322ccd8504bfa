//! Navigation state machine of the hex-grid selection catalog.
//!
//! Every transition is a pure function from one [`DisplayState`] to the next.
//! Instances live on the dyadic lattice of the current zoom level; each zoom
//! commits the midpoints between the focus and its displayed ring neighbors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coords::{Corner, DesignCoords};
use crate::hex::{depth, project, HexPoint};
use crate::space::DesignSpace;

/// Screen-plane distance (projection units) under which two instances collide.
pub const OCCLUSION_EPS: f64 = 1e-6;
/// Deepest zoom level.
pub const MAX_ZOOM: u8 = 3;
/// Per-axis values of the show-all lattice.
pub const SHOW_ALL_VALUES: [f64; 3] = [0.0, 0.5, 1.0];
/// Largest display allowed without an explicit show-all.
pub const LARGE_SET_MAX: usize = 30;
/// Bounds of the initial option count (center excluded).
pub const SMALL_SET: std::ops::RangeInclusive<usize> = 5..=7;

const COORD_EPS: f64 = 1e-9;

type Coords = DesignCoords<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("corner {0} is not a start corner of this space")]
    NotAStartCorner(u8),
    #[error("instance {0} is not shown")]
    NotShown(Coords),
    #[error("maximum zoom level {MAX_ZOOM} reached; fine-tune to refine further")]
    MaxZoom,
    #[error("zoom is unavailable while all instances are shown")]
    ShowAllActive,
    #[error("no instance has been clicked for fine-tuning")]
    NoFineTuneTarget,
    #[error("fine-tune base {base} differs from the clicked instance {target}")]
    TargetMismatch { base: Coords, target: Coords },
    #[error("slider value {0} outside [0, 1]")]
    ValueOutOfRange(f64),
    #[error("axis {0} outside 0..=2")]
    BadAxis(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryOption {
    pub corner: Corner,
    pub coords: Coords,
    pub labels: [String; 2],
}

/// The opening screen: two opposite corners, neither preselected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OpeningSet {
    pub space_hash: String,
    pub options: [CategoryOption; 2],
    pub selected_index: Option<usize>,
}

pub fn open_catalog(space: &DesignSpace<f64>) -> OpeningSet {
    let options = space.start_corners().clone().map(|s| CategoryOption {
        corner: s.corner,
        coords: s.corner.coords(),
        labels: s.labels,
    });
    OpeningSet {
        space_hash: space.space_hash().to_string(),
        options,
        selected_index: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DisplayInstance {
    pub coords: Coords,
    pub pos: HexPoint<f64>,
    pub revealed_at_level: u8,
    pub is_center: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DisplayState {
    pub space_hash: String,
    pub start_corner: Corner,
    pub zoom_level: u8,
    pub scale: f64,
    pub pan_offset: HexPoint<f64>,
    pub shown: Vec<DisplayInstance>,
    pub occluded: Vec<DisplayInstance>,
    pub fine_tune_target: Option<Coords>,
    /// State to restore when show-all is toggled off.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub show_all_prior: Option<Box<DisplayState>>,
}

struct Candidate {
    coords: Coords,
    level: u8,
    was_shown: bool,
}

/// Design-space distance between ring neighbors at a zoom level.
pub fn ring_step(level: u8) -> f64 {
    if level == 0 {
        1.0
    } else {
        0.5f64.powi(level as i32)
    }
}

pub fn select_category(space: &DesignSpace<f64>, corner: Corner) -> Result<DisplayState, EngineError> {
    if !space.start_corners().iter().any(|s| s.corner == corner) {
        return Err(EngineError::NotAStartCorner(corner.bits()));
    }
    let center: Coords = corner.coords();
    let others = space.start_corners().iter().map(|s| s.corner).collect::<Vec<_>>();
    let mut pool = vec![Candidate {
        coords: center,
        level: 0,
        was_shown: true,
    }];
    pool.extend(
        Corner::ALL
            .iter()
            .filter(|c| !others.contains(c))
            .map(|c| Candidate {
                coords: c.coords(),
                level: 0,
                was_shown: true,
            }),
    );
    pool.push(Candidate {
        coords: corner.antipode().coords(),
        level: 0,
        was_shown: false,
    });
    let scale = 1.0;
    let mut state = DisplayState {
        space_hash: space.space_hash().to_string(),
        start_corner: corner,
        zoom_level: 0,
        scale,
        pan_offset: project(&center) * -scale,
        shown: vec![],
        occluded: vec![],
        fine_tune_target: None,
        show_all_prior: None,
    };
    state.resolve(pool, &center);
    Ok(state)
}

impl DisplayState {
    pub fn center(&self) -> Coords {
        self.shown
            .iter()
            .find(|i| i.is_center)
            .map(|i| i.coords)
            .expect("display state always has a center")
    }

    pub fn show_all_active(&self) -> bool {
        self.show_all_prior.is_some()
    }

    pub fn is_shown(&self, coords: &Coords) -> bool {
        self.shown.iter().any(|i| i.coords.approx_eq(coords, COORD_EPS))
    }

    pub fn position_of(&self, coords: &Coords) -> HexPoint<f64> {
        project(coords) * self.scale + self.pan_offset
    }

    /// Coordinates the session would download now.
    pub fn current_selection(&self) -> Coords {
        self.fine_tune_target.unwrap_or_else(|| self.center())
    }

    /// Rebuilds shown/occluded from a candidate pool, keeping at each screen
    /// position the instance whose depth is nearest the center's.
    fn resolve(&mut self, pool: Vec<Candidate>, center: &Coords) {
        let mut unique: Vec<Candidate> = Vec::with_capacity(pool.len());
        for cand in pool {
            match unique.iter_mut().find(|u| u.coords.approx_eq(&cand.coords, COORD_EPS)) {
                Some(u) => {
                    u.level = u.level.min(cand.level);
                    u.was_shown |= cand.was_shown;
                }
                None => unique.push(cand),
            }
        }
        let mut groups: Vec<(HexPoint<f64>, Vec<Candidate>)> = Vec::new();
        for cand in unique {
            let p = project(&cand.coords);
            match groups.iter_mut().find(|(q, _)| q.distance(p) < OCCLUSION_EPS) {
                Some((_, g)) => g.push(cand),
                None => groups.push((p, vec![cand])),
            }
        }
        let center_depth = depth(center);
        let rank = |c: &Candidate| {
            let is_center = c.coords.approx_eq(center, COORD_EPS);
            (
                !is_center,
                (depth(&c.coords) - center_depth).abs(),
                !c.was_shown,
                depth(&c.coords),
            )
        };
        self.shown.clear();
        self.occluded.clear();
        let mut found_center = false;
        for (_, mut group) in groups {
            group.sort_by(|a, b| {
                let (ra, rb) = (rank(a), rank(b));
                ra.0.cmp(&rb.0)
                    .then(ra.1.total_cmp(&rb.1))
                    .then(ra.2.cmp(&rb.2))
                    .then(ra.3.total_cmp(&rb.3))
            });
            for (i, cand) in group.into_iter().enumerate() {
                let is_center = i == 0 && cand.coords.approx_eq(center, COORD_EPS);
                found_center |= is_center;
                let inst = DisplayInstance {
                    coords: cand.coords,
                    pos: self.position_of(&cand.coords),
                    revealed_at_level: cand.level,
                    is_center,
                };
                if i == 0 {
                    self.shown.push(inst);
                } else {
                    self.occluded.push(inst);
                }
            }
        }
        debug_assert!(found_center, "center must be in the candidate pool");
    }

    fn pool(&self) -> Vec<Candidate> {
        self.shown
            .iter()
            .map(|i| Candidate {
                coords: i.coords,
                level: i.revealed_at_level,
                was_shown: true,
            })
            .chain(self.occluded.iter().map(|i| Candidate {
                coords: i.coords,
                level: i.revealed_at_level,
                was_shown: false,
            }))
            .collect()
    }

    /// Shown instances on the current ring around `target`, nearest first.
    pub fn ring_neighbors(&self, target: &Coords) -> Vec<Coords> {
        let step = ring_step(self.zoom_level);
        let origin = project(target);
        let mut ring: Vec<(f64, Coords)> = self
            .shown
            .iter()
            .filter(|i| !i.coords.approx_eq(target, COORD_EPS))
            .map(|i| (project(&i.coords).distance(origin), i.coords))
            .filter(|(d, _)| (d - step).abs() < COORD_EPS)
            .collect();
        ring.sort_by(|a, b| a.0.total_cmp(&b.0));
        ring.into_iter().take(6).map(|(_, c)| c).collect()
    }

    /// Midway instances between `target` and each ring neighbor. Not committed.
    pub fn hover_preview(&self, target: &Coords) -> Result<Vec<Coords>, EngineError> {
        if !self.is_shown(target) {
            return Err(EngineError::NotShown(*target));
        }
        let mut out: Vec<Coords> = Vec::new();
        for n in self.ring_neighbors(target) {
            let mid = target.midpoint(&n);
            if !self.is_shown(&mid) && !out.iter().any(|o| o.approx_eq(&mid, COORD_EPS)) {
                out.push(mid);
            }
        }
        Ok(out)
    }

    pub fn zoom_in(&self, focus: &Coords) -> Result<DisplayState, EngineError> {
        if self.show_all_active() {
            return Err(EngineError::ShowAllActive);
        }
        if self.zoom_level >= MAX_ZOOM {
            return Err(EngineError::MaxZoom);
        }
        let previews = self.hover_preview(focus)?;
        let focus = self
            .shown
            .iter()
            .find(|i| i.coords.approx_eq(focus, COORD_EPS))
            .map(|i| i.coords)
            .expect("checked by hover_preview");
        let level = self.zoom_level + 1;
        let mut pool = self.pool();
        pool.extend(previews.into_iter().map(|coords| Candidate {
            coords,
            level,
            was_shown: false,
        }));
        let mut next = self.clone();
        next.zoom_level = level;
        next.scale = self.scale * 2.0;
        next.pan_offset = project(&focus) * -next.scale;
        next.resolve(pool, &focus);
        Ok(next)
    }

    /// Swaps the display to the opposite start corner by mirroring every
    /// coordinate through the cube center.
    pub fn toggle_start(&self) -> DisplayState {
        let mirror = |i: &DisplayInstance| DisplayInstance {
            coords: i.coords.antipode(),
            ..i.clone()
        };
        let mut next = DisplayState {
            space_hash: self.space_hash.clone(),
            start_corner: self.start_corner.antipode(),
            zoom_level: self.zoom_level,
            scale: self.scale,
            pan_offset: self.pan_offset,
            shown: self.shown.iter().map(mirror).collect(),
            occluded: self.occluded.iter().map(mirror).collect(),
            fine_tune_target: self.fine_tune_target.map(|c| c.antipode()),
            show_all_prior: self.show_all_prior.as_ref().map(|p| Box::new(p.toggle_start())),
        };
        next.pan_offset = project(&next.center()) * -next.scale;
        next.refresh_positions();
        next
    }

    fn refresh_positions(&mut self) {
        let (scale, pan) = (self.scale, self.pan_offset);
        for i in self.shown.iter_mut().chain(self.occluded.iter_mut()) {
            i.pos = project(&i.coords) * scale + pan;
        }
    }

    /// Toggles the 27-point lattice display; toggling again restores the prior state.
    pub fn show_all(&self) -> DisplayState {
        if let Some(prior) = &self.show_all_prior {
            return (**prior).clone();
        }
        let center = self.center();
        let known = self.pool();
        let level_of = |c: &Coords| {
            known
                .iter()
                .find(|k| k.coords.approx_eq(c, COORD_EPS))
                .map_or(0, |k| k.level)
        };
        let mut pool = vec![Candidate {
            coords: center,
            level: level_of(&center),
            was_shown: true,
        }];
        for &x in &SHOW_ALL_VALUES {
            for &y in &SHOW_ALL_VALUES {
                for &z in &SHOW_ALL_VALUES {
                    let coords = Coords::new([x, y, z]).expect("lattice values are finite");
                    pool.push(Candidate {
                        coords,
                        level: level_of(&coords),
                        was_shown: self.is_shown(&coords),
                    });
                }
            }
        }
        let mut next = self.clone();
        next.show_all_prior = Some(Box::new(self.clone()));
        next.resolve(pool, &center);
        next
    }

    /// Opens the fine-tuning window on a shown instance.
    pub fn click(&self, coords: &Coords) -> Result<DisplayState, EngineError> {
        let hit = self
            .shown
            .iter()
            .find(|i| i.coords.approx_eq(coords, COORD_EPS))
            .ok_or(EngineError::NotShown(*coords))?;
        let mut next = self.clone();
        next.fine_tune_target = Some(hit.coords);
        Ok(next)
    }

    /// Replaces one component of the fine-tune target.
    pub fn fine_tune(&self, base: &Coords, axis: usize, value: f64) -> Result<(DisplayState, Coords), EngineError> {
        if axis > 2 {
            return Err(EngineError::BadAxis(axis));
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(EngineError::ValueOutOfRange(value));
        }
        let target = self.fine_tune_target.ok_or(EngineError::NoFineTuneTarget)?;
        if !target.approx_eq(base, COORD_EPS) {
            return Err(EngineError::TargetMismatch { base: *base, target });
        }
        let tuned = target.with_axis(axis, value).map_err(|_| EngineError::BadAxis(axis))?;
        let mut next = self.clone();
        next.fine_tune_target = Some(tuned);
        Ok((next, tuned))
    }

    /// Copy with shown/occluded sorted by coordinates, for order-insensitive comparison.
    pub fn normalized(&self) -> DisplayState {
        let key = |i: &DisplayInstance| i.coords.as_array();
        let sort = |v: &mut Vec<DisplayInstance>| {
            v.sort_by(|a, b| {
                let (ka, kb) = (key(a), key(b));
                ka[0].total_cmp(&kb[0])
                    .then(ka[1].total_cmp(&kb[1]))
                    .then(ka[2].total_cmp(&kb[2]))
            })
        };
        let mut out = self.clone();
        sort(&mut out.shown);
        sort(&mut out.occluded);
        out.show_all_prior = self.show_all_prior.as_ref().map(|p| Box::new(p.normalized()));
        out
    }

    /// Structural equality up to list order and `eps` on all reals.
    pub fn approx_eq(&self, other: &DisplayState, eps: f64) -> bool {
        let (a, b) = (self.normalized(), other.normalized());
        let inst_eq = |x: &DisplayInstance, y: &DisplayInstance| {
            x.coords.approx_eq(&y.coords, eps)
                && x.pos.distance(y.pos) <= eps
                && x.revealed_at_level == y.revealed_at_level
                && x.is_center == y.is_center
        };
        let list_eq = |x: &[DisplayInstance], y: &[DisplayInstance]| {
            x.len() == y.len() && x.iter().zip(y).all(|(p, q)| inst_eq(p, q))
        };
        let prior_eq = match (&a.show_all_prior, &b.show_all_prior) {
            (None, None) => true,
            (Some(p), Some(q)) => p.approx_eq(q, eps),
            _ => false,
        };
        a.space_hash == b.space_hash
            && a.start_corner == b.start_corner
            && a.zoom_level == b.zoom_level
            && (a.scale - b.scale).abs() <= eps
            && a.pan_offset.distance(b.pan_offset) <= eps
            && list_eq(&a.shown, &b.shown)
            && list_eq(&a.occluded, &b.occluded)
            && match (a.fine_tune_target, b.fine_tune_target) {
                (None, None) => true,
                (Some(p), Some(q)) => p.approx_eq(&q, eps),
                _ => false,
            }
            && prior_eq
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
}

impl RuleId {
    pub const ALL: [RuleId; 6] = [RuleId::R1, RuleId::R2, RuleId::R3, RuleId::R4, RuleId::R5, RuleId::R6];

    pub fn description(self) -> &'static str {
        match self {
            RuleId::R1 => "opening has no default selection",
            RuleId::R2 => "opening is a labeled category partition",
            RuleId::R3 => "every zoom adds an even number of options",
            RuleId::R4 => "initial display is a small set",
            RuleId::R5 => "display stays within the large-set bound",
            RuleId::R6 => "successive zooms reveal strictly closer variations",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AuditCheck {
    pub rule_id: RuleId,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, rule: RuleId) -> &AuditCheck {
        self.checks.iter().find(|c| c.rule_id == rule).expect("report covers every rule")
    }
}

/// Audits a recorded navigation against the minimal-bias catalog rules.
/// `states[0]` is the display right after the category choice.
pub fn audit_guidelines(opening: &OpeningSet, states: &[DisplayState]) -> AuditReport {
    let mut checks = Vec::with_capacity(6);
    let mut push = |rule_id, passed, detail: String| checks.push(AuditCheck { rule_id, passed, detail });

    push(
        RuleId::R1,
        opening.selected_index.is_none(),
        match opening.selected_index {
            None => "no option preselected".into(),
            Some(i) => format!("option {i} is preselected"),
        },
    );

    let labels: Vec<&String> = opening.options.iter().flat_map(|o| o.labels.iter()).collect();
    let mut distinct = labels.clone();
    distinct.sort();
    distinct.dedup();
    let antipodal = opening.options[0].corner.bits() ^ opening.options[1].corner.bits() == 7;
    let r2 = distinct.len() == 4 && labels.iter().all(|l| !l.trim().is_empty()) && antipodal;
    push(
        RuleId::R2,
        r2,
        format!("{} distinct labels over opposite corners: {antipodal}", distinct.len()),
    );

    let zooms: Vec<(&DisplayState, &DisplayState)> = states
        .windows(2)
        .map(|w| (&w[0], &w[1]))
        .filter(|(a, b)| b.zoom_level > a.zoom_level)
        .collect();
    let added = |a: &DisplayState, b: &DisplayState| -> Vec<Coords> {
        b.shown
            .iter()
            .filter(|i| !a.is_shown(&i.coords))
            .map(|i| i.coords)
            .collect()
    };

    let odd: Vec<String> = zooms
        .iter()
        .filter_map(|(a, b)| {
            let n = added(a, b).len();
            (n % 2 == 1).then(|| format!("zoom to level {} added {n}", b.zoom_level))
        })
        .collect();
    push(
        RuleId::R3,
        odd.is_empty(),
        if odd.is_empty() {
            format!("{} zoom commits, all even", zooms.len())
        } else {
            odd.join("; ")
        },
    );

    match states.first() {
        Some(first) => {
            let options = first.shown.iter().filter(|i| !i.is_center).count();
            push(
                RuleId::R4,
                SMALL_SET.contains(&options),
                format!("{options} options around the center"),
            );
        }
        None => push(RuleId::R4, false, "no display state recorded".into()),
    }

    let worst = states
        .iter()
        .filter(|s| !s.show_all_active())
        .map(|s| s.shown.len())
        .max()
        .unwrap_or(0);
    push(
        RuleId::R5,
        worst <= LARGE_SET_MAX,
        format!("largest display without show-all: {worst}"),
    );

    let steps: Vec<Option<f64>> = zooms
        .iter()
        .map(|(a, b)| {
            let focus = b.center();
            added(a, b).iter().map(|c| c.linf(&focus)).reduce(f64::max)
        })
        .collect();
    let r6 = steps.iter().all(Option::is_some)
        && steps
            .windows(2)
            .all(|w| matches!((w[0], w[1]), (Some(x), Some(y)) if y < x));
    let shown_steps: Vec<String> = steps
        .iter()
        .map(|s| s.map_or("none".into(), |v| v.to_string()))
        .collect();
    push(RuleId::R6, r6, format!("steps [{}]", shown_steps.join(", ")));

    AuditReport { checks }
}

/// Scripted reference navigation: first category, three zooms on the
/// center, a click and one fine-tune.
pub fn demo_flow(space: &DesignSpace<f64>) -> (OpeningSet, Vec<DisplayState>) {
    let opening = open_catalog(space);
    let mut states = Vec::new();
    let mut s = select_category(space, opening.options[0].corner).expect("start corner");
    states.push(s.clone());
    for _ in 0..MAX_ZOOM {
        s = s.zoom_in(&s.center()).expect("zoom below max");
        states.push(s.clone());
    }
    let center = s.center();
    s = s.click(&center).expect("center is shown");
    states.push(s.clone());
    let (s, _) = s.fine_tune(&center, 0, 0.1).expect("valid fine-tune");
    states.push(s);
    (opening, states)
}
