//! Recorded selection processes: events, traces, validation and replay.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{select_category, DisplayState, EngineError};
use crate::coords::{Corner, DesignCoords};
use crate::space::DesignSpace;

type Coords = DesignCoords<f64>;

pub const TRACE_VERSION: u32 = 1;
/// Minimum spacing between recorded hover events.
pub const HOVER_THROTTLE_MS: u64 = 50;
/// Hover dwell that turns a hover into a point of interest.
pub const DWELL_MS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum InterfaceKind {
    #[serde(rename = "inbetween")]
    Catalog,
    Control,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ToggleId {
    Contrast,
    ShowAll,
    StartCorner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum EventKind {
    SessionStart,
    CategorySelect { corner: Corner },
    Hover { coords: Coords },
    ZoomIn { coords: Coords },
    Click { coords: Coords },
    FineTune { axis: usize, value: f64 },
    TextEdit { text: String },
    DisplayToggle { toggle: ToggleId },
    SliderMove { axis: usize, value: f64 },
    Download { coords: Coords },
    Reset,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::SessionStart => "SessionStart",
            EventKind::CategorySelect { .. } => "CategorySelect",
            EventKind::Hover { .. } => "Hover",
            EventKind::ZoomIn { .. } => "ZoomIn",
            EventKind::Click { .. } => "Click",
            EventKind::FineTune { .. } => "FineTune",
            EventKind::TextEdit { .. } => "TextEdit",
            EventKind::DisplayToggle { .. } => "DisplayToggle",
            EventKind::SliderMove { .. } => "SliderMove",
            EventKind::Download { .. } => "Download",
            EventKind::Reset => "Reset",
        }
    }

    fn allowed_in(&self, kind: InterfaceKind) -> bool {
        match self {
            EventKind::ZoomIn { .. } | EventKind::Hover { .. } | EventKind::CategorySelect { .. } => {
                kind == InterfaceKind::Catalog
            }
            EventKind::SliderMove { .. } => kind == InterfaceKind::Control,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionEvent {
    pub seq: u64,
    pub t_ms: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl SessionEvent {
    pub fn new(seq: u64, t_ms: u64, kind: EventKind) -> Self {
        Self { seq, t_ms, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionHeader {
    pub v: u32,
    pub session_id: String,
    pub user_id: String,
    pub task_id: String,
    pub interface_kind: InterfaceKind,
    pub space_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionTrace {
    #[serde(flatten)]
    pub header: SessionHeader,
    pub events: Vec<SessionEvent>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("sequence gap: expected {expected}, got {got}")]
    SequenceGap { expected: u64, got: u64 },
    #[error("sequence regression: last {last}, got {got}")]
    SequenceRegression { last: u64, got: u64 },
    #[error("timestamp went backwards at seq {seq}")]
    TimeRegression { seq: u64 },
    #[error("order violation at seq {seq}: {reason}")]
    OrderViolation { seq: u64, reason: String },
    #[error("{kind} event not allowed in a {interface:?} session (seq {seq})")]
    WrongInterface {
        seq: u64,
        kind: &'static str,
        interface: InterfaceKind,
    },
    #[error("invalid payload at seq {seq}: {reason}")]
    Payload { seq: u64, reason: String },
}

/// Incremental structural checks, shared by whole-trace validation and appends.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceValidator {
    interface: InterfaceKind,
    last_seq: u64,
    last_t: u64,
    downloaded: bool,
}

impl TraceValidator {
    pub fn new(interface: InterfaceKind) -> Self {
        Self {
            interface,
            last_seq: 0,
            last_t: 0,
            downloaded: false,
        }
    }

    pub fn last_seq(&self) -> u64 {
        self.last_seq
    }

    /// Validates `ev` as the next event without recording it.
    pub fn check(&self, ev: &SessionEvent) -> Result<(), TraceError> {
        let expected = self.last_seq + 1;
        if ev.seq < expected {
            return Err(TraceError::SequenceRegression {
                last: self.last_seq,
                got: ev.seq,
            });
        }
        if ev.seq > expected {
            return Err(TraceError::SequenceGap {
                expected,
                got: ev.seq,
            });
        }
        if ev.t_ms < self.last_t {
            return Err(TraceError::TimeRegression { seq: ev.seq });
        }
        let first = self.last_seq == 0;
        let is_start = matches!(ev.kind, EventKind::SessionStart);
        if first != is_start {
            return Err(TraceError::OrderViolation {
                seq: ev.seq,
                reason: "SessionStart must be exactly the first event".into(),
            });
        }
        if self.downloaded && !matches!(ev.kind, EventKind::Reset) {
            return Err(TraceError::OrderViolation {
                seq: ev.seq,
                reason: format!("{} after Download", ev.kind.name()),
            });
        }
        if !ev.kind.allowed_in(self.interface) {
            return Err(TraceError::WrongInterface {
                seq: ev.seq,
                kind: ev.kind.name(),
                interface: self.interface,
            });
        }
        match ev.kind {
            EventKind::FineTune { axis, value } | EventKind::SliderMove { axis, value } => {
                if axis > 2 {
                    return Err(TraceError::Payload {
                        seq: ev.seq,
                        reason: format!("axis {axis}"),
                    });
                }
                if !(0.0..=1.0).contains(&value) {
                    return Err(TraceError::Payload {
                        seq: ev.seq,
                        reason: format!("value {value}"),
                    });
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn push(&mut self, ev: &SessionEvent) -> Result<(), TraceError> {
        self.check(ev)?;
        self.last_seq = ev.seq;
        self.last_t = ev.t_ms;
        if matches!(ev.kind, EventKind::Download { .. }) {
            self.downloaded = true;
        }
        Ok(())
    }
}

impl SessionTrace {
    pub fn new(header: SessionHeader) -> Self {
        Self {
            header,
            events: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), TraceError> {
        let mut v = TraceValidator::new(self.header.interface_kind);
        self.events.iter().try_for_each(|e| v.push(e))
    }

    pub fn download(&self) -> Option<Coords> {
        self.events.iter().find_map(|e| match e.kind {
            EventKind::Download { coords } => Some(coords),
            _ => None,
        })
    }

    /// Events of the attempt that ends in the download: everything after the
    /// last Reset preceding it, or the whole trace.
    pub fn final_attempt(&self) -> &[SessionEvent] {
        let end = self
            .events
            .iter()
            .position(|e| matches!(e.kind, EventKind::Download { .. }))
            .map_or(self.events.len(), |i| i + 1);
        let start = self.events[..end]
            .iter()
            .rposition(|e| matches!(e.kind, EventKind::Reset))
            .map_or(0, |i| i + 1);
        &self.events[start..end]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum InterestKind {
    Click,
    Dwell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointOfInterest {
    pub seq: u64,
    pub coords: Coords,
    pub kind: InterestKind,
}

/// Clicks plus hovers held for at least [`DWELL_MS`] before the next event.
pub fn points_of_interest(trace: &SessionTrace) -> Vec<PointOfInterest> {
    let ev = &trace.events;
    ev.iter()
        .enumerate()
        .filter_map(|(i, e)| match e.kind {
            EventKind::Click { coords } => Some(PointOfInterest {
                seq: e.seq,
                coords,
                kind: InterestKind::Click,
            }),
            EventKind::Hover { coords } => {
                let next_t = ev.get(i + 1).map(|n| n.t_ms)?;
                (next_t - e.t_ms >= DWELL_MS).then_some(PointOfInterest {
                    seq: e.seq,
                    coords,
                    kind: InterestKind::Dwell,
                })
            }
            _ => None,
        })
        .collect()
}

/// Builds a trace event by event, assigning sequence numbers and dropping
/// hovers closer than [`HOVER_THROTTLE_MS`] to the previous recorded hover.
#[derive(Debug, Clone)]
pub struct Recorder {
    trace: SessionTrace,
    last_hover: Option<u64>,
}

impl Recorder {
    pub fn new(header: SessionHeader, t_ms: u64) -> Self {
        let mut trace = SessionTrace::new(header);
        trace.events.push(SessionEvent::new(1, t_ms, EventKind::SessionStart));
        Self {
            trace,
            last_hover: None,
        }
    }

    pub fn last_t(&self) -> u64 {
        self.trace.events.last().map_or(0, |e| e.t_ms)
    }

    /// Returns the assigned sequence number, or `None` for a throttled hover.
    pub fn record(&mut self, t_ms: u64, kind: EventKind) -> Option<u64> {
        let t_ms = t_ms.max(self.last_t());
        if matches!(kind, EventKind::Hover { .. }) {
            if let Some(last) = self.last_hover {
                if t_ms < last + HOVER_THROTTLE_MS {
                    return None;
                }
            }
            self.last_hover = Some(t_ms);
        }
        let seq = self.trace.events.len() as u64 + 1;
        self.trace.events.push(SessionEvent::new(seq, t_ms, kind));
        Some(seq)
    }

    pub fn finish(self) -> SessionTrace {
        self.trace
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReplayError {
    #[error("trace recorded against space {found}, loaded space is {expected}")]
    HashMismatch { expected: String, found: String },
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("seq {seq}: {kind} illegal in replayed state: {reason}")]
    Illegal {
        seq: u64,
        kind: &'static str,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReplayOutcome {
    pub interface_kind: InterfaceKind,
    /// Final catalog display; `None` on the opening screen or for control sessions.
    pub state: Option<DisplayState>,
    /// Instance that would be downloaded now.
    pub final_coords: Option<Coords>,
    pub download: Option<Coords>,
}

const DOWNLOAD_EPS: f64 = 1e-9;

/// Re-derives the session's state by folding its events through the engine.
pub fn replay(space: &DesignSpace<f64>, trace: &SessionTrace) -> Result<ReplayOutcome, ReplayError> {
    if trace.header.space_hash != space.space_hash() {
        return Err(ReplayError::HashMismatch {
            expected: space.space_hash().to_string(),
            found: trace.header.space_hash.clone(),
        });
    }
    trace.validate()?;
    match trace.header.interface_kind {
        InterfaceKind::Catalog => replay_catalog(space, &trace.events),
        InterfaceKind::Control => Ok(replay_control(&trace.events)?),
    }
}

fn illegal(e: &SessionEvent, reason: impl ToString) -> ReplayError {
    ReplayError::Illegal {
        seq: e.seq,
        kind: e.kind.name(),
        reason: reason.to_string(),
    }
}

fn replay_catalog(space: &DesignSpace<f64>, events: &[SessionEvent]) -> Result<ReplayOutcome, ReplayError> {
    let mut state: Option<DisplayState> = None;
    let mut download = None;
    for e in events {
        let need = |s: &Option<DisplayState>| -> Result<DisplayState, ReplayError> {
            s.clone().ok_or_else(|| illegal(e, "no category selected"))
        };
        let engine = |r: Result<DisplayState, EngineError>| r.map_err(|err| illegal(e, err));
        match &e.kind {
            EventKind::SessionStart | EventKind::TextEdit { .. } => {}
            EventKind::CategorySelect { corner } => {
                if state.is_some() {
                    return Err(illegal(e, "category already selected; reset first"));
                }
                state = Some(engine(select_category(space, *corner))?);
            }
            EventKind::Hover { coords } => {
                need(&state)?.hover_preview(coords).map_err(|err| illegal(e, err))?;
            }
            EventKind::ZoomIn { coords } => state = Some(engine(need(&state)?.zoom_in(coords))?),
            EventKind::Click { coords } => state = Some(engine(need(&state)?.click(coords))?),
            EventKind::FineTune { axis, value } => {
                let s = need(&state)?;
                let base = s.fine_tune_target.ok_or_else(|| illegal(e, EngineError::NoFineTuneTarget))?;
                let (next, _) = s.fine_tune(&base, *axis, *value).map_err(|err| illegal(e, err))?;
                state = Some(next);
            }
            EventKind::DisplayToggle { toggle } => {
                let s = need(&state)?;
                state = Some(match toggle {
                    ToggleId::Contrast => s,
                    ToggleId::ShowAll => s.show_all(),
                    ToggleId::StartCorner => s.toggle_start(),
                });
            }
            EventKind::Download { coords } => {
                let s = need(&state)?;
                let expected = s.current_selection();
                if !expected.approx_eq(coords, DOWNLOAD_EPS) {
                    return Err(illegal(e, format!("download {coords} differs from selection {expected}")));
                }
                download = Some(*coords);
            }
            EventKind::Reset => state = None,
            EventKind::SliderMove { .. } => return Err(illegal(e, "slider in catalog session")),
        }
    }
    Ok(ReplayOutcome {
        interface_kind: InterfaceKind::Catalog,
        final_coords: state.as_ref().map(DisplayState::current_selection),
        state,
        download,
    })
}

fn replay_control(events: &[SessionEvent]) -> Result<ReplayOutcome, ReplayError> {
    let mut coords = Coords::origin();
    let mut download = None;
    for e in events {
        match &e.kind {
            EventKind::SliderMove { axis, value } => {
                coords = coords.with_axis(*axis, *value).map_err(|err| illegal(e, err))?;
            }
            EventKind::Download { coords: d } => {
                if !coords.approx_eq(d, DOWNLOAD_EPS) {
                    return Err(illegal(e, format!("download {d} differs from sliders {coords}")));
                }
                download = Some(*d);
            }
            EventKind::Reset => coords = Coords::origin(),
            EventKind::SessionStart | EventKind::TextEdit { .. } | EventKind::DisplayToggle { .. } => {}
            EventKind::Click { .. } | EventKind::FineTune { .. } => {}
            other => return Err(illegal(e, format!("{} in control session", other.name()))),
        }
    }
    Ok(ReplayOutcome {
        interface_kind: InterfaceKind::Control,
        state: None,
        final_coords: Some(coords),
        download,
    })
}
