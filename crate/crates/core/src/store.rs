//! Append-only session storage.
//!
//! One newline-delimited JSON file per session under `sessions/`: a header
//! record, then one record per event, then an optional close record.
//! `index.ndjson` maps session ids to file names. Records are written in
//! canonical form and never rewritten.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical;
use crate::session::{SessionEvent, SessionHeader, SessionTrace, TraceError, TraceValidator};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("session {0:?} already exists with a different header")]
    SessionExists(String),
    #[error("invalid session id {0:?}")]
    InvalidId(String),
    #[error("session {0:?} is closed")]
    Closed(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("seq {seq} already stored with different content")]
    Conflict { seq: u64 },
    #[error("{file}: corrupt record at line {line}: {reason}")]
    Corrupt {
        file: String,
        line: usize,
        reason: String,
    },
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "camelCase")]
enum Record {
    Header(SessionHeader),
    Event(SessionEvent),
    Close,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct IndexEntry {
    session_id: String,
    file: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Durability {
    /// `fsync` every record before acknowledging.
    Sync,
    /// Flush to the OS only.
    Flush,
}

/// Result of an append.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ack {
    pub seq: u64,
    pub duplicate: bool,
}

#[derive(Debug)]
struct Slot {
    path: PathBuf,
    trace: SessionTrace,
    validator: TraceValidator,
    closed: bool,
}

#[derive(Debug)]
pub struct SessionStore {
    dir: PathBuf,
    durability: Durability,
    index: Mutex<BTreeMap<String, String>>,
    slots: Mutex<HashMap<String, Arc<Mutex<Slot>>>>,
}

const INDEX_FILE: &str = "index.ndjson";
const SESSIONS_DIR: &str = "sessions";

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 64
        && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

fn encode(record: &Record) -> String {
    let mut line = canonical::to_canonical_string(record).expect("records serialize");
    line.push('\n');
    line
}

impl SessionStore {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        Self::open_with(dir, Durability::Sync)
    }

    pub fn open_with(dir: impl AsRef<Path>, durability: Durability) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(dir.join(SESSIONS_DIR))?;
        let index_path = dir.join(INDEX_FILE);
        let mut index = BTreeMap::new();
        if index_path.exists() {
            let text = fs::read_to_string(&index_path)?;
            for (i, line) in text.lines().enumerate() {
                let entry: IndexEntry = serde_json::from_str(line).map_err(|e| StoreError::Corrupt {
                    file: INDEX_FILE.into(),
                    line: i + 1,
                    reason: e.to_string(),
                })?;
                index.insert(entry.session_id, entry.file);
            }
        }
        Ok(Self {
            dir,
            durability,
            index: Mutex::new(index),
            slots: Mutex::new(HashMap::new()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn session_ids(&self) -> Vec<String> {
        self.index.lock().expect("index lock").keys().cloned().collect()
    }

    fn write_line(&self, path: &Path, line: &str) -> Result<(), StoreError> {
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        f.write_all(line.as_bytes())?;
        f.flush()?;
        if self.durability == Durability::Sync {
            f.sync_data()?;
        }
        Ok(())
    }

    /// Creates a session. Repeating the call with the same header is a no-op.
    pub fn create_session(&self, header: SessionHeader) -> Result<(), StoreError> {
        let id = header.session_id.clone();
        if !valid_id(&id) {
            return Err(StoreError::InvalidId(id));
        }
        let mut index = self.index.lock().expect("index lock");
        if index.contains_key(&id) {
            drop(index);
            let slot = self.slot(&id)?;
            let slot = slot.lock().expect("slot lock");
            return if slot.trace.header == header {
                Ok(())
            } else {
                Err(StoreError::SessionExists(id))
            };
        }
        let file = format!("{id}.ndjson");
        let path = self.dir.join(SESSIONS_DIR).join(&file);
        if path.exists() {
            return Err(StoreError::SessionExists(id));
        }
        self.write_line(&path, &encode(&Record::Header(header.clone())))?;
        let entry = IndexEntry {
            session_id: id.clone(),
            file: file.clone(),
        };
        let mut line = canonical::to_canonical_string(&entry).expect("index entries serialize");
        line.push('\n');
        self.write_line(&self.dir.join(INDEX_FILE), &line)?;
        index.insert(id.clone(), file);
        let slot = Slot {
            path,
            validator: TraceValidator::new(header.interface_kind),
            trace: SessionTrace::new(header),
            closed: false,
        };
        self.slots
            .lock()
            .expect("slots lock")
            .insert(id, Arc::new(Mutex::new(slot)));
        Ok(())
    }

    fn slot(&self, id: &str) -> Result<Arc<Mutex<Slot>>, StoreError> {
        if let Some(s) = self.slots.lock().expect("slots lock").get(id) {
            return Ok(s.clone());
        }
        let file = self
            .index
            .lock()
            .expect("index lock")
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::UnknownSession(id.into()))?;
        let path = self.dir.join(SESSIONS_DIR).join(&file);
        let (trace, closed) = read_session_file(&path, &file)?;
        let mut validator = TraceValidator::new(trace.header.interface_kind);
        for e in &trace.events {
            validator.push(e).map_err(|err| StoreError::Corrupt {
                file: file.clone(),
                line: e.seq as usize + 1,
                reason: err.to_string(),
            })?;
        }
        let slot = Arc::new(Mutex::new(Slot {
            path,
            trace,
            validator,
            closed,
        }));
        let mut slots = self.slots.lock().expect("slots lock");
        Ok(slots.entry(id.to_string()).or_insert(slot).clone())
    }

    /// Appends one event. A repeated `(session, seq)` with identical content
    /// is acknowledged without writing.
    pub fn append_event(&self, id: &str, event: SessionEvent) -> Result<Ack, StoreError> {
        let slot = self.slot(id)?;
        let mut slot = slot.lock().expect("slot lock");
        if event.seq >= 1 && event.seq <= slot.validator.last_seq() {
            let stored = &slot.trace.events[event.seq as usize - 1];
            return if *stored == event {
                Ok(Ack {
                    seq: event.seq,
                    duplicate: true,
                })
            } else {
                Err(StoreError::Conflict { seq: event.seq })
            };
        }
        if slot.closed {
            return Err(StoreError::Closed(id.into()));
        }
        slot.validator.check(&event)?;
        self.write_line(&slot.path, &encode(&Record::Event(event.clone())))?;
        slot.validator.push(&event)?;
        let seq = event.seq;
        slot.trace.events.push(event);
        Ok(Ack {
            seq,
            duplicate: false,
        })
    }

    /// Current in-memory trace plus `events`, checked structurally, without writing.
    pub fn preview_append(&self, id: &str, events: &[SessionEvent]) -> Result<SessionTrace, StoreError> {
        let slot = self.slot(id)?;
        let slot = slot.lock().expect("slot lock");
        let mut trace = slot.trace.clone();
        let mut validator = slot.validator.clone();
        for e in events {
            if e.seq >= 1 && e.seq <= validator.last_seq() {
                if trace.events[e.seq as usize - 1] != *e {
                    return Err(StoreError::Conflict { seq: e.seq });
                }
                continue;
            }
            if slot.closed {
                return Err(StoreError::Closed(id.into()));
            }
            validator.push(e)?;
            trace.events.push(e.clone());
        }
        Ok(trace)
    }

    pub fn close(&self, id: &str) -> Result<(), StoreError> {
        let slot = self.slot(id)?;
        let mut slot = slot.lock().expect("slot lock");
        if !slot.closed {
            self.write_line(&slot.path, &encode(&Record::Close))?;
            slot.closed = true;
        }
        Ok(())
    }

    pub fn is_closed(&self, id: &str) -> Result<bool, StoreError> {
        Ok(self.slot(id)?.lock().expect("slot lock").closed)
    }

    /// Reads a session back from disk.
    pub fn load_trace(&self, id: &str) -> Result<SessionTrace, StoreError> {
        let file = self
            .index
            .lock()
            .expect("index lock")
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::UnknownSession(id.into()))?;
        // Holding the slot lock keeps writers out, so no torn last line is seen.
        let slot = self.slots.lock().expect("slots lock").get(id).cloned();
        let _guard = slot.as_ref().map(|s| s.lock().expect("slot lock"));
        let path = self.dir.join(SESSIONS_DIR).join(&file);
        Ok(read_session_file(&path, &file)?.0)
    }

    pub fn load_all(&self) -> Result<Vec<SessionTrace>, StoreError> {
        self.session_ids().iter().map(|id| self.load_trace(id)).collect()
    }

    /// Writes a complete trace as a new session.
    pub fn import(&self, trace: &SessionTrace) -> Result<(), StoreError> {
        self.create_session(trace.header.clone())?;
        for e in &trace.events {
            self.append_event(&trace.header.session_id, e.clone())?;
        }
        Ok(())
    }
}

/// Canonical file text for a trace, as the store would write it.
pub fn canonical_file_text(trace: &SessionTrace, closed: bool) -> String {
    let mut out = encode(&Record::Header(trace.header.clone()));
    for e in &trace.events {
        out.push_str(&encode(&Record::Event(e.clone())));
    }
    if closed {
        out.push_str(&encode(&Record::Close));
    }
    out
}

fn read_session_file(path: &Path, file: &str) -> Result<(SessionTrace, bool), StoreError> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            return Err(StoreError::UnknownSession(file.trim_end_matches(".ndjson").into()))
        }
        Err(e) => return Err(e.into()),
    };
    let corrupt = |line: usize, reason: String| StoreError::Corrupt {
        file: file.into(),
        line,
        reason,
    };
    let text = String::from_utf8(bytes).map_err(|e| corrupt(0, e.to_string()))?;
    let lines: Vec<&str> = text.split_terminator('\n').collect();
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(corrupt(lines.len(), "truncated record".into()));
    }
    let mut header = None;
    let mut events = Vec::new();
    let mut closed = false;
    for (i, line) in lines.iter().enumerate() {
        let n = i + 1;
        let rec: Record = serde_json::from_str(line).map_err(|e| corrupt(n, e.to_string()))?;
        match (rec, n) {
            (Record::Header(h), 1) => header = Some(h),
            (Record::Header(_), _) => return Err(corrupt(n, "header after line 1".into())),
            (_, 1) => return Err(corrupt(1, "missing header".into())),
            (_, _) if closed => return Err(corrupt(n, "record after close".into())),
            (Record::Event(e), _) => events.push(e),
            (Record::Close, _) => closed = true,
        }
    }
    let header = header.ok_or_else(|| corrupt(1, "empty session file".into()))?;
    Ok((SessionTrace { header, events }, closed))
}

/// On-disk path of a session file.
#[doc(hidden)]
pub fn session_file_path(store: &SessionStore, id: &str) -> Option<PathBuf> {
    let file = store.index.lock().ok()?.get(id).cloned()?;
    Some(store.dir.join(SESSIONS_DIR).join(file))
}
