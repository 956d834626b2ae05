//! The session service: live sessions, their JSONL event logs and the
//! canonical CSV of emitted samples.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{SystemTime, UNIX_EPOCH};

use jnd_core::{Procedure, Response};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::PackageAssignment;
use crate::samples::{self, DatasetRow};
use crate::session::{
    Anchor, Event, PairToken, PairView, Progress, SessionRecord, SessionStatus, SessionSummary, DEFAULT_CLIP_TEMPLATE,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreateSession {
    pub package_id: u32,
    pub jnd_index: u8,
    pub subject_id: u32,
    #[serde(default)]
    pub anchors: Vec<Anchor>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubmitResponse {
    pub response: Response,
    /// The pair being answered, as returned by `next`. Without it the
    /// response applies to whatever pair is current.
    #[serde(default)]
    pub pair: Option<PairToken>,
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub procedure: Procedure,
    pub clip_template: String,
    pub seed: u64,
    /// Event logs go to `<dir>/sessions/<id>.jsonl` and samples to
    /// `<dir>/samples.csv`. `None` keeps everything in memory.
    pub data_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            procedure: Procedure::Robust,
            clip_template: DEFAULT_CLIP_TEMPLATE.into(),
            seed: 0,
            data_dir: None,
        }
    }
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(std::sync::PoisonError::into_inner)
}

/// FNV-1a, to derive a per-session shuffle seed from its id.
fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Reads a JSONL event log. A final line without its newline is the trace of
/// an interrupted write and is dropped; any other bad line is an error.
pub fn read_event_log(path: &Path) -> Result<Vec<Event>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut events = Vec::new();
    let mut line = String::new();
    let mut number = 0;
    loop {
        line.clear();
        let n = reader.read_line(&mut line).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        number += 1;
        if !line.ends_with('\n') {
            break;
        }
        let event = serde_json::from_str(line.trim_end())
            .map_err(|e| Error::EventLog(format!("{}:{number}: {e}", path.display())))?;
        events.push(event);
    }
    Ok(events)
}

pub struct SessionService {
    packages: BTreeMap<u32, PackageAssignment>,
    config: ServiceConfig,
    sessions: Mutex<BTreeMap<String, Arc<Mutex<SessionRecord>>>>,
    /// Emitted rows, and the lock serializing writes of the sample CSV.
    rows: Mutex<Vec<DatasetRow>>,
}

impl SessionService {
    /// Starts a service, resuming any sessions logged under the data directory.
    pub fn open(packages: Vec<PackageAssignment>, config: ServiceConfig) -> Result<Self> {
        let service = SessionService {
            packages: packages.into_iter().map(|p| (p.package_id, p)).collect(),
            config,
            sessions: Mutex::new(BTreeMap::new()),
            rows: Mutex::new(Vec::new()),
        };
        if let Some(dir) = service.sessions_dir() {
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            let mut logs: Vec<PathBuf> = fs::read_dir(&dir)
                .map_err(|e| Error::io(&dir, e))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
                .collect();
            logs.sort();
            let mut sessions = lock(&service.sessions);
            let mut rows = lock(&service.rows);
            for path in logs {
                let record = SessionRecord::replay(&read_event_log(&path)?)?;
                rows.extend(record.rows());
                sessions.insert(record.session_id.clone(), Arc::new(Mutex::new(record)));
            }
        }
        Ok(service)
    }

    pub fn packages(&self) -> impl Iterator<Item = &PackageAssignment> {
        self.packages.values()
    }

    fn sessions_dir(&self) -> Option<PathBuf> {
        self.config.data_dir.as_ref().map(|d| d.join("sessions"))
    }

    pub fn event_log_path(&self, session_id: &str) -> Option<PathBuf> {
        self.sessions_dir().map(|d| d.join(format!("{session_id}.jsonl")))
    }

    pub fn samples_path(&self) -> Option<PathBuf> {
        self.config.data_dir.as_ref().map(|d| d.join("samples.csv"))
    }

    fn persist(&self, event: &Event) -> Result<()> {
        let Some(path) = self.event_log_path(&event.session_id) else {
            return Ok(());
        };
        let mut line = serde_json::to_string(event)?;
        line.push('\n');
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        file.write_all(line.as_bytes()).map_err(|e| Error::io(&path, e))?;
        file.sync_data().map_err(|e| Error::io(&path, e))
    }

    /// Applies `event` to a copy first, so nothing invalid reaches the log.
    fn commit(&self, record: &mut SessionRecord, event: Event) -> Result<()> {
        let mut next = record.clone();
        next.apply(event.clone())?;
        self.persist(&event)?;
        *record = next;
        Ok(())
    }

    fn emit(&self, row: DatasetRow) -> Result<()> {
        let mut rows = lock(&self.rows);
        rows.push(row);
        match self.samples_path() {
            Some(path) => samples::write_rows_to(&path, &rows),
            None => Ok(()),
        }
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<SessionRecord>>> {
        lock(&self.sessions)
            .get(id)
            .cloned()
            .ok_or_else(|| Error::UnknownSession(id.into()))
    }

    pub fn create_session(&self, req: &CreateSession) -> Result<SessionSummary> {
        let package = self
            .packages
            .get(&req.package_id)
            .ok_or(Error::UnknownPackage(req.package_id))?;
        let mut sessions = lock(&self.sessions);
        let prefix = format!("p{}-s{}-j{}-", req.package_id, req.subject_id, req.jnd_index);
        let mut attempt = 1;
        for (id, s) in sessions.range(prefix.clone()..) {
            if !id.starts_with(&prefix) {
                break;
            }
            if lock(s).status != SessionStatus::Abandoned {
                return Err(Error::Validation(format!(
                    "subject {} already has session {id} for this package and JND",
                    req.subject_id
                )));
            }
            attempt += 1;
        }
        let id = format!("{prefix}{attempt}");
        let record = SessionRecord::create(
            id.clone(),
            package,
            req.jnd_index,
            req.subject_id,
            &req.anchors,
            self.config.procedure,
            self.config.seed ^ fnv1a(&id),
            now_ms(),
        )?;
        self.persist(&record.events[0])?;
        let summary = record.summary();
        sessions.insert(id, Arc::new(Mutex::new(record)));
        Ok(summary)
    }

    pub fn next_pair(&self, id: &str) -> Result<PairView> {
        let session = self.session(id)?;
        let record = lock(&session);
        record.next_pair(&self.config.clip_template)
    }

    pub fn submit_response(&self, id: &str, req: &SubmitResponse) -> Result<Progress> {
        let session = self.session(id)?;
        let mut record = lock(&session);
        let event = record.response_event(
            req.response,
            req.pair,
            record.next_ts(now_ms()),
            &self.config.clip_template,
        )?;
        let seq_index = event.seq_index;
        self.commit(&mut record, event)?;
        // The answered set was active, so a row now means it just finished.
        let finished = record.row(seq_index);
        if let Some(row) = finished {
            self.emit(row)?;
        }
        Ok(record.progress(finished))
    }

    /// Logs a replay request and returns the unchanged pair.
    pub fn replay(&self, id: &str) -> Result<PairView> {
        let session = self.session(id)?;
        let mut record = lock(&session);
        let event = record.replay_event(record.next_ts(now_ms()))?;
        self.commit(&mut record, event)?;
        record.next_pair(&self.config.clip_template)
    }

    pub fn abandon(&self, id: &str) -> Result<SessionSummary> {
        let session = self.session(id)?;
        let mut record = lock(&session);
        let event = record.abandon_event(record.next_ts(now_ms()))?;
        self.commit(&mut record, event)?;
        Ok(record.summary())
    }

    pub fn summary(&self, id: &str) -> Result<SessionSummary> {
        let session = self.session(id)?;
        let record = lock(&session);
        Ok(record.summary())
    }

    pub fn record(&self, id: &str) -> Result<SessionRecord> {
        let session = self.session(id)?;
        let record = lock(&session);
        Ok(record.clone())
    }

    pub fn rows(&self) -> Vec<DatasetRow> {
        let mut rows = lock(&self.rows).clone();
        samples::sort_canonical(&mut rows);
        rows
    }
}
