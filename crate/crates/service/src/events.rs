//! Append-only event log, one newline-delimited file per poll.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use budgetpoll_core::domain::BudgetAllocation;
use budgetpoll_core::{Amount, Answer};
use serde::{Deserialize, Serialize};

use crate::poll::PollConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event_type", content = "payload", rename_all = "snake_case")]
pub enum EventKind {
    PollCreated {
        poll_id: String,
        config: Box<PollConfig>,
        seed: u64,
    },
    PollClosed,
    SessionStarted {
        participant_id: String,
        token: String,
    },
    IdealAccepted {
        raw: Vec<Amount>,
        use_rescale: bool,
        ideal: BudgetAllocation,
    },
    ScreenedOut {
        reason: String,
    },
    QuestionServed {
        question_id: String,
    },
    AnswerSubmitted {
        question_id: String,
        answer: Answer,
    },
    Blocked {
        reason: String,
    },
    Completed,
}

/// One log line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    /// Strictly increasing within a poll, starting at 1.
    pub seq: u64,
    /// Milliseconds since the Unix epoch.
    pub timestamp: u64,
    pub session_id: Option<String>,
    #[serde(flatten)]
    pub kind: EventKind,
}

pub(crate) fn now_ms() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// A poll's events, mirrored to disk when a path is set.
#[derive(Debug)]
pub struct EventLog {
    file: Option<File>,
    path: Option<PathBuf>,
    events: Vec<Event>,
}

impl EventLog {
    pub fn in_memory() -> Self {
        EventLog {
            file: None,
            path: None,
            events: Vec::new(),
        }
    }

    /// Opens `path` for appending, creating it if needed.
    pub fn create(path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(EventLog {
            file: Some(file),
            path: Some(path.to_path_buf()),
            events: Vec::new(),
        })
    }

    /// Reads every event in `path` and keeps the file open for appending.
    pub fn open(path: &Path) -> std::io::Result<Self> {
        let events = read_events(path)?;
        let mut log = Self::create(path)?;
        log.events = events;
        Ok(log)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn last_seq(&self) -> u64 {
        self.events.last().map_or(0, |e| e.seq)
    }

    /// Stamps, persists and returns the next event.
    pub fn append(&mut self, session_id: Option<&str>, kind: EventKind) -> std::io::Result<Event> {
        let event = Event {
            seq: self.last_seq() + 1,
            timestamp: now_ms(),
            session_id: session_id.map(str::to_string),
            kind,
        };
        if let Some(file) = &mut self.file {
            let mut line = serde_json::to_vec(&event).map_err(std::io::Error::other)?;
            line.push(b'\n');
            file.write_all(&line)?;
            file.flush()?;
        }
        self.events.push(event.clone());
        Ok(event)
    }
}

pub fn read_events(path: &Path) -> std::io::Result<Vec<Event>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out: Vec<Event> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event: Event = serde_json::from_str(&line).map_err(|e| {
            std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("{}:{}: {e}", path.display(), i + 1),
            )
        })?;
        if out.last().is_some_and(|prev| prev.seq >= event.seq) {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("{}:{}: sequence number does not increase", path.display(), i + 1),
            ));
        }
        out.push(event);
    }
    Ok(out)
}
