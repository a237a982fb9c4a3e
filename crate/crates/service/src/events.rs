//! Append-only event log. One JSON object per line; the full challenge state
//! is the fold of the log from the first line.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;
use crate::model::{Assignment, ChallengePhase, RatingRecord, SubmissionRecord};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    Submission { record: SubmissionRecord },
    AssignmentIssued { assignment: Assignment },
    Rating { record: RatingRecord },
    PhaseChange { phase: ChallengePhase, at: DateTime<Utc> },
}

/// Writer side of the log. `memory()` logs nowhere, for tests and
/// throwaway instances.
#[derive(Debug)]
pub struct EventLog {
    path: Option<PathBuf>,
    file: Option<File>,
}

impl EventLog {
    pub fn memory() -> Self {
        EventLog {
            path: None,
            file: None,
        }
    }

    /// Opens (creating if needed) the log at `path` and returns it with the
    /// events already recorded there.
    pub fn open(path: impl AsRef<Path>) -> Result<(Self, Vec<Event>), ServiceError> {
        let path = path.as_ref().to_path_buf();
        let events = if path.exists() {
            read_events(&path)?
        } else {
            Vec::new()
        };
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok((
            EventLog {
                path: Some(path),
                file: Some(file),
            },
            events,
        ))
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn append(&mut self, event: &Event) -> Result<(), ServiceError> {
        if let Some(file) = self.file.as_mut() {
            let mut line = serde_json::to_vec(event).map_err(|e| ServiceError::Storage(e.to_string()))?;
            line.push(b'\n');
            file.write_all(&line)?;
            file.sync_data()?;
        }
        Ok(())
    }
}

pub fn read_events(path: &Path) -> Result<Vec<Event>, ServiceError> {
    let reader = BufReader::new(File::open(path)?);
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event = serde_json::from_str(&line).map_err(|e| {
            ServiceError::Storage(format!("{}:{}: {e}", path.display(), i + 1))
        })?;
        events.push(event);
    }
    Ok(events)
}
