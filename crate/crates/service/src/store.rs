//! JSON-file persistence under a data directory.
//!
//! ```text
//! <data_dir>/datasets/<id>.json   StoredDataset
//! <data_dir>/sessions/<id>.json   StoredSession
//! ```
//!
//! Every write goes to a temporary file in the target directory and is then
//! renamed over the destination, so readers see either the old or the new file.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use sonowork_core::training::SessionState;
use sonowork_core::Table;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("no record with id {0:?}")]
    NotFound(String),
    #[error("storage I/O failed: {0}")]
    Io(#[from] io::Error),
    #[error("stored record is corrupt: {0}")]
    Corrupt(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StoredDataset {
    pub id: String,
    pub name: String,
    pub table: Table,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StoredSession {
    pub id: String,
    pub state: SessionState,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

/// Ids are generated as simple UUIDs; anything else cannot name a stored record.
fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-')
}

pub fn new_id() -> String {
    uuid::Uuid::new_v4().simple().to_string()
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(root.join("datasets"))?;
        fs::create_dir_all(root.join("sessions"))?;
        Ok(Store { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, kind: &str, id: &str) -> Result<PathBuf, StoreError> {
        if !valid_id(id) {
            return Err(StoreError::NotFound(id.to_string()));
        }
        Ok(self.root.join(kind).join(format!("{id}.json")))
    }

    fn write_atomic<T: Serialize>(&self, path: &Path, value: &T) -> Result<(), StoreError> {
        let dir = path.parent().expect("record paths have a parent");
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        serde_json::to_writer(&mut tmp, value)?;
        tmp.as_file_mut().flush()?;
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }

    fn read<T: DeserializeOwned>(&self, path: &Path, id: &str) -> Result<T, StoreError> {
        match fs::read(path) {
            Ok(bytes) => Ok(serde_json::from_slice(&bytes)?),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Err(StoreError::NotFound(id.to_string())),
            Err(e) => Err(e.into()),
        }
    }

    /// Always stores under a fresh id; identical uploads are not deduplicated.
    pub fn insert_dataset(&self, name: String, table: Table) -> Result<StoredDataset, StoreError> {
        let record = StoredDataset {
            id: new_id(),
            name,
            table,
            created_at: Utc::now(),
        };
        self.write_atomic(&self.path("datasets", &record.id)?, &record)?;
        Ok(record)
    }

    pub fn dataset(&self, id: &str) -> Result<StoredDataset, StoreError> {
        self.read(&self.path("datasets", id)?, id)
    }

    pub fn insert_session(&self, state: SessionState) -> Result<StoredSession, StoreError> {
        let record = StoredSession {
            id: new_id(),
            state,
            created_at: Utc::now(),
        };
        self.save_session(&record)?;
        Ok(record)
    }

    pub fn save_session(&self, record: &StoredSession) -> Result<(), StoreError> {
        self.write_atomic(&self.path("sessions", &record.id)?, record)
    }

    pub fn session(&self, id: &str) -> Result<StoredSession, StoreError> {
        self.read(&self.path("sessions", id)?, id)
    }
}
