//! Profile persistence.
//!
//! [`FileStore`] keeps one JSON record per line in an append-only file.
//! Each append is written in one call and synced before it becomes
//! visible; a torn trailing line left by a crash is dropped on open. The
//! latest record for a profile id wins.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};
use sqmeter_core::StoredProfile;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("profile {0:?} not found")]
    NotFound(String),
    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: corrupt record: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// What the service persists per profile: the profile plus a digest of the
/// bearer token that may use it for recovery.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub profile: StoredProfile,
    #[serde(with = "hex::serde")]
    pub token_sha256: Vec<u8>,
}

pub trait ProfileStore: Send + Sync {
    fn persist(&self, record: &ProfileRecord) -> Result<(), StoreError>;
    fn load(&self, profile_id: &str) -> Result<ProfileRecord, StoreError>;
}

#[derive(Debug, Default)]
pub struct MemoryStore {
    records: RwLock<HashMap<String, ProfileRecord>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }
}

impl ProfileStore for MemoryStore {
    fn persist(&self, record: &ProfileRecord) -> Result<(), StoreError> {
        self.records
            .write()
            .expect("store lock poisoned")
            .insert(record.profile.profile_id.clone(), record.clone());
        Ok(())
    }

    fn load(&self, profile_id: &str) -> Result<ProfileRecord, StoreError> {
        self.records
            .read()
            .expect("store lock poisoned")
            .get(profile_id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(profile_id.to_owned()))
    }
}

#[derive(Debug)]
pub struct FileStore {
    path: PathBuf,
    writer: Mutex<File>,
    index: RwLock<HashMap<String, ProfileRecord>>,
}

impl FileStore {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let io = |source| StoreError::Io {
            path: path.clone(),
            source,
        };
        let mut file = OpenOptions::new()
            .read(true)
            .create(true)
            .append(true)
            .open(&path)
            .map_err(io)?;

        let mut index = HashMap::new();
        let mut complete_len = 0u64;
        let mut reader = BufReader::new(&file);
        let mut line = Vec::new();
        let mut lineno = 0;
        loop {
            line.clear();
            let n = reader.read_until(b'\n', &mut line).map_err(io)?;
            if n == 0 {
                break;
            }
            lineno += 1;
            if line.last() != Some(&b'\n') {
                // Torn write from an interrupted append.
                break;
            }
            complete_len += n as u64;
            if line.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            let record: ProfileRecord = serde_json::from_slice(&line).map_err(|e| StoreError::Corrupt {
                path: path.clone(),
                line: lineno,
                message: e.to_string(),
            })?;
            index.insert(record.profile.profile_id.clone(), record);
        }
        drop(reader);
        if file.seek(SeekFrom::End(0)).map_err(io)? != complete_len {
            file.set_len(complete_len).map_err(io)?;
            file.sync_data().map_err(io)?;
        }

        Ok(FileStore {
            path,
            writer: Mutex::new(file),
            index: RwLock::new(index),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.index.read().expect("store lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl ProfileStore for FileStore {
    fn persist(&self, record: &ProfileRecord) -> Result<(), StoreError> {
        let io = |source| StoreError::Io {
            path: self.path.clone(),
            source,
        };
        let mut line = serde_json::to_vec(record).expect("records always serialize");
        line.push(b'\n');

        let mut file = self.writer.lock().expect("store lock poisoned");
        let before = file.seek(SeekFrom::End(0)).map_err(io)?;
        let written = file.write_all(&line).and_then(|_| file.sync_data());
        if let Err(e) = written {
            // Roll back so no partial line survives.
            let _ = file.set_len(before);
            return Err(io(e));
        }
        self.index
            .write()
            .expect("store lock poisoned")
            .insert(record.profile.profile_id.clone(), record.clone());
        Ok(())
    }

    fn load(&self, profile_id: &str) -> Result<ProfileRecord, StoreError> {
        self.index
            .read()
            .expect("store lock poisoned")
            .get(profile_id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(profile_id.to_owned()))
    }
}
