//! Versioned diagram store backed by a directory of `.erd.json` files.
//!
//! Each diagram `id` lives in `id.erd.json` (canonical IR) next to
//! `id.version` holding its version counter. Writes to one diagram are
//! serialized; reads see the last committed version and never wait for a
//! writer.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use ermodes::er::{is_identifier, parse_ir, serialize_ir, ERDiagram, IrError};
use thiserror::Error;

const IR_SUFFIX: &str = ".erd.json";
const VERSION_SUFFIX: &str = ".version";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("invalid diagram id {0:?}")]
    InvalidId(String),
    #[error("no diagram {0:?}")]
    NotFound(String),
    #[error("diagram {id:?} is at version {current}, not {base}")]
    Conflict { id: String, base: u64, current: u64 },
    #[error(transparent)]
    Invalid(#[from] IrError),
    #[error("stored diagram {path} is unreadable: {source}")]
    Corrupt { path: PathBuf, source: IrError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone)]
pub struct Stored {
    pub diagram: Arc<ERDiagram>,
    pub version: u64,
}

#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    committed: RwLock<BTreeMap<String, Stored>>,
    writers: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

/// Ids double as file names, so they are identifiers (letters, digits, `_`)
/// optionally joined by `-`.
pub fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 128 && id.split('-').all(is_identifier)
}

impl Store {
    /// Opens `dir`, creating it if needed, and loads every stored diagram.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let mut committed = BTreeMap::new();
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            let Some(id) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_suffix(IR_SUFFIX))
            else {
                continue;
            };
            if !valid_id(id) {
                continue;
            }
            let text = fs::read_to_string(&path)?;
            let diagram = parse_ir(&text).map_err(|source| StoreError::Corrupt {
                path: path.clone(),
                source,
            })?;
            let version = read_version(&dir.join(format!("{id}{VERSION_SUFFIX}")))?;
            committed.insert(
                id.to_string(),
                Stored {
                    diagram: Arc::new(diagram),
                    version,
                },
            );
        }
        Ok(Self {
            dir,
            committed: RwLock::new(committed),
            writers: Mutex::new(HashMap::new()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Ids and versions, sorted by id.
    pub fn list(&self) -> Vec<(String, u64)> {
        self.committed
            .read()
            .unwrap()
            .iter()
            .map(|(id, s)| (id.clone(), s.version))
            .collect()
    }

    pub fn get(&self, id: &str) -> Result<Stored, StoreError> {
        if !valid_id(id) {
            return Err(StoreError::InvalidId(id.to_string()));
        }
        self.committed
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(id.to_string()))
    }

    /// Stores `text` as diagram `id` and returns the new version.
    ///
    /// With `base` set, the write only succeeds if the diagram is currently at
    /// that version (0 for a diagram that does not exist yet). Without it the
    /// write always wins.
    pub async fn put(&self, id: &str, text: &str, base: Option<u64>) -> Result<u64, StoreError> {
        if !valid_id(id) {
            return Err(StoreError::InvalidId(id.to_string()));
        }
        let diagram = parse_ir(text)?;
        let lock = self.writer(id);
        let _guard = lock.lock().await;

        let current = self.committed.read().unwrap().get(id).map_or(0, |s| s.version);
        if let Some(base) = base {
            if base != current {
                return Err(StoreError::Conflict {
                    id: id.to_string(),
                    base,
                    current,
                });
            }
        }
        let version = current + 1;
        self.persist(id, &diagram, version)?;
        self.committed.write().unwrap().insert(
            id.to_string(),
            Stored {
                diagram: Arc::new(diagram),
                version,
            },
        );
        Ok(version)
    }

    fn writer(&self, id: &str) -> Arc<tokio::sync::Mutex<()>> {
        self.writers
            .lock()
            .unwrap()
            .entry(id.to_string())
            .or_default()
            .clone()
    }

    fn persist(&self, id: &str, d: &ERDiagram, version: u64) -> io::Result<()> {
        let ir = self.dir.join(format!("{id}{IR_SUFFIX}"));
        let ver = self.dir.join(format!("{id}{VERSION_SUFFIX}"));
        write_atomic(&ir, serialize_ir(d).as_bytes())?;
        write_atomic(&ver, format!("{version}\n").as_bytes())
    }
}

fn read_version(path: &Path) -> Result<u64, StoreError> {
    match fs::read_to_string(path) {
        Ok(s) => s.trim().parse().map_err(|_| {
            StoreError::Io(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("bad version in {}", path.display()),
            ))
        }),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(1),
        Err(e) => Err(e.into()),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ermodes::fixtures;

    #[test]
    fn ids() {
        assert!(valid_id("university"));
        assert!(valid_id("uw-cse_2"));
        assert!(!valid_id(""));
        assert!(!valid_id("../etc"));
        assert!(!valid_id("a.b"));
        assert!(!valid_id("-a"));
    }

    #[tokio::test]
    async fn versions_and_reload() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        assert_eq!(store.put("u", fixtures::UNIVERSITY_IR, Some(0)).await.unwrap(), 1);
        assert_eq!(store.put("u", fixtures::UNIVERSITY_IR, None).await.unwrap(), 2);
        assert!(matches!(
            store.put("u", fixtures::UNIVERSITY_IR, Some(1)).await,
            Err(StoreError::Conflict { current: 2, .. })
        ));
        assert!(matches!(store.get("nope"), Err(StoreError::NotFound(_))));
        drop(store);

        let again = Store::open(dir.path()).unwrap();
        assert_eq!(again.list(), [("u".to_string(), 2)]);
        assert_eq!(*again.get("u").unwrap().diagram, fixtures::university());
    }

    #[tokio::test]
    async fn invalid_ir_is_not_stored() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        assert!(matches!(
            store.put("x", "{\"entities\": 3}", None).await,
            Err(StoreError::Invalid(_))
        ));
        assert!(store.list().is_empty());
    }
}
