//! Content-addressed on-disk cache of correlation tables.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::phonon_bath::{build_correlation_table, BathParams, CorrelationTable};
use crate::quadrature::QuadSettings;
use crate::spectra_engine::{table_fingerprint, MemoryTables, TableProvider};

/// Bump whenever the table layout or the algorithm that fills it changes.
pub const CACHE_FORMAT_VERSION: u32 = 1;

pub const CACHE_ENV: &str = "DRESSED_RF_CACHE";

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    format_version: u32,
    bath: BathParams,
    settings: QuadSettings,
    table: CorrelationTable,
}

/// `DRESSED_RF_CACHE`, then the configured directory, then the user cache
/// directory.
pub fn resolve_cache_dir(configured: Option<&Path>) -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(dir);
    }
    if let Some(dir) = configured {
        return dir.to_path_buf();
    }
    if let Some(xdg) = std::env::var_os("XDG_CACHE_HOME").filter(|v| !v.is_empty()) {
        return PathBuf::from(xdg).join("dressed-rf");
    }
    if let Some(home) = std::env::var_os("HOME").filter(|v| !v.is_empty()) {
        return PathBuf::from(home).join(".cache").join("dressed-rf");
    }
    std::env::temp_dir().join("dressed-rf")
}

pub fn cache_key(bath: &BathParams, settings: &QuadSettings) -> String {
    let mut h = Sha256::new();
    h.update(format!("dressed-rf correlation table v{CACHE_FORMAT_VERSION}\n").as_bytes());
    h.update(table_fingerprint(bath, settings).as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Table provider backed by a directory of JSON entries, with an in-memory
/// layer in front.
pub struct DiskTables {
    dir: PathBuf,
    memory: MemoryTables,
    hits: AtomicUsize,
    builds: AtomicUsize,
}

impl DiskTables {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            memory: MemoryTables::new(),
            hits: AtomicUsize::new(0),
            builds: AtomicUsize::new(0),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Entries read back from disk.
    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    /// Tables computed from scratch.
    pub fn builds(&self) -> usize {
        self.builds.load(Ordering::Relaxed)
    }

    fn entry_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    fn read(&self, path: &Path, bath: &BathParams, settings: &QuadSettings) -> Option<CorrelationTable> {
        let bytes = std::fs::read(path).ok()?;
        let entry: CacheEntry = serde_json::from_slice(&bytes).ok()?;
        let valid = entry.format_version == CACHE_FORMAT_VERSION
            && entry.bath == *bath
            && entry.settings == *settings
            && entry.table.built_for == *bath;
        valid.then_some(entry.table)
    }

    fn write(&self, path: &Path, entry: &CacheEntry) -> std::io::Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        serde_json::to_writer(&mut tmp, entry)?;
        tmp.flush()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }
}

impl TableProvider for DiskTables {
    fn table(&self, bath: &BathParams, settings: &QuadSettings) -> Result<Arc<CorrelationTable>> {
        let key = cache_key(bath, settings);
        if let Some(t) = self.memory.get(&key) {
            return Ok(t);
        }
        let path = self.entry_path(&key);
        if let Some(t) = self.read(&path, bath, settings) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(self.memory.insert(key, Arc::new(t)));
        }
        let table = build_correlation_table(bath, settings)?;
        self.builds.fetch_add(1, Ordering::Relaxed);
        let entry = CacheEntry {
            format_version: CACHE_FORMAT_VERSION,
            bath: *bath,
            settings: *settings,
            table,
        };
        if let Err(e) = self.write(&path, &entry) {
            eprintln!("warning: could not write cache entry {}: {e}", path.display());
        }
        Ok(self.memory.insert(key, Arc::new(entry.table)))
    }
}

/// Remove every cache entry in `dir`; returns how many were removed.
pub fn clear(dir: &Path) -> std::io::Result<usize> {
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
        Err(e) => return Err(e),
    };
    let mut removed = 0;
    for entry in entries {
        let path = entry?.path();
        if path.extension().is_some_and(|x| x == "json") {
            std::fs::remove_file(&path)?;
            removed += 1;
        }
    }
    Ok(removed)
}
