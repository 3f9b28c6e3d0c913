//! Content-addressed cache of Smith decompositions.
//!
//! Keys are the SHA-256 digest of the source matrix together with the tracked
//! transforms and [`ALGORITHM_VERSION`]. An in-process map is always consulted;
//! when a cache directory is configured, large decompositions are also persisted
//! as JSON files guarded by advisory file locks.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use super::smith::{decompose, LeftTransform, SmithDecomposition, Tracking, ALGORITHM_VERSION};
use super::sparse::{MatrixDigest, SparseIntMatrix};
use super::Int;

/// Environment variable naming the on-disk cache directory.
pub const CACHE_DIR_ENV: &str = "PERINDEX_CACHE_DIR";

/// Matrices with fewer stored entries are never written to disk.
const DISK_THRESHOLD_NNZ: usize = 4096;

type Key = (MatrixDigest, Tracking);

pub struct SmithCache {
    memory: RwLock<HashMap<Key, Arc<SmithDecomposition>>>,
    dir: RwLock<Option<PathBuf>>,
    hits: AtomicU64,
    disk_hits: AtomicU64,
    misses: AtomicU64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub disk_hits: u64,
    pub misses: u64,
}

#[derive(Serialize, Deserialize)]
struct Stored {
    version: String,
    digest: String,
    rows: usize,
    cols: usize,
    diagonal: Vec<Int>,
    left: Option<LeftTransform>,
    v: Option<String>,
}

impl SmithCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        SmithCache {
            memory: RwLock::new(HashMap::new()),
            dir: RwLock::new(dir),
            hits: AtomicU64::new(0),
            disk_hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    /// Process-wide cache; the directory defaults to `$PERINDEX_CACHE_DIR`.
    pub fn global() -> &'static SmithCache {
        static CACHE: OnceLock<SmithCache> = OnceLock::new();
        CACHE.get_or_init(|| SmithCache::new(std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from)))
    }

    pub fn set_dir(&self, dir: Option<PathBuf>) {
        *self.dir.write() = dir;
    }

    pub fn dir(&self) -> Option<PathBuf> {
        self.dir.read().clone()
    }

    pub fn clear_memory(&self) {
        self.memory.write().clear();
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            disk_hits: self.disk_hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
        }
    }

    pub fn decompose(&self, m: &SparseIntMatrix, tracking: Tracking) -> Arc<SmithDecomposition> {
        let digest = m.digest();
        {
            let mem = self.memory.read();
            if let Some(hit) = mem.iter().find(|((d, t), _)| *d == digest && t.covers(tracking)).map(|(_, v)| v) {
                self.hits.fetch_add(1, Ordering::Relaxed);
                return hit.clone();
            }
        }
        let dir = self.dir();
        let on_disk = dir.as_ref().filter(|_| m.nnz() >= DISK_THRESHOLD_NNZ);
        if let Some(dir) = on_disk {
            if let Some(found) = load(dir, digest, tracking) {
                self.disk_hits.fetch_add(1, Ordering::Relaxed);
                let found = Arc::new(found);
                self.memory.write().insert((digest, tracking), found.clone());
                return found;
            }
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let computed = Arc::new(decompose(m, tracking));
        if let Some(dir) = on_disk {
            // A failed write only costs a recomputation next time.
            let _ = store(dir, &computed, tracking);
        }
        self.memory.write().entry((digest, tracking)).or_insert(computed).clone()
    }
}

fn file_stem(digest: MatrixDigest, tracking: Tracking) -> String {
    let flags: String = [(tracking.left, 'L'), (tracking.right, 'R')]
        .iter()
        .map(|(on, c)| if *on { *c } else { '-' })
        .collect();
    format!("{}-{}-{}", digest.to_hex(), flags, ALGORITHM_VERSION)
}

fn load(dir: &Path, digest: MatrixDigest, tracking: Tracking) -> Option<SmithDecomposition> {
    let path = dir.join(format!("{}.json", file_stem(digest, tracking)));
    let mut file = File::open(&path).ok()?;
    file.lock_shared().ok()?;
    let mut text = String::new();
    file.read_to_string(&mut text).ok()?;
    let _ = file.unlock();
    let stored: Stored = serde_json::from_str(&text).ok()?;
    if stored.version != ALGORITHM_VERSION || stored.digest != digest.to_hex() {
        return None;
    }
    let v = match &stored.v {
        None => None,
        Some(t) => Some(SparseIntMatrix::from_text(t).ok()?),
    };
    let s = SmithDecomposition::from_parts(stored.rows, stored.cols, stored.diagonal, stored.left, v, digest);
    s.tracking().covers(tracking).then_some(s)
}

fn store(dir: &Path, s: &SmithDecomposition, tracking: Tracking) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let stem = file_stem(s.source_digest(), tracking);
    let lock = OpenOptions::new().create(true).truncate(false).write(true).open(dir.join(format!("{stem}.lock")))?;
    lock.lock()?;
    let stored = Stored {
        version: ALGORITHM_VERSION.to_string(),
        digest: s.source_digest().to_hex(),
        rows: s.rows(),
        cols: s.cols(),
        diagonal: s.invariant_factors().to_vec(),
        left: s.left().ok().cloned(),
        v: s.v().ok().map(SparseIntMatrix::to_text),
    };
    let tmp = dir.join(format!("{stem}.tmp"));
    {
        let mut f = File::create(&tmp)?;
        f.write_all(serde_json::to_string(&stored).map_err(std::io::Error::other)?.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, dir.join(format!("{stem}.json")))?;
    lock.unlock()
}

/// Decomposes through the process-wide cache.
pub fn decompose_cached(m: &SparseIntMatrix, tracking: Tracking) -> Arc<SmithDecomposition> {
    SmithCache::global().decompose(m, tracking)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big_matrix() -> SparseIntMatrix {
        // Boundary-like: three signed entries per column.
        let (rows, cols) = (1500, 1600);
        let mut entries = Vec::new();
        for c in 0..cols {
            for (k, sign) in [1i64, -1, 1].iter().enumerate() {
                entries.push(((c * 7 + k * 331) % rows, c, Int::from(*sign)));
            }
        }
        SparseIntMatrix::from_triplets(rows, cols, &entries).unwrap()
    }

    #[test]
    fn disk_round_trip_matches_fresh_computation() {
        let dir = tempfile::tempdir().unwrap();
        let m = big_matrix();
        assert!(m.nnz() >= DISK_THRESHOLD_NNZ);
        let first = SmithCache::new(Some(dir.path().to_path_buf()));
        let a = first.decompose(&m, Tracking::LEFT);
        assert_eq!(first.stats().misses, 1);
        let second = SmithCache::new(Some(dir.path().to_path_buf()));
        let b = second.decompose(&m, Tracking::LEFT);
        assert_eq!(second.stats().disk_hits, 1);
        assert_eq!(a.invariant_factors(), b.invariant_factors());
        assert_eq!(a.u().unwrap(), b.u().unwrap());
        let c = second.decompose(&m, Tracking::NONE);
        assert_eq!(second.stats().hits, 1);
        assert_eq!(c.rank(), a.rank());
    }
}
