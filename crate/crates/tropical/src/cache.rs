//! Persistent stratum cache: one JSON-lines file per (g, n, edge count),
//! holding the sorted canonical records of a stratum behind a hashed
//! header. Corrupt, truncated, or version-mismatched files are treated as
//! absent and regenerated; writes go through a temporary file and a rename
//! so readers never observe partial content.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enumerate::{Stratum, StratumClass, StratumKey};
use crate::error::{Error, Result};
use crate::graph::{GraphRecord, MarkedWeightedGraph};

const CACHE_VERSION: u32 = 1;

/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "TROPICAL_CACHE_DIR";

/// Default cache directory when the environment variable is unset.
pub const DEFAULT_CACHE_DIR: &str = ".tropical-cache";

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
struct CacheHeader {
    version: u32,
    g: usize,
    n: usize,
    edges: usize,
    count: usize,
    sha256: String,
}

#[derive(Debug, Clone)]
pub struct StratumCache {
    dir: PathBuf,
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl StratumCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// Cache rooted at `TROPICAL_CACHE_DIR`, or `.tropical-cache` when the
    /// variable is unset. An empty value disables caching.
    pub fn from_env() -> Option<Self> {
        match std::env::var(CACHE_DIR_ENV) {
            Ok(dir) if dir.is_empty() => None,
            Ok(dir) => Some(Self::new(dir)),
            Err(_) => Some(Self::new(DEFAULT_CACHE_DIR)),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: StratumKey) -> PathBuf {
        self.dir.join(format!("stratum-g{}-n{}-e{}.jsonl", key.g, key.n, key.edges))
    }

    /// Loads a stratum, returning `None` when the file is missing or fails
    /// any integrity check.
    pub fn load(&self, key: StratumKey) -> Option<Stratum> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let (header_line, payload) = text.split_once('\n')?;
        let header: CacheHeader = serde_json::from_str(header_line).ok()?;
        if header.version != CACHE_VERSION
            || header.g != key.g
            || header.n != key.n
            || header.edges != key.edges
        {
            return None;
        }
        if hex_digest(payload.as_bytes()) != header.sha256 {
            return None;
        }
        let mut classes = Vec::with_capacity(header.count);
        for line in payload.lines() {
            let record: GraphRecord = serde_json::from_str(line).ok()?;
            let graph = MarkedWeightedGraph::from_record(&record).ok()?;
            if graph.num_edges() != key.edges {
                return None;
            }
            classes.push(StratumClass {
                signature: crate::canon::IsoSignature(line.to_string()),
                graph,
            });
        }
        if classes.len() != header.count
            || !classes.windows(2).all(|w| w[0].signature < w[1].signature)
        {
            return None;
        }
        Some(Stratum { key, classes })
    }

    /// Writes a stratum atomically. The payload is the signature lines in
    /// order, so rewriting the same stratum is byte-identical.
    pub fn store(&self, stratum: &Stratum) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut payload = String::new();
        for class in &stratum.classes {
            payload.push_str(&class.signature.0);
            payload.push('\n');
        }
        let header = CacheHeader {
            version: CACHE_VERSION,
            g: stratum.key.g,
            n: stratum.key.n,
            edges: stratum.key.edges,
            count: stratum.classes.len(),
            sha256: hex_digest(payload.as_bytes()),
        };
        let final_path = self.path(stratum.key);
        let tmp_path = self.dir.join(format!(
            ".tmp-{}-{}-{}",
            std::process::id(),
            TEMP_COUNTER.fetch_add(1, Ordering::Relaxed),
            final_path.file_name().and_then(|s| s.to_str()).unwrap_or("stratum")
        ));
        {
            let mut file = fs::File::create(&tmp_path)?;
            serde_json::to_writer(&mut file, &header)?;
            file.write_all(b"\n")?;
            file.write_all(payload.as_bytes())?;
            file.sync_all()?;
        }
        fs::rename(&tmp_path, &final_path).map_err(|e| {
            let _ = fs::remove_file(&tmp_path);
            Error::Cache(format!("atomic rename failed: {e}"))
        })?;
        Ok(())
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_form;

    fn sample_stratum(dir: &Path) -> (StratumCache, Stratum) {
        let cache = StratumCache::new(dir);
        let key = StratumKey { g: 2, n: 0, edges: 1 };
        let mut classes: Vec<StratumClass> = [
            MarkedWeightedGraph::new(2, vec![1], vec![(0, 0)], vec![]).unwrap(),
            MarkedWeightedGraph::new(2, vec![1, 1], vec![(0, 1)], vec![]).unwrap(),
        ]
        .into_iter()
        .map(|g| {
            let c = canonical_form(&g);
            StratumClass { signature: c.signature, graph: c.graph }
        })
        .collect();
        classes.sort_by(|a, b| a.signature.cmp(&b.signature));
        (cache, Stratum { key, classes })
    }

    #[test]
    fn round_trip_and_idempotence() {
        let dir = tempfile::tempdir().unwrap();
        let (cache, stratum) = sample_stratum(dir.path());
        cache.store(&stratum).unwrap();
        let path = dir.path().join("stratum-g2-n0-e1.jsonl");
        let first = fs::read(&path).unwrap();

        let loaded = cache.load(stratum.key).expect("cache hit");
        assert_eq!(loaded.classes.len(), 2);
        assert_eq!(
            loaded.classes.iter().map(|c| &c.signature).collect::<Vec<_>>(),
            stratum.classes.iter().map(|c| &c.signature).collect::<Vec<_>>()
        );
        for (a, b) in loaded.classes.iter().zip(&stratum.classes) {
            assert_eq!(a.graph, b.graph);
        }

        cache.store(&stratum).unwrap();
        assert_eq!(fs::read(&path).unwrap(), first, "rewrite must be byte-identical");
    }

    #[test]
    fn corruption_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let (cache, stratum) = sample_stratum(dir.path());
        cache.store(&stratum).unwrap();
        let path = dir.path().join("stratum-g2-n0-e1.jsonl");

        let good = fs::read_to_string(&path).unwrap();
        let tampered = good.replace("\"w\":[1,1]", "\"w\":[2,0]");
        assert_ne!(good, tampered);
        fs::write(&path, tampered).unwrap();
        assert!(cache.load(stratum.key).is_none(), "hash mismatch must miss");

        // Version bump invalidates too.
        let bumped = good.replacen("\"version\":1", "\"version\":999", 1);
        fs::write(&path, bumped).unwrap();
        assert!(cache.load(stratum.key).is_none(), "version mismatch must miss");

        fs::write(&path, good).unwrap();
        assert!(cache.load(stratum.key).is_some());
    }

    #[test]
    fn missing_file_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = StratumCache::new(dir.path());
        assert!(cache.load(StratumKey { g: 2, n: 0, edges: 1 }).is_none());
    }
}
