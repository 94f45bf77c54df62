//! On-disk cache of exact results, keyed by a SHA-256 of the normalized
//! request. Entries are re-verified by the caller before use, so a stale or
//! corrupted file can cost time but never change an answer.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const ENV_VAR: &str = "ITLOG_CACHE_DIR";

#[derive(Debug, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub operation: String,
    pub expression: String,
    pub order: usize,
    pub created_at: u64,
    /// Series file text.
    pub payload: String,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: Option<PathBuf>,
}

fn default_dir() -> Option<PathBuf> {
    if let Some(x) = std::env::var_os("XDG_CACHE_HOME").filter(|v| !v.is_empty()) {
        return Some(PathBuf::from(x).join("itlog"));
    }
    std::env::var_os("HOME")
        .filter(|v| !v.is_empty())
        .map(|h| PathBuf::from(h).join(".cache").join("itlog"))
}

impl Cache {
    /// Flag beats environment beats the per-user default.
    pub fn resolve(flag: Option<PathBuf>, disabled: bool) -> Cache {
        if disabled {
            return Cache { dir: None };
        }
        let dir = flag
            .or_else(|| {
                std::env::var_os(ENV_VAR)
                    .filter(|v| !v.is_empty())
                    .map(PathBuf::from)
            })
            .or_else(default_dir);
        Cache { dir }
    }

    pub fn key(operation: &str, expression: &str, order: usize) -> String {
        let mut h = Sha256::new();
        for part in [operation, expression, &order.to_string()] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path(dir: &Path, key: &str) -> PathBuf {
        dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Option<CacheEntry> {
        let dir = self.dir.as_ref()?;
        let text = fs::read_to_string(Self::path(dir, key)).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        (entry.key == key).then_some(entry)
    }

    /// Best effort: a read-only or missing cache directory only costs a
    /// warning.
    pub fn store(
        &self,
        key: &str,
        operation: &str,
        expression: &str,
        order: usize,
        payload: String,
    ) {
        let Some(dir) = self.dir.as_ref() else {
            return;
        };
        let entry = CacheEntry {
            key: key.to_string(),
            operation: operation.to_string(),
            expression: expression.to_string(),
            order,
            created_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            payload,
        };
        let write = || -> std::io::Result<()> {
            fs::create_dir_all(dir)?;
            let tmp = dir.join(format!("{key}.tmp{}", std::process::id()));
            fs::write(&tmp, serde_json::to_string(&entry)?)?;
            fs::rename(tmp, Self::path(dir, key))
        };
        if let Err(e) = write() {
            eprintln!("warning: cache write to {} failed: {e}", dir.display());
        }
    }
}
