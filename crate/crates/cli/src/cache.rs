//! Append-only JSONL result cache.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    /// Canonical statement, or `format;s` for secant rows.
    pub key: String,
    pub kind: String,
    pub config: String,
    pub verdict: String,
    pub cert_sha256: Option<String>,
    pub tool_version: String,
    pub timestamp: u64,
    pub payload: serde_json::Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub struct Cache {
    path: Option<PathBuf>,
    records: Vec<CacheRecord>,
    writer: Mutex<Option<File>>,
}

impl Cache {
    pub fn disabled() -> Self {
        Self {
            path: None,
            records: Vec::new(),
            writer: Mutex::new(None),
        }
    }

    pub fn open(path: &Path) -> Result<Self> {
        let mut records = Vec::new();
        if path.exists() {
            let f = File::open(path).with_context(|| format!("opening cache {}", path.display()))?;
            for (i, line) in BufReader::new(f).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: CacheRecord = serde_json::from_str(&line)
                    .with_context(|| format!("{}:{}: malformed cache record", path.display(), i + 1))?;
                records.push(rec);
            }
        }
        Ok(Self {
            path: Some(path.to_path_buf()),
            records,
            writer: Mutex::new(None),
        })
    }

    pub fn lookup(&self, kind: &str, key: &str, config: &str) -> Option<&CacheRecord> {
        self.records
            .iter()
            .rev()
            .find(|r| r.kind == kind && r.key == key && r.config == config)
    }

    pub fn append(&self, kind: &str, key: &str, config: &str, verdict: &str, cert: Option<&str>, payload: serde_json::Value) -> Result<()> {
        let Some(path) = &self.path else { return Ok(()) };
        let rec = CacheRecord {
            key: key.to_string(),
            kind: kind.to_string(),
            config: config.to_string(),
            verdict: verdict.to_string(),
            cert_sha256: cert.map(|c| sha256_hex(c.as_bytes())),
            tool_version: TOOL_VERSION.to_string(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            payload,
        };
        let mut guard = self.writer.lock().expect("cache writer");
        if guard.is_none() {
            let f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .with_context(|| format!("opening cache {}", path.display()))?;
            *guard = Some(f);
        }
        let f = guard.as_mut().expect("opened above");
        writeln!(f, "{}", serde_json::to_string(&rec)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        let c = Cache::open(&p).unwrap();
        assert!(c.lookup("prove", "T(1;0;0)", "x").is_none());
        c.append("prove", "T(1;0;0)", "x", "TRUE", Some("{}"), serde_json::json!({"a": 1})).unwrap();
        c.append("prove", "T(1;0;0)", "y", "FALSE", None, serde_json::json!(null)).unwrap();
        let c = Cache::open(&p).unwrap();
        let r = c.lookup("prove", "T(1;0;0)", "x").unwrap();
        assert_eq!(r.verdict, "TRUE");
        assert_eq!(r.cert_sha256.as_deref(), Some(sha256_hex(b"{}").as_str()));
        assert_eq!(c.lookup("prove", "T(1;0;0)", "y").unwrap().verdict, "FALSE");
    }

    #[test]
    fn malformed_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        std::fs::write(&p, "not json\n").unwrap();
        assert!(Cache::open(&p).is_err());
    }
}
