use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::record::ResultRecord;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheEntry {
    pub record: ResultRecord,
    pub exit_code: i32,
}

/// `sha256(command, canonical config, engine version)` in hex.
pub fn cache_key(command: &str, config: &RunConfig) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update([0]);
    for (k, v) in config.canonical() {
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
        h.update([0]);
    }
    h.update(wakimoto::VERSION.as_bytes());
    hex::encode(h.finalize())
}

fn entry_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.json"))
}

/// A stored entry, or `None` on a miss or an unreadable file.
pub fn lookup(dir: &Path, key: &str) -> Option<CacheEntry> {
    let text = std::fs::read_to_string(entry_path(dir, key)).ok()?;
    serde_json::from_str(&text).ok()
}

pub fn store(dir: &Path, key: &str, entry: &CacheEntry) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!("{key}.tmp"));
    std::fs::write(&tmp, serde_json::to_vec_pretty(entry).expect("entries serialize"))?;
    std::fs::rename(tmp, entry_path(dir, key))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::load_config;
    use crate::record::Status;
    use std::collections::BTreeMap;

    fn config(pairs: &[(&str, &str)]) -> RunConfig {
        let m: BTreeMap<String, String> = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        load_config(None, &m).unwrap()
    }

    #[test]
    fn key_ignores_output_plumbing() {
        let a = config(&[("k", "1"), ("format", "csv"), ("jobs", "4")]);
        let b = config(&[("p", "3"), ("pprime", "1")]);
        assert_eq!(cache_key("detc", &a), cache_key("detc", &b));
        assert_ne!(cache_key("detc", &a), cache_key("euler", &a));
        assert_ne!(cache_key("detc", &a), cache_key("detc", &config(&[("k", "1"), ("degree", "2")])));
    }

    #[test]
    fn store_then_lookup() {
        let dir = tempfile::tempdir().unwrap();
        let entry = CacheEntry {
            record: ResultRecord {
                command: "detc".into(),
                params: BTreeMap::new(),
                status: Status::Pass,
                payload: serde_json::json!({"N": 1}),
                engine_version: wakimoto::VERSION.into(),
            },
            exit_code: 0,
        };
        assert!(lookup(dir.path(), "abc").is_none());
        store(dir.path(), "abc", &entry).unwrap();
        assert_eq!(lookup(dir.path(), "abc").unwrap().record, entry.record);
    }
}
