//! Content-addressed artifact cache: one JSON file per artifact, named by the
//! SHA-256 of the job key.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Bumped whenever cached artifacts change meaning.
pub const CACHE_VERSION: u32 = 1;
pub const ENV_VAR: &str = "NSCAP_CACHE_DIR";

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    fn path(dir: &Path, key: &serde_json::Value) -> PathBuf {
        let body = serde_json::json!({ "version": CACHE_VERSION, "key": key });
        let digest = Sha256::digest(serde_json::to_vec(&body).expect("keys serialize"));
        dir.join(format!("{}.json", hex::encode(digest)))
    }

    /// Returns the cached artifact for `key`, or computes and stores it.
    /// Unreadable or stale entries are recomputed and overwritten.
    pub fn get_or_compute<T, F>(&self, key: &serde_json::Value, compute: F) -> nscap::Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> nscap::Result<T>,
    {
        let Some(dir) = &self.dir else {
            return compute();
        };
        let path = Self::path(dir, key);
        if let Some(hit) = fs::read(&path).ok().and_then(|b| serde_json::from_slice(&b).ok()) {
            return Ok(hit);
        }
        let value = compute()?;
        // a cache that cannot be written only costs runtime
        if fs::create_dir_all(dir).is_ok() {
            let tmp = path.with_extension("tmp");
            if fs::write(&tmp, serde_json::to_vec(&value).expect("artifacts serialize")).is_ok() {
                let _ = fs::rename(&tmp, &path);
            }
        }
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    #[test]
    fn hit_skips_computation() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(Some(dir.path().to_path_buf()));
        let key = serde_json::json!({ "walk": 1 });
        let calls = Cell::new(0);
        let f = || {
            calls.set(calls.get() + 1);
            Ok(vec![0.1f64, 1.0 / 3.0])
        };
        let a: Vec<f64> = cache.get_or_compute(&key, f).unwrap();
        let b: Vec<f64> = cache.get_or_compute(&key, f).unwrap();
        assert_eq!(a, b);
        assert_eq!(calls.get(), 1);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
        let other: Vec<f64> = cache.get_or_compute(&serde_json::json!({ "walk": 2 }), f).unwrap();
        assert_eq!(other, a);
        assert_eq!(calls.get(), 2);
    }

    #[test]
    fn corrupt_entry_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(Some(dir.path().to_path_buf()));
        let key = serde_json::json!("k");
        fs::write(Cache::path(dir.path(), &key), b"{not json").unwrap();
        let v: u32 = cache.get_or_compute(&key, || Ok(7)).unwrap();
        assert_eq!(v, 7);
        let v: u32 = cache.get_or_compute(&key, || Ok(8)).unwrap();
        assert_eq!(v, 7);
    }
}
