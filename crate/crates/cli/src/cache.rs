//! On-disk cache of computed invariants, one JSON file per key.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use khr_core::Invariant;
use serde::{Deserialize, Serialize};

/// Bumped whenever a grading or normalization convention changes; entries
/// written under another version are never read.
pub const CONVENTIONS_VERSION: &str = "khr-conventions-1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheKey {
    pub m: i64,
    pub n: i64,
    pub form: String,
    pub version: String,
}

impl CacheKey {
    pub fn new(m: i64, n: i64, form: &str) -> Self {
        Self { m, n, form: form.to_string(), version: CONVENTIONS_VERSION.to_string() }
    }

    fn file_name(&self) -> String {
        format!("{}-{}-{}-{}.json", self.form.to_lowercase(), self.m, self.n, self.version)
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    version: String,
    m: i64,
    n: i64,
    form: String,
    value: Invariant,
}

#[derive(Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit(Invariant),
    Miss,
    Corrupt(String),
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    fn encode(key: &CacheKey, value: &Invariant) -> String {
        let entry = Entry {
            version: key.version.clone(),
            m: key.m,
            n: key.n,
            form: key.form.clone(),
            value: value.clone(),
        };
        serde_json::to_string(&entry).expect("cache entry serializes")
    }

    pub fn load(&self, key: &CacheKey) -> Lookup {
        let path = self.path_for(key);
        let raw = match fs::read_to_string(&path) {
            Ok(raw) => raw,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Lookup::Miss,
            Err(e) => return Lookup::Corrupt(format!("{}: {e}", path.display())),
        };
        let entry: Entry = match serde_json::from_str(&raw) {
            Ok(e) => e,
            Err(e) => return Lookup::Corrupt(format!("{}: {e}", path.display())),
        };
        if entry.version != key.version || entry.m != key.m || entry.n != key.n || entry.form != key.form {
            return Lookup::Corrupt(format!("{}: key mismatch", path.display()));
        }
        if Self::encode(key, &entry.value) != raw {
            return Lookup::Corrupt(format!("{}: not in canonical form", path.display()));
        }
        Lookup::Hit(entry.value)
    }

    /// Writes to a temporary file in the cache directory, then renames it
    /// into place.
    pub fn store(&self, key: &CacheKey, value: &Invariant) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(Self::encode(key, value).as_bytes())?;
        tmp.persist(self.path_for(key)).map_err(|e| e.error)?;
        Ok(())
    }

    /// Returns the cached value or computes and stores it. Warnings about
    /// corrupt entries or failed writes go to `warn`.
    pub fn get_or_compute<F, E>(&self, key: &CacheKey, warn: &mut dyn Write, compute: F) -> Result<Invariant, E>
    where
        F: FnOnce() -> Result<Invariant, E>,
    {
        match self.load(key) {
            Lookup::Hit(v) => return Ok(v),
            Lookup::Miss => {}
            Lookup::Corrupt(why) => {
                let _ = writeln!(warn, "warning: discarding corrupt cache entry {why}");
            }
        }
        let v = compute()?;
        if let Err(e) = self.store(key, &v) {
            let _ = writeln!(warn, "warning: could not write cache entry: {e}");
        }
        Ok(v)
    }

    /// Removes every cache entry; returns how many were deleted.
    pub fn clear(&self) -> io::Result<usize> {
        let mut removed = 0;
        let entries = match fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e),
        };
        for entry in entries {
            let path = entry?.path();
            if path.extension().is_some_and(|x| x == "json") {
                fs::remove_file(path)?;
                removed += 1;
            }
        }
        Ok(removed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use khr_core::LaurentPoly;

    fn trefoil() -> Invariant {
        let num = &LaurentPoly::mono(1, -1, -1)
            * &(&(&LaurentPoly::q_pow(1) + &LaurentPoly::t_pow(1)) - &LaurentPoly::a());
        Invariant::new(num, 1)
    }

    #[test]
    fn store_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let key = CacheKey::new(3, 2, "P");
        assert_eq!(cache.load(&key), Lookup::Miss);
        cache.store(&key, &trefoil()).unwrap();
        assert_eq!(cache.load(&key), Lookup::Hit(trefoil()));
    }

    #[test]
    fn version_bump_misses() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let key = CacheKey::new(3, 2, "P");
        cache.store(&key, &trefoil()).unwrap();
        let bumped = CacheKey { version: "khr-conventions-2".into(), ..key };
        assert_eq!(cache.load(&bumped), Lookup::Miss);
    }

    #[test]
    fn corrupt_entry_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let key = CacheKey::new(3, 2, "P");
        fs::write(cache.path_for(&key), "{not json").unwrap();
        assert!(matches!(cache.load(&key), Lookup::Corrupt(_)));
        let mut warn = Vec::new();
        let v = cache.get_or_compute::<_, ()>(&key, &mut warn, || Ok(trefoil())).unwrap();
        assert_eq!(v, trefoil());
        assert!(String::from_utf8(warn).unwrap().contains("corrupt"));
        assert_eq!(cache.load(&key), Lookup::Hit(trefoil()));
    }

    #[test]
    fn non_canonical_entry_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let key = CacheKey::new(1, 1, "P");
        // (1 - t) / (1 - t)^2 parses but is not canonical
        let raw = r#"{"version":"khr-conventions-1","m":1,"n":1,"form":"P","value":{"num":[{"a":0,"q2":0,"t2":0,"c":"1"},{"a":0,"q2":0,"t2":2,"c":"-1"}],"one_minus_t_pow":2}}"#;
        fs::write(cache.path_for(&key), raw).unwrap();
        assert!(matches!(cache.load(&key), Lookup::Corrupt(_)));
    }

    #[test]
    fn clear_removes_entries() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        cache.store(&CacheKey::new(3, 2, "P"), &trefoil()).unwrap();
        cache.store(&CacheKey::new(2, 3, "P"), &trefoil()).unwrap();
        assert_eq!(cache.clear().unwrap(), 2);
        assert_eq!(cache.load(&CacheKey::new(3, 2, "P")), Lookup::Miss);
    }
}
