//! Content-addressed disk cache of computed charts.
//!
//! An entry is `{digest}.json` holding the key material next to the chart; a
//! lookup is a hit only when the stored material equals the requested one,
//! so digest collisions and format changes read as misses. Writes go to a
//! temporary file in the same directory and are renamed into place.

use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chart::ExtChart;

/// Bumped whenever resolution, naming or chart serialization changes.
pub const CACHE_VERSION: u32 = 1;

/// Environment variable overriding the default cache directory.
pub const CACHE_DIR_ENV: &str = "PLCOB_CACHE_DIR";

const DEFAULT_DIR: &str = ".plcob-cache";
const TEMP_PREFIX: &str = ".tmp-";

/// Only `{64 hex digits}.json` files are entries; anything else in the
/// directory is left alone.
fn is_entry_name(name: &str) -> bool {
    name.strip_suffix(".json")
        .is_some_and(|d| d.len() == 64 && d.bytes().all(|b| b.is_ascii_hexdigit()))
}

/// Everything a cached chart depends on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyMaterial {
    pub version: u32,
    /// Builtin name or module file stem.
    pub kind: String,
    /// Canonical JSON of the module resolved.
    pub module: String,
    pub max_stem: u32,
    pub max_s: u32,
    /// Canonical JSON of the naming in effect.
    pub naming: String,
}

impl KeyMaterial {
    pub fn new(kind: &str, module: &str, max_stem: u32, max_s: u32, naming: &str) -> Self {
        KeyMaterial {
            version: CACHE_VERSION,
            kind: kind.to_string(),
            module: module.to_string(),
            max_stem,
            max_s,
            naming: naming.to_string(),
        }
    }

    /// Hex SHA-256 of the serialized material.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("key material serializes");
        let hash = Sha256::digest(&bytes);
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    version: u32,
    key: KeyMaterial,
    chart: ExtChart,
}

/// What [`Cache::gc`] removed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GcReport {
    pub kept: usize,
    pub temp_files: usize,
    pub corrupt: usize,
    pub stale_version: usize,
}

impl GcReport {
    pub fn removed(&self) -> usize {
        self.temp_files + self.corrupt + self.stale_version
    }
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// The configured directory, else the environment override, else
    /// `.plcob-cache` relative to the working directory.
    pub fn resolve_dir(configured: Option<&Path>) -> PathBuf {
        if let Some(dir) = configured {
            return dir.to_path_buf();
        }
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => PathBuf::from(DEFAULT_DIR),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_of(&self, key: &KeyMaterial) -> PathBuf {
        self.dir.join(format!("{}.json", key.digest()))
    }

    /// The cached chart for `key`; unreadable or mismatched entries are misses.
    pub fn get(&self, key: &KeyMaterial) -> Option<ExtChart> {
        let text = fs::read_to_string(self.path_of(key)).ok()?;
        let entry: Entry = serde_json::from_str(&text).ok()?;
        (entry.version == CACHE_VERSION && entry.key == *key).then_some(entry.chart)
    }

    /// Stores a chart atomically.
    pub fn put(&self, key: &KeyMaterial, chart: &ExtChart) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let entry = Entry {
            version: CACHE_VERSION,
            key: key.clone(),
            chart: chart.clone(),
        };
        let text = serde_json::to_string(&entry).map_err(io::Error::other)?;
        let mut tmp = tempfile::Builder::new()
            .prefix(TEMP_PREFIX)
            .suffix(".json")
            .tempfile_in(&self.dir)?;
        tmp.write_all(text.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path_of(key)).map_err(|e| e.error)?;
        Ok(())
    }

    /// `get`, computing and storing on a miss.
    pub fn get_or_insert<E>(
        &self,
        key: &KeyMaterial,
        compute: impl FnOnce() -> Result<ExtChart, E>,
    ) -> Result<(ExtChart, bool), E> {
        if let Some(chart) = self.get(key) {
            return Ok((chart, true));
        }
        let chart = compute()?;
        // A failed write leaves the cache cold but the result valid.
        let _ = self.put(key, &chart);
        Ok((chart, false))
    }

    fn entries(&self) -> io::Result<Vec<PathBuf>> {
        match fs::read_dir(&self.dir) {
            Ok(rd) => {
                let mut out = Vec::new();
                for e in rd {
                    let e = e?;
                    if e.file_type()?.is_file() {
                        out.push(e.path());
                    }
                }
                out.sort();
                Ok(out)
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Vec::new()),
            Err(e) => Err(e),
        }
    }

    /// Removes leftover temporary files, unparsable entries and entries of
    /// another cache version.
    pub fn gc(&self) -> io::Result<GcReport> {
        let mut report = GcReport::default();
        for path in self.entries()? {
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
            if name.starts_with(TEMP_PREFIX) {
                fs::remove_file(&path)?;
                report.temp_files += 1;
                continue;
            }
            if !is_entry_name(name) {
                continue;
            }
            let parsed = fs::read_to_string(&path)
                .ok()
                .and_then(|t| serde_json::from_str::<Entry>(&t).ok());
            match parsed {
                None => {
                    fs::remove_file(&path)?;
                    report.corrupt += 1;
                }
                Some(e) if e.version != CACHE_VERSION || e.key.version != CACHE_VERSION => {
                    fs::remove_file(&path)?;
                    report.stale_version += 1;
                }
                Some(_) => report.kept += 1,
            }
        }
        Ok(report)
    }

    /// Removes every entry and temporary file; returns how many.
    pub fn clear(&self) -> io::Result<usize> {
        let mut n = 0;
        for path in self.entries()? {
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
            if is_entry_name(name) || name.starts_with(TEMP_PREFIX) {
                fs::remove_file(&path)?;
                n += 1;
            }
        }
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::ChartClass;

    fn chart() -> ExtChart {
        ExtChart {
            classes: vec![ChartClass {
                name: "1".into(),
                s: 0,
                t: 0,
                flags: vec![],
                citation: None,
            }],
            ..ExtChart::default()
        }
    }

    #[test]
    fn put_get_gc_clear() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let key = KeyMaterial::new("F2@A2", "", 3, 2, "{}");
        assert!(cache.get(&key).is_none());
        cache.put(&key, &chart()).unwrap();
        assert_eq!(cache.get(&key).unwrap().to_json(), chart().to_json());
        let other = KeyMaterial::new("F2@A2", "", 4, 2, "{}");
        assert_ne!(key.digest(), other.digest());
        assert!(cache.get(&other).is_none());

        fs::write(
            dir.path().join(format!("{}.json", "ab".repeat(32))),
            "not json",
        )
        .unwrap();
        fs::write(dir.path().join("notes.json"), "kept").unwrap();
        fs::write(dir.path().join(".tmp-abc.json"), "{").unwrap();
        let report = cache.gc().unwrap();
        assert_eq!((report.kept, report.corrupt, report.temp_files), (1, 1, 1));
        assert_eq!(cache.clear().unwrap(), 1);
        assert!(cache.get(&key).is_none());
        assert!(dir.path().join("notes.json").exists());
    }

    #[test]
    fn missing_directory_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path().join("absent"));
        assert_eq!(cache.gc().unwrap(), GcReport::default());
        assert_eq!(cache.clear().unwrap(), 0);
    }
}
