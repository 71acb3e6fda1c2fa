//! On-disk memo of Rademacher c-term vectors.
//!
//! Layout: `<root>/<N>_<v>_<h>/<m>_<n>/<c_max>.p<bits>.term`, one file per
//! coefficient holding the ordered c-terms (one line per c). A file computed
//! for a larger `c_max` also serves every smaller one, since the terms are a
//! prefix. Writers create `*.tmp` siblings and rename them into place, so
//! readers and the collector never observe partial files.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::SystemTime;

use serde::Serialize;

const TERM_EXT: &str = "term";
const TMP_EXT: &str = "tmp";

/// Identifies one coefficient's term vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TermKey {
    pub level: u64,
    pub v: i64,
    pub h: u64,
    pub m: i64,
    pub n: i64,
    pub precision_bits: usize,
}

impl TermKey {
    fn dir(&self, root: &Path) -> PathBuf {
        root.join(format!("{}_{}_{}", self.level, self.v, self.h))
            .join(format!("{}_{}", self.m, self.n))
    }
}

#[derive(Debug, Clone)]
pub struct TermCache {
    root: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GcReport {
    pub scanned_files: usize,
    pub evicted_files: usize,
    pub freed_bytes: u64,
    pub remaining_bytes: u64,
    pub skipped_temp_files: usize,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl TermCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Finds the stored vector with the smallest `c_max' ≥ c_max` and returns
    /// `(c_max', contents)`. Reading refreshes the file's modification time,
    /// which the collector uses as its recency signal.
    pub fn load(&self, key: &TermKey, c_max: u64) -> Option<(u64, String)> {
        let dir = key.dir(&self.root);
        let suffix = format!(".p{}.{}", key.precision_bits, TERM_EXT);
        let best = fs::read_dir(&dir)
            .ok()?
            .filter_map(Result::ok)
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                let stored: u64 = name.strip_suffix(&suffix)?.parse().ok()?;
                (stored >= c_max).then_some((stored, e.path()))
            })
            .min_by_key(|(stored, _)| *stored)?;
        let text = fs::read_to_string(&best.1).ok()?;
        if let Ok(f) = fs::File::options().append(true).open(&best.1) {
            let _ = f.set_modified(SystemTime::now());
        }
        Some((best.0, text))
    }

    pub fn store(&self, key: &TermKey, c_max: u64, contents: &str) -> io::Result<PathBuf> {
        let dir = key.dir(&self.root);
        fs::create_dir_all(&dir)?;
        let final_path = dir.join(format!("{}.p{}.{}", c_max, key.precision_bits, TERM_EXT));
        let tmp = dir.join(format!(
            "{}.p{}.{}.{}.{}",
            c_max,
            key.precision_bits,
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed),
            TMP_EXT
        ));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(contents.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &final_path)?;
        Ok(final_path)
    }

    /// Evicts least-recently-used term files until the total size of term
    /// files is at most `max_bytes`. Temporary files belong to in-flight
    /// writers and are never touched.
    pub fn gc(&self, max_bytes: u64) -> io::Result<GcReport> {
        let mut report = GcReport::default();
        if !self.root.exists() {
            return Err(io::Error::new(
                io::ErrorKind::NotFound,
                format!("cache directory {} does not exist", self.root.display()),
            ));
        }
        let mut files = Vec::new();
        collect_files(&self.root, &mut files, &mut report)?;
        let mut total: u64 = files.iter().map(|f| f.1).sum();
        // oldest first; ties broken by path for determinism
        files.sort_by(|a, b| a.2.cmp(&b.2).then_with(|| a.0.cmp(&b.0)));
        for (path, size, _) in files {
            if total <= max_bytes {
                break;
            }
            match fs::remove_file(&path) {
                Ok(()) => {
                    total -= size;
                    report.evicted_files += 1;
                    report.freed_bytes += size;
                }
                Err(e) if e.kind() == io::ErrorKind::NotFound => total -= size,
                Err(e) => return Err(e),
            }
        }
        report.remaining_bytes = total;
        Ok(report)
    }
}

fn collect_files(
    dir: &Path,
    out: &mut Vec<(PathBuf, u64, SystemTime)>,
    report: &mut GcReport,
) -> io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let path = entry.path();
        let meta = match entry.metadata() {
            Ok(m) => m,
            Err(e) if e.kind() == io::ErrorKind::NotFound => continue,
            Err(e) => return Err(e),
        };
        if meta.is_dir() {
            collect_files(&path, out, report)?;
            continue;
        }
        match path.extension().and_then(|e| e.to_str()) {
            Some(TERM_EXT) => {
                report.scanned_files += 1;
                out.push((path, meta.len(), meta.modified()?));
            }
            Some(TMP_EXT) => report.skipped_temp_files += 1,
            _ => {}
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(n: i64) -> TermKey {
        TermKey {
            level: 1,
            v: 0,
            h: 1,
            m: 3,
            n,
            precision_bits: 192,
        }
    }

    #[test]
    fn larger_vectors_serve_smaller_requests() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TermCache::new(dir.path());
        assert!(cache.load(&key(5), 10).is_none());
        cache.store(&key(5), 20, "payload").unwrap();
        assert_eq!(cache.load(&key(5), 10), Some((20, "payload".into())));
        assert!(cache.load(&key(5), 40).is_none());
        assert!(cache.load(&key(8), 10).is_none());
    }

    #[test]
    fn gc_empty_is_noop() {
        let dir = tempfile::tempdir().unwrap();
        let report = TermCache::new(dir.path()).gc(0).unwrap();
        assert_eq!(report, GcReport::default());
    }
}
