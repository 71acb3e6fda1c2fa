//! Least-recently-used eviction of the term cache.

use std::fs;
use std::time::{Duration, SystemTime};

use mf_core::cache::{TermCache, TermKey};

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

fn age(path: &std::path::Path, seconds_ago: u64) {
    let f = fs::File::options().append(true).open(path).unwrap();
    f.set_modified(SystemTime::now() - Duration::from_secs(seconds_ago))
        .unwrap();
}

#[test]
fn empty_cache_is_a_no_op() {
    let dir = tempfile::tempdir().unwrap();
    let report = TermCache::new(dir.path()).gc(0).unwrap();
    assert_eq!(report.scanned_files, 0);
    assert_eq!(report.evicted_files, 0);
    assert_eq!(report.remaining_bytes, 0);
}

#[test]
fn missing_directory_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(TermCache::new(dir.path().join("absent")).gc(0).is_err());
}

#[test]
fn zero_budget_evicts_everything() {
    let dir = tempfile::tempdir().unwrap();
    let cache = TermCache::new(dir.path());
    for n in [1, 4, 5] {
        cache.store(&key(n), 100, "0.5 0\n0.25 0\n").unwrap();
    }
    let report = cache.gc(0).unwrap();
    assert_eq!(report.scanned_files, 3);
    assert_eq!(report.evicted_files, 3);
    assert_eq!(report.remaining_bytes, 0);
    assert!(cache.load(&key(1), 100).is_none());
}

#[test]
fn oldest_files_go_first() {
    let dir = tempfile::tempdir().unwrap();
    let cache = TermCache::new(dir.path());
    let old = cache.store(&key(1), 100, "aaaa").unwrap();
    let mid = cache.store(&key(4), 100, "bbbb").unwrap();
    let new = cache.store(&key(5), 100, "cccc").unwrap();
    age(&old, 300);
    age(&mid, 200);
    age(&new, 100);
    // Reading refreshes recency: `old` becomes the newest.
    assert!(cache.load(&key(1), 50).is_some());
    let report = cache.gc(8).unwrap();
    assert_eq!(report.evicted_files, 1);
    assert!(old.exists());
    assert!(!mid.exists());
    assert!(new.exists());
}

#[test]
fn in_flight_temp_files_are_left_alone() {
    let dir = tempfile::tempdir().unwrap();
    let cache = TermCache::new(dir.path());
    let stored = cache.store(&key(1), 100, "payload").unwrap();
    // A writer that has not renamed its file yet.
    let temp = stored.with_file_name("100.p192.4242.0.tmp");
    fs::write(&temp, "partial").unwrap();
    let report = cache.gc(0).unwrap();
    assert_eq!(report.skipped_temp_files, 1);
    assert_eq!(report.evicted_files, 1);
    assert!(temp.exists());
    assert_eq!(fs::read_to_string(&temp).unwrap(), "partial");
}

#[test]
fn concurrent_writers_leave_a_complete_file() {
    let dir = tempfile::tempdir().unwrap();
    let cache = TermCache::new(dir.path());
    let payloads: Vec<String> = (0..8).map(|i| format!("{i}\n").repeat(2000)).collect();
    std::thread::scope(|s| {
        for p in &payloads {
            let cache = cache.clone();
            s.spawn(move || cache.store(&key(9), 100, p).unwrap());
        }
    });
    let (_, text) = cache.load(&key(9), 100).unwrap();
    assert!(payloads.contains(&text));
    let leftovers = fs::read_dir(stored_dir(&cache))
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().unwrap() == "tmp")
        .count();
    assert_eq!(leftovers, 0);
}

fn stored_dir(cache: &TermCache) -> std::path::PathBuf {
    cache.root().join("1_0_1").join("3_9")
}
