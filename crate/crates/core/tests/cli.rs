//! The `mf` binary: exit codes, output formats and environment overrides.

use std::path::Path;
use std::process::{Command, Output};

fn mf(args: &[&str], envs: &[(&str, &str)], cache: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mf"));
    cmd.args(args);
    for key in [
        "MF_DATA_DIR",
        "MF_CACHE_DIR",
        "MF_PRECISION_BITS",
        "MF_ROUNDING_THRESHOLD",
        "MF_C_MAX",
        "MF_TAIL_WINDOW",
        "MF_SUMMATION",
        "MF_FORMAT",
        "MF_PARALLELISM",
    ] {
        cmd.env_remove(key);
    }
    cmd.env("MF_CACHE_DIR", cache);
    cmd.envs(envs.iter().copied());
    cmd.output().expect("mf runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["mt", "--group", "M", "--class", "9Z"][..],
        &["mt", "--group", "X", "--class", "1A"],
        &["no-such-command"],
        &["target", "--group", "th", "--bogus"],
        &["--parallelism", "0", "target", "--group", "th"],
        &["--format", "csv", "identify", "--group", "B", "--class", "3B"],
    ] {
        let o = mf(args, &[], dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn help_and_version_succeed() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["--help"][..], &["--version"], &["identify", "--help"]] {
        let o = mf(args, &[], dir.path());
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn cache_gc_has_an_underscore_alias() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path()).unwrap();
    for name in ["cache-gc", "cache_gc"] {
        let o = mf(&[name, "--max-bytes", "0"], &[], dir.path());
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn json_output_carries_the_run_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let o = mf(&["target", "--group", "th", "--trunc", "8"], &[], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["run"]["command"], "target");
    assert_eq!(v["run"]["c_max"], 2000);
    assert_eq!(v["run"]["precision_bits"], 192);
}

#[test]
fn environment_sets_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["target", "--group", "th", "--trunc", "5"];
    let o = mf(&args, &[("MF_FORMAT", "csv")], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("n,coefficient\n-3,2\n0,248\n"), "{}", stdout(&o));

    let mut with_flag = vec!["--format", "json"];
    with_flag.extend(args);
    let o = mf(&with_flag, &[("MF_FORMAT", "csv")], dir.path());
    assert_eq!(json(&o)["run"]["output_format"], "json");

    let o = mf(&args, &[("MF_C_MAX", "500"), ("MF_PRECISION_BITS", "128")], dir.path());
    let v = json(&o);
    assert_eq!(v["run"]["c_max"], 500);
    assert_eq!(v["run"]["precision_bits"], 128);
}

#[test]
fn verify_b_is_clean() {
    let dir = tempfile::tempdir().unwrap();
    for group in ["B", "M"] {
        let o = mf(&["verify-b", "--group", group], &[], dir.path());
        assert_eq!(o.status.code(), Some(0), "{group}: {}", stdout(&o));
        assert_eq!(json(&o)["mismatches"].as_array().map(Vec::len), Some(0));
    }
}

#[test]
fn decompose_finds_the_published_grade() {
    let dir = tempfile::tempdir().unwrap();
    let o = mf(
        &["--format", "text", "decompose", "--group", "B", "--target", "-4371", "--limit", "1"],
        &[],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("U2-"), "{}", stdout(&o));
}

#[test]
fn identify_is_deterministic_across_cache_states() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["identify", "--group", "B", "--class", "3B"];
    let cold = mf(&args, &[], dir.path());
    assert_eq!(cold.status.code(), Some(0), "{}", String::from_utf8_lossy(&cold.stderr));
    let v = json(&cold);
    assert_eq!(v["status"], "identified");
    assert_eq!(v["kappas"][0]["num"], 9);
    assert_eq!(v["kappas"][0]["den"], 2);
    let warm = mf(&args, &[], dir.path());
    assert_eq!(warm.stdout, cold.stdout);
}
