use std::fs;

use khr_cli::cache::{Cache, CacheKey, Lookup, CONVENTIONS_VERSION};
use khr_cli::{run, EXIT_FAILED, EXIT_LINKS, EXIT_OK, EXIT_USAGE};

fn khr(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("khr").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn trefoil_latex() {
    let (code, out, _) = khr(&["compute", "3", "2", "--form", "P", "--format", "latex"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), r"\frac{a(qt)^{-1/2}\left(t + q - a\right)}{1-t}");
}

#[test]
fn unknot_text() {
    let (code, out, _) = khr(&["compute", "1", "5", "--form", "P"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "(1)/(1-t)");
}

#[test]
fn transposed_pair_agrees() {
    let a = khr(&["compute", "5", "3", "--format", "json"]);
    let b = khr(&["compute", "3", "5", "--format", "json"]);
    assert_eq!(a.0, EXIT_OK);
    assert_eq!(a.1, b.1);
}

#[test]
fn links_exit_three() {
    let (code, _, err) = khr(&["compute", "4", "2"]);
    assert_eq!(code, EXIT_LINKS);
    assert!(err.contains("out of scope"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(khr(&["compute", "0", "3"]).0, EXIT_USAGE);
    assert_eq!(khr(&["compute", "3"]).0, EXIT_USAGE);
    assert_eq!(khr(&["compute", "3", "2", "--form", "X"]).0, EXIT_USAGE);
    assert_eq!(khr(&["verify", "--range", "msum<12"]).0, EXIT_USAGE);
    assert_eq!(khr(&["verify", "3", "2", "--suite", "nope"]).0, EXIT_USAGE);
    assert_eq!(khr(&["--max-leaves", "10", "compute", "7", "5"]).0, EXIT_USAGE);
}

#[test]
fn output_is_deterministic() {
    let args = ["leaves", "5", "3", "--format", "json"];
    assert_eq!(khr(&args).1, khr(&args).1);
}

#[test]
fn leaf_table_json() {
    let (code, out, _) = khr(&["leaves", "3", "2", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let paths: Vec<_> = rows.iter().map(|r| r["path"].as_str().unwrap()).collect();
    assert_eq!(paths, ["NNEEE", "NENEE"]);
    assert_eq!(rows[0]["rule_tags"]["(1,1)"], "Keep");
    assert_eq!(rows[1]["rule_tags"]["(1,1)"], "Split");
    assert_eq!(rows[1]["rule_tags"]["(1,2)"], "Terminal");
}

#[test]
fn paths_listing() {
    let (code, out, _) = khr(&["paths", "5", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 7);
    let (_, out, _) = khr(&["paths", "3", "2", "--stats", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(rows[1]["stats"]["hplus"], 1);
}

#[test]
fn catalan_and_verify() {
    let (code, out, _) = khr(&["catalan", "5", "3"]);
    assert_eq!((code, out.trim()), (EXIT_OK, "7"));
    let (code, out, _) = khr(&["verify", "--range", "msum<=7"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let (code, out, _) = khr(&["verify", "4", "3", "--suite", "cross,catalan", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let reports: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(reports[0]["pass"], true);
    assert_ne!(EXIT_FAILED, EXIT_OK);
}

#[test]
fn cache_cold_then_warm() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let cold = khr(&["--cache-dir", d, "compute", "4", "3", "--format", "json"]);
    assert_eq!(cold.0, EXIT_OK);
    let key = CacheKey::new(4, 3, "P");
    let cache = Cache::new(dir.path());
    assert!(matches!(cache.load(&key), Lookup::Hit(_)));
    let warm = khr(&["--cache-dir", d, "compute", "4", "3", "--format", "json"]);
    assert_eq!(cold.1, warm.1);
    assert!(warm.2.is_empty());
    let raw = fs::read_to_string(cache.path_for(&key)).unwrap();
    assert!(raw.contains(CONVENTIONS_VERSION));
}

#[test]
fn cache_serves_stored_value() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    // plant a different value under the key: a hit must return it unchanged
    let planted = khr_core::Invariant::unknot();
    Cache::new(dir.path()).store(&CacheKey::new(3, 2, "P"), &planted).unwrap();
    let (_, out, _) = khr(&["--cache-dir", d, "compute", "3", "2"]);
    assert_eq!(out.trim(), "(1)/(1-t)");
    let (_, out, _) = khr(&["--cache-dir", d, "--no-cache", "compute", "3", "2"]);
    assert_ne!(out.trim(), "(1)/(1-t)");
}

#[test]
fn cache_version_bump_misses() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let old = CacheKey { version: "khr-conventions-0".into(), ..CacheKey::new(3, 2, "P") };
    Cache::new(dir.path()).store(&old, &khr_core::Invariant::unknot()).unwrap();
    let (code, out, _) = khr(&["--cache-dir", d, "compute", "3", "2", "--format", "latex"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), r"\frac{a(qt)^{-1/2}\left(t + q - a\right)}{1-t}");
}

#[test]
fn cache_corrupt_file_is_replaced() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let cache = Cache::new(dir.path());
    let key = CacheKey::new(3, 2, "P");
    fs::write(cache.path_for(&key), b"\x00garbage").unwrap();
    let (code, out, err) = khr(&["--cache-dir", d, "compute", "3", "2", "--format", "latex"]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("warning"), "{err}");
    assert!(out.contains(r"\left(t + q - a\right)"));
    assert!(matches!(cache.load(&key), Lookup::Hit(_)));
}

#[test]
fn cache_clear() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    khr(&["--cache-dir", d, "compute", "3", "2"]);
    khr(&["--cache-dir", d, "compute", "3", "2", "--form", "HHH"]);
    let (code, out, _) = khr(&["--cache-dir", d, "cache", "clear"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("removed 2 entries"));
}
