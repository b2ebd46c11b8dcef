use std::path::Path;
use std::process::{Command, Output};

fn cuspidal(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cuspidal"))
        .args(args)
        .env("CUSPIDAL_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn group_11_text() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuspidal(&["group", "11"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "C(11) ≅ Z/5, generator (0)−(∞)");
}

#[test]
fn group_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for n in [11u64, 60, 64, 900] {
        let o = cuspidal(&["group", &n.to_string(), "--json"], dir.path());
        assert_eq!(o.status.code(), Some(0));
        let g: cuspidal::structure::AbelianGroupStructure = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(g, cuspidal::structure::compute_group(n).unwrap());
    }
}

#[test]
fn ell_primary_part() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuspidal(&["group", "60", "--ell", "3", "--json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let orders: Vec<&str> = v["generators"].as_array().unwrap().iter().map(|g| g["order"].as_str().unwrap()).collect();
    let g = cuspidal::structure::compute_group(60).unwrap();
    let expect: Vec<String> = g.ell_primary[&3].iter().map(u128::to_string).collect();
    let mut got: Vec<String> = orders.iter().map(|s| s.to_string()).collect();
    got.sort();
    let mut expect = expect;
    expect.sort();
    assert_eq!(got, expect);
}

#[test]
fn verify_32_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuspidal(&["verify", "32"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("verify 32: pass, Z/4"), "{s}");
}

#[test]
fn order_profile_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuspidal(&["order", "11", "--divisor", "1*(1),-1*(11)", "--json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["V"], serde_json::json!([12, -12]));
    assert_eq!(v["gcd"], 12);
    assert_eq!(v["Vbar"], serde_json::json!([1, -1]));
    assert_eq!(v["pw"]["11"], -1);
    assert_eq!(v["h"], 2);
    assert_eq!(v["order"], "5");
}

#[test]
fn eta_certificate_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuspidal(&["eta", "11", "--divisor", "(1)-(11)", "--qexp", "4"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("eta(1t)^12 eta(11t)^-12"), "{s}");
    assert!(s.contains("1 - 12q + 54q^2 - 88q^3 + O(q^4)"), "{s}");
}

#[test]
fn cusps_listing() {
    let dir = tempfile::tempdir().unwrap();
    let o = cuspidal(&["cusps", "12", "--json"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let widths: Vec<u64> = v["cusps"].as_array().unwrap().iter().map(|c| c["width"].as_u64().unwrap()).collect();
    assert_eq!(widths.iter().sum::<u64>(), 24);
    assert_eq!(widths.len(), 6);
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["order", "12", "--divisor", "1*(5)"],
        &["order", "12", "--divisor", "1*(1),,"],
        &["group", "0"],
        &["group", "2000000"],
        &["group", "100", "--level-cap", "50"],
        &["frobnicate"],
        &["group"],
        &["eta", "11", "--divisor", "(1)"],
    ];
    for args in cases {
        let o = cuspidal(args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
    let o = cuspidal(&["order", "12", "--divisor", "1*(5)"], dir.path());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("position 3"), "{err}");
}

#[test]
fn help_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cuspidal(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn batch_is_deterministic_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let o = cuspidal(&["batch", "--max", "100", "--jobs", "4", "--out", a.to_str().unwrap()], &cache);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "batch: 100/100 pass");
    let o = cuspidal(&["batch", "--max", "100", "--jobs", "1", "--force", "--out", b.to_str().unwrap()], &cache);
    assert_eq!(o.status.code(), Some(0));
    let (a, b) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(a, b);
    let cached = std::fs::read_to_string(cache.join("crosscheck.jsonl")).unwrap();
    assert_eq!(cached.lines().count(), 100);
    for (i, line) in cached.lines().enumerate() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["N"].as_u64(), Some(i as u64 + 1));
    }
}

#[test]
fn batch_skips_cached_levels() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    std::fs::create_dir_all(&cache).unwrap();
    // A planted failing entry survives unless --force recomputes it.
    std::fs::write(cache.join("crosscheck.jsonl"), "{\"N\":7,\"agree\":false}\n").unwrap();
    let o = cuspidal(&["batch", "--max", "10"], &cache);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).trim(), "batch: 9/10 pass");
    let o = cuspidal(&["batch", "--max", "10", "--force"], &cache);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "batch: 10/10 pass");
}
