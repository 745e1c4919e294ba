use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn szlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_szlab"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn field_check_passes_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = szlab(dir.path(), &["field-check", "--q", "32"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("criterion  1 PASS"));
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("field-check.json")).unwrap()).unwrap();
    assert_eq!(json["schema"], "szlab-report/1");
    assert_eq!(json["config"]["degrees"], serde_json::json!([5]));
    let csv = fs::read_to_string(dir.path().join("field-check.csv")).unwrap();
    assert!(csv.starts_with("criterion,metric,q,value,shape,bound\n"));
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("field-check.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["files"].as_array().unwrap().len(), 2);
}

#[test]
fn same_seed_same_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "--seed",
        "7",
        "walk",
        "--set",
        "word_samples=40",
        "--set",
        "pair_samples=3",
    ];
    assert_eq!(code(&szlab(a.path(), &args)), 0);
    assert_eq!(code(&szlab(b.path(), &args)), 0);
    for f in ["walk.json", "walk.csv", "walk.manifest.json"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let c = tempfile::tempdir().unwrap();
    let other = [
        "--seed",
        "8",
        "walk",
        "--set",
        "word_samples=40",
        "--set",
        "pair_samples=3",
    ];
    assert_eq!(code(&szlab(c.path(), &other)), 0);
    assert_ne!(
        fs::read(a.path().join("walk.json")).unwrap(),
        fs::read(c.path().join("walk.json")).unwrap()
    );
}

#[test]
fn format_toggles() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&szlab(dir.path(), &["--csv", "field-check", "--q", "8"])),
        0
    );
    assert!(dir.path().join("field-check.csv").exists());
    assert!(!dir.path().join("field-check.json").exists());
}

#[test]
fn failed_assertion_exits_one() {
    // 9 of 10 pairs must avoid short relations; about 4 in 10 do
    let dir = tempfile::tempdir().unwrap();
    let out = szlab(dir.path(), &["girth", "--set", "pairs=10"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("criterion  6 FAIL"));
}

#[test]
fn usage_and_capacity_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&szlab(dir.path(), &["no-such-command"])), 2);
    assert_eq!(code(&szlab(dir.path(), &["girth", "--set", "bogus=1"])), 2);
    assert_eq!(code(&szlab(dir.path(), &["girth", "--q", "12"])), 2);
    let out = szlab(dir.path(), &["nonconc", "--q", "32"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("capacity"));
    assert_eq!(code(&szlab(dir.path(), &["summarize"])), 2);
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "seed = 5\n[girth]\npairs = 3\nmax_len = 2\n").unwrap();
    let out = szlab(
        dir.path(),
        &["--config", cfg.to_str().unwrap(), "girth", "--print-config"],
    );
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        (
            v["seed"].as_u64(),
            v["pairs"].as_u64(),
            v["max_len"].as_u64()
        ),
        (Some(5), Some(3), Some(2))
    );

    let out = szlab(
        dir.path(),
        &[
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "9",
            "--set",
            "pairs=4",
            "girth",
            "--print-config",
        ],
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        (v["seed"].as_u64(), v["pairs"].as_u64()),
        (Some(9), Some(4))
    );
}

#[test]
fn summarize_merges_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (r8, r32) = (dir.path().join("q8"), dir.path().join("q32"));
    let small = [
        "--set",
        "word_samples=30",
        "--set",
        "pair_samples=2",
        "--set",
        "kesten_max_len=4",
    ];
    let mut a = vec!["walk", "--q", "8"];
    a.extend(small);
    assert_eq!(code(&szlab(&r8, &a)), 0);
    let mut b = vec!["walk", "--q", "32"];
    b.extend(small);
    assert_eq!(code(&szlab(&r32, &b)), 0);
    let m8 = r8.join("walk.manifest.json");
    let m32 = r32.join("walk.manifest.json");
    let out = szlab(
        dir.path(),
        &["summarize", m8.to_str().unwrap(), m32.to_str().unwrap()],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(csv.starts_with("q,criterion,experiment,run_id,status,metric,value,shape,bound\n"));
    assert!(csv
        .lines()
        .any(|l| l.starts_with("32,10,walk,") && l.contains(",sigma2,")));

    // a tampered report is caught by the manifest hash
    fs::write(r8.join("walk.json"), "{}").unwrap();
    let out = szlab(dir.path(), &["summarize", m8.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}
