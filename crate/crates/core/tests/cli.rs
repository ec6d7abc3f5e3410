//! End-to-end checks of the command-line interface: exit codes, report
//! determinism, and the theory-spec round trip.

use std::path::PathBuf;
use std::process::Command;

fn gptkit_bin() -> PathBuf {
    let mut path = PathBuf::from(env!("CARGO_BIN_EXE_gptkit"));
    if !path.exists() {
        path = PathBuf::from("target/debug/gptkit");
    }
    path
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(gptkit_bin())
        .args(args)
        .env_remove("GPTKIT_SEED")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn audit_exit_codes() {
    let (code, _, _) = run(&["audit", "--theory", "quantum:2", "--requirements", "1,4,5", "--seed", "7"]);
    assert_eq!(code, 0);

    let (code, stdout, _) = run(&["audit", "--theory", "boxworld-pair", "--requirements", "4"]);
    assert_eq!(code, 2);
    assert!(stdout.contains("state-pair"), "witness missing: {stdout}");

    let (code, _, _) = run(&["audit", "--theory", "classical:3", "--requirements", "3"]);
    assert_eq!(code, 0);

    let (code, _, stderr) = run(&["audit", "--theory", "nonsense:9"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("unknown instance"), "{stderr}");
}

#[test]
fn reports_are_deterministic_for_fixed_seed() {
    let strip_runtime = |s: &str| {
        // runtime-ms is the only nondeterministic field
        let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
        v["runtime-ms"] = serde_json::json!(0);
        serde_json::to_string(&v).unwrap()
    };
    let (c1, out1, _) = run(&["audit", "--theory", "quantum:2", "--seed", "11"]);
    let (c2, out2, _) = run(&["audit", "--theory", "quantum:2", "--seed", "11"]);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    assert_eq!(strip_runtime(&out1), strip_runtime(&out2));

    let (_, t1, _) = run(&["theorems", "--seed", "3", "--grid", "d2=3"]);
    let (_, t2, _) = run(&["theorems", "--seed", "3", "--grid", "d2=3"]);
    assert_eq!(strip_runtime(&t1), strip_runtime(&t2));
}

#[test]
fn seed_env_var_override() {
    let out_a = Command::new(gptkit_bin())
        .args(["audit", "--theory", "ball:3", "--requirements", "4"])
        .env("GPTKIT_SEED", "99")
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out_a.stdout);
    assert!(text.contains("\"seed\":99"), "{text}");
}

#[test]
fn grid_filtering() {
    let (_, out, _) = run(&["theorems", "--grid", "d2=3"]);
    assert!(out.contains("orbit-rank-d3-rotation"));
    assert!(!out.contains("orbit-rank-d5-generic"));
    let (_, out, _) = run(&["theorems", "--grid", "d2=5"]);
    assert!(out.contains("orbit-rank-d5-generic"));
    assert!(!out.contains("orbit-rank-d3-rotation"));
}

#[test]
fn capacity_values() {
    let (code, out, _) = run(&["capacity", "--theory", "classical:2", "--times", "classical:3"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"capacity\":6"), "{out}");

    let (_, out, _) = run(&["capacity", "--theory", "ball:5"]);
    assert!(out.contains("\"capacity\":2"), "{out}");

    let (_, out, _) = run(&["capacity", "--theory", "quantum:2", "--times", "quantum:2"]);
    assert!(out.contains("\"capacity\":4"), "{out}");
}

#[test]
fn spec_file_round_trip_preserves_verdicts() {
    // export a built-in, re-ingest it from disk, audit both ways
    let inst = gptkit::instances::classical(3).unwrap();
    let spec = gptkit::spec_file::TheorySpecFile::from_instance(&inst).unwrap();
    let dir = std::env::temp_dir().join(format!("gptkit-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("classical3.json");
    std::fs::write(&path, spec.to_json().unwrap()).unwrap();

    let (c1, out1, _) = run(&["audit", "--theory", "classical:3", "--seed", "5"]);
    let (c2, out2, _) = run(&["audit", "--theory", path.to_str().unwrap(), "--seed", "5"]);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    let verdicts = |s: &str| {
        let v: serde_json::Value = serde_json::from_str(s).unwrap();
        serde_json::to_string(&v["requirements"]).unwrap()
    };
    assert_eq!(verdicts(&out1), verdicts(&out2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn atomic_report_file() {
    let dir = std::env::temp_dir().join(format!("gptkit-out-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let (code, _, _) = run(&[
        "audit",
        "--theory",
        "ball:3",
        "--requirements",
        "1,4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"schema\":1"));
    // no stray temp files
    let leftovers: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains("tmp"))
        .collect();
    assert!(leftovers.is_empty());
    std::fs::remove_dir_all(&dir).unwrap();
}
