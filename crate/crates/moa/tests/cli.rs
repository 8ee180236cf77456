//! End-to-end runs of the `moa` binary.

use std::path::Path;
use std::process::{Command, Output};

fn moa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn verify_passes_and_reports_counts() {
    let out = moa(&["verify", "--max-dim", "3", "--seed", "7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("checks passed, 0 failed"), "{text}");
}

#[test]
fn render_matches_goldens_on_stdout_and_file() {
    for (variant, golden) in [
        ("ip", include_str!("golden/ip.c")),
        ("ip-rows", include_str!("golden/ip_rows.c")),
        ("ip-cols", include_str!("golden/ip_cols.c")),
        ("blocked", include_str!("golden/blocked.c")),
    ] {
        let out = moa(&["render", variant]);
        assert!(out.status.success());
        assert_eq!(stdout(&out), golden, "variant {variant}");
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ip.c");
    let out = moa(&["render", "ip", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        include_str!("golden/ip.c")
    );
}

#[test]
fn render_rejects_non_divisible_parameters() {
    let out = moa(&["render", "ip-rows", "--np", "5"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("not divisible"), "{err}");
}

#[test]
fn render_emits_pragmas_on_request() {
    let out = moa(&["render", "ip-rows", "--pragmas"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("#pragma acc parallel loop"));
}

#[test]
fn plan_prints_block_arithmetic() {
    let out = moa(&["plan", "--hw", "v100-16g", "--elem", "f64"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("selected block: 32 x 32 (1024 components)"));
    assert!(text.contains("bytes per block: 32 * 32 * 8 = 8192"));
    assert!(text.contains("working set: 3 * 8192 = 24576 <= 32768"));
    assert!(text.contains("= 9459"));

    let out = moa(&["plan", "--hw", "v100-16g", "--l1-budget", "131072"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("selected block: 64 x 64"));
}

#[test]
fn plan_reports_malformed_config_key() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"name": "x", "l1_budget_bytes": 32768}"#).unwrap();
    let out = moa(&["plan", "--hw", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("l1_full_bytes"), "{err}");
}

fn read_csv(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn bench_writes_schema_stable_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv1 = dir.path().join("run1.csv");
    let csv2 = dir.path().join("run2.csv");
    for csv in [&csv1, &csv2] {
        let out = moa(&[
            "bench",
            "--sizes",
            "8,16",
            "--blocks",
            "4x4,8x8",
            "--trials",
            "3",
            "--seed",
            "9",
            "--skip-verify",
            "--parallel",
            "2",
            "--out",
            csv.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }

    let lines = read_csv(&csv1);
    assert_eq!(
        lines[0],
        "kernel,m,n,p,block_rows,block_cols,trials,wall_seconds,checksum"
    );
    // Two sizes x (naive + moa + two blocked + parallel).
    assert_eq!(lines.len(), 1 + 2 * 5);

    // Same seed, same checksums, across kernels and runs.
    let checksum = |line: &str| line.rsplit(',').next().unwrap().to_owned();
    let per_size = |lines: &[String], size: &str| -> Vec<String> {
        lines[1..]
            .iter()
            .filter(|l| l.split(',').nth(1) == Some(size))
            .map(|l| checksum(l))
            .collect()
    };
    for size in ["8", "16"] {
        let sums1 = per_size(&lines, size);
        assert!(sums1.windows(2).all(|w| w[0] == w[1]), "{sums1:?}");
        let sums2 = per_size(&read_csv(&csv2), size);
        assert_eq!(sums1, sums2);
    }
}

#[test]
fn bench_refuses_non_dividing_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = moa(&[
        "bench",
        "--sizes",
        "8",
        "--blocks",
        "3x3",
        "--trials",
        "3",
        "--skip-verify",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(!csv.exists());
}

#[test]
fn bench_gate_runs_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = moa(&[
        "bench",
        "--sizes",
        "4",
        "--blocks",
        "2x2",
        "--trials",
        "3",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("oracle gate passed"));
}
