//! End-to-end tests of the binary: exit codes, artifact shapes, determinism,
//! config precedence and sweep resume.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cknball"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

#[test]
fn validation_failures_exit_2_with_violation_list() {
    let out = run(&["constant", "--N", "3", "--a", "0", "--b", "2"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("b - a <= 1"), "stderr: {err}");

    let out = run(&["solve", "--N", "3", "--q", "7"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("q in (2, crit)"));
}

#[test]
fn solve_emits_artifacts_and_converges() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "solve",
        "--N",
        "3",
        "--q",
        "4",
        "--grid-n",
        "300",
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "csv,json,svg",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    for f in ["solve.json", "solution.csv", "mountain_pass.csv", "solution.svg"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("solve.json")).unwrap())
            .unwrap();
    assert_eq!(json["converged"], serde_json::Value::Bool(true));
    assert!(json["residual"].as_f64().unwrap() < 1e-6);
    let csv = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert!(csv.starts_with("# schema=1\nt,u\n"));
}

#[test]
fn solve_nonconvergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "solve",
        "--N",
        "3",
        "--q",
        "4",
        "--grid-n",
        "300",
        "--max-iter",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn deterministic_outputs() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let out = run(&[
            "solve",
            "--N",
            "3",
            "--q",
            "4",
            "--grid-n",
            "300",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    for f in ["solve.json", "solution.csv"] {
        let a = std::fs::read(d1.path().join(f)).unwrap();
        let b = std::fs::read(d2.path().join(f)).unwrap();
        assert_eq!(a, b, "{f} not byte-identical");
    }
}

#[test]
fn verify_passes_and_fault_injection_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "verify",
        "--checks",
        "gold,polynomial",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert!(csv.contains("check,worst,tol,pass"));
    assert!(csv.contains("quadrature-gold-volume"));

    let out = run(&[
        "verify",
        "--checks",
        "gold",
        "--inject-fault",
        "240:1.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4, "fault injection must fail verification");
}

#[test]
fn config_file_with_cli_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "N = 3\nq = 4\ngrid-n = 300\n# comment\n").unwrap();
    let out = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    // the CLI flag overrides q from the file: q = 7 is invalid
    let out = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--q",
        "7",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn pohozaev_modes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "pohozaev",
        "--N",
        "3",
        "--p",
        "4",
        "--grid-n",
        "400",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("pohozaev.json")).unwrap())
            .unwrap();
    assert_eq!(json["mode"], "identity");
    assert!(json["residual"].as_f64().unwrap() < 1e-2);
    let scan = std::fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert!(scan.contains("r,bracket2,laplacian_factor"));

    let out = run(&[
        "pohozaev",
        "--N",
        "3",
        "--p",
        "7",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("pohozaev.json")).unwrap())
            .unwrap();
    assert_eq!(json["mode"], "probe");
    assert_eq!(json["decreasing"], serde_json::Value::Bool(true));
}

#[test]
fn sweep_matches_single_run_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let sweep_dir = dir.path().join("sweep");
    let single_dir = dir.path().join("single");
    let common = ["--N", "3", "--grid-n", "600", "--max-iter", "60"];

    let mut args = vec![
        "sweep",
        "--a",
        "0:0.2:2",
        "--b",
        "0.5:1:2",
        "--out",
        sweep_dir.to_str().unwrap(),
    ];
    args.extend_from_slice(&common);
    let out = run(&args);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(sweep_dir.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 4, "one row per cell");

    // the (a,b) = (0, 1) cell agrees with the single run bit-for-bit
    let mut args = vec![
        "constant",
        "--a",
        "0",
        "--b",
        "1",
        "--out",
        single_dir.to_str().unwrap(),
    ];
    args.extend_from_slice(&common);
    let out = run(&args);
    assert_eq!(code(&out), 0);
    let single: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(single_dir.join("constant.json")).unwrap())
            .unwrap();
    let cell: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(sweep_dir.join("cells/cell_000001.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(cell["a"], serde_json::json!(0.0));
    assert_eq!(cell["b"], serde_json::json!(1.0));
    assert_eq!(cell["optimizer_estimate"], single["optimizer_estimate"]);

    // resume: drop one marker, mangle another; only those are recomputed
    std::fs::remove_file(sweep_dir.join("cells/cell_000002.json")).unwrap();
    let marker3 = sweep_dir.join("cells/cell_000003.json");
    let before3 = std::fs::read_to_string(&marker3).unwrap();
    std::fs::write(&marker3, "not json").unwrap();
    let mut args = vec![
        "sweep",
        "--a",
        "0:0.2:2",
        "--b",
        "0.5:1:2",
        "--out",
        sweep_dir.to_str().unwrap(),
    ];
    args.extend_from_slice(&common);
    let out = run(&args);
    assert_eq!(code(&out), 0);
    assert!(sweep_dir.join("cells/cell_000002.json").exists());
    let after3 = std::fs::read_to_string(&marker3).unwrap();
    assert_eq!(before3, after3, "recomputed cell must reproduce its marker");
    let csv2 = std::fs::read_to_string(sweep_dir.join("sweep.csv")).unwrap();
    assert_eq!(csv, csv2, "resumed sweep must reproduce the table");
}

#[test]
fn grid_and_profile_csv_shapes() {
    // RadialFn CSV round trip through the documented t,u format
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "solve",
        "--N",
        "3",
        "--q",
        "4",
        "--grid-n",
        "300",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let csv = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# schema=1"));
    assert_eq!(lines.next(), Some("t,u"));
    let first = lines.next().unwrap();
    let (t, u) = first.split_once(',').unwrap();
    assert!(t.parse::<f64>().is_ok() && u.parse::<f64>().is_ok());
    assert!(Path::new(dir.path()).join("solve.json").exists());
}
