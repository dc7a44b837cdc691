//! Black-box tests of the zetadrive binary: files written, headers, exit
//! codes, config layering, and byte-level reproducibility. Numerical depth
//! lives in the unit and acceptance suites.

use std::path::Path;
use std::process::{Command, Output};

fn zetadrive(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetadrive"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name))
        .unwrap_or_else(|e| panic!("missing {name}: {e}"))
}

/// Data rows of a CSV output: everything after the `#` header block and the
/// column header line.
fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn f(cell: &str) -> f64 {
    cell.parse().unwrap_or_else(|e| panic!("bad float {cell}: {e}"))
}

#[test]
fn oracle_locates_both_riemann_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let out = zetadrive(&[
        "oracle",
        "--target",
        "riemann",
        "--e-start",
        "0",
        "--e-end",
        "30",
        "--e-step",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let table = read(dir.path(), "oracle.csv");
    assert!(table.contains("# command = oracle\n"));
    assert_eq!(data_rows(&table).len(), 31);

    let roots = data_rows(&read(dir.path(), "oracle_roots.csv"));
    assert_eq!(roots.len(), 3, "expected three bracketed roots, got {roots:?}");
    assert_eq!((f(&roots[0][0]), f(&roots[0][1])), (14.0, 15.0));
    assert!((f(&roots[0][2]) - 14.1347251).abs() < 1e-6);
    assert_eq!((f(&roots[1][0]), f(&roots[1][1])), (21.0, 22.0));
    assert!((f(&roots[1][2]) - 21.0220396).abs() < 1e-4);
    assert_eq!((f(&roots[2][0]), f(&roots[2][1])), (25.0, 26.0));
    assert!((f(&roots[2][2]) - 25.0108576).abs() < 1e-4);
}

#[test]
fn oracle_locates_both_polya_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let out = zetadrive(&[
        "oracle",
        "--target",
        "polya",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let roots = data_rows(&read(dir.path(), "oracle_roots.csv"));
    assert_eq!(roots.len(), 4, "got {roots:?}");
    assert_eq!((f(&roots[0][0]), f(&roots[0][1])), (8.0, 9.0));
    assert!((f(&roots[0][2]) - 8.9928140).abs() < 1e-6);
    assert_eq!((f(&roots[1][0]), f(&roots[1][1])), (19.0, 20.0));
    assert!((f(&roots[1][2]) - 19.0653997).abs() < 1e-6);
    assert!((f(&roots[2][2]) - 24.4747593).abs() < 1e-4);
    assert!((f(&roots[3][2]) - 28.9749636).abs() < 1e-4);
}

#[test]
fn oracle_empty_range_writes_empty_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = zetadrive(&[
        "oracle",
        "--e-start",
        "5",
        "--e-end",
        "4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "empty range is not an error");
    assert!(data_rows(&read(dir.path(), "oracle.csv")).is_empty());
    assert!(data_rows(&read(dir.path(), "oracle_roots.csv")).is_empty());
}

#[test]
fn waveform_compression_scales_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path();
    for (omega, sub) in [("1", "w1"), ("8", "w8")] {
        let out = zetadrive(&[
            "waveform",
            "--e-start",
            "14",
            "--omega",
            omega,
            "--out",
            base.join(sub).to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let max_abs = |sub: &str| -> f64 {
        data_rows(&read(&base.join(sub), "waveform_field.csv"))
            .iter()
            .map(|r| f(&r[1]).abs())
            .fold(0.0, f64::max)
    };
    let (m1, m8) = (max_abs("w1"), max_abs("w8"));
    let ratio = m8 / m1;
    assert!(
        (7.0..=9.0).contains(&ratio),
        "compressed field should be ~8x taller on the sample grid, got {m8}/{m1} = {ratio}"
    );

    // phase starts and ends at zero in both cases
    for sub in ["w1", "w8"] {
        let rows = data_rows(&read(&base.join(sub), "waveform_phase.csv"));
        assert_eq!(rows.len(), 2001);
        assert!(f(&rows[0][1]).abs() < 1e-12);
        assert!(f(&rows[rows.len() - 1][1]).abs() < 1e-9);
    }
}

#[test]
fn scan_reports_the_bracketing_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = zetadrive(&[
        "scan",
        "--target",
        "polya",
        "--e-start",
        "8.6",
        "--e-end",
        "9.0",
        "--e-step",
        "0.1",
        "--periods",
        "30",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    // grid values print at full float precision (8.6 + 2*0.1 = 8.799...)
    assert!(
        stdout.contains("sign change between E = 8.7 and E = 8.79"),
        "stdout: {stdout}"
    );

    let records = data_rows(&read(dir.path(), "scan_records.csv"));
    assert_eq!(records.len(), 5);
    let sor = data_rows(&read(dir.path(), "sor.csv"));
    assert_eq!(sor.len(), 5);
    // same SOR column in both files
    for (a, b) in records.iter().zip(&sor) {
        assert_eq!(a[0], b[0]);
        assert_eq!(a[1], b[1]);
    }
    assert!(f(&sor[1][1]) > 0.0 && f(&sor[2][1]) < 0.0, "crossing between 8.7 and 8.8");
}

#[test]
fn refine_is_seed_stable_and_matches_exact_bracket() {
    let dir = tempfile::tempdir().unwrap();
    let exact_dir = dir.path().join("exact");
    let shot_dir = dir.path().join("shots");
    let common = [
        "refine",
        "--target",
        "polya",
        "--e-start",
        "8.5",
        "--e-end",
        "9.0",
        "--e-step",
        "0.1",
        "--periods",
        "30",
    ];
    let out = zetadrive(
        &[&common[..], &["--exact", "--out", exact_dir.to_str().unwrap()]].concat(),
    );
    assert!(out.status.success());
    let out = zetadrive(
        &[
            &common[..],
            &[
                "--shots",
                "40000",
                "--seed",
                "3",
                "--out",
                shot_dir.to_str().unwrap(),
            ],
        ]
        .concat(),
    );
    assert!(out.status.success());

    let exact: serde_json::Value =
        serde_json::from_str(&read(&exact_dir, "zero_report.json")).unwrap();
    let shots: serde_json::Value =
        serde_json::from_str(&read(&shot_dir, "zero_report.json")).unwrap();

    assert_eq!(exact["config"]["target"], "polya");
    assert_eq!(exact["config"]["shots"], serde_json::Value::Null);
    assert_eq!(shots["config"]["shots"]["seed"], 3);

    // at 40000 shots the noise floor (2.5e-3) cannot move the 0.1-wide
    // bracket: SOR at its ends is O(0.5) or larger
    assert_eq!(exact["report"]["bracket"], shots["report"]["bracket"]);
    let (lo, hi) = (
        exact["report"]["bracket"][0].as_f64().unwrap(),
        exact["report"]["bracket"][1].as_f64().unwrap(),
    );
    assert_eq!((lo, hi), (8.7, 8.8));
    let est = exact["report"]["refined_estimate"].as_f64().unwrap();
    assert!((lo..=hi).contains(&est));
    assert!(exact["report"]["oracle_zero"].as_f64().unwrap() - 8.9928 < 1e-3);

    let txt = read(&exact_dir, "zero_report.txt");
    assert!(txt.contains("method = sor-sign-change"));
    assert!(txt.contains("refined_estimate = "));
}

#[test]
fn shot_runs_are_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for sub in [&a, &b] {
        let out = zetadrive(&[
            "scan",
            "--target",
            "polya",
            "--e-start",
            "8.8",
            "--e-end",
            "9.0",
            "--e-step",
            "0.1",
            "--periods",
            "10",
            "--shots",
            "40000",
            "--seed",
            "11",
            "--out",
            sub.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    for name in ["scan_records.csv", "sor.csv"] {
        assert_eq!(read(&a, name), read(&b, name), "{name} differs between reruns");
    }
}

#[test]
fn confirm_reports_frozen_populations_at_the_crossing() {
    let dir = tempfile::tempdir().unwrap();
    let out = zetadrive(&[
        "confirm",
        "--target",
        "riemann",
        "--e-start",
        "13.0445181",
        "--omega",
        "8",
        "--periods",
        "12",
        "--j-lab-hz",
        "4000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = read(dir.path(), "confirm.csv");
    assert!(csv.contains("# confirmed = true"), "csv: {csv}");
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 13, "m = 0..=12");
    // lab_time_ms = m / 4 kHz in ms
    assert_eq!(f(&rows[0][7]), 0.0);
    assert!((f(&rows[4][7]) - 1.0).abs() < 1e-12);

    // confirm requires an explicit E
    let out = zetadrive(&["confirm"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--e-start"), "stderr: {err}");
}

#[test]
fn omega_sweep_needs_two_omegas_and_records_each() {
    let out = zetadrive(&["omega-sweep", "--omegas", "8"]);
    assert_eq!(out.status.code(), Some(1), "single omega must be rejected");

    let dir = tempfile::tempdir().unwrap();
    let out = zetadrive(&[
        "omega-sweep",
        "--omegas",
        "6,8",
        "--e-start",
        "8.5",
        "--e-end",
        "9.0",
        "--e-step",
        "0.1",
        "--periods",
        "30",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = read(dir.path(), "omega_sweep.csv");
    assert!(csv.contains("# omegas = 6,8\n"));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 2);
    assert_eq!(f(&rows[0][0]), 6.0);
    assert_eq!(f(&rows[1][0]), 8.0);

    let json: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "omega_sweep.json")).unwrap();
    assert_eq!(json["reports"].as_array().unwrap().len(), 2);
    for report in json["reports"].as_array().unwrap() {
        assert_eq!(report["target"], "polya");
        assert!(report["oracle_zero"].as_f64().is_some());
    }
}

#[test]
fn config_file_layers_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(
        &cfg_path,
        "# sweep base\ntarget = polya\ne_start = 8.6\ne_end = 9.0\ne_step = 0.2\nomega = 8\nperiods = 5\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = zetadrive(&[
        "scan",
        "--config",
        cfg_path.to_str().unwrap(),
        "--omega",
        "12",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&out_dir, "scan_records.csv");
    assert!(csv.contains("# target = polya\n"), "config key applies");
    assert!(csv.contains("# omega = 12\n"), "flag overrides config");
    assert!(csv.contains("# e_step = 0.2\n"));
    assert_eq!(data_rows(&csv).len(), 3);

    // unknown keys are invalid config, not silently ignored
    std::fs::write(&cfg_path, "stepsize = 0.1\n").unwrap();
    let out = zetadrive(&["scan", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes_distinguish_failure_classes() {
    // invalid input
    let out = zetadrive(&["scan", "--target", "gauss"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown target"));

    let out = zetadrive(&["scan", "--e-step", "-1"]);
    assert_eq!(out.status.code(), Some(1));

    // i/o failure: output dir blocked by an existing file
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("blocked");
    std::fs::write(&blocker, "file in the way").unwrap();
    let out = zetadrive(&[
        "oracle",
        "--e-start",
        "2",
        "--e-end",
        "2",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));

    // help and version are success
    assert_eq!(zetadrive(&["--help"]).status.code(), Some(0));
    assert_eq!(zetadrive(&["--version"]).status.code(), Some(0));
    // unknown subcommand is invalid usage
    assert_eq!(zetadrive(&["frobnicate"]).status.code(), Some(1));
}
