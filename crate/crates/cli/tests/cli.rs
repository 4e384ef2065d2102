use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const U3: &str = r#"{"outcomes": [0, 1, 2], "probs": [0.3333333333333333, 0.3333333333333333, 0.3333333333333334]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expectiles"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows as numbers, skipping metadata and the header.
fn table(out: &Output) -> Vec<Vec<f64>> {
    stdout(out)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn report_u3_row() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "u3.json", U3);
    let out = run(&[
        "report",
        "--input",
        &input,
        "--format",
        "distribution",
        "--tau",
        "0.2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = table(&out);
    assert_eq!(rows.len(), 1);
    let expected = [0.2, 0.5, 4.0 / 9.0, 1.0 / 6.0, 0.0];
    for (got, want) in rows[0].iter().zip(expected) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
    assert!(stdout(&out).contains("tau,expectile,comonotone_v,e_sigma,cvar_lb\n"));
}

#[test]
fn report_json() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "u3.json", U3);
    let out = run(&[
        "report",
        "--input",
        &input,
        "--format",
        "distribution",
        "--tau",
        "0.2,0.4",
        "--output",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!((rows[0]["expectile"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(rows[1]["tau"].as_f64().unwrap(), 0.4);
}

#[test]
fn report_samples_mean_at_half() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "s.txt", "0\n1\n");
    let out = run(&[
        "report", "--input", &input, "--format", "samples", "--tau", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(table(&out)[0][1], 0.5);
}

#[test]
fn report_input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\"outcomes\": [0, 1], \"probs\": [0.5,");
    let out = run(&[
        "report",
        "--input",
        &bad,
        "--format",
        "distribution",
        "--tau",
        "0.2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let missing = dir.path().join("nope.json");
    let out = run(&[
        "report",
        "--input",
        missing.to_str().unwrap(),
        "--format",
        "distribution",
        "--tau",
        "0.2",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let unnormalized = write(
        &dir,
        "u.json",
        r#"{"outcomes": [0, 1], "probs": [0.5, 0.6]}"#,
    );
    let out = run(&[
        "report",
        "--input",
        &unnormalized,
        "--format",
        "distribution",
        "--tau",
        "0.2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_bad_tau_exits_3() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "u3.json", U3);
    for tau in ["0.7", "0", "abc"] {
        let out = run(&[
            "report",
            "--input",
            &input,
            "--format",
            "distribution",
            "--tau",
            tau,
        ]);
        assert_eq!(out.status.code(), Some(3), "tau {tau}");
    }
    let out = run(&[
        "report", "--input", &input, "--format", "xml", "--tau", "0.2",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn audit_passes() {
    let out = run(&[
        "audit",
        "--seed",
        "42",
        "--trials",
        "200",
        "--tau",
        "0.05,0.2,0.4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert!(lines.len() >= 12);
    assert!(lines.iter().all(|l| l.ends_with(",pass")));
    for name in [
        "four_way_agreement",
        "sandwich",
        "lipschitz_beta",
        "comonotone_additivity",
    ] {
        assert!(
            lines.iter().any(|l| l.starts_with(&format!("{name},"))),
            "{name}"
        );
    }
}

#[test]
fn audit_zero_trials_is_usage_error() {
    assert_eq!(run(&["audit", "--trials", "0"]).status.code(), Some(3));
    assert_eq!(run(&["audit", "--tau", "0.9"]).status.code(), Some(3));
}

#[test]
fn audit_detects_swapped_sign() {
    let out = run(&["audit", "--seed", "42", "--trials", "20", "--swap-foc-sign"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let line = text
        .lines()
        .find(|l| l.starts_with("indicator_consistency,"))
        .unwrap();
    assert!(line.ends_with(",FAIL"));
}

#[test]
fn curve_u3() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "u3.json", U3);
    let out = run(&["curve", "--input", &input, "--grid", "0.01:0.5:50"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("tau,expectile\n"));
    let rows = table(&out);
    assert_eq!(rows.len(), 50);
    assert_eq!(rows[49][0], 0.5);
    assert!((rows[49][1] - 1.0).abs() < 1e-12);
    assert!(rows.windows(2).all(|w| w[1][1] >= w[0][1]));
}

#[test]
fn curve_point_mass_is_flat() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "pm.txt", "3\n3\n# repeated\n3\n");
    let out = run(&["curve", "--input", &input, "--grid", "0.05:0.5:7"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = table(&out);
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r[1] == 3.0));
}

#[test]
fn curve_bad_grid_exits_3() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "u3.json", U3);
    for grid in ["0:0.5:10", "0.1:0.6:3", "0.1:0.5", "0.1:0.5:0"] {
        let out = run(&["curve", "--input", &input, "--grid", grid]);
        assert_eq!(out.status.code(), Some(3), "grid {grid}");
    }
}

#[test]
fn output_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "u3.json", U3);
    let commands: [&[&str]; 3] = [
        &[
            "report",
            "--input",
            &input,
            "--format",
            "distribution",
            "--tau",
            "0.05,0.2,0.5",
        ],
        &["audit", "--seed", "7", "--trials", "30"],
        &["curve", "--input", &input, "--grid", "0.01:0.5:20"],
    ];
    for args in commands {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn help_exits_0() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&[]).status.code(), Some(3));
    assert!(Path::new(env!("CARGO_BIN_EXE_expectiles")).exists());
}
