//! Harness determinism and CLI surface tests.

use std::process::Command;

use fracwave::harness::{run_convergence, ExampleId, ExperimentConfig};
use fracwave::Scheme;

fn small_config(scheme: Scheme) -> ExperimentConfig {
    ExperimentConfig {
        example: ExampleId::Ex51,
        scheme,
        alphas: vec![1.5],
        n_list: vec![16, 32],
        m_list: vec![32],
        grading: 1.0,
        soe_eps: 1e-12,
        out: None,
    }
}

/// CSV minus the wall-clock column, which is the only nondeterministic field.
fn strip_seconds(csv: &str) -> String {
    csv.lines()
        .map(|line| {
            let mut cols: Vec<&str> = line.split(',').collect();
            cols.pop();
            cols.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn identical_configs_produce_identical_tables() {
    let config = small_config(Scheme::H3n3Fast);
    let a = run_convergence(&config).unwrap();
    let b = run_convergence(&config).unwrap();
    assert_eq!(strip_seconds(&a.to_csv()), strip_seconds(&b.to_csv()));
}

#[test]
fn fast_and_direct_rows_agree_to_kernel_tolerance() {
    let direct = run_convergence(&small_config(Scheme::H3n3Direct)).unwrap();
    let fast = run_convergence(&small_config(Scheme::H3n3Fast)).unwrap();
    for (d, f) in direct.rows.iter().zip(&fast.rows) {
        assert!(
            (d.error - f.error).abs() <= 1e-9,
            "N={}: direct {:.6e} vs fast {:.6e}",
            d.n,
            d.error,
            f.error
        );
    }
}

// ---------------------------------------------------------------------------
// binary-level tests
// ---------------------------------------------------------------------------

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracwave"))
}

#[test]
fn convergence_subcommand_writes_expected_rows() {
    let dir = std::env::temp_dir().join("fracwave-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("table.csv");
    let status = bin()
        .args([
            "convergence",
            "--example",
            "ex51",
            "--scheme",
            "h3n3-fast",
            "--alpha",
            "1.5",
            "--M",
            "32",
            "--N",
            "8,16,32,64",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "alpha,N,M,scheme,E,order,seconds");
    assert_eq!(lines.len(), 5, "header plus one row per N");
}

#[test]
fn config_file_feeds_defaults_and_flags_override() {
    let dir = std::env::temp_dir().join("fracwave-cli-config");
    std::fs::create_dir_all(&dir).unwrap();
    let conf = dir.join("run.conf");
    std::fs::write(&conf, "example = ex51\nscheme = h3n3-direct\nalpha = 1.5\nN = 8,16\nM = 16\n")
        .unwrap();
    let out = dir.join("from-config.csv");
    let status = bin()
        .args(["convergence", "--config"])
        .arg(&conf)
        .args(["--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.contains("h3n3-direct"));
    // Override the scheme from the command line.
    let status = bin()
        .args(["convergence", "--config"])
        .arg(&conf)
        .args(["--scheme", "l2c", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.contains("l2c") && !csv.contains("h3n3-direct"));
}

#[test]
fn soe_check_reports_node_count() {
    let output = bin()
        .args([
            "soe", "check", "--gamma", "0.5", "--eps", "1e-10", "--delta", "1e-3", "--T", "1",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("N_exp"), "stdout: {stdout}");
    assert!(stdout.contains("max grid error"));
}

#[test]
fn coeffs_check_passes_on_a_small_sweep() {
    let status = bin()
        .args(["coeffs", "check", "--kmax", "64", "--tau", "0.05"])
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn operator_scan_prints_orders() {
    let output = bin()
        .args(["operator", "scan", "--mu", "5", "--alpha", "1.5", "--N", "32,64"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("max error"));
}

#[test]
fn validation_errors_exit_one() {
    let status = bin()
        .args(["convergence", "--scheme", "no-such-scheme"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let status = bin()
        .args(["convergence", "--alpha", "2.5", "--N", "8,16", "--M", "16"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    // Sweeping both axes at once is rejected.
    let status = bin()
        .args(["convergence", "--alpha", "1.5", "--N", "8,16", "--M", "16,32"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn solve_subcommand_summarises() {
    let output = bin()
        .args([
            "solve", "--example", "ex51", "--scheme", "h3n3-direct", "--alpha", "1.5", "--N",
            "16", "--M", "32",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("max error vs exact"));
}
