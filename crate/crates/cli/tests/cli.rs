use std::process::{Command, Output};

fn vpure(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vpure")).args(args).output().expect("spawn vpure")
}

#[test]
fn analytic_prints_reference_point() {
    let out = vpure(&["analytic", "--p1", "0.001", "--p2", "0.01", "--eps", "0.1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(&format!("{key} "))).unwrap();
        line.split_whitespace().nth(1).unwrap().parse().unwrap()
    };
    assert!((value("leading_order_fidelity") - (1.0 - 0.375e-3 - 8.0 * 0.01 * 0.1 / 15.0)).abs() < 1e-12);
    assert!((value("infidelity") - 9.1e-4).abs() < 1e-4);
}

#[test]
fn analytic_out_of_range_is_config_error() {
    assert_eq!(vpure(&["analytic", "--p1", "0.9", "--p2", "0", "--eps", "0.1"]).status.code(), Some(2));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("unknown.json", r#"{"experiment": "fig2a", "colour": 1}"#),
        ("range.json", r#"{"experiment": "fig2a", "eps": [1.5]}"#),
        ("syntax.json", r#"{"experiment": "#),
    ] {
        let path = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        let out = vpure(&["run", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let missing = dir.path().join("absent.json");
    assert_eq!(vpure(&["run", "--config", missing.to_str().unwrap(), "--out", "."]).status.code(), Some(2));
}

#[test]
fn run_writes_csv_with_provenance_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("analytic.json");
    std::fs::write(&cfg, r#"{"experiment": "sm_analytic", "eps": [0.1], "p2": [0.0, 0.01]}"#).unwrap();
    let out = vpure(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|e| e == "csv"))
        .expect("csv written");
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    let first = lines.next().unwrap();
    assert!(first.starts_with("# vpure ") && first.contains("experiment=sm_analytic") && first.contains("config_sha256="));
    assert_eq!(lines.next().unwrap(), "eps,p2,infidelity_numeric,infidelity_analytic,infidelity_leading,abs_diff");
    assert_eq!(lines.count(), 2);
}

fn failed_checks(args: &[&str]) -> (Option<i32>, usize) {
    let out = vpure(args);
    let text = String::from_utf8(out.stdout).unwrap();
    (out.status.code(), text.lines().filter(|l| l.starts_with("FAIL")).count())
}

#[test]
fn perturbed_selftest_exits_3() {
    let (_, baseline) = failed_checks(&["selftest"]);
    for args in [&["selftest", "--perturb-pec-q-ii", "1e-3"][..], &["selftest", "--flip-yy-sign"]] {
        let (code, failed) = failed_checks(args);
        assert_eq!(code, Some(3));
        assert!(failed > baseline, "{args:?}: {failed} failures vs {baseline} unperturbed");
    }
}
