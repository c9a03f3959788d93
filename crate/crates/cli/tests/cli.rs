use std::process::{Command, Output};

use serde_json::Value;

fn tmellin(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tmellin"));
    for key in ["TMELLIN_TOL", "TMELLIN_MAX_NODES", "TMELLIN_SEED", "TMELLIN_CONFIG", "TMELLIN_FORMAT"] {
        cmd.env_remove(key);
    }
    cmd.args(args).envs(env.iter().copied()).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn eval_json_schema() {
    let out = tmellin(&["eval", "--fn", "poly(0,0,1)", "--s", "1", "--format", "json"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["value"].as_f64(), Some(6.0));
    assert!(v["error_estimate"].is_number());
    assert_eq!(v["method"], "closed_form");
    assert!(v["nodes_used"].is_u64());
    assert_eq!(v["closed_form_available"], true);
}

#[test]
fn eval_examples() {
    let v = json(&tmellin(&["eval", "--fn", "todd", "--s", "0", "--format", "json"], &[]));
    assert!((v["value"].as_f64().unwrap() - 1.6449340668).abs() < 1e-10);
    let v = json(&tmellin(&["eval", "--fn", "const(1)", "--s", "7.3", "--format", "json"], &[]));
    assert_eq!(v["value"].as_f64(), Some(1.0));
    let v = json(&tmellin(&["eval", "--fn", "rational_decay", "--s", "2", "--format", "json"], &[]));
    assert_eq!(v["method"], "quadrature");
    assert_eq!(v["closed_form_available"], false);
}

#[test]
fn eval_exit_codes() {
    let out = tmellin(&["eval", "--fn", "geom", "--s", "0"], &[]);
    assert_eq!(out.status.code(), Some(3));
    let out = tmellin(&["eval", "--fn", "power(2.5", "--s", "1"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("name(params)"));
    let out = tmellin(&["eval", "--fn", "sin(1)", "--s", "-2"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table_examples() {
    let out = tmellin(&["table", "--fn", "exp_decay(1)", "--s-start", "0", "--s-end", "2", "--step", "1"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,value,error_estimate,method"));
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values, vec![0.5, 0.25, 0.125]);

    let text = stdout(&tmellin(&["table", "--fn", "sin(1)", "--s-start", "1", "--s-end", "3", "--step", "2"], &[]));
    let values: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 2);
    assert!((values[0] - 0.5).abs() < 1e-15);
    assert!(values[1].abs() < 1e-15);

    let text = stdout(&tmellin(&["table", "--fn", "todd", "--s-start", "2", "--s-end", "2", "--step", "1"], &[]));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn table_failing_rows_carry_nan() {
    let out = tmellin(&["table", "--fn", "geom", "--s-start", "0", "--s-end", "1", "--step", "0.5"], &[]);
    assert_ne!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().nth(1).unwrap().contains(",nan,nan,"));
    assert_eq!(text.lines().count(), 4);
    let bad = tmellin(&["table", "--fn", "todd", "--s-start", "3", "--s-end", "1", "--step", "1"], &[]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn poly_examples() {
    assert_eq!(stdout(&tmellin(&["poly", "f", "5"], &[])), "120 154 35\n");
    assert_eq!(stdout(&tmellin(&["poly", "stirling", "4"], &[])), "6 11 6 1\n");
    assert_eq!(stdout(&tmellin(&["poly", "f", "0"], &[])), "1\n");
    assert_eq!(stdout(&tmellin(&["poly", "coeffs", "4"], &[])), "1 13/12 1/8\n");
    assert_eq!(tmellin(&["poly", "f", "201"], &[]).status.code(), Some(2));
    assert_eq!(tmellin(&["poly", "stirling", "0"], &[]).status.code(), Some(2));
    let v = json(&tmellin(&["poly", "f", "40", "--format", "json"], &[]));
    assert_eq!(v["coefficients"][0], "815915283247897734345611269596115894272000000000");
}

#[test]
fn verify_polyseq_prints_exact_zeros() {
    let out = tmellin(&["verify", "polyseq"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let checks: Vec<&str> = text.lines().filter(|l| l.ends_with("PASS") || l.ends_with("FAIL")).collect();
    assert!(checks.len() >= 8);
    for line in checks {
        let fields: Vec<&str> = line.rsplitn(4, ", ").collect();
        assert_eq!(&fields[..3], &["PASS", "0", "0"], "{line}");
    }
}

#[test]
fn verify_identities_with_tol() {
    let out = tmellin(&["verify", "identities", "--tol", "1e-8"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    for line in text.lines().filter(|l| l.starts_with("intertwining")) {
        let fields: Vec<&str> = line.rsplitn(4, ", ").collect();
        assert_eq!(fields[1], "1e-8");
        assert!(fields[2].parse::<f64>().unwrap() <= 1e-8);
    }
    // a budget nothing can meet must fail with exit 1
    let out = tmellin(&["verify", "identities", "--tol", "1e-13"], &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn expand_examples() {
    let v = json(&tmellin(
        &["expand", "--fn", "poly(0,0,1)", "--s", "3", "--order", "2", "--compare", "--format", "json"],
        &[],
    ));
    let last = &v["rows"][2];
    assert_eq!(last["partial_sum"].as_f64(), Some(20.0));
    assert_eq!(v["quadrature"].as_f64(), Some(20.0));
    assert_eq!(last["abs_error"].as_f64(), Some(0.0));

    let v = json(&tmellin(&["expand", "--fn", "const(1)", "--s", "5", "--order", "0", "--format", "json"], &[]));
    assert_eq!(v["rows"][0]["partial_sum"].as_f64(), Some(1.0));

    let v = json(&tmellin(
        &["expand", "--fn", "rational_decay", "--s", "50", "--order", "4", "--compare", "--format", "json"],
        &[],
    ));
    let err = |k: usize| v["rows"][k]["abs_error"].as_f64().unwrap();
    assert!(err(4) < err(0), "{} vs {}", err(4), err(0));

    let v = json(&tmellin(
        &["expand", "--fn", "monomial(3)", "--s", "2", "--order", "2", "--N", "10", "--compare", "--format", "json"],
        &[],
    ));
    assert!((v["rows"][2]["partial_sum"].as_f64().unwrap() - 10.62).abs() < 1e-12);
    assert!((v["quadrature"].as_f64().unwrap() - 10.626).abs() < 1e-9);

    let out = tmellin(&["expand", "--fn", "todd", "--s", "5", "--order", "31"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invert_examples() {
    for (f, x, exact) in [("poly(0,1)", "1", 1.0), ("exp_decay(1)", "1", 0.36787944117144233), ("poly(0,0,1)", "0.5", 0.25)] {
        let v = json(&tmellin(&["invert", "--fn", f, "--x", x, "--format", "json"], &[]));
        assert!((v["value"].as_f64().unwrap() - exact).abs() <= 1e-4, "{f}");
        assert!(v["abs_error"].as_f64().unwrap() <= 1e-4);
    }
    assert_eq!(tmellin(&["invert", "--fn", "todd", "--x", "1"], &[]).status.code(), Some(2));
    let out = tmellin(&["invert", "--fn", "exp_decay(1)", "--x", "1", "--height", "5"], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncation"));
}

#[test]
fn settings_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tmellin.toml");
    std::fs::write(&path, "format = \"json\"\ntol = 1e-4\n").unwrap();
    let p = path.to_str().unwrap();

    // file alone picks the format
    let out = tmellin(&["eval", "--fn", "exp_decay(1)", "--s", "1", "--config", p], &[]);
    assert!(stdout(&out).trim_start().starts_with('{'));
    // env beats file
    let out = tmellin(&["eval", "--fn", "exp_decay(1)", "--s", "1"], &[("TMELLIN_CONFIG", p), ("TMELLIN_FORMAT", "csv")]);
    assert!(stdout(&out).starts_with("s,value"));
    // flag beats env
    let out = tmellin(
        &["eval", "--fn", "exp_decay(1)", "--s", "1", "--format", "text"],
        &[("TMELLIN_CONFIG", p), ("TMELLIN_FORMAT", "csv")],
    );
    assert!(stdout(&out).starts_with("value:"));

    // tol out of range from any layer is a usage error
    assert_eq!(tmellin(&["eval", "--fn", "todd", "--s", "1"], &[("TMELLIN_TOL", "0.5")]).status.code(), Some(2));
    assert_eq!(tmellin(&["eval", "--fn", "todd", "--s", "1", "--tol", "1e-20"], &[]).status.code(), Some(2));
    // the flag overrides a bad env value
    assert_eq!(
        tmellin(&["eval", "--fn", "todd", "--s", "1", "--tol", "1e-8"], &[("TMELLIN_TOL", "0.5")]).status.code(),
        Some(0)
    );
    // TMELLIN_MAX_NODES reaches the quadrature
    let out = tmellin(&["eval", "--fn", "rational_decay", "--s", "1"], &[("TMELLIN_MAX_NODES", "8")]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&path, "tolerance = 1\n").unwrap();
    assert_eq!(tmellin(&["eval", "--fn", "todd", "--s", "1", "--config", p], &[]).status.code(), Some(2));
}

#[test]
fn seed_changes_only_monte_carlo_and_is_reproducible() {
    let a = tmellin(&["verify", "catalog", "--seed", "1"], &[]);
    let b = tmellin(&["verify", "catalog"], &[("TMELLIN_SEED", "1")]);
    let c = tmellin(&["verify", "catalog", "--seed", "2"], &[]);
    assert_eq!(a.stdout, b.stdout);
    let mc = |o: &Output| stdout(o).lines().filter(|l| l.starts_with("monte_carlo")).map(String::from).collect::<Vec<_>>();
    assert_ne!(mc(&a), mc(&c));
    let rest = |o: &Output| stdout(o).lines().filter(|l| !l.starts_with("monte_carlo")).map(String::from).collect::<Vec<_>>();
    assert_eq!(rest(&a), rest(&c));
}
