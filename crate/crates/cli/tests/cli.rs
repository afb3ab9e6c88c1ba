use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pao(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pao"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = pao(args);
    assert!(
        out.status.success(),
        "pao {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn kernel_info_reports_transition_and_covariance() {
    let text = ok(&[
        "kernel-info",
        "--m",
        "1",
        "--zeta",
        "0.2",
        "--k",
        "1,1",
        "--q0",
        "1",
        "--dt",
        "1",
    ]);
    for needle in [
        "A (transition)",
        "Sigma",
        "H (Cholesky",
        "eigenvalue moduli",
        "contracting",
    ] {
        assert!(text.contains(needle), "missing {needle} in\n{text}");
    }
    let json: serde_json::Value = serde_json::from_str(&ok(&[
        "kernel-info",
        "--zeta",
        "0",
        "--k",
        "1",
        "--dt",
        "0.5",
        "--json",
    ]))
    .unwrap();
    // undamped: A is a rotation, so both eigenvalue moduli are 1
    for m in json["eigen_moduli"].as_array().unwrap() {
        assert!((m.as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
    assert!((json["A"][0][0].as_f64().unwrap() - 0.5f64.cos()).abs() < 1e-12);
}

#[test]
fn kernel_info_rejects_invalid_hyperparameters() {
    assert!(!pao(&["kernel-info", "--m", "0"]).status.success());
    assert!(!pao(&["kernel-info", "--dt", "-1"]).status.success());
}

#[test]
fn run_is_reproducible_and_accounted() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    let args = |out: &Path| {
        vec![
            "run",
            "--optimizer",
            "pao",
            "--problem",
            "Rastrigin",
            "--dim",
            "3",
            "--pop",
            "10",
            "--gens",
            "5",
            "--reps",
            "2",
            "--seed",
            "3",
            "--no-timing",
            "--out",
        ]
        .into_iter()
        .map(String::from)
        .chain([path(out).to_string()])
        .collect::<Vec<_>>()
    };
    let argv_a = args(&a);
    let argv_b = args(&b);
    let stdout = ok(&argv_a.iter().map(String::as_str).collect::<Vec<_>>());
    ok(&argv_b.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(stdout.contains("2 run(s)"));
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["evals"], 60);
        assert_eq!(v["history"].as_array().unwrap().len(), 6);
        assert_eq!(v["problem"], "rastrigin");
    }
}

#[test]
fn run_reads_a_config_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    fs::write(
        &cfg,
        r#"{"optimizer": "de", "problem": "ackley", "dim": 2, "pop": 8, "gens": 2, "reps": 3, "record_timing": false}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    fs::create_dir(&out).unwrap();
    ok(&[
        "run",
        "--config",
        path(&cfg),
        "--reps",
        "1",
        "--out",
        path(&out),
    ]);
    let text = fs::read_to_string(out.join("records.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains(r#""optimizer":"de""#));

    fs::write(&cfg, r#"{"popsize": 8}"#).unwrap();
    assert!(!pao(&["run", "--config", path(&cfg)]).status.success());
}

#[test]
fn run_accepts_pao_settings() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    ok(&[
        "run",
        "--problem",
        "schwefel",
        "--pop",
        "10",
        "--gens",
        "3",
        "--m",
        "2",
        "--zeta",
        "0.7",
        "--k",
        "1,2,0.5",
        "--q0",
        "0.5",
        "--dt",
        "0.5",
        "--attractors",
        "localbest,globalbest,stochastic_gaussian(0.1)",
        "--bounds-policy",
        "reflect",
        "--velocity-init",
        "uniform-scaled",
        "--noise-model",
        "swarm-spread",
        "--out",
        path(&out),
    ]);
    assert!(out.exists());
    // stiffness count must match the attractor count
    assert!(
        !pao(&["run", "--k", "1", "--gens", "1", "--out", path(&out)])
            .status
            .success()
    );
}

#[test]
fn bench_then_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let bench = dir.path().join("bench");
    let stdout = ok(&[
        "bench",
        "--suite",
        "2d",
        "--reps",
        "2",
        "--seed",
        "1",
        "--pop",
        "8",
        "--gens",
        "4",
        "--out",
        path(&bench),
    ]);
    assert!(stdout.contains("90 run(s)"));
    let summary = fs::read_to_string(bench.join("summary.csv")).unwrap();
    assert!(summary.starts_with("optimizer,problem,dim,runs,median,mean,stddev"));
    assert_eq!(summary.lines().count(), 1 + 5 * 9);

    let plots = dir.path().join("plots");
    let listed = ok(&["plot-data", "--in", path(&bench), "--out", path(&plots)]);
    assert_eq!(listed.lines().count(), 9);
    let csv = fs::read_to_string(plots.join("ackley_2d.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("generation,pao,pso,qpso,de,sade"));
    assert_eq!(csv.lines().count(), 1 + 5);
}

#[test]
fn unknown_names_fail_cleanly() {
    for args in [
        &["run", "--problem", "sphere"][..],
        &["run", "--optimizer", "cmaes"],
        &["bench", "--suite", "4d", "--out", "unused"],
    ] {
        let out = pao(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}
