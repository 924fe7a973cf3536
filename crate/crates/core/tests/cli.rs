use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn netmend(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netmend"))
        .args(args)
        .env_remove("NETMEND_OUT")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn metrics_of(text: &str) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    fs::write(&path, text).unwrap();
    let out = netmend(&["metrics", path.to_str().unwrap()]);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code(&out), v)
}

#[test]
fn metrics_of_small_graphs() {
    let (c, v) = metrics_of("a b\nb c\n");
    assert_eq!(c, 0);
    assert_eq!(v["L_E"].as_f64().unwrap(), 1.555556);
    assert_eq!(v["L_E_spectral"].as_f64().unwrap(), 1.555556);
    assert_eq!(v["n"], 3);
    assert_eq!(v["m"], 2);
    assert_eq!(v["S"].as_f64().unwrap(), 1.0);

    let (c, v) = metrics_of("0 1\n1 2\n2 3\n3 4\n4 0\n");
    assert_eq!(c, 0);
    assert_eq!(v["L_E"].as_f64().unwrap(), 2.0);
    assert_eq!(v["rho"].as_f64().unwrap(), 0.5);
}

#[test]
fn metrics_rejects_bad_files() {
    assert_eq!(metrics_of("").0, 2);
    assert_eq!(metrics_of("# only a comment\n").0, 2);
    assert_eq!(metrics_of("a b c\n").0, 2);
    assert_eq!(code(&netmend(&["metrics", "/nonexistent/graph.txt"])), 2);
}

fn run_args<'a>(out: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![
        "run", "--gen", "er", "--n", "60", "--p", "0.1", "--q", "4", "--out", out,
    ];
    v.extend_from_slice(extra);
    v
}

#[test]
fn missing_seed_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = netmend(&run_args(dir.path().to_str().unwrap(), &[]));
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn run_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = netmend(&run_args(
        d.to_str().unwrap(),
        &["--seed", "7", "--mechanism", "both"],
    ));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for name in [
        "graph_original.txt",
        "graph_fragmented.txt",
        "graph_restored_strategic.txt",
        "graph_restored_budget.txt",
        "attack_trace.csv",
        "plan_strategic.csv",
        "plan_budget.csv",
        "budget_schedule.csv",
        "metrics.csv",
        "metrics.json",
        "summary.json",
    ] {
        assert!(d.join(name).is_file(), "missing {name}");
    }
    let csv = fs::read_to_string(d.join("metrics.csv")).unwrap();
    for mech in ["strategic", "budget"] {
        let last = csv
            .lines()
            .rfind(|l| l.contains(&format!(",restore,{mech},")))
            .unwrap();
        assert_eq!(last.split(',').nth(4), Some("1"), "{last}");
    }
    let restored = netmend(&[
        "metrics",
        d.join("graph_restored_strategic.txt").to_str().unwrap(),
    ]);
    let v: Value = serde_json::from_slice(&restored.stdout).unwrap();
    assert_eq!(v["S"].as_f64(), Some(1.0));
}

#[test]
fn single_mechanism_skips_the_other() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = netmend(&run_args(
        d.to_str().unwrap(),
        &["--seed", "2", "--mechanism", "strategic"],
    ));
    assert_eq!(code(&out), 0);
    assert!(d.join("plan_strategic.csv").is_file());
    assert!(!d.join("budget_schedule.csv").exists());
}

#[test]
fn attack_cap_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = netmend(&run_args(
        d.to_str().unwrap(),
        &["--seed", "1", "--max-removals", "1"],
    ));
    assert_eq!(code(&out), 3);
    let trace = fs::read_to_string(d.join("attack_trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 2);
}

#[test]
fn bad_values_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for extra in [
        &["--seed", "1", "--budget", "0"][..],
        &["--seed", "1", "--threshold", "n+1"],
        &["--seed", "1", "--attack", "sideways"],
        &["--seed", "1", "--q", "1000"],
        &["--seed", "1", "--dataset", "/nonexistent/edges.txt"],
    ] {
        assert_eq!(code(&netmend(&run_args(d, extra))), 2, "{extra:?}");
    }
}

#[test]
fn environment_overrides_output_dir() {
    let flag_dir = tempfile::tempdir().unwrap();
    let env_dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_netmend"))
        .args(run_args(
            flag_dir.path().to_str().unwrap(),
            &["--seed", "3"],
        ))
        .env("NETMEND_OUT", env_dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(env_dir.path().join("metrics.csv").is_file());
    assert!(!flag_dir.path().join("metrics.csv").exists());
}

#[test]
fn config_file_and_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = d.join("run.cfg");
    fs::write(
        &cfg,
        format!(
            "# three seeds\ngen = power-law\nn = 300\ngamma = 2.1\nq = 5\nseed = 10\nrepeats = 3\nout = {}\n",
            d.join("out").display()
        ),
    )
    .unwrap();
    let out = netmend(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for s in 10..13 {
        assert!(d.join(format!("out/seed-{s}/metrics.csv")).is_file());
    }
    let a = fs::read(d.join("out/seed-10/graph_original.txt")).unwrap();
    let b = fs::read(d.join("out/seed-11/graph_original.txt")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn dataset_run_keeps_labels() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let data = d.join("edges.txt");
    let mut text = String::from("% toy network\n");
    for block in 0..3 {
        let names: Vec<String> = (0..5).map(|i| format!("n{block}_{i}")).collect();
        for i in 0..5 {
            for j in i + 1..5 {
                text.push_str(&format!("{} {}\n", names[i], names[j]));
            }
        }
    }
    text.push_str("n0_0 n1_0\nn1_1 n2_1\n");
    fs::write(&data, text).unwrap();
    let out = netmend(&[
        "run",
        "--dataset",
        data.to_str().unwrap(),
        "--q",
        "3",
        "--seed",
        "5",
        "--out",
        d.join("out").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let restored = fs::read_to_string(d.join("out/graph_restored_strategic.txt")).unwrap();
    assert!(restored.lines().any(|l| l.starts_with("n0_")));
}

fn golden_dir() -> &'static Path {
    Path::new(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/golden_er20"
    ))
}

#[test]
fn golden_twenty_node_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = netmend(&[
        "run",
        "--gen",
        "er",
        "--n",
        "20",
        "--p",
        "0.25",
        "--q",
        "4",
        "--seed",
        "11",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let files = [
        "metrics.csv",
        "plan_strategic.csv",
        "budget_schedule.csv",
        "attack_trace.csv",
    ];
    if std::env::var_os("NETMEND_BLESS").is_some() {
        fs::create_dir_all(golden_dir()).unwrap();
        for f in files {
            fs::copy(d.join(f), golden_dir().join(f)).unwrap();
        }
    }
    for f in files {
        let expected = fs::read_to_string(golden_dir().join(f)).unwrap();
        let actual = fs::read_to_string(d.join(f)).unwrap();
        assert_eq!(actual, expected, "{f} differs from the fixture");
    }
}
