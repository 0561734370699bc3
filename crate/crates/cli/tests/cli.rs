use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isingpath"))
}

fn solvay() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/solvay.json")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_bundled_fixture() {
    let out = run(&["check", path_str(&solvay())]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["feasible"], true);
    assert_eq!(v["cost"]["total"], "11");
    assert!(v["residuals"].as_object().unwrap().values().all(|r| r == 0));
}

#[test]
fn translate_then_solve_one_read() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("qubo.json");
    let out = run(&["translate", "--encoding", "order", path_str(&solvay()), "--output", path_str(&q)]);
    assert!(out.status.success());
    let v = json(&run(&["solve", path_str(&q), "--reads", "1"]));
    let reads = v["reads"].as_array().unwrap();
    assert_eq!(reads.len(), 1);
    assert!(reads[0]["pathway"].as_object().unwrap().contains_key("r1"));
}

#[test]
fn solve_with_network_repairs_reads() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("qubo.json");
    assert!(run(&["translate", path_str(&solvay()), "--output", path_str(&q)]).status.success());
    let net = path_str(&solvay()).to_string();
    let v = json(&run(&["solve", path_str(&q), "--network", &net, "--reads", "10", "--sweeps", "2000"]));
    assert_eq!(v["report"]["postprocess"], true);
    assert_eq!(v["report"]["num_reads"], 10);
    let raw = json(&run(&["solve", path_str(&q), "--network", &net, "--reads", "4", "--no-postprocess"]));
    assert_eq!(raw["report"]["postprocess"], false);
    assert!(raw["report"]["mean_scores"].get("ioflow").is_none());
}

#[test]
fn oracle_over_limit_exits_one_with_size() {
    let out = run(&["oracle", path_str(&solvay()), "--limit", "1000"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1679616"));
}

#[test]
fn oracle_finds_the_fixture_optimum() {
    let v = json(&run(&["oracle", path_str(&solvay())]));
    assert_eq!(v["min_cost"], "11");
    assert_eq!(v["optimal_pathways"].as_array().unwrap().len(), 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["solve", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["translate", "--encoding", "quaternary", "x.json"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_file_is_a_domain_error() {
    assert_eq!(run(&["check", "/nonexistent/net.json"]).status.code(), Some(1));
}

#[test]
fn reports_are_deterministic_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("qubo.json");
    assert!(run(&["translate", "--encoding", "log", path_str(&solvay()), "--output", path_str(&q)]).status.success());
    let net = path_str(&solvay()).to_string();
    let args = ["--seed", "9", "--no-timing", "solve", path_str(&q), "--network", &net, "--reads", "8"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8_lossy(&a.stdout).contains("read_seconds"));

    let tune = ["--seed", "3", "tune", &net, "--budget", "6", "--samples-per-trial", "5", "--sweeps", "100"];
    assert_eq!(run(&tune).stdout, run(&tune).stdout);
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("qubo.json");
    assert!(run(&["translate", path_str(&solvay()), "--output", path_str(&q)]).status.success());
    let base = ["--no-timing", "solve", path_str(&q), "--reads", "6", "--sweeps", "100"];
    let one = run(&[&["--threads", "1"][..], &base[..]].concat());
    let two = run(&[&["--threads", "2"][..], &base[..]].concat());
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn config_file_sets_flags_and_command_line_wins() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("qubo.json");
    assert!(run(&["translate", path_str(&solvay()), "--output", path_str(&q)]).status.success());
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 5\n[solve]\nreads = 3\nsweeps = 10\n").unwrap();
    let v = json(&run(&["--config", path_str(&cfg), "solve", path_str(&q), "--reads", "2"]));
    assert_eq!(v["config"]["reads"], 2);
    assert_eq!(v["config"]["sweeps"], 10);
    assert_eq!(v["samples"]["seed"], 5);

    std::fs::write(&cfg, "[solve]\nwarp = 9\n").unwrap();
    assert_eq!(run(&["--config", path_str(&cfg), "solve", path_str(&q)]).status.code(), Some(2));
}

#[test]
fn tune_writes_history_and_reusable_penalties() {
    let dir = tempfile::tempdir().unwrap();
    let (hist, best) = (dir.path().join("h.csv"), dir.path().join("best.json"));
    let net = path_str(&solvay()).to_string();
    let out = run(&[
        "tune", &net, "--grouping", "category", "--budget", "8", "--samples-per-trial", "5", "--sweeps", "100",
        "--sampler", "random", "--history", path_str(&hist), "--output", path_str(&best),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&hist).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.starts_with("trial,mean_score,samples,feasible,lambda_"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&best).unwrap()).unwrap();
    assert_eq!(v["grouping"], "category");
    assert_eq!(v["labels"].as_array().unwrap().len(), v["lambda"].as_array().unwrap().len());

    assert!(run(&["translate", &net, "--lambda", path_str(&best)]).status.success());
    assert_eq!(run(&["translate", &net, "--encoding", "order", "--lambda", path_str(&best)]).status.code(), Some(1));
}

#[test]
fn adjust_repairs_dummy_damage() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    std::fs::write(
        &p,
        r#"{"multiplicities": {"r1": 2, "r2": 1, "r3": 1, "r4": 1, "r5": 1, "in_NaCl": 5, "out_Na2CO3": 1}}"#,
    )
    .unwrap();
    let v = json(&run(&["adjust", path_str(&solvay()), "--pathway", path_str(&p)]));
    assert_eq!(v["feasible"], true);
    assert_eq!(v["pathway"]["in_NaCl"], 2);
    assert_eq!(v["pathway"]["in_CaCO3"], 1);
    assert_eq!(v["pathway"]["out_CaCl2"], 1);
}

#[test]
fn generate_then_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    assert!(run(&["--seed", "4", "generate", "--profile", "tiny", "--output", path_str(&g)]).status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(v["provenance"]["seed"], 4);
    assert_eq!(v["provenance"]["profile"]["name"], "tiny");
    let o = json(&run(&["oracle", path_str(&g)]));
    assert!(o["min_cost"].is_string());
    assert_eq!(run(&["generate", "--profile", "huge"]).status.code(), Some(1));
}

#[test]
fn bench_emits_one_row_per_problem() {
    let out = run(&["--no-timing", "bench", "--profile", "tiny", "--count", "2", "--runs", "3", "--tau", "50,200"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    assert_eq!(&header[0], "problem");
    assert!(header.iter().any(|h| h == "m_max_over_c_min"));
    assert!(!header.iter().any(|h| h.starts_with("tts_seconds")));
    let records: Vec<_> = rows.records().map(|r| r.unwrap()).collect();
    assert!(!records.is_empty() && records.len() <= 2);
    let again = run(&["--no-timing", "bench", "--profile", "tiny", "--count", "2", "--runs", "3", "--tau", "50,200"]);
    assert_eq!(out.stdout, again.stdout);
}
