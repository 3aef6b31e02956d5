//! End-to-end runs of the command-line front end, in process.

use std::path::Path;

use distil::apps::werner_rate_threshold;
use distil::graph::NKGraph;
use distil::io::read_csv;
use distil::stats::dedup::{dedup_key, DedupGroup};
use distil::stats::trivial_statistics;
use tempfile::TempDir;

fn run(args: &[&str]) -> i32 {
    distil::cli::main_with(std::iter::once("distil").chain(args.iter().copied()))
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("temp paths are utf-8")
}

fn rows(p: &Path) -> Vec<Vec<String>> {
    read_csv(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn write(dir: &TempDir, name: &str, contents: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, contents).unwrap();
    path_str(&p).to_string()
}

#[test]
fn enumerate_strategies_agree_on_small_cases() {
    let dir = TempDir::new().unwrap();
    let out = path_str(dir.path());
    assert_eq!(run(&["enumerate", "-n", "2", "-k", "1", "--strategy", "both", "--out-dir", out]), 0);
    let keys = |name: &str| {
        let mut k: Vec<String> = rows(&dir.path().join(name)).into_iter().map(|r| r[3].clone()).collect();
        k.sort();
        k
    };
    let g = keys("transversal_graphs_2_1.csv");
    assert!(!g.is_empty());
    assert_eq!(g, keys("transversal_normal_forms_2_1.csv"));
}

#[test]
fn enumerate_contains_the_four_two_two_code() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["enumerate", "-n", "4", "-k", "2", "--out-dir", path_str(dir.path())]), 0);
    let keys: Vec<String> = rows(&dir.path().join("transversal_graphs_4_2.csv")).into_iter().map(|r| r[3].clone()).collect();
    for fixture in [distil::fixtures::FOUR_TWO_TWO, distil::fixtures::FOUR_TWO_TWO_ADJACENT] {
        let g = NKGraph::from_json(fixture).unwrap();
        let m = distil::apps::graph_protocol(&g).unwrap();
        let key = dedup_key(&trivial_statistics(&m, 2).unwrap(), 0, DedupGroup::Symplectic).unwrap();
        assert!(keys.contains(&key.digest()), "missing {}", key.digest());
    }
}

#[test]
fn enumerate_beyond_the_size_limit_exits_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["enumerate", "-n", "13", "-k", "1", "--out-dir", path_str(dir.path())]), 1);
}

#[test]
fn stats_of_a_bare_wire_echo_the_input() {
    let dir = TempDir::new().unwrap();
    let graph = write(&dir, "wire.json", r#"{"graph6": "A_", "inputs": [1]}"#);
    let out = dir.path().join("wire.csv");
    assert_eq!(run(&["stats", "--graph", &graph, "--f-grid", "0.5:1.0:0.1", "--out", path_str(&out)]), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# input"));
    let table = read_csv(&text).unwrap();
    assert_eq!(table.len(), 6);
    for r in &table {
        assert!((num(&r[2]) - 1.0).abs() < 1e-12);
        assert!((num(&r[3]) - num(&r[0])).abs() < 1e-12);
        let f = num(&r[0]);
        assert!((num(&r[4]) - f).abs() < 1e-12);
        assert!(r[5..].iter().all(|c| (num(c) - (1.0 - f) / 3.0).abs() < 1e-12));
    }
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"graph6": "~~~", "inputs": [0]}"#);
    let out = dir.path().join("x.csv");
    assert_eq!(run(&["stats", "--graph", &bad, "--out", path_str(&out)]), 2);
    assert_eq!(run(&["stats", "--graph", "fixture:four_two_two", "--f-grid", "1.5"]), 2);
    assert_eq!(run(&["stats", "--graph", "fixture:no_such_graph"]), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["apps", "teleport", "--graph", path_str(&missing), "--out", path_str(&out)]), 2);
    let gate = write(&dir, "gate.json", r#"{"n": 2, "keep": 1, "gates": [{"type": "TOFFOLI", "q": [0, 1]}]}"#);
    assert_eq!(run(&["simulate", "--circuit", &gate, "--f", "0.9", "--out", path_str(&out)]), 2);
    assert!(!out.exists());
}

#[test]
fn synth_budgets_and_invalid_codes() {
    let dir = TempDir::new().unwrap();
    let circuit = |budget: &str| {
        let out = dir.path().join(format!("c{budget}.json"));
        let metrics = dir.path().join(format!("m{budget}.json"));
        let code = run(&[
            "synth", "--graph", "fixture:ten_to_seven", "--budget", budget,
            "--out", path_str(&out), "--metrics", path_str(&metrics),
        ]);
        assert_eq!(code, 0);
        let c = distil::circuit::Circuit::from_json(&std::fs::read_to_string(out).unwrap()).unwrap();
        let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(metrics).unwrap()).unwrap();
        (c.two_qubit_count(), m)
    };
    let (direct, _) = circuit("0");
    let (searched, metrics) = circuit("100");
    assert!(searched <= 15, "{searched} two-qubit gates");
    assert!(searched <= direct);
    assert!(metrics.is_object());
    let out = dir.path().join("dep.json");
    assert_eq!(run(&["synth", "--graph", "fixture:dependent_inputs", "--out", path_str(&out)]), 2);
}

#[test]
fn noiseless_simulation_matches_exact_statistics() {
    let dir = TempDir::new().unwrap();
    let sim = dir.path().join("sim.csv");
    let exact = dir.path().join("exact.csv");
    let c = "fixture:five_to_one";
    assert_eq!(run(&["simulate", "--circuit", c, "--f", "0.9", "--out", path_str(&sim)]), 0);
    assert_eq!(run(&["stats", "--circuit", c, "--f-grid", "0.9", "--syndromes", "all", "--out", path_str(&exact)]), 0);
    let (a, b) = (rows(&sim), rows(&exact));
    let lookup = |t: &[Vec<String>], s: &str| t.iter().find(|r| r[1] == s).cloned();
    for r in &b {
        match lookup(&a, &r[1]) {
            Some(s) => {
                for (x, y) in s.iter().zip(r).skip(2).filter(|(x, _)| !x.is_empty()) {
                    assert!((num(x) - num(y)).abs() < 1e-12, "syndrome {}: {x} vs {y}", r[1]);
                }
            }
            None => assert!(num(&r[2]).abs() < 1e-12),
        }
    }
}

#[test]
fn fully_depolarising_gates_leave_a_uniform_output() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sim.csv");
    assert_eq!(run(&["simulate", "--circuit", "fixture:four_to_one", "--f", "0.95", "--p-g", "1", "--out", path_str(&out)]), 0);
    for r in rows(&out).iter().filter(|r| !r[3].is_empty()) {
        for c in &r[3..] {
            assert!((num(c) - 0.25).abs() < 1e-12, "{r:?}");
        }
    }
}

#[test]
fn ga_is_seed_deterministic() {
    let dir = TempDir::new().unwrap();
    let config = write(&dir, "ga.json", r#"{"population": 40, "children_per_pair": 10, "max_generations": 15}"#);
    let run_ga = |seed: &str, sub: &str| {
        let out = dir.path().join(sub);
        let code = run(&[
            "ga", "-n", "3", "-k", "1", "--f", "0.85", "--p-g", "0.01", "--p-m", "0.01",
            "--config", &config, "--seed", seed, "--out-dir", path_str(&out),
        ]);
        assert_eq!(code, 0);
        std::fs::read_to_string(out.join("manifest.json")).unwrap()
    };
    assert_eq!(run_ga("7", "a"), run_ga("7", "b"));
    assert!(dir.path().join("a/circuit.json").exists());
    let bad = write(&dir, "bad.json", r#"{"population": "many"}"#);
    let out = dir.path().join("c");
    assert_eq!(run(&["ga", "-n", "2", "-k", "1", "--f", "0.9", "--config", &bad, "--out-dir", path_str(&out)]), 2);
}

#[test]
fn qkd_reports_the_werner_threshold() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("qkd.csv");
    assert_eq!(run(&["apps", "qkd", "--f-grid", "0.85,0.95", "--max-n", "2", "--out", path_str(&out)]), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let header = text.lines().next().unwrap();
    let cfg: serde_json::Value = serde_json::from_str(header.strip_prefix("# config: ").unwrap()).unwrap();
    assert!((cfg["werner_threshold"].as_f64().unwrap() - werner_rate_threshold()).abs() < 1e-15);
    let table = read_csv(&text).unwrap();
    assert_eq!(table.len(), 4);
    assert!(table.iter().all(|r| num(&r[2]) >= num(&r[3]) - 1e-15));
}

#[test]
fn teleport_curves_cover_every_strategy() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("tp.csv");
    assert_eq!(run(&["apps", "teleport", "--f-grid", "0.9", "--out", path_str(&out)]), 0);
    let table = rows(&out);
    let names: Vec<&str> = table.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(names, ["undistilled", "ten_to_seven", "dejmps"]);
    assert!(table.iter().all(|r| (0.0..1.0).contains(&num(&r[2])) && num(&r[3]) >= 7.0));
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let dir = TempDir::new().unwrap();
    let cases: [&[&str]; 3] = [
        &["stats", "--graph", "fixture:five_qubit_wheel", "--syndromes", "all", "--f-grid", "0.7:1.0:0.1"],
        &["apps", "qkd", "--f-grid", "0.9,0.95", "--max-n", "3"],
        &["enumerate", "-n", "3", "-k", "2", "--strategy", "normal-forms"],
    ];
    for (i, case) in cases.iter().enumerate() {
        let target = dir.path().join(format!("case{i}"));
        let outputs: Vec<String> = ["1", "4"]
            .iter()
            .map(|w| {
                let mut args: Vec<&str> = vec!["--workers", w];
                args.extend_from_slice(case);
                let file = if case[0] == "enumerate" {
                    args.extend(["--out-dir", path_str(&target)]);
                    target.join("transversal_normal_forms_3_2.csv")
                } else {
                    args.extend(["--out", path_str(&target)]);
                    target.clone()
                };
                assert_eq!(run(&args), 0, "{args:?}");
                std::fs::read_to_string(file).unwrap()
            })
            .collect();
        assert_eq!(outputs[0], outputs[1], "{case:?}");
    }
}
