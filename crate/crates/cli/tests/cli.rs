use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn tilequbo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tilequbo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    fs::read_to_string(path).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn value<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key}= line in:\n{text}"))
}

#[test]
fn placements_golden() {
    let o = tilequbo(&["placements"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("placements_5x8.txt"));
}

#[test]
fn single_i_on_one_by_four() {
    let o = tilequbo(&["placements", "--board", "4x1", "--pieces", "I=1"]);
    let out = stdout(&o);
    assert_eq!(value(&out, "total"), "1");
    assert_eq!(value(&out, "combinations"), "1");
}

#[test]
fn exact_count_golden() {
    let o = tilequbo(&["exact-count"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("exact_count_5x8.txt"));
}

#[test]
fn exact_count_small_cases() {
    let out = stdout(&tilequbo(&["exact-count", "--board", "2x2", "--pieces", "O=1"]));
    assert_eq!(value(&out, "count"), "1");
    let o = tilequbo(&["exact-count", "--board", "4x2", "--pieces", "O=1,S=1"]);
    assert_eq!(value(&stdout(&o), "count"), "0");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn exact_count_limit_hit_is_exit_one() {
    let o = tilequbo(&["exact-count", "--limit", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert_eq!(value(&out, "count"), "3");
    assert_eq!(value(&out, "complete"), "false");
}

#[test]
fn solve_golden_and_byte_stable() {
    let args = ["solve", "--board", "4x2", "--pieces", "O=2", "--method", "tabu", "--seed", "0"];
    let a = tilequbo(&args);
    let b = tilequbo(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), golden("solve_two_o.txt"));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn solve_sa_on_two_o() {
    let o = tilequbo(&["solve", "--board", "4x2", "--pieces", "O=2", "--method", "sa", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "valid"), "true");
}

#[test]
fn solve_exact_then_validate_and_render() {
    let saved = scratch("exact.txt");
    let o = tilequbo(&["solve", "--method", "exact", "--save", saved.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "energy"), "0");

    let v = tilequbo(&["validate", saved.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));
    let out = stdout(&v);
    assert_eq!(value(&out, "valid"), "true");
    assert_eq!(value(&out, "energy"), "0");

    let r = stdout(&tilequbo(&["render", saved.to_str().unwrap()]));
    let lines: Vec<&str> = r.lines().collect();
    assert_eq!(lines.len(), 8);
    assert!(lines.iter().all(|l| l.len() == 5));
    for g in ['I', 'O', 'L', 'T', 'S'] {
        assert_eq!(r.chars().filter(|&c| c == g).count(), 8);
    }
}

#[test]
fn decompose_trace_lines() {
    let o = tilequbo(&["solve", "--method", "decompose", "--seed", "0", "--trace", "--max-rounds", "5"]);
    let out = stdout(&o);
    let rounds: Vec<&str> = out.lines().filter(|l| l.starts_with("trace ")).collect();
    assert!(!rounds.is_empty() && rounds.len() <= 5);
    assert!(rounds[0].contains("round=1 subset_size=50 energy_before=60"));
    assert!(value(&out, "subproblem_solves").parse::<usize>().unwrap() <= 5);
}

#[test]
fn invalid_solution_exits_one() {
    let path = scratch("overlap.txt");
    fs::write(&path, "0 1\n").unwrap();
    let o = tilequbo(&["validate", "--board", "4x2", "--pieces", "O=2", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert_eq!(value(&out, "valid"), "false");
    assert_eq!(value(&out, "overlap_cells"), "1x2,5x2");
    assert_eq!(value(&out, "gap_cells"), "3,7");
    let r = stdout(&tilequbo(&["render", "--board", "4x2", "--pieces", "O=2", path.to_str().unwrap()]));
    assert_eq!(r, "O#O.\nO#O.\n");
}

#[test]
fn experiment_summary() {
    let o = tilequbo(&[
        "experiment", "--board", "4x2", "--pieces", "O=2", "--method", "tabu", "--runs", "4", "--jobs", "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(value(&out, "runs"), "4");
    assert_eq!(value(&out, "valid_count"), "4");
    assert_eq!(value(&out, "distinct_valid_solutions"), "1");
    assert_eq!(value(&out, "energy_histogram"), "0:4");
}

#[test]
fn experiment_same_seed_and_json() {
    let o = tilequbo(&[
        "experiment", "--runs", "3", "--same-seed", "--seed", "5", "--method", "decompose", "--format", "json",
        "--per-run", "--jobs", "1",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let runs = doc["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    assert!(runs.iter().all(|r| r["placements"] == runs[0]["placements"]));
    assert!(doc["stats"]["distinct_valid_solutions"].as_u64().unwrap() <= 1);
}

#[test]
fn build_and_convert_round_trip() {
    let qubo = scratch("std5x8.qubo");
    let json = scratch("std5x8.json");
    let ising = scratch("std5x8.ising.json");
    let back = scratch("std5x8.back.qubo");
    assert!(tilequbo(&["build-qubo", "-o", qubo.to_str().unwrap()]).status.success());
    assert!(tilequbo(&["build-qubo", "--format", "json", "-o", json.to_str().unwrap()]).status.success());
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["n"], 429);
    assert_eq!(doc["metadata"]["weights"]["a"], 1.0);

    assert!(tilequbo(&["convert", qubo.to_str().unwrap(), "--format", "ising", "-o", ising.to_str().unwrap()])
        .status
        .success());
    assert!(tilequbo(&["convert", ising.to_str().unwrap(), "--format", "qubo", "-o", back.to_str().unwrap()])
        .status
        .success());
    // Penalty coefficients are small integers, so the round trip is exact.
    assert_eq!(fs::read_to_string(&qubo).unwrap(), fs::read_to_string(&back).unwrap());
}

#[test]
fn convert_empty_model() {
    let path = scratch("empty.qubo");
    fs::write(&path, "p qubo 0 0 0 0\n").unwrap();
    let o = tilequbo(&["convert", path.to_str().unwrap(), "--format", "qubo"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "c offset 0\np qubo 0 0 0 0\n");
}

#[test]
fn parse_errors_exit_three_with_line() {
    let path = scratch("dup.qubo");
    fs::write(&path, "p qubo 0 2 2 0\n0 0 1\n0 0 2\n").unwrap();
    let o = tilequbo(&["convert", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let sol = scratch("bad-solution.txt");
    fs::write(&sol, "0\n999\n").unwrap();
    let o = tilequbo(&["validate", sol.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    let cfg = scratch("bad.toml");
    fs::write(&cfg, "[board]\nwidth = \n").unwrap();
    assert_eq!(tilequbo(&["placements", "--config", cfg.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(tilequbo(&["solve", "--weights", "1"]).status.code(), Some(2));
    assert_eq!(tilequbo(&["solve", "--weights", "0,1"]).status.code(), Some(2));
    assert_eq!(tilequbo(&["solve", "--method", "qpu"]).status.code(), Some(2));
    assert_eq!(tilequbo(&["placements", "--board", "5by8"]).status.code(), Some(2));
    assert_eq!(tilequbo(&["solve", "--subsolver", "brute"]).status.code(), Some(2));
    assert_eq!(tilequbo(&["experiment", "--runs", "0"]).status.code(), Some(2));
    assert_eq!(tilequbo(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(tilequbo(&["validate", "/nonexistent/solution"]).status.code(), Some(2));
}

#[test]
fn area_mismatch_warns() {
    let o = tilequbo(&["placements", "--board", "5x4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: pieces cover 40 cells but the board has 20"));
}

#[test]
fn toml_config_with_custom_shape() {
    let cfg = scratch("pent.toml");
    fs::write(
        &cfg,
        "[board]\nwidth = 5\nheight = 1\n\n[[pieces]]\nshape = \"P5\"\ncells = [[0,0],[0,1],[0,2],[0,3],[0,4]]\ncount = 1\n",
    )
    .unwrap();
    let out = stdout(&tilequbo(&["exact-count", "--config", cfg.to_str().unwrap()]));
    assert_eq!(value(&out, "count"), "1");
}
