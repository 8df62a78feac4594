use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use reserve_match::fixtures;
use reserve_match::io::{self, GdaResultFile, MultiInstanceFile, ResultFile};
use reserve_match::model::Instance;
use reserve_match::oracle::BUDGET_ENV;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_reserve-match"));
    cmd.env_remove(BUDGET_ENV);
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn write_instance(dir: &TempDir, name: &str, inst: &Instance) -> PathBuf {
    write(dir, name, &io::instance_to_json(inst).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_single_reserve() {
    let dir = TempDir::new().unwrap();
    let inst = write_instance(&dir, "single.json", &fixtures::single_reserve());
    for backend in ["flow", "graph"] {
        let out = run(&["solve", s(&inst), "--backend", backend]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let res: ResultFile = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(res.selected, ["s4", "s2"]);
        assert_eq!(res.alpha, "1/2");
        assert_eq!(res.backend, backend);
        assert_eq!(res.signature, [1, 1]);
    }
}

#[test]
fn solve_writes_to_file() {
    let dir = TempDir::new().unwrap();
    let inst = write_instance(&dir, "four.json", &fixtures::four_groups());
    let out_path = dir.path().join("res.json");
    let out = run(&["solve", s(&inst), "--out", s(&out_path)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    let res = io::read_result(&out_path).unwrap();
    assert!(res.per_group.values().all(|&c| c == 25));
    assert_eq!(res.selected.len(), 100);
}

#[test]
fn solve_empty_instance() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "empty.json", r#"{"capacity": 3, "students": [], "priority": []}"#);
    let out = run(&["solve", s(&p)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let res: ResultFile = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(res.selected.is_empty());
    assert_eq!(res.alpha, "0/1");
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"capacity": 1, "students": [], "priority": [], "extra": 1}"#);
    let out = run(&["solve", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error:"));

    let unknown = write(
        &dir,
        "unknown.json",
        r#"{"capacity": 1, "students": [{"id": "a"}], "priority": ["b"]}"#,
    );
    assert_eq!(run(&["solve", s(&unknown)]).status.code(), Some(2));
    assert_eq!(run(&["solve", "/nonexistent/file.json"]).status.code(), Some(2));
    assert_eq!(run(&["solve", s(&bad), "--backend", "magic"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn validate_verdicts() {
    let dir = TempDir::new().unwrap();
    let inst = write_instance(&dir, "single.json", &fixtures::single_reserve());
    let ok = write(&dir, "ok.json", r#"{"none": 1, "t1": 1}"#);
    let no = write(&dir, "no.json", r#"{"none": 2, "t1": 0}"#);
    let missing = write(&dir, "missing.json", r#"{"t1": 1}"#);

    for backend in ["flow", "graph"] {
        let out = run(&["validate", s(&inst), "--targets", s(&ok), "--backend", backend, "--cross-check"]);
        assert_eq!(out.status.code(), Some(0));
        let text = stdout(&out);
        assert!(text.starts_with("VALID\n"));
        assert!(text.contains("none: 1") && text.contains("t1: 1"));
        assert!(text.contains("signature: [1, 1]"));

        let out = run(&["validate", s(&inst), "--targets", s(&no), "--backend", backend, "--cross-check"]);
        assert_eq!(out.status.code(), Some(1));
        assert_eq!(stdout(&out), "NO-INSTANCE\n");
    }
    assert_eq!(run(&["validate", s(&inst), "--targets", s(&missing)]).status.code(), Some(2));
}

#[test]
fn verify_reports_axioms() {
    let dir = TempDir::new().unwrap();
    let inst = write_instance(&dir, "single.json", &fixtures::single_reserve());
    let good = dir.path().join("good.json");
    assert_eq!(run(&["solve", s(&inst), "--out", s(&good)]).status.code(), Some(0));
    let out = run(&["verify", s(&inst), s(&good)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "PASS non-wastefulness (direct)\nPASS maximal-diversity (oracle)\nPASS balanced-representation (oracle)\nPASS justified-envy-freeness (oracle)\n"
    );

    let mut res = io::read_result(&good).unwrap();
    res.selected = vec!["s1".into(), "s2".into()];
    let envious = write(&dir, "envious.json", &io::to_json(&res).unwrap());
    let out = run(&["verify", s(&inst), s(&envious)]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("PASS maximal-diversity"));
    assert!(text.contains("FAIL balanced-representation"));
    assert!(text.contains("FAIL justified-envy-freeness"));
    assert!(text.contains("s4 has justified envy towards"));

    res.selected.clear();
    let empty = write(&dir, "empty.json", &io::to_json(&res).unwrap());
    let out = run(&["verify", s(&inst), s(&empty)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("FAIL non-wastefulness"));

    res.selected = vec!["zz".into()];
    let unknown = write(&dir, "unknown.json", &io::to_json(&res).unwrap());
    assert_eq!(run(&["verify", s(&inst), s(&unknown)]).status.code(), Some(2));
}

#[test]
fn budget_env_switches_to_structural_checks() {
    let dir = TempDir::new().unwrap();
    let inst = write_instance(&dir, "single.json", &fixtures::single_reserve());
    let res = dir.path().join("res.json");
    run(&["solve", s(&inst), "--out", s(&res)]);
    let out = bin().args(["verify", s(&inst), s(&res)]).env(BUDGET_ENV, "students=2").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("PASS justified-envy-freeness (structural)"));
    let out = bin().args(["verify", s(&inst), s(&res)]).env(BUDGET_ENV, "students=lots").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_is_deterministic_and_solvable() {
    let dir = TempDir::new().unwrap();
    let args = ["gen", "--students", "30", "--types", "2", "--ranks", "2", "--seed", "9"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let inst = io::parse_instance(&stdout(&a)).unwrap();
    assert_eq!(inst.num_students(), 30);
    assert_eq!(inst.capacity(), 15);

    let p = write(&dir, "gen.json", &stdout(&a));
    let out = run(&["solve", s(&p)]);
    let res: ResultFile = serde_json::from_str(&stdout(&out)).unwrap();
    let targets = write(&dir, "t.json", &io::to_json(&res.targets).unwrap());
    let out = run(&["validate", s(&p), "--targets", s(&targets), "--cross-check"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    let zero = run(&["gen", "--students", "0", "--types", "1", "--ranks", "2"]);
    assert_eq!(zero.status.code(), Some(0));
    assert_eq!(io::parse_instance(&stdout(&zero)).unwrap().num_students(), 0);
    assert_eq!(run(&["gen", "--students", "5", "--types", "0", "--ranks", "2"]).status.code(), Some(2));
    let uniform = run(&["gen", "--students", "5", "--types", "2", "--ranks", "1", "--quota-style", "uniform"]);
    assert_eq!(uniform.status.code(), Some(0));
}

#[test]
fn baseline_four_groups() {
    let dir = TempDir::new().unwrap();
    let inst = write_instance(&dir, "four.json", &fixtures::four_groups());
    let out = run(&["baseline", s(&inst)]);
    assert_eq!(out.status.code(), Some(0));
    let res: ResultFile = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(res.backend, "baseline");
    let counts: Vec<usize> = res.per_group.values().copied().collect();
    // none, t1, t1+t2, t2
    assert_eq!(counts, [50, 25, 0, 25]);
    assert_eq!(res.alpha, "0/1");
}

#[test]
fn gda_two_schools() {
    let dir = TempDir::new().unwrap();
    let multi = MultiInstanceFile::from_multi(&fixtures::two_schools());
    let p = write(&dir, "multi.json", &io::to_json(&multi).unwrap());
    let out = run(&["gda", s(&p)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let res: GdaResultFile = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(res.assignment["a"].as_deref(), Some("x"));
    assert_eq!(res.assignment["b"], None);
    assert_eq!(res.assignment["c"].as_deref(), Some("y"));
    assert_eq!(res.assignment["d"], None);
    assert_eq!(res.rounds.len(), 2);
    assert_eq!(res.rounds[0].rejected, ["b", "c"]);
    assert_eq!(res.rounds[1].held["y"], ["c"]);
    assert_eq!(res.schools["x"].selected, ["a"]);
}

#[test]
fn gda_probe() {
    let dir = TempDir::new().unwrap();
    let multi = MultiInstanceFile::from_multi(&fixtures::single_school(&fixtures::capped_types(true), "c"));
    let p = write(&dir, "capped.json", &io::to_json(&multi).unwrap());
    let out = run(&[
        "gda",
        s(&p),
        "--probe",
        "c",
        "--probe-base",
        "s11,s12,s14,s15,s21,s22,s23",
        "--probe-s1",
        "s16",
        "--probe-s2",
        "s13",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let err = stderr(&out);
    assert!(err.contains("substitutability violated at c: s13"), "{err}");
    assert!(err.contains("{s11,s12,s21,s22} -> {s11,s12,s13,s21}"), "{err}");

    let out = run(&["gda", s(&p), "--probe", "c"]);
    assert!(stderr(&out).contains("substitutability violated at c"));
    assert_eq!(run(&["gda", s(&p), "--probe", "nowhere"]).status.code(), Some(2));
    // a targeted probe needs all three arguments
    assert_eq!(run(&["gda", s(&p), "--probe", "c", "--probe-s1", "s16"]).status.code(), Some(2));
}

#[test]
fn bench_table() {
    let out = run(&[
        "bench",
        "--students",
        "40,80",
        "--solve-capacity",
        "10",
        "--min-time-ms",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("students\tbackend\ttask\tcapacity\tgroups\tseconds\truns"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.len() == 7));

    let out = run(&["bench", "--students", "40", "--graph-max", "10", "--solve-capacity", "0", "--min-time-ms", "1", "--json"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["backend"], "flow");
    assert_eq!(rows[0]["task"], "certificate");
}
