use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use quadmorph::exit;
use quadmorph::io::{PlanJson, ReportJson};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quadmorph"))
}

fn write_config(dir: &Path, name: &str, cells: &[(i32, i32)]) -> PathBuf {
    let modules: Vec<String> =
        cells.iter().enumerate().map(|(i, (x, y))| format!("{{\"id\":{},\"cell\":[{x},{y}]}}", i + 1)).collect();
    let p = dir.join(name);
    fs::write(&p, format!("{{\"modules\":[{}]}}", modules.join(","))).unwrap();
    p
}

fn run(args: &[&Path]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const HEPTOMINO: [(i32, i32); 7] = [(0, 0), (1, 0), (2, 0), (2, 1), (3, 1), (1, 2), (2, 2)];
const OTHER: [(i32, i32); 7] = [(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (3, 1), (1, 1)];

#[test]
fn identical_files_give_an_empty_plan() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(dir.path(), "a.json", &HEPTOMINO);
    let o = run(&[Path::new("plan"), &a, &a]);
    assert_eq!(code(&o), exit::OK);
    let p: PlanJson = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(p.steps, 0);
}

#[test]
fn plan_then_validate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(dir.path(), "a.json", &HEPTOMINO);
    let b = write_config(dir.path(), "b.json", &OTHER);
    let plan = dir.path().join("plan.json");
    let o = bin().args(["--seed", "3", "plan"]).arg(&a).arg(&b).arg("--out").arg(&plan).output().unwrap();
    assert_eq!(code(&o), exit::OK, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&[Path::new("validate"), &plan, &a, &b]);
    assert_eq!(code(&o), exit::OK);
    let r: ReportJson = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r.ok);

    let o = run(&[Path::new("validate"), &plan, &a, &a]);
    assert_eq!(code(&o), exit::VALIDATION_FAILED);
}

#[test]
fn baseline_plans_validate_too() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(dir.path(), "a.json", &HEPTOMINO);
    let b = write_config(dir.path(), "b.json", &OTHER);
    let plan = dir.path().join("plan.json");
    let o = bin().args(["plan", "--algo", "birrt"]).arg(&a).arg(&b).arg("--out").arg(&plan).output().unwrap();
    assert_eq!(code(&o), exit::OK, "{}", String::from_utf8_lossy(&o.stderr));
    let o = bin().args(["--mode", "strict", "validate"]).arg(&plan).arg(&a).arg(&b).output().unwrap();
    assert_eq!(code(&o), exit::OK);
}

#[test]
fn corrupted_plan_reports_the_failing_step() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(dir.path(), "a.json", &HEPTOMINO);
    let b = write_config(dir.path(), "b.json", &OTHER);
    let o = run(&[Path::new("plan"), &a, &b]);
    let mut p: PlanJson = serde_json::from_slice(&o.stdout).unwrap();
    // drop the first connect; a later step then lacks an edge it relies on
    let hop = p.hops.iter_mut().find(|h| h.steps.iter().any(|s| s.kind == "connect")).unwrap();
    let i = hop.steps.iter().position(|s| s.kind == "connect").unwrap();
    hop.steps.remove(i);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&p).unwrap()).unwrap();
    let o = run(&[Path::new("validate"), &bad, &a, &b]);
    assert_eq!(code(&o), exit::VALIDATION_FAILED);
    let r: ReportJson = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!r.ok);
    assert!(r.failing_hop.is_some());
}

#[test]
fn linear_goal_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(dir.path(), "a.json", &HEPTOMINO);
    let line: Vec<(i32, i32)> = (0..7).map(|x| (x, 0)).collect();
    let b = write_config(dir.path(), "b.json", &line);
    assert_eq!(code(&run(&[Path::new("plan"), &a, &b])), exit::LINEAR);
}

#[test]
fn input_errors_have_their_own_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(dir.path(), "a.json", &HEPTOMINO);
    let small = write_config(dir.path(), "s.json", &[(0, 0), (1, 0), (1, 1)]);
    assert_eq!(code(&run(&[Path::new("plan"), &a, &small])), exit::SIZE_MISMATCH);
    let apart = write_config(dir.path(), "d.json", &[(0, 0), (1, 0), (3, 0), (3, 1), (4, 1), (5, 1), (6, 1)]);
    assert_eq!(code(&run(&[Path::new("plan"), &a, &apart])), exit::INVALID_CONFIGURATION);
    let junk = dir.path().join("junk.json");
    fs::write(&junk, "{\"modules\":").unwrap();
    assert_eq!(code(&run(&[Path::new("plan"), &a, &junk])), exit::PARSE);
    assert_eq!(code(&run(&[Path::new("plan"), &a, &dir.path().join("missing.json")])), exit::OTHER);
    assert_eq!(code(&bin().arg("frobnicate").output().unwrap()), exit::USAGE);
    assert_eq!(code(&bin().args(["classify", "9"]).output().unwrap()), exit::BUDGET_EXCEEDED);
}

#[test]
fn render_block() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(dir.path(), "a.json", &[(0, 0), (1, 0), (0, 1), (1, 1)]);
    let o = run(&[Path::new("render"), &a]);
    assert_eq!(code(&o), exit::OK);
    let svg = String::from_utf8(o.stdout).unwrap();
    assert_eq!(svg.matches("<rect").count(), 4);
    assert_eq!(svg.matches("class=\"edge\"").count(), 4);
    let o = bin().args(["render", "--format", "dot"]).arg(&a).output().unwrap();
    assert_eq!(String::from_utf8(o.stdout).unwrap().matches(" -- ").count(), 4);
}

#[test]
fn render_plan_has_a_frame_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(dir.path(), "a.json", &HEPTOMINO);
    let b = write_config(dir.path(), "b.json", &OTHER);
    let plan = dir.path().join("plan.json");
    bin().arg("plan").arg(&a).arg(&b).arg("--out").arg(&plan).output().unwrap();
    let p: PlanJson = serde_json::from_str(&fs::read_to_string(&plan).unwrap()).unwrap();
    let svg = String::from_utf8(run(&[Path::new("render"), &plan]).stdout).unwrap();
    assert_eq!(svg.matches("<g class=\"frame\">").count(), p.steps + 1);
}

#[test]
fn classify_four() {
    let o = bin().args(["classify", "4"]).output().unwrap();
    assert_eq!(code(&o), exit::OK);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,canonical_form,S,component_id"));
    let s: std::collections::BTreeSet<&str> = lines.map(|l| l.rsplit(',').nth(1).unwrap()).collect();
    assert_eq!(s.into_iter().collect::<Vec<_>>(), ["0", "3"]);
}

#[test]
fn enum_counts() {
    for (flavor, n, count) in [("free", 6, 35), ("one-sided", 5, 18), ("fixed", 4, 19)] {
        let o = bin().args(["enum", &n.to_string(), "--flavor", flavor]).output().unwrap();
        assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), count, "{flavor}");
    }
}

#[test]
fn bench_csv_is_deterministic() {
    let args = ["--seed", "5", "bench", "--n", "5", "--pairs", "2", "--reps", "2"];
    let strip = |o: Output| -> Vec<String> {
        String::from_utf8(o.stdout).unwrap().lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
    };
    let a = strip(bin().args(args).output().unwrap());
    let b = strip(bin().args(args).output().unwrap());
    assert_eq!(a[0], "pair,rep,algo,success,steps");
    assert_eq!(a.len(), 1 + 2 * 2 * 2);
    assert_eq!(a, b);
}
