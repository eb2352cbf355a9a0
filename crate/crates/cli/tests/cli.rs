use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_plansched"))
}

fn repo(path: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(path)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("plansched-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn schedule_then_validate_succeeds() {
    let sched = scratch("example1.schedule.json");
    let out = run(bin()
        .arg("schedule")
        .arg(repo("instances/example1.json"))
        .arg("--out")
        .arg(&sched));
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&sched).unwrap()).unwrap();
    assert_eq!(file["objective"], 3);
    assert_eq!(file["scheduled"], serde_json::json!([1, 2]));

    let out = run(bin()
        .arg("validate")
        .arg(repo("instances/example1.json"))
        .arg(&sched));
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["feasible"], true);
}

#[test]
fn infeasible_schedule_exits_one() {
    let sched = scratch("bad.schedule.json");
    std::fs::write(
        &sched,
        r#"{"starts": [
              {"plan": 1, "task": 1, "start": 2, "completion": 5},
              {"plan": 2, "task": 1, "start": 3, "completion": 5},
              {"plan": 2, "task": 2, "start": 4, "completion": 6}],
            "scheduled": [1, 2], "discarded": [], "objective": 3}"#,
    )
    .unwrap();
    let out = run(bin()
        .arg("validate")
        .arg(repo("instances/example1.json"))
        .arg(&sched));
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn missing_instance_exits_two() {
    let out = run(bin().args(["schedule", "missing.json"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_instance_exits_two() {
    let path = scratch("broken.json");
    std::fs::write(&path, "{ \"window\": ").unwrap();
    let out = run(bin().arg("schedule").arg(&path));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
}

#[test]
fn bad_flag_exits_two() {
    let out = run(bin().args(["bench", "--scenario", "9"]));
    assert_eq!(out.status.code(), Some(2));
    let out = run(bin().args(["schedule", "--idle-metric", "sideways", "x.json"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_prints_scenario_row() {
    let out = run(bin().args(["bench", "--scenario", "1", "--repeat", "10"]));
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split_whitespace().collect();
    assert_eq!(&row[..3], ["1", "32", "91"]);
    assert!(row[5].parse::<f64>().unwrap() >= 0.0);
}

#[test]
fn bench_all_rows_are_ordered() {
    let out = run(bin().args(["bench", "--repeat", "1"]));
    assert_eq!(out.status.code(), Some(0));
    let firsts: Vec<String> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().next().unwrap().to_string())
        .collect();
    assert_eq!(firsts, ["1", "2", "3", "4", "5", "6", "7", "8"]);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let mut outputs = Vec::new();
    for n in 0..2 {
        let gantt = scratch(&format!("ex2-{n}.svg"));
        let out = run(bin()
            .arg("schedule")
            .arg(repo("instances/example2.json"))
            .args(["--events", "--gantt-format", "svg", "--gantt"])
            .arg(&gantt));
        assert_eq!(out.status.code(), Some(0));
        outputs.push((out.stdout, std::fs::read(&gantt).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn text_gantt_for_example_one() {
    let gantt = scratch("ex1.txt");
    let out = run(bin()
        .arg("schedule")
        .arg(repo("instances/example1.json"))
        .arg("--gantt")
        .arg(&gantt));
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&gantt).unwrap();
    assert!(text.contains("rho_1 |..###==...|  J^1_1 [2,5)  J^2_2 [5,7)"));
}

#[test]
fn oracle_reports_optimum() {
    let out = run(bin()
        .arg("oracle")
        .arg(repo("instances/example1.json"))
        .args(["--node-limit", "100000"]));
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("optimum 3"));
    assert!(text.contains("limit_hit false"));
}

#[test]
fn scenario_dump_matches_bundled_benchmark() {
    let out = run(bin().args(["scenario", "1"]));
    assert_eq!(out.status.code(), Some(0));
    let bundled = std::fs::read_to_string(repo("benchmarks/scenario1.json")).unwrap();
    assert_eq!(stdout(&out), bundled);
}

#[test]
fn options_change_the_run() {
    let out = run(bin()
        .arg("schedule")
        .arg(repo("benchmarks/scenario1.json"))
        .args(["--group-scope", "frontier"]));
    assert_eq!(out.status.code(), Some(0));
    let file: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(file["scheduled"].as_array().unwrap().len(), 21);
}
