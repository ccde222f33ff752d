use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("presentations").join(name)
}

fn hoalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hoalg")).args(args).output().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn empty_file_gives_empty_passing_report() {
    let o = hoalg(&["run", example("empty.hoalg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["tasks"].as_array().unwrap().len(), 0);
    assert_eq!(v["field"], "Q");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let f = example("counts.hoalg");
    let a = hoalg(&["run", f.to_str().unwrap()]);
    let b = hoalg(&["--parallel", "run", f.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert!(v["tasks"].as_array().unwrap().iter().all(|t| t["wall_time_ms"].is_null()));
}

#[test]
fn timing_fills_wall_time() {
    let o = hoalg(&["--timing", "trees", example("empty.hoalg").to_str().unwrap(), "leaves=4", "edges=2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["tasks"][0]["wall_time_ms"].is_u64());
}

#[test]
fn validation_failure_exits_two_with_structured_error() {
    let o = hoalg(&["run", example("bad_square.hoalg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["error"]["kind"], "ValidationError");
    assert!(v["error"]["message"].as_str().unwrap().contains("line 2"));
    assert!(!o.stderr.is_empty());
}

#[test]
fn parse_failure_reports_the_line() {
    let dir = std::env::temp_dir().join(format!("hoalg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("broken.hoalg");
    std::fs::write(&f, "field Q\n\noperad P = builtin Zz\n").unwrap();
    let o = hoalg(&["run", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["error"]["kind"], "ParseError");
    assert_eq!(v["error"]["line"], 3);
}

#[test]
fn failing_task_exits_one() {
    // det complexes of trees with edges are acyclic, so "k in degree 0" fails
    let o = hoalg(&["--summary", "homology", example("empty.hoalg").to_str().unwrap(), "det", "edges=1"]);
    assert_eq!(o.status.code(), Some(1));
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.starts_with("FAIL 0:homology:det,edges=1"), "{s}");
}

#[test]
fn subcommand_runs_the_files_tasks_of_its_kind() {
    let o = hoalg(&["h0", example("h0.hoalg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["tasks"].as_array().unwrap().iter().all(|t| t["kind"] == "h0"));
}

#[test]
fn field_and_window_flags_override_the_file() {
    let o = hoalg(&["--field", "Fp:7", "--window", "2:1:2:-4:4", "--pretty", "bar", example("fleet.hoalg").to_str().unwrap(), "As"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["field"], "Fp:7");
    assert_eq!(v["window"]["max_arity"], 2);
    assert_eq!(v["tasks"][0]["certificates"]["As"]["d_squared_zero"], true);
    let bad = hoalg(&["--field", "Fp:8", "run", example("empty.hoalg").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn print_is_canonical() {
    let f = example("adjunction.hoalg");
    let once = hoalg(&["print", f.to_str().unwrap()]);
    assert_eq!(once.status.code(), Some(0));
    let dir = std::env::temp_dir().join(format!("hoalg-print-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let g = dir.join("again.hoalg");
    std::fs::write(&g, &once.stdout).unwrap();
    let twice = hoalg(&["print", g.to_str().unwrap()]);
    assert_eq!(once.stdout, twice.stdout);
}

#[test]
fn all_example_files_pass_except_the_known_red_one() {
    for name in ["counts", "counit", "h0", "adjunction", "coh", "unital", "bar_cobar_adjoint", "twocat", "fleet"] {
        let o = hoalg(&["--summary", "run", example(&format!("{name}.hoalg")).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stdout));
    }
}
