use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hiernet")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const TWO_CYCLE: &str = r#"
[hierarchy.superstructure]
vertices = 2
edges = [[1, 2], [2, 1]]

[[hierarchy.substructures]]
vertices = 2
edges = []

[[hierarchy.substructures]]
vertices = 2
edges = []

[field]
epsilon = 0.2

[initial_state]
superstructure = [0.9, 0.1]
substructures = [[0.5, 0.5], [0.5, 0.5]]
"#;

#[test]
fn help_documents_exit_codes() {
    for args in [&["--help"][..], &["verify", "--help"][..]] {
        let o = run(args);
        assert_eq!(code(&o), 0);
        let text = stdout(&o);
        for line in ["0  success", "1  verification failure", "2  input error", "3  integration failure"] {
            assert!(text.contains(line), "{line}\n{text}");
        }
    }
}

#[test]
fn validate_outcomes() {
    assert_eq!(code(&run(&["validate", p(&bundled("example1.toml"))])), 0);
    assert_eq!(code(&run(&["validate", p(&bundled("example2.toml"))])), 0);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("two_cycle.toml");
    std::fs::write(&bad, TWO_CYCLE).unwrap();
    let o = run(&["validate", p(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("TwoCycle (1,2)"), "{}", stderr(&o));

    let eps = dir.path().join("eps.toml");
    let text = std::fs::read_to_string(bundled("example1.toml")).unwrap().replace("epsilon = 0.2", "epsilon = 0.9");
    std::fs::write(&eps, text).unwrap();
    let o = run(&["validate", p(&eps)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("field.epsilon"));

    let garbled = dir.path().join("garbled.toml");
    std::fs::write(&garbled, "[field\n").unwrap();
    assert_eq!(code(&run(&["validate", p(&garbled)])), 2);

    assert_eq!(code(&run(&["validate", "/nonexistent/missing.toml"])), 2);
}

#[test]
fn bad_flags_are_input_errors() {
    let o = run(&["simulate", p(&bundled("example1.toml")), "--orientation", "sideways"]);
    assert_eq!(code(&o), 2);
    let o = run(&["simulate", p(&bundled("example1.toml")), "--sample-dt", "-1", "--out", "/tmp/unused"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn simulate_zero_horizon_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zero");
    let o = run(&["simulate", p(&bundled("example2.toml")), "--t-end", "0", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("timeseries.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split(',').count(), 19);
    assert!(out.join("itinerary.txt").exists());

    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let o = run(&["simulate", p(&bundled("example1.toml")), "--t-end", "50", "--out", p(d), "--plots"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let ca = std::fs::read(a.join("timeseries.csv")).unwrap();
    assert_eq!(ca, std::fs::read(b.join("timeseries.csv")).unwrap());
    assert_eq!(String::from_utf8(ca).unwrap().lines().count(), 502);
    assert!(a.join("panel_X.svg").exists() && a.join("panel_x3.svg").exists());
}

#[test]
fn integration_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.toml");
    let text = std::fs::read_to_string(bundled("example1.toml")).unwrap().replace("sample_dt = 0.1\n", "sample_dt = 0.1\nmax_steps = 5\n");
    std::fs::write(&path, text).unwrap();
    let o = run(&["simulate", p(&path), "--out", p(&dir.path().join("o"))]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("StepFailure"), "{}", stderr(&o));
}

#[test]
fn verify_bundled_examples() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["example1.toml", "example2.toml"] {
        let out = dir.path().join(name);
        let o = run(&["verify", p(&bundled(name)), "--out", p(&out)]);
        assert_eq!(code(&o), 0, "{name}\n{}", stdout(&o));
        let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
        assert!(report.contains("verdict: PASS"));
    }
}

#[test]
fn verify_literal_orientation_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", p(&bundled("example1.toml")), "--orientation", "literal", "--out", p(dir.path())]);
    assert_eq!(code(&o), 1);
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("verdict: FAIL"));
    assert!(report.contains("Gamma: violations"), "{report}");
}

#[test]
fn witness_commands() {
    let dir = tempfile::tempdir().unwrap();
    let ex1 = bundled("example1.toml");
    let o = run(&["witness", p(&ex1), "--from", "1", "--to", "2", "--delta", "0.1", "--out", p(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("1 -> 2"));
    assert!(dir.path().join("witness.txt").exists());

    let o = run(&["witness", p(&ex1), "--from", "3", "--to", "1", "--delta", "0.01", "--variant", "bounded", "--out", p(dir.path())]);
    // the bounded decay fixes x^j_1 = 1, so only the backward check can pass
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("bounded to t = -200"));
    assert!(stdout(&o).trim_end().ends_with("ok"));

    let o = run(&["witness", p(&ex1), "--from", "1", "--to", "3", "--out", p(dir.path())]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("not an edge"), "{}", stderr(&o));
}
