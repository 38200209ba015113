use std::path::Path;
use std::process::{Command, Output};

const PASSING: &str = r#"
scenario = "rested_fixed"
horizon = 50

[seeds]
list = [1]

[policy]
kind = "block_ucb"
alpha = 3.0
m = 1
b = 0

[[arms]]
kind = "iid"
alphabet = [0.0, 1.0]
probs = [0.5, 0.5]

[[rewards]]
kind = "block_mean"

[[assertions]]
kind = "max_regret"
value = 0.0
"#;

fn mixbandit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixbandit")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn presets_list_and_show() {
    let o = mixbandit(&["presets", "list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in ["sec3_iid_reduction", "sec4_combo", "conc_lab_markov"] {
        assert!(text.contains(name), "{text}");
    }
    let o = mixbandit(&["presets", "show", "sec4_combo"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("combo_ucb"));
    assert_eq!(mixbandit(&["presets", "show", "nope"]).status.code(), Some(2));
}

#[test]
fn passing_run_exits_zero_and_writes_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "ok.toml", PASSING);
    let out = dir.path().join("out");
    let o = mixbandit(&["run", &config, "--seed-count", "3", "--out", out.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("PASS max_regret"));
    assert!(out.join("aggregate.json").exists());
    assert!(out.join("bounds.csv").exists());
    for seed in [1, 2, 3] {
        assert!(out.join("runs").join(format!("seed_{seed}.csv")).exists());
    }
}

#[test]
fn failed_assertion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = PASSING.replace(
        "[[rewards]]",
        "[[arms]]\nkind = \"iid\"\nalphabet = [0.0, 1.0]\nprobs = [0.9, 0.1]\n\n[[rewards]]",
    );
    let config = write(dir.path(), "fail.toml", &text);
    let o = mixbandit(&["run", &config]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL max_regret"));
}

#[test]
fn config_errors_exit_two_with_field_name() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "bad.toml", &PASSING.replace("horizon", "horizn"));
    let o = mixbandit(&["run", &config]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("horizn"));
    assert_eq!(mixbandit(&["run", "no_such_preset_or_file"]).status.code(), Some(2));
}

#[test]
fn conc_lab_requires_a_lab_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "ok.toml", PASSING);
    assert_eq!(mixbandit(&["conc-lab", &config]).status.code(), Some(2));
}

#[test]
fn bounds_prints_tables_for_a_preset() {
    let o = mixbandit(&["bounds", "block_ucb_markov"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("regret bound"));
}
