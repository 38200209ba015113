use mixbandit::experiments::{
    bounds_report, checkpoints, preset, preset_names, run_experiment, ExperimentConfig, RunOptions,
};
use mixbandit::Error;

const MINIMAL: &str = r#"
scenario = "rested_fixed"
horizon = 10

[seeds]
list = [1, 2, 3]

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

fn two_bernoulli(p: f64, q: f64, seeds: u64) -> String {
    format!(
        r#"
scenario = "rested_fixed"
horizon = 10000

[seeds]
base = 1000
count = {seeds}

[policy]
kind = "block_ucb"
alpha = 3.0
m = 1
b = 0

[[arms]]
kind = "iid"
alphabet = [0.0, 1.0]
probs = [{}, {p}]

[[arms]]
kind = "iid"
alphabet = [0.0, 1.0]
probs = [{}, {q}]

[[rewards]]
kind = "block_mean"

[[assertions]]
kind = "regret_below_bound"
"#,
        1.0 - p,
        1.0 - q
    )
}

#[test]
fn single_arm_run_has_zero_regret() {
    let config = ExperimentConfig::from_toml(MINIMAL).unwrap();
    let report = run_experiment(&config, &RunOptions::default()).unwrap();
    assert!(report.passed());
    assert_eq!(report.mean_final_regret(), Some(0.0));
    assert_eq!(report.records.len(), 3);
    assert!(report.records.iter().all(|r| r.steps.len() == 10));
}

#[test]
fn moderate_gap_regret_stays_below_bound() {
    let config = ExperimentConfig::from_toml(&two_bernoulli(0.6, 0.4, 50)).unwrap();
    let report = run_experiment(&config, &RunOptions::default()).unwrap();
    let last = report.checkpoints.last().unwrap();
    assert_eq!(last.step, 10_000);
    assert!(report.passed(), "{:?}", report.assertions);
    assert!(last.mean_regret <= last.bound.unwrap());
    // gap 0.2 → bound dominated by 8α·log T / Δ
    assert!(last.bound.unwrap() > 8.0 * 3.0 * (10_000f64).ln() / 0.2);
}

#[test]
fn bundle_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig::from_toml(&two_bernoulli(0.7, 0.3, 2)).unwrap();
    let options = RunOptions { jobs: 1, output: Some(dir.path().to_path_buf()) };
    let report = run_experiment(&config, &options).unwrap();
    for seed in [1000, 1001] {
        let csv = std::fs::read_to_string(dir.path().join("runs").join(format!("seed_{seed}.csv"))).unwrap();
        assert!(csv.starts_with("step,arm,m,b,reward,inst_regret,cum_regret"));
        assert_eq!(csv.lines().count(), 10_001);
    }
    let bounds = std::fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
    assert_eq!(bounds.lines().count(), checkpoints(10_000).len() + 1);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("aggregate.json")).unwrap()).unwrap();
    assert_eq!(json["config_hash"], serde_json::Value::String(report.config_hash.clone()));
}

#[test]
fn jobs_do_not_change_results() {
    let config = ExperimentConfig::from_toml(&two_bernoulli(0.65, 0.35, 8)).unwrap();
    let a = run_experiment(&config, &RunOptions { jobs: 1, output: None }).unwrap();
    let b = run_experiment(&config, &RunOptions { jobs: 4, output: None }).unwrap();
    for (x, y) in a.records.iter().zip(&b.records) {
        assert_eq!(x.chosen_arms(), y.chosen_arms());
    }
    assert_eq!(a.mean_final_regret(), b.mean_final_regret());
}

#[test]
fn finite_range_oracle_falls_back_to_monte_carlo() {
    let text = r#"
scenario = "rested_fixed"
horizon = 200

[seeds]
list = [4]

[policy]
kind = "block_ucb"
alpha = 3.0
m = 2
b = 3

[[arms]]
kind = "finite_range"
alphabet = [0.0, 1.0]
probs = [0.3, 0.7]
order = 3
persistence = 0.5

[[arms]]
kind = "iid"
alphabet = [0.0, 1.0]
probs = [0.6, 0.4]

[[rewards]]
kind = "block_mean"
"#;
    let config = ExperimentConfig::from_toml(text).unwrap();
    let report = run_experiment(&config, &RunOptions::default()).unwrap();
    assert!(!report.warnings.is_empty());
    let oracle = report.oracle.unwrap();
    assert!((oracle.values[0] - 0.7).abs() < 0.01, "{:?}", oracle.values);
    assert_eq!(oracle.best_arm, 0);
}

#[test]
fn config_errors_name_the_field() {
    let bad = MINIMAL.replace("horizon = 10", "horizn = 10");
    match ExperimentConfig::from_toml(&bad) {
        Err(Error::Config { field, .. }) => assert_eq!(field, "horizn"),
        other => panic!("unexpected {other:?}"),
    }
    let bad = MINIMAL.replace("alpha = 3.0", "alpha = 1.5");
    assert!(matches!(ExperimentConfig::from_toml(&bad).and_then(|c| c.validate()), Err(Error::Config { .. })));
}

#[test]
fn hash_tracks_content() {
    let a = ExperimentConfig::from_toml(MINIMAL).unwrap();
    let b = ExperimentConfig::from_toml(&a.to_toml().unwrap()).unwrap();
    assert_eq!(a.hash().unwrap(), b.hash().unwrap());
    let c = ExperimentConfig::from_toml(&MINIMAL.replace("horizon = 10", "horizon = 11")).unwrap();
    assert_ne!(a.hash().unwrap(), c.hash().unwrap());
}

#[test]
fn every_preset_validates_and_reports_bounds() {
    for name in preset_names() {
        let config = preset(name).unwrap();
        config.validate().unwrap();
        let text = bounds_report(&config).unwrap();
        assert!(!text.is_empty(), "{name}");
    }
}
