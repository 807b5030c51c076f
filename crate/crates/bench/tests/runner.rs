use std::fs;

use mcts_bench::runner::{RESOLVED_CONFIG_FILE, RESULTS_FILE};
use mcts_bench::{run_experiments, ExperimentConfig};

const SMALL: &str = r#"
seeds = [0, 1]
trials = 400
checkpoint_every = 100
eval_trajectories = 20
record_timing = false
algorithms = ["bts", "dents"]

[env]
name = "dchain"
final_reward = 0.5
"#;

fn read(dir: &std::path::Path) -> String {
    fs::read_to_string(dir.join(RESULTS_FILE)).unwrap()
}

#[test]
fn two_algorithms_two_seeds_four_checkpoints() {
    let cfg = ExperimentConfig::from_toml_str(SMALL).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let summary = run_experiments(&cfg, dir.path(), Some(2)).unwrap();
    assert_eq!(summary.rows, 16);
    let text = read(dir.path());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2 + 16);
    // Rows come out algorithm-major, then seed, then checkpoint.
    let keys: Vec<(String, String, String)> = lines[2..]
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].into(), f[2].into(), f[3].into())
        })
        .collect();
    let mut expected = Vec::new();
    for a in ["bts", "dents"] {
        for s in ["0", "1"] {
            for n in ["100", "200", "300", "400"] {
                expected.push((a.to_string(), s.to_string(), n.to_string()));
            }
        }
    }
    assert_eq!(keys, expected);
    assert!((summary.oracle_value - 0.9).abs() < 1e-12);
}

#[test]
fn schema_matches_golden() {
    let cfg = ExperimentConfig::from_toml_str(SMALL).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_experiments(&cfg, dir.path(), Some(1)).unwrap();
    let golden = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/schema_v1.csv")).unwrap();
    let text = read(dir.path());
    let head: String = text.lines().take(2).map(|l| format!("{l}\n")).collect();
    assert_eq!(head, golden);
    for line in text.lines().skip(2) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 9);
        assert_eq!(f[1], "dchain-10-rf0.5");
        let est: f64 = f[4].parse().unwrap();
        let regret: f64 = f[6].parse().unwrap();
        assert!((regret - (0.9 - est)).abs() < 1e-12);
        assert_eq!((f[7].parse::<u64>().unwrap(), f[8].parse::<f64>().unwrap()), (0, 0.0));
    }
}

#[test]
fn same_config_twice_is_byte_identical() {
    let cfg = ExperimentConfig::from_toml_str(SMALL).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiments(&cfg, a.path(), Some(1)).unwrap();
    run_experiments(&cfg, b.path(), Some(4)).unwrap();
    assert_eq!(fs::read(a.path().join(RESULTS_FILE)).unwrap(), fs::read(b.path().join(RESULTS_FILE)).unwrap());
}

#[test]
fn resolved_config_reloads_to_the_same_experiment() {
    let cfg = ExperimentConfig::from_toml_str(SMALL).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_experiments(&cfg, dir.path(), Some(1)).unwrap();
    let again = ExperimentConfig::load(&dir.path().join(RESOLVED_CONFIG_FILE)).unwrap();
    assert_eq!(again, cfg);
}

#[test]
fn frozen_lake_paper_defaults_run_end_to_end() {
    let cfg = ExperimentConfig::from_toml_str(
        r#"
        seeds = [0]
        trials = 500
        checkpoint_every = 250
        eval_trajectories = 10
        algorithms = ["ments", "bts"]
        [env]
        name = "frozen-lake"
        "#,
    )
    .unwrap();
    assert_eq!((cfg.algorithms[0].epsilon, cfg.algorithms[0].alpha.initial()), (1.0, 0.001));
    assert_eq!((cfg.algorithms[1].epsilon, cfg.algorithms[1].alpha.initial()), (2.0, 0.1));
    let dir = tempfile::tempdir().unwrap();
    let summary = run_experiments(&cfg, dir.path(), None).unwrap();
    assert_eq!(summary.rows, 4);
    for line in read(dir.path()).lines().skip(2) {
        let f: Vec<&str> = line.split(',').collect();
        assert!(f[7].parse::<u64>().unwrap() > 0);
        assert!(f[8].parse::<f64>().unwrap() > 0.0);
    }
}
