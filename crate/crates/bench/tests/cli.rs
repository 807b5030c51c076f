use std::fs;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mcts-bench"));
    c.env("RUST_LOG", "warn");
    c
}

#[test]
fn list_envs_names_everything() {
    let out = bin().arg("list-envs").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["dchain", "frozen-lake", "sailing", "ar-chain", "tictactoe", "wide-tree", "random", "ar-dents"] {
        assert!(text.contains(name), "{name} missing from {text}");
    }
}

fn root_row(table: &str) -> (f64, Vec<f64>) {
    let line = table.lines().nth(1).unwrap();
    let f: Vec<&str> = line.split(',').collect();
    assert_eq!(f[1], "0", "first row is the t = 0 root");
    let q = if f[3].is_empty() { vec![] } else { f[3].split(';').map(|x| x.parse().unwrap()).collect() };
    (f[2].parse().unwrap(), q)
}

#[test]
fn oracle_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("soft.csv");
    let st = bin()
        .args(["oracle", "--env", "dchain", "--param", "final_reward=0.5", "--kind", "soft:1", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(st.success());
    let (_, q) = root_row(&fs::read_to_string(&path).unwrap());
    assert_eq!((q[1] * 100.0).round() / 100.0, 2.74);

    let out = bin().args(["oracle", "--env", "dchain"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(root_row(&String::from_utf8(out.stdout).unwrap()).0, 1.0);

    let out = bin().args(["oracle", "--env", "tictactoe", "--kind", "minimax"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(root_row(&String::from_utf8(out.stdout).unwrap()).0, 0.0);
}

#[test]
fn bad_inputs_exit_nonzero_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "seeds = [0]\ntrials = -3\n").unwrap();
    let out = bin().arg("run").arg("--config").arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");

    let out = bin().args(["oracle", "--env", "chess"]).output().unwrap();
    assert!(!out.status.success());
    let out = bin().args(["oracle", "--env", "dchain", "--kind", "soft:-1"]).output().unwrap();
    assert!(!out.status.success());
    let missing = bin().args(["run", "--config", "/nonexistent/x.toml"]).output().unwrap();
    assert!(!missing.status.success());
}

#[test]
fn run_with_seed_override_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        "seeds = [0, 1, 2]\ntrials = 200\ncheckpoint_every = 100\neval_trajectories = 5\nalgorithms = [\"uct\", \"ments\"]\n[env]\nname = \"ar-chain\"\nlength = 4\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let st = bin()
        .arg("run")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .args(["--seed", "7", "--jobs", "2"])
        .status()
        .unwrap();
    assert!(st.success());
    let text = fs::read_to_string(out_dir.join("results.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 2 * 2);
    assert!(rows.iter().all(|r| r.split(',').nth(2) == Some("7")));
    let resolved = fs::read_to_string(out_dir.join("resolved_config.toml")).unwrap();
    assert!(resolved.contains("seeds = [7]"), "{resolved}");
}
