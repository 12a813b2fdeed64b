use std::path::Path;
use std::process::{Command, Output};

use arpex::nn::Checkpoint;

fn arpex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arpex")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = arpex(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn header(csv: &str) -> (&str, &str) {
    let mut lines = csv.lines();
    (lines.next().unwrap(), lines.next().unwrap())
}

#[test]
fn every_subcommand_writes_versioned_header() {
    let cases: [(&[&str], &str); 5] = [
        (&["noise", "--steps", "20"], "t,x"),
        (&["acf", "--max-lag", "5"], "lag,rho"),
        (
            &["explore", "--rates", "100", "--policies", "arp:3:0.9", "--budget", "200"],
            "action_rate,policy,sigma_scale,total_sim_seconds,episodes_completed,mean_time,median_time,censored,seeds",
        ),
        (&["trajectories", "--duration", "0.5", "--runs", "2"], "run,t,x,y"),
        (
            &["learn", "--sim-seconds", "200", "--seeds", "1", "--policy", "gaussian"],
            "sim_seconds,mean_return,mean_ep_len,kl,clipfrac,explained_var",
        ),
    ];
    for (args, want) in cases {
        let csv = stdout(args);
        assert_eq!(header(&csv), ("# arpex-v1", want), "{args:?}");
        assert!(csv.lines().count() > 2, "{args:?} wrote no rows");
    }
}

#[test]
fn output_is_deterministic_per_seed() {
    let args = ["noise", "--seed", "11", "--steps", "200"];
    assert_eq!(stdout(&args), stdout(&args));
    assert_ne!(stdout(&args), stdout(&["noise", "--seed", "12", "--steps", "200"]));

    let args = ["trajectories", "--seed", "3", "--duration", "1", "--runs", "3", "--policy", "gaussian"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn noise_rows_count_steps() {
    let csv = stdout(&["noise", "--p", "1", "--alpha", "0.5", "--steps", "37"]);
    assert_eq!(csv.lines().count(), 2 + 37);
    let first: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(first[0], "0");
}

#[test]
fn acf_starts_at_one() {
    let csv = stdout(&["acf", "--p", "3", "--rho1", "0.99", "--max-lag", "3"]);
    let rows: Vec<(usize, f64)> = csv
        .lines()
        .skip(2)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0], (0, 1.0));
    assert!((rows[1].1 - 0.99).abs() < 1e-9);
}

#[test]
fn bad_input_exits_nonzero() {
    for args in [
        &["noise", "--alpha", "1.5"][..],
        &["explore", "--policies", "brownian"],
        &["acf", "--rho1", "1.2"],
        &["frobnicate"],
        &["noise", "--config", "/nonexistent/arpex.toml"],
    ] {
        let out = arpex(args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(out.stdout.is_empty() || !String::from_utf8_lossy(&out.stdout).contains("arpex-v1"));
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, "seed = 5\n[noise]\np = 1\nalpha = 0.5\nsteps = 10\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = stdout(&["noise", "--config", cfg]);
    assert_eq!(from_file.lines().count(), 12);
    assert_eq!(from_file, stdout(&["noise", "--seed", "5", "--p", "1", "--alpha", "0.5", "--steps", "10"]));

    let overridden = stdout(&["noise", "--config", cfg, "--steps", "4", "--seed", "6"]);
    assert_eq!(overridden, stdout(&["noise", "--seed", "6", "--p", "1", "--alpha", "0.5", "--steps", "4"]));

    std::fs::write(dir.path().join("bad.toml"), "[noise]\nq = 3\n").unwrap();
    let out = arpex(&["noise", "--config", dir.path().join("bad.toml").to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn out_flag_writes_file_and_checkpoints_load() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curve.csv");
    let ckpts = dir.path().join("ckpt");
    let out = arpex(&[
        "learn",
        "--seed",
        "4",
        "--seeds",
        "2",
        "--sim-seconds",
        "150",
        "--per-seed",
        "--out",
        csv.to_str().unwrap(),
        "--checkpoint-dir",
        ckpts.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(
        header(&text),
        ("# arpex-v1", "seed,sim_seconds,mean_return,mean_ep_len,kl,clipfrac,explained_var")
    );
    let seeds: std::collections::BTreeSet<&str> =
        text.lines().skip(2).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(seeds.into_iter().collect::<Vec<_>>(), ["4", "5"]);
    for s in [4, 5] {
        let path = ckpts.join(format!("seed-{s}.ckpt"));
        let ck = Checkpoint::load(Path::new(&path)).unwrap();
        assert_eq!(ck.head.obs_dim(), 6);
        assert_eq!(ck.head.act_dim(), 2);
        assert!(ck.value.is_some());
    }
}
