use std::fs;
use std::process::{Command, Output};

fn phireg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phireg")).args(args).output().unwrap()
}

#[test]
fn simulate_writes_the_trajectory_header() {
    let dir = tempfile::tempdir().unwrap();
    let game = dir.path().join("mp.json");
    fs::write(&game, r#"{"row_payoff":[[1,-1],[-1,1]],"col_payoff":[[-1,1],[1,-1]]}"#).unwrap();
    let out = phireg(&["simulate", "--game", game.to_str().unwrap(), "--T", "100"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("t,x1,x2,y1,y2"));
    // T / (dt * stride) + 1 samples plus the header
    assert_eq!(text.lines().count(), 10_002);
}

#[test]
fn exit_codes() {
    let out = phireg(&["simulate", "--game", "mp", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(phireg(&["simulate", "--game", "nowhere.json", "--T", "1"]).status.code(), Some(1));
    assert_eq!(phireg(&["simulate", "--game", "mp", "--T", "1", "--x0", "1,0", "--y0", "0.5,0.5"]).status.code(), Some(1));
    // exponential blow-up of a huge-payoff game
    let dir = tempfile::tempdir().unwrap();
    let game = dir.path().join("big.json");
    fs::write(&game, r#"{"row_payoff":[[1e300,0],[0,-1e300]],"col_payoff":[[1e300,0],[0,1e300]]}"#).unwrap();
    let out = phireg(&["simulate", "--game", game.to_str().unwrap(), "--T", "1", "--x0", "0.5,0.5", "--y0", "0.5,0.5"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_passes() {
    let out = phireg(&["verify"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(!String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}

#[test]
fn bruns_list_and_export() {
    let out = phireg(&["bruns", "list"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 144);
    assert_eq!(text.lines().filter(|l| l.ends_with("\tI")).count(), 18);
    let dir = tempfile::tempdir().unwrap();
    assert!(phireg(&["bruns", "export", "--out", dir.path().to_str().unwrap()]).status.success());
    let ba_as = fs::read_to_string(dir.path().join("BaxAs.json")).unwrap();
    let g = phireg::Game::from_json(&ba_as).unwrap();
    assert_eq!(g, phireg::bruns::build_game("BaxAs".parse().unwrap()));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 144);
}

#[test]
fn regret_reports_the_hierarchy() {
    let out = phireg(&["regret", "--game", "BaxAs", "--T", "20", "--x0", "0.2,0.8", "--y0", "0.7,0.3"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let get = |k: &str| v[k].as_f64().unwrap();
    assert!(get("external") <= get("swap") + 1e-9 && get("swap") <= get("mosaic") + 1e-9);
}

#[test]
fn small_experiment_is_reproducible_and_echoes_its_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"experiment":"fig6_mosaic","trials":1,"integrator":{"dt":0.01,"horizon":10,"record_stride":10},"fig6":{"checkpoints":5}}"#,
    )
    .unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = phireg(&["experiment", "fig6", "--config", cfg.to_str().unwrap(), "--seed", "7", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read_to_string(out.join("fig6_series.csv")).unwrap()
    };
    let a = run("a");
    let b = run("b");
    let body = |s: &str| s.lines().filter(|l| !l.starts_with('#')).map(String::from).collect::<Vec<_>>();
    assert_eq!(body(&a), body(&b));
    assert!(a.lines().nth(1).unwrap().contains("\"seed\":7"));
    assert_eq!(body(&a).len(), 1 + 144 * 5);

    // wrong experiment for the config and unknown keys are input errors
    let o = phireg(&["experiment", "fig7", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    fs::write(&cfg, r#"{"experiment":"fig6_mosaic","trails":3}"#).unwrap();
    assert_eq!(phireg(&["experiment", "fig6", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}
