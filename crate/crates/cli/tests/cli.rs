use std::process::Command;

fn scfgmt(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_scfgmt")).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn generate_sample_translate() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.scfg");
    let g = g.to_str().unwrap();
    scfgmt(&[
        "gen", "--size", "61", "--src", "SOV", "--tgt", "OVS", "--seed", "9", "-o", g,
    ]);
    assert_eq!(std::fs::read_to_string(g).unwrap().lines().count(), 61);
    assert!(dir.path().join("g.json").exists());

    let line = scfgmt(&["sample", "-g", g, "-l", "7", "-s", "3"]);
    let pair: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    let source = pair["source"].as_str().unwrap();
    assert_eq!(source.split(' ').count(), 7);
    let outs = scfgmt(&["translate", "-g", g, source]);
    assert!(outs.lines().any(|l| l == pair["target"].as_str().unwrap()));
}

#[test]
fn score_prints_json() {
    let s: serde_json::Value = serde_json::from_str(&scfgmt(&["score", "-r", "x y z", "x y z"])).unwrap();
    assert_eq!(s["exact"], 1);
    assert_eq!(s["chrfpp"], 1.0);
}

#[test]
fn dry_run_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"conditions": [{"size": 57, "word_order_src": "SVO", "word_order_tgt": "SOV", "seed": 4}],
            "lengths": [4, 6], "n_per_cell": 3,
            "endpoint": {"url": "http://localhost:1", "model": "none"}}"#,
    )
    .unwrap();
    let log = dir.path().join("run.jsonl");
    let (cfg, log) = (cfg.to_str().unwrap(), log.to_str().unwrap());
    scfgmt(&["run", "-c", cfg, "--log", log, "--dry-run", "oracle"]);
    assert_eq!(std::fs::read_to_string(log).unwrap().lines().count(), 6);
    let csv = scfgmt(&["report", log, "--format", "csv"]);
    assert!(csv.lines().any(|l| l.starts_with("oracle SVO → SOV,exact,57,6,1.000")));
}
