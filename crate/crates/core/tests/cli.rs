use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_newcomb-bell"));
    c.env_remove("NEWCOMB_BELL_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// First CSV section as rows of fields, header dropped.
fn csv_section(text: &str, index: usize) -> Vec<Vec<String>> {
    text.split("\n\n")
        .nth(index)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn smoking_gene_report() {
    let o = run(&["scenario", "smoking-gene", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let eu = csv_section(&text, 0);
    assert_eq!(eu[0][..2], ["S", "-19.000000000"]);
    assert_eq!(eu[1][..2], ["¬S", "-2.000000000"]);
    let presc = csv_section(&text, 1);
    assert_eq!(presc[0], ["BDT", "¬S", "¬S"]);
    assert_eq!(presc[1], ["CDT", "S", "S"]);
    let summary = csv_section(&text, 2);
    assert_eq!(summary[0], ["newcomb_type", "true"]);
}

#[test]
fn newcomb_report_and_validation() {
    let o = run(&["scenario", "newcomb", "--p1", "0.99", "--p2", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("990000.000000000"));

    let o = run(&["scenario", "newcomb", "--p1", "1.2", "--p2", "0.01"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid probability"), "{}", stderr(&o));

    let o = run(&["scenario", "roulette"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown scenario"));
}

#[test]
fn million_box_needs_accuracy() {
    let o = run(&["scenario", "million-box"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["scenario", "million-box", "--accuracy", "0.999", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let presc = csv_section(&stdout(&o), 1);
    assert_eq!(presc[0][2], "closed");
    assert_eq!(presc[1][2], "closed+open");
}

#[test]
fn cdt_declines_every_session() {
    let o = run(&["bell-game", "--agent", "cdt", "--epsilon", "0.1", "--sessions", "100", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let bankroll = csv_section(&text, 1);
    assert_eq!(bankroll[0][6], "100000.000000000");
    let sessions = csv_section(&text, 2);
    assert_eq!(sessions.len(), 100);
    assert!(sessions.iter().all(|r| r[2] == "DECLINE" && r[5] == "1000.000000000"));
}

#[test]
fn bdt_wins_at_the_derived_rate() {
    let o = run(&["bell-game", "--agent", "bdt", "--pairs", "10000", "--sessions", "100", "--seed", "42", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let bankroll = csv_section(&stdout(&o), 1);
    assert_eq!(bankroll[0][2], "100");
    let wins: f64 = bankroll[0][4].parse().unwrap();
    // Binomial(100, 0.8426): mean 84.3, sd 3.6.
    assert!((wins - 84.3).abs() <= 4.0 * 3.64, "wins = {wins}");
}

#[test]
fn bdt_loses_against_local_boxes() {
    let o = run(&["bell-game", "--agent", "bdt", "--mechanism", "lhv", "--sessions", "10", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let bankroll = csv_section(&stdout(&o), 1);
    assert_eq!(bankroll[0][2], "10", "played");
    assert_eq!(bankroll[0][4], "0", "wins");
}

#[test]
fn enumerate_lhv_report() {
    let o = run(&["enumerate-lhv", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows = csv_section(&text, 0);
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r[5] == "2" || r[5] == "-2"));
    let summary = csv_section(&text, 1);
    assert_eq!(summary[1], ["max_f", "2.000000000"]);
}

#[test]
fn bounds_report() {
    let o = run(&["bounds", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows = csv_section(&text, 0);
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0], ["0.000000000", "2.828427125"]);
    assert_eq!(rows[1], ["0.100000000", "2.745584412"]);
    assert_eq!(csv_section(&text, 1)[0], ["2.800000000", "0.034314575"]);
    let o = run(&["bounds", "--epsilon-grid", "-0.1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_and_respect_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let o = bin()
            .env("NEWCOMB_BELL_OUT_DIR", dir.path())
            .args(["bell-game", "--pairs", "500", "--sessions", "12", "--seed", "7", "--format", "json", "--out", name])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
    let a = fs::read(dir.path().join("a.json")).unwrap();
    let b = fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["command"], "bell-game");
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "agent = \"cdt\"\nepsilon = 1.0\nsessions = 3\npairs = 100\nformat = \"csv\"\n").unwrap();
    let o = run(&["bell-game", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let bankroll = csv_section(&stdout(&o), 1);
    assert_eq!(bankroll[0][3], "3", "declined");

    fs::write(&cfg, "agent = \"cdt\"\nbananas = 3\n").unwrap();
    let o = run(&["bell-game", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bananas"), "{}", stderr(&o));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["bell-game", "--pairs", "many"]).status.code(), Some(2));
    assert_eq!(run(&["bell-game", "--pairs", "0"]).status.code(), Some(2));
    let o = run(&["bounds", "--out", "/nonexistent-dir/for/sure/out.txt"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn repro_report_runs() {
    let o = run(&["repro", "--sessions", "5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_section(&stdout(&o), 0);
    let get = |item: &str| rows.iter().find(|r| r[0] == item).unwrap_or_else(|| panic!("{item}"))[1].clone();
    assert_eq!(get("smoking-gene EU(S)"), "-19.000000000");
    assert_eq!(get("newcomb EU(A1)"), "990000.000000000");
    assert_eq!(get("million-box CDT choice"), "closed+open");
    assert_eq!(get("LHV max F"), "2.000000000");
    assert_eq!(get("tournament CDT total"), "5000.000000000");
}
