use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conicwalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn constants_verify_oracle_succeeds() {
    let o = run(&["constants", "--p", "7", "--a", "1", "--b", "1", "--verify-oracle"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("# command=constants"));
    assert_eq!(lines.next().unwrap(), "i,j,k,num,den,N_i,N_j");
    assert_eq!(out.lines().count(), 2 + 7 * 7 * 7);
    assert!(stderr(&o).contains("0 mismatching entries"));
}

#[test]
fn errata_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("errata.json");
    let o = run(&["constants", "--p", "7", "--verify-oracle", "--errata", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["config"]["p"], 7);
    assert!(!doc["errata"].as_array().unwrap().is_empty());
}

#[test]
fn unsplit_diagnostic_reports_hermitian_failure() {
    let o = run(&["constants", "--p", "13", "--a", "1", "--b", "1", "--diagnostic-unsplit", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["report"]["axioms"]["hermitian"]["passed"], false);
    assert!(stderr(&o).contains("hermitian: FAIL"));

    let o = run(&["axioms", "--p", "13", "--diagnostic-unsplit"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_field_is_a_config_error() {
    let o = run(&["constants", "--p", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("q must be an odd prime power"));

    for args in [
        vec!["constants", "--p", "7", "--a", "0"],
        vec!["constants", "--p", "7", "--a", "1", "--b", "3"],
        vec!["mixing", "--p", "7", "--step", "0"],
        vec!["constants", "--p", "3", "--d", "2", "--modulus", "2,0,1"],
        vec!["scan", "--qmin", "20", "--qmax", "10"],
        vec!["constants"],
    ] {
        assert_eq!(run(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn axioms_pass_for_split_layout() {
    let o = run(&["axioms", "--p", "5", "--d", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("hermitian,true,0"));
}

#[test]
fn mixing_reports_tau_and_bound() {
    let o = run(&["mixing", "--p", "7", "--eps", "0.1839397", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["report"]["paper_bound"], 96);
    assert_eq!(doc["report"]["tau"], 4);
    assert_eq!(doc["config"]["eps"], 0.1839397);
}

#[test]
fn minorize_meets_stated_constant() {
    let o = run(&["minorize", "--p", "13", "--steps", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let row = out.lines().last().unwrap();
    assert!(row.starts_with("13,1mod4,6,"));
    assert!(row.contains(",1/39,"));
    assert!(row.ends_with(",true"));
}

#[test]
fn kernel_and_stationary_outputs() {
    let o = run(&["kernel", "--p", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2 + 49);

    let o = run(&["stationary", "--p", "3", "--d", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(doc["report"]["sup_norm"].as_f64().unwrap() < 1e-12);
    assert_eq!(doc["report"]["exact_fixed_point"], true);
}

#[test]
fn scan_rows_respect_the_bound() {
    let o = run(&["scan", "--qmin", "7", "--qmax", "61"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<Vec<&str>> = out
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("q,"))
        .map(|l| l.split(',').collect())
        .collect();
    let qs: Vec<u64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(qs.first(), Some(&7));
    assert_eq!(qs.last(), Some(&61));
    assert!(qs.windows(2).all(|w| w[0] < w[1]));
    assert!(qs.contains(&9) && qs.contains(&25) && qs.contains(&49) && !qs.contains(&15));
    for r in &rows {
        let tau: u64 = r[3].parse().unwrap();
        let bound: u64 = r[4].parse().unwrap();
        assert!(tau <= bound, "{r:?}");
    }

    let o = run(&["scan", "--qmin", "7", "--qmax", "31", "--branch", "3mod4"]);
    let out = stdout(&o);
    let qs: Vec<&str> = out
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("q,"))
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(qs, ["7", "11", "19", "23", "27", "31"]);
}

#[test]
fn couple_is_deterministic_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let o = run(&["couple", "--p", "7", "--trials", "2000", "--seed", "11", "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(text.contains("t,count,empirical_tail"));
    assert!(text.contains("seed=11"));
}
