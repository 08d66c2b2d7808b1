use c1einstein::emit::{csv_header, read_solution_csv, reingest_deviation};
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_c1einstein")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value_of(text: &str, key: &str) -> Option<f64> {
    text.lines().find_map(|l| {
        let (k, v) = l.split_once('=')?;
        (k.trim() == key).then(|| v.trim().parse().ok()).flatten()
    })
}

#[test]
fn solve_round_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin(&["solve", "--diagram", "su2_s4", "--out", "run"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let chi = value_of(&stdout(&o), "chi").unwrap();
    assert!((chi - 2.0).abs() < 1e-4);
    let dir = tmp.path().join("run");
    let csv = std::fs::read_to_string(dir.join("solution.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), csv_header());
    let rows = read_solution_csv(&csv).unwrap();
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]), "t column is monotone");
    assert!(reingest_deviation(&rows, 3.0).unwrap() <= 1e-12);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("diagnostics.json")).unwrap()).unwrap();
    assert!((json["topology"]["chi"].as_f64().unwrap() - 2.0).abs() < 1e-4);
    let consts = std::fs::read_to_string(dir.join("constants.txt")).unwrap();
    for key in ["alpha", "beta", "delta", "theta_k"] {
        assert!(value_of(&consts, key).is_none(), "{key} is undefined for su2_s4");
    }
}

#[test]
fn verify_so3_cp2_reports_beta_and_kahler() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin(&["verify", "--diagram", "so3_cp2"], tmp.path());
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert!(out.contains("beta = 12.000"), "{out}");
    assert!(out.contains("kahler: true"), "{out}");
    assert!(!out.contains("[FAIL]"));
}

#[test]
fn constants_file_lists_defined_constants_only() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin(&["solve", "--diagram", "so3_hitchin", "--k", "2", "--out", "h2"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let c = std::fs::read_to_string(tmp.path().join("h2/constants.txt")).unwrap();
    assert_eq!(value_of(&c, "theta_k"), Some(8.0));
    assert!(value_of(&c, "beta").is_some());
    assert!(value_of(&c, "alpha").is_none() && value_of(&c, "delta").is_none());
    assert!(value_of(&c, "chi").is_none(), "orbifold characteristic numbers are not emitted");
    let keys: Vec<&str> = c.lines().filter_map(|l| l.split_once('=')).map(|(k, _)| k.trim()).collect();
    let mut dedup = keys.clone();
    dedup.sort();
    dedup.dedup();
    assert_eq!(keys.len(), dedup.len(), "keys are unique");
}

#[test]
fn re_emission_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for d in ["a", "b"] {
        let cfg = tmp.path().join("run.cfg");
        std::fs::write(&cfg, "diagram = su2_s4\nperturb = 0.1\nseed = 11\n").unwrap();
        let o = bin(&["solve", "--config", cfg.to_str().unwrap(), "--out", d], tmp.path());
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    for f in ["solution.csv", "constants.txt", "diagnostics.json"] {
        let a = std::fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn malformed_config_names_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    std::fs::write(&cfg, "diagram = su2_s4\nlambda 3\n").unwrap();
    let o = bin(&["solve", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    std::fs::write(&cfg, "diagram = su2_s4\nwibble = 1\n").unwrap();
    let o = bin(&["solve", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key `wibble`"));
}

#[test]
fn usage_and_convergence_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(bin(&["solve"], tmp.path()).status.code(), Some(3));
    assert_eq!(bin(&["frobnicate"], tmp.path()).status.code(), Some(3));
    assert_eq!(bin(&["solve", "--diagram", "so3_hitchin", "--k", "0"], tmp.path()).status.code(), Some(3));
    let o = bin(&["solve", "--diagram", "su2_s4", "--set", "perturb=0.3", "--set", "max_iter=0"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("non-convergence"));
}

#[test]
fn scan_fans_out_and_finds_a_solution() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("scan.cfg");
    std::fs::write(
        &cfg,
        "diagram = so3_s2xs2\nscan_lo = 1.5,-5,1.5,3,1.2\nscan_hi = 1.8,-3,1.8,5,1.4\nscan_n = 2,1,2,1,2\nscan_seeds = 2\n",
    )
    .unwrap();
    let o = bin(&["scan", "--config", cfg.to_str().unwrap(), "--jobs", "2", "--out", "s"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let scan = std::fs::read_to_string(tmp.path().join("s/scan.csv")).unwrap();
    assert_eq!(scan.lines().count(), 1 + 8);
    assert!(stdout(&o).contains("solution: ["));
}

#[test]
fn report_prints_table() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin(&["report", "--diagram", "so3_s4"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("alpha") && l.contains("36.0000")), "{out}");
}
