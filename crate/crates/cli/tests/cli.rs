use std::path::Path;
use std::process::Command;

use fphi_cli::config::parse_config_text;
use fphi_cli::{main_with_args, run, Experiment, Params};

fn args(v: &[&str]) -> Vec<String> {
    std::iter::once("fphi").chain(v.iter().copied()).map(String::from).collect()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn wick_table_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(main_with_args(args(&["run", "wick-table", "--alpha", "1.5", "--trunc-n", "1", "--out", out])), 0);
    let csv = read(&dir.path().join("wick-table.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("alpha,n,sigma_n"));
    let cells: Vec<&str> = lines.next().unwrap().split(',').collect();
    let sigma: f64 = cells[2].parse().unwrap();
    assert!((sigma - 3.1213203).abs() < 1e-6);
    let meta: serde_json::Value = serde_json::from_str(&read(&dir.path().join("wick-table.json"))).unwrap();
    for k in ["seed", "alpha", "trunc_n", "version"] {
        assert!(!meta[k].is_null(), "{k} missing from sidecar");
    }
}

#[test]
fn binary_reports_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let exe = env!("CARGO_BIN_EXE_fphi");
    let o = Command::new(exe).args(["wick-table", "--trunc-n", "2", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "validation");
    let o = Command::new(exe).args(["no-such-experiment"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(exe).args(["wick-table", "--alpha", "0.9", "--trunc-n", "2"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(exe).args(["wick-table", "--alpha", "abc", "--trunc-n", "2"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn same_seed_same_csv() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let code = main_with_args(args(&[
            "sample-gibbs", "--alpha", "1.3", "--trunc-n", "2", "--seed", "9", "--chain-len", "600", "--burn-in", "100",
            "--out", d.path().to_str().unwrap(),
        ]));
        assert_eq!(code, 0);
    }
    assert_eq!(read(&a.path().join("sample-gibbs.csv")), read(&b.path().join("sample-gibbs.csv")));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# comment\nalpha = 1.5\ntrunc_n = 1,2\nout = ignored\n").unwrap();
    let out = dir.path().join("res");
    let code = main_with_args(args(&[
        "wick-table", "--config", cfg.to_str().unwrap(), "--trunc-n", "2", "--out", out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0);
    let csv = read(&out.join("wick-table.csv"));
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.contains("1.5,2,6.96737"));
    assert!(!dir.path().join("ignored").exists());
    assert!(parse_config_text("bogus = 1").is_err());
    assert!(parse_config_text("alpha 1.2").is_err());
    assert!(parse_config_text("alpha=1\nalpha=2").is_err());
    std::fs::write(&cfg, "tfinal-typo = 3\n").unwrap();
    assert_eq!(main_with_args(args(&["wick-table", "--config", cfg.to_str().unwrap()])), 2);
}

fn evolve(dir: &Path, extra: &[&str]) -> i32 {
    let mut v = vec!["evolve", "--alpha", "1.3", "--trunc-n", "3", "--dt", "0.01", "--seed", "4", "--out", dir.to_str().unwrap()];
    v.extend_from_slice(extra);
    main_with_args(args(&v))
}

#[test]
fn resume_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let whole = dir.path().join("whole");
    let half = dir.path().join("half");
    let ck_whole = whole.join("w.ckpt");
    let ck_half = half.join("h.ckpt");
    let ck_end = half.join("e.ckpt");
    assert_eq!(evolve(&whole, &["--steps", "200", "--checkpoint", ck_whole.to_str().unwrap()]), 0);
    assert_eq!(evolve(&half, &["--steps", "100", "--checkpoint", ck_half.to_str().unwrap()]), 0);
    assert_eq!(
        evolve(&half, &["--steps", "100", "--resume", ck_half.to_str().unwrap(), "--checkpoint", ck_end.to_str().unwrap()]),
        0
    );
    assert_eq!(std::fs::read(&ck_whole).unwrap(), std::fs::read(&ck_end).unwrap());
    // the resumed table continues the uninterrupted one
    let full = read(&whole.join("evolve.csv"));
    let tail = read(&half.join("evolve.csv"));
    let last_full = full.lines().last().unwrap();
    assert_eq!(tail.lines().last().unwrap(), last_full);
    assert!(last_full.starts_with("200,"));
}

#[test]
fn bad_checkpoints_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("s.ckpt");
    assert_eq!(evolve(dir.path(), &["--steps", "3", "--checkpoint", ck.to_str().unwrap()]), 0);
    let wrong_alpha = args(&[
        "evolve", "--alpha", "1.25", "--trunc-n", "3", "--dt", "0.01", "--steps", "3", "--resume", ck.to_str().unwrap(),
        "--out", dir.path().to_str().unwrap(), "--checkpoint", dir.path().join("x.ckpt").to_str().unwrap(),
    ]);
    assert_eq!(main_with_args(wrong_alpha), 4);
    let bytes = std::fs::read(&ck).unwrap();
    let cut = dir.path().join("cut.ckpt");
    std::fs::write(&cut, &bytes[..bytes.len() - 5]).unwrap();
    assert_eq!(evolve(dir.path(), &["--steps", "3", "--resume", cut.to_str().unwrap()]), 4);
    // a different dt does not match the recorded clock
    let p = Params::from_map(
        [("alpha", "1.3"), ("trunc-n", "3"), ("dt", "0.02"), ("steps", "1"), ("resume", ck.to_str().unwrap()), ("out", dir.path().to_str().unwrap())]
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
    );
    assert!(matches!(run(Experiment::Evolve, &p), Err(fphi_cli::CliError::Checkpoint(_))));
}

#[test]
fn every_subcommand_runs_at_small_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["wick-table", "--alpha", "1.3", "--trunc-n", "1,2,4"],
        vec!["alpha-n", "--alpha", "1.3", "--trunc-n", "1,2"],
        vec!["sample-gibbs", "--alpha", "1.3", "--trunc-n", "2", "--chain-len", "400", "--burn-in", "100"],
        vec!["logz", "--alpha", "1.3", "--trunc-n", "1,2", "--samples", "2000"],
        vec!["variational", "--alpha", "1.3", "--trunc-n", "1", "--knots", "8", "--paths", "8", "--iterations", "3", "--samples", "100"],
        vec!["singularity", "--alpha", "1.125", "--trunc-n", "2,3", "--ensemble", "50"],
        vec!["singularity", "--alpha", "1.3", "--trunc-n", "2", "--measure", "rho", "--chain-len", "2000", "--burn-in", "500", "--thinning", "10"],
        vec!["evolve", "--alpha", "1.3", "--trunc-n", "2", "--tfinal", "0.1"],
        vec!["invariance", "--alpha", "1.3", "--trunc-n", "2", "--ensemble", "6", "--burn-in", "100", "--thinning", "5", "--tfinal", "0.1"],
        vec!["stochobj-decay", "--alpha", "1.25", "--trunc-n", "4", "--ensemble", "3", "--kind", "lin,quad,remainder", "--steps", "4"],
        vec!["stochobj-converge", "--alpha", "1.25", "--trunc-n", "2,4", "--ensemble", "2"],
        vec!["universality-coeffs", "--alpha", "1.3", "--trunc-n", "8,16,32"],
        vec!["universality-converge", "--trunc-n", "2", "--ensemble", "1", "--tfinal", "0.05", "--kappa", "-400"],
        vec!["counting-verify", "--lemma", "basic,two-balls", "--scales", "1,2,4"],
    ];
    for c in cases {
        let mut v = c.clone();
        v.extend_from_slice(&["--out", out]);
        assert_eq!(main_with_args(args(&v)), 0, "{c:?}");
        let csv = dir.path().join(format!("{}.csv", c[0]));
        let json = dir.path().join(format!("{}.json", c[0]));
        assert!(read(&csv).lines().count() >= 2, "{c:?}");
        let meta: serde_json::Value = serde_json::from_str(&read(&json)).unwrap();
        assert_eq!(meta["experiment"], c[0]);
    }
    // a bad object name and a bad measure are validation errors
    assert_eq!(main_with_args(args(&["stochobj-decay", "--alpha", "1.25", "--trunc-n", "4", "--kind", "foo", "--out", out])), 2);
    assert_eq!(main_with_args(args(&["singularity", "--alpha", "1.25", "--trunc-n", "4", "--measure", "nu", "--out", out])), 2);
}
