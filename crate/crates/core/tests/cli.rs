use std::fs;

use maxlab::cli::{emit_report, run};
use maxlab::verification::{verify_fefferman_stein, verify_scalar_hds, TrialConfig, VerificationReport};

#[test]
fn identity_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c1.cfg");
    fs::write(&cfg, "generator = identity\ntrials = 10\nseed = 5\n").unwrap();
    let out = dir.path().join("out");
    let code = run([
        "verify-scalar-hds",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report: VerificationReport =
        serde_json::from_str(&fs::read_to_string(out.join("scalar_hds-5.json")).unwrap()).unwrap();
    assert!(report.worst_case <= 1.0);
    assert_eq!(report.bound, Some(2.0));
}

#[test]
fn seed_flag_overrides_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, "seed = 5\ntrials = 3\n").unwrap();
    let code = run([
        "verify-scalar-hds",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "11",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(dir.path().join("scalar_hds-11.json").exists());
    assert!(!dir.path().join("scalar_hds-5.json").exists());
}

#[test]
fn kernel_subcommand_and_usage_errors() {
    assert_eq!(run(["kernel", "--kappa", "0", "--x", "1", "--y", "1"]), 0);
    assert_eq!(run(["kernel", "--kappa", "0.5"]), 0);
    assert_eq!(run(["verify-vector-hds", "--p", "3", "--q", "2"]), 2);
    assert_eq!(run(["no-such-command"]), 2);
    assert_eq!(run(["verify-scalar-hds", "--p", "0.5"]), 2);
    assert_eq!(run(["verify-scalar-hds", "--config", "/nonexistent/c.cfg"]), 2);
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "trials = 3\ntrails = 4\n").unwrap();
    assert_eq!(run(["verify-scalar-hds", "--config", cfg.to_str().unwrap()]), 2);
    let err = maxlab::cli::parse_config("trials = 3\ntrails = 4\n").unwrap_err();
    assert_eq!((err.line, err.key.as_deref()), (2, Some("trails")));
}

#[test]
fn checks_run_from_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("g.cfg");
    fs::write(&cfg, "grid_points = 256\nhalf_width = 12\n").unwrap();
    let c = cfg.to_str().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(run(["transform-check", "--config", c, "--kappa", "1", "--out", out]), 0);
    assert_eq!(run(["heat-check", "--config", c, "--kappa", "0.5", "--out", out]), 0);
    assert!(dir.path().join("heat-check-1.json").exists());
}

fn csv_rows(path: &std::path::Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(header, ["trial", "constant", "bound", "pass", "measure"]);
    r.records()
        .map(|x| x.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn report_files_have_one_row_per_trial_and_are_stable() {
    let cfg = TrialConfig {
        trials: 3,
        p: 1.0,
        ..TrialConfig::default()
    };
    let report = verify_scalar_hds(&cfg).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let pa = emit_report(&report, a.path()).unwrap();
    let pb = emit_report(&report, b.path()).unwrap();
    for (x, y) in pa.iter().zip(&pb) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
    let rows = csv_rows(&a.path().join("scalar_hds-1.csv"));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[2] == "2" && r[3] == "true"));
}

#[test]
fn bound_free_rows_have_empty_bound() {
    let cfg = TrialConfig {
        trials: 2,
        n_seq: 2,
        ..TrialConfig::default()
    };
    let report = verify_fefferman_stein(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_report(&report, dir.path()).unwrap();
    let rows = csv_rows(&dir.path().join("fefferman_stein-1.csv"));
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert_eq!(r[2], "");
        assert_eq!(r[3], report.pass.to_string());
    }
}

#[test]
fn unwritable_outdir_reports_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let report = verify_scalar_hds(&TrialConfig {
        trials: 1,
        ..TrialConfig::default()
    })
    .unwrap();
    let err = emit_report(&report, &blocker.join("sub")).unwrap_err();
    assert!(err.to_string().contains("file"));
}
