use maxlab::verification::{
    check_pointwise_domination, explore_conjecture, replay_witness, verify_banach_hds, verify_dunkl_fs,
    verify_fefferman_stein, verify_scalar_hds, verify_vector_hds, GeneratorFamily, TrialConfig, VerificationReport,
};

fn finite(trials: usize) -> TrialConfig {
    TrialConfig {
        trials,
        ..TrialConfig::default()
    }
}

fn grid(trials: usize) -> TrialConfig {
    TrialConfig {
        trials,
        grid_points: 128,
        half_width: 8.0,
        n_seq: 2,
        n_seq_sweep: vec![1, 2, 4],
        sup_steps: 12,
        direct_trials: 1,
        ..TrialConfig::default()
    }
}

fn assert_replays(report: &VerificationReport, tol: f64) {
    assert!(!report.witnesses.is_empty(), "{}", report.suite);
    for w in &report.witnesses {
        let v = replay_witness(report, w).unwrap();
        let scale = w.constant.abs().max(1.0);
        assert!(
            (v - w.constant).abs() <= tol * scale,
            "{} {}: {v} vs {}",
            report.suite,
            w.measure,
            w.constant
        );
    }
}

fn assert_worst_is_max(report: &VerificationReport) {
    for m in report
        .measures
        .iter()
        .filter(|m| report.per_trial.iter().any(|r| r.measure == m.measure))
    {
        let max = report
            .per_trial
            .iter()
            .filter(|r| r.measure == m.measure)
            .map(|r| r.constant)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(m.worst_case, max, "{}", m.measure);
    }
}

#[test]
fn finite_witnesses_replay_exactly() {
    let vector = TrialConfig {
        p: 2.0,
        q: 3.0,
        ..finite(12)
    };
    let banach = TrialConfig {
        q: 3.0,
        generator: GeneratorFamily::Permutation,
        killing: 0.2,
        ..finite(12)
    };
    for r in [
        verify_scalar_hds(&finite(12)).unwrap(),
        verify_vector_hds(&vector).unwrap(),
        verify_banach_hds(&banach).unwrap(),
        explore_conjecture(&finite(12)).unwrap(),
    ] {
        assert_replays(&r, 1e-12);
        assert_worst_is_max(&r);
    }
}

#[test]
fn grid_witnesses_replay() {
    let dunkl = TrialConfig { q: 3.0, ..grid(2) };
    for r in [
        verify_fefferman_stein(&grid(3)).unwrap(),
        verify_dunkl_fs(&dunkl).unwrap(),
        check_pointwise_domination(&grid(1)).unwrap(),
    ] {
        assert_replays(&r, 1e-6);
        assert_worst_is_max(&r);
    }
}

#[test]
fn identical_configs_give_identical_reports() {
    let cfg = finite(25);
    assert_eq!(
        verify_banach_hds(&cfg).unwrap().canonical_json(),
        verify_banach_hds(&cfg).unwrap().canonical_json()
    );
    let g = grid(2);
    assert_eq!(
        verify_dunkl_fs(&g).unwrap().canonical_json(),
        verify_dunkl_fs(&g).unwrap().canonical_json()
    );
}

#[test]
fn echoed_config_reproduces_the_run() {
    let cfg = TrialConfig {
        seed: 42,
        p: 1.5,
        q: 4.0,
        ..finite(10)
    };
    let first = verify_vector_hds(&cfg).unwrap();
    let echoed: VerificationReport = serde_json::from_str(&first.to_json()).unwrap();
    let again = verify_vector_hds(&echoed.config).unwrap();
    assert_eq!(first.canonical_json(), again.canonical_json());
}

#[test]
fn worst_case_is_monotone_in_refinement() {
    let coarse = TrialConfig {
        sup_steps: 8,
        ..finite(20)
    };
    let fine = TrialConfig {
        sup_ratio: 2f64.sqrt(),
        sup_steps: 16,
        ..finite(20)
    };
    let a = verify_scalar_hds(&coarse).unwrap();
    let b = verify_scalar_hds(&fine).unwrap();
    for m in ["weak", "strong"] {
        assert!(b.measure(m).unwrap().worst_case >= a.measure(m).unwrap().worst_case);
    }
    let more = verify_scalar_hds(&finite(60)).unwrap();
    assert!(
        more.measure("strong").unwrap().worst_case
            >= verify_scalar_hds(&finite(20))
                .unwrap()
                .measure("strong")
                .unwrap()
                .worst_case
    );
}

#[test]
fn reports_carry_the_soundness_note() {
    let r = verify_scalar_hds(&finite(2)).unwrap();
    assert!(r.notes.iter().any(|n| n.contains("lower bounds")));
    let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    for key in [
        "suite",
        "config",
        "per_trial",
        "worst_case",
        "bound",
        "pass",
        "witnesses",
        "runtime_ms",
    ] {
        assert!(json.get(key).is_some(), "{key}");
    }
}
