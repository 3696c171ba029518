use std::path::{Path, PathBuf};
use std::process::Command;

use cqbisect::decoders::DecoderKind;
use cqbisect::ensembles::SourceEnsemble;
use cqbisect::harness::{
    run_point, sweep, trial_code, write_outputs, ChiReport, CodeSizes, ExperimentConfig, PointStatus, PointSummary,
    TrialRecord, PLOT_FILE, RECORDS_FILE, SUMMARY_FILE,
};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cqbisect")).args(args).output().unwrap()
}

fn without_time(mut rs: Vec<TrialRecord>) -> Vec<TrialRecord> {
    for r in &mut rs {
        r.wall_time_s = 0.0;
    }
    rs
}

// Seed 0, R = 0.3, δ = 0.1, 100 codes per point on {|0⟩, |+⟩}.
const FROZEN: [(&str, usize, f64); 15] = [
    ("orthogonal", 4, 1.57500000000000029e-01),
    ("pgm", 4, 1.03057634695312206e-01),
    ("sequential", 4, 2.37812499999999927e-01),
    ("full-sequential", 4, 2.37812500000000149e-01),
    ("full-pgm", 4, 1.03057634695312234e-01),
    ("orthogonal", 6, 2.31734793188054261e-01),
    ("pgm", 6, 1.74035733962585232e-01),
    ("sequential", 6, 3.92781904206285837e-01),
    ("full-sequential", 6, 3.20736789703369218e-01),
    ("full-pgm", 6, 1.18501952497607185e-01),
    ("orthogonal", 8, 1.44482420730414146e-01),
    ("pgm", 8, 1.03618429818253172e-01),
    ("sequential", 8, 2.67712588709222876e-01),
    ("full-sequential", 8, 2.07033686041832143e-01),
    ("full-pgm", 8, 6.96925924037863492e-02),
];

#[test]
fn reference_means_match_frozen_values() {
    let cfg = ExperimentConfig {
        methods: DecoderKind::ALL.to_vec(),
        ..Default::default()
    };
    let out = sweep(&cfg, &SourceEnsemble::zero_plus()).unwrap();
    assert_eq!(out.summary.points.len(), FROZEN.len());
    for (method, n, mean) in FROZEN {
        let p = out
            .summary
            .points
            .iter()
            .find(|p| p.method.name() == method && p.n == n)
            .unwrap();
        assert_eq!(p.trials, 100);
        let got = p.mean_p_err.unwrap();
        assert!((got - mean).abs() < 1e-9, "{method} n={n}: {got} vs {mean}");
    }
}

#[test]
fn same_seed_same_records() {
    let cfg = ExperimentConfig {
        trials: 6,
        ..Default::default()
    };
    let e = SourceEnsemble::zero_plus();
    for kind in DecoderKind::ALL {
        let a = without_time(run_point(&cfg, &e, 6, 4, kind).unwrap());
        let b = without_time(run_point(&cfg, &e, 6, 4, kind).unwrap());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
    let other = ExperimentConfig { seed: 1, ..cfg.clone() };
    let a = run_point(&cfg, &e, 6, 4, DecoderKind::Pgm).unwrap();
    let b = run_point(&other, &e, 6, 4, DecoderKind::Pgm).unwrap();
    assert_ne!(a[0].p_succ, b[0].p_succ);
}

#[test]
fn distinct_orthogonal_words_decode_perfectly() {
    let cfg = ExperimentConfig {
        ensemble_path: Some(data("orthogonal_pair.json")),
        trials: 1,
        delta: 1.0,
        ..Default::default()
    };
    let e = cfg.ensemble().unwrap();
    let (cb, _) = trial_code(&cfg, &e, 4, 2, 0).unwrap();
    assert_ne!(cb.word(0), cb.word(1));
    for kind in DecoderKind::ALL {
        let rs = run_point(&cfg, &e, 4, 2, kind).unwrap();
        assert!(rs[0].p_err.abs() <= 1e-10, "{kind}: {}", rs[0].p_err);
    }
}

#[test]
fn records_carry_consistent_error() {
    let cfg = ExperimentConfig {
        trials: 10,
        ..Default::default()
    };
    let e = SourceEnsemble::zero_plus();
    for kind in DecoderKind::ALL {
        for r in run_point(&cfg, &e, 6, 4, kind).unwrap() {
            assert!((r.p_err - r.recomputed_error()).abs() <= 1e-12);
            assert_eq!(r.rng, "ChaCha20");
            assert_eq!(r.violations.is_some(), kind.bisection_method().is_some());
        }
    }
}

#[test]
fn single_point_summary_is_the_run_point_aggregate() {
    let cfg = ExperimentConfig {
        n: vec![6],
        methods: vec![DecoderKind::Sequential],
        trials: 12,
        ..Default::default()
    };
    let e = SourceEnsemble::zero_plus();
    let out = sweep(&cfg, &e).unwrap();
    let rs = run_point(&cfg, &e, 6, 4, DecoderKind::Sequential).unwrap();
    let expected = PointSummary::from_records(6, 4, DecoderKind::Sequential, &rs);
    assert_eq!(out.summary.points.len(), 1);
    let got = &out.summary.points[0];
    assert_eq!(got.mean_p_err, expected.mean_p_err);
    assert_eq!(got.stderr, expected.stderr);
    assert_eq!(without_time(out.records), without_time(rs));
}

#[test]
fn failing_points_are_reported_not_dropped() {
    let cfg = ExperimentConfig {
        n: vec![4, 14],
        sizes: CodeSizes::Explicit(vec![2]),
        methods: vec![DecoderKind::Orthogonal, DecoderKind::FullPgm],
        trials: 2,
        dim_cap: 1024,
        ..Default::default()
    };
    let out = sweep(&cfg, &SourceEnsemble::zero_plus()).unwrap();
    let status: Vec<_> = out.summary.points.iter().map(|p| (p.n, p.status)).collect();
    assert_eq!(
        status,
        vec![(4, PointStatus::Ok), (4, PointStatus::Ok), (14, PointStatus::Error), (14, PointStatus::Error)]
    );
    assert_eq!(out.summary.failures(), 2);
    assert!(out.summary.points[2].error.as_deref().unwrap().contains("exceeds"));
}

#[test]
fn output_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        n: vec![4, 6],
        trials: 3,
        ..Default::default()
    };
    let out = sweep(&cfg, &SourceEnsemble::zero_plus()).unwrap();
    write_outputs(dir.path(), &out).unwrap();

    let lines = std::fs::read_to_string(dir.path().join(RECORDS_FILE)).unwrap();
    let back: Vec<TrialRecord> = lines.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(back, out.records);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap()).unwrap();
    assert_eq!(summary["rng"], "ChaCha20");
    assert_eq!(summary["points"].as_array().unwrap().len(), 6);

    let plot = std::fs::read_to_string(dir.path().join(PLOT_FILE)).unwrap();
    let rows: Vec<&str> = plot.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "n\tN\tmethod\tmean\tstderr");
    assert_eq!(rows.len(), 7);
    assert!(rows[1..].iter().all(|r| r.split('\t').count() == 5));
}

#[test]
fn chi_values_for_reference_files() {
    assert!(ChiReport::from_file(data("orthogonal_pair.json")).unwrap().render().starts_with("chi\t1.000000\n"));
    assert!(ChiReport::from_file(data("reference_ensemble.json")).unwrap().render().starts_with("chi\t0.600876\n"));
    let single = r#"{"local_dim": 2, "symbols": [{"prob": 1.0, "state": {"kind": "pure", "amplitudes": [[0.6, 0.0], [0.0, 0.8]]}}]}"#;
    let r = ChiReport::new(&SourceEnsemble::from_json_str(single).unwrap());
    assert!(r.render().starts_with("chi\t0.000000\n"));
}

#[test]
fn cli_exit_codes() {
    let out = cli(&["sweep", "--n", "4", "--methods"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(summary["points"].as_array().unwrap().is_empty());

    assert_eq!(cli(&["sweep", "--methods", "nope"]).status.code(), Some(2));
    assert_eq!(cli(&["sweep", "--sizes", "3"]).status.code(), Some(2));

    let partial = cli(&["sweep", "--n", "4,13", "--sizes", "2", "--methods", "orthogonal", "--trials", "1"]);
    assert_eq!(partial.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"local_dim\": 2,\n  \"symbols\": [oops]\n}\n").unwrap();
    let out = cli(&["chi", "--ensemble", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = cli(&["chi", "--ensemble", data("orthogonal_pair.json").to_str().unwrap()]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "chi\t1.000000\nS(avg)\t1.000000\nS(0)\t0.000000\nS(1)\t0.000000\n");
}

#[test]
fn cli_decode_matches_sweep_record() {
    let out = cli(&["decode", "--n", "6", "--sizes", "4", "--method", "pgm", "--code-index", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let cfg = ExperimentConfig { trials: 3, ..Default::default() };
    let rs = run_point(&cfg, &SourceEnsemble::zero_plus(), 6, 4, DecoderKind::Pgm).unwrap();
    assert!(text.contains(&format!("P_err={:.12}", rs[2].p_err)));
    assert_eq!(text.lines().count(), 2 + 4);
}
