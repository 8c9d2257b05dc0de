use std::path::Path;
use std::process::Command;

use svp::harness::fixtures::lowrank_truth;
use svp::harness::{
    emit_results, ingest_ratings, manifest_path, params, read_manifest, read_predictions, read_results, run_experiment,
    same_results, write_predictions, ExperimentConfig, ExperimentKind, Manifest, Metric, ResultRow,
};
use svp::{rng, Error};

fn small(kind: ExperimentKind, json: &str, dir: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::from_json(json, Some(kind)).unwrap();
    cfg.output = dir.join(format!("{}.csv", kind.name()));
    cfg
}

fn svp_bin(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_svp"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
        .status
        .code()
        .expect("exit code")
}

#[test]
fn cli_exit_codes_follow_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let path = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        path
    };

    let ok = write("ok.json", r#"{"sizes": [30], "trials": 1}"#);
    let out = dir.path().join("ok.csv");
    let code = svp_bin(&["rank-sweep", "--config", ok.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let manifest = read_manifest(&out).unwrap();
    assert!(manifest.passed);
    assert_eq!(manifest.rows, read_results(&out).unwrap().len());

    let unknown = write("bad.json", r#"{"sizes": [30], "bogus": 1}"#);
    assert_eq!(svp_bin(&["rank-sweep", "--config", unknown.to_str().unwrap()]), 2);

    let mismatch = write("kind.json", r#"{"kind": "ratings"}"#);
    assert_eq!(svp_bin(&["rank-sweep", "--config", mismatch.to_str().unwrap()]), 2);

    // too few iterations to reach the residual target: a recorded failure, not an error
    let short = write("short.json", r#"{"sizes": [20], "ranks": [2], "trials": 1, "max_iterations": 2}"#);
    let out = dir.path().join("short.csv");
    let code = svp_bin(&["armp-timing", "--config", short.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(!read_manifest(&out).unwrap().failures.is_empty());
}

#[test]
fn config_rejects_bad_values() {
    for json in [
        r#"{"trials": 0}"#,
        r#"{"densities": [1.5]}"#,
        r#"{"ranks": []}"#,
        r#"{"step_delta": 1.0}"#,
        r#"{"noise": {"model": "gaussian", "level": -1.0}}"#,
    ] {
        assert!(
            matches!(ExperimentConfig::from_json(json, Some(ExperimentKind::NoiseRobustness)), Err(Error::Config(_))),
            "{json}"
        );
    }
    assert!(ExperimentConfig::from_json(r#"{"sizes": [1, 2, 3]}"#, Some(ExperimentKind::ThresholdSweep)).is_err());
    assert!(ExperimentConfig::from_json("{}", None).is_err());
    for kind in ExperimentKind::ALL {
        ExperimentConfig::defaults(kind).validate().unwrap();
        assert_eq!(kind.name().parse::<ExperimentKind>().unwrap(), kind);
    }
}

#[test]
fn harness_errors_surface() {
    let dir = tempfile::tempdir().unwrap();
    let logo = small(ExperimentKind::LogoRecon, r#"{"measurements": 0}"#, dir.path());
    assert!(matches!(run_experiment(&logo), Err(Error::NoMeasurements)));

    let huge = small(ExperimentKind::ArmpTiming, r#"{"sizes": [400], "trials": 1}"#, dir.path());
    assert!(matches!(run_experiment(&huge), Err(Error::MemoryBudget { .. })));

    let starved = small(
        ExperimentKind::ThresholdSweep,
        r#"{"sizes": [30, 40, 50, 60], "trials": 1, "max_iterations": 1}"#,
        dir.path(),
    );
    assert!(matches!(run_experiment(&starved), Err(Error::NotBracketed(_))));
}

#[test]
fn reruns_reproduce_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(
        ExperimentKind::NoiseRobustness,
        r#"{"sizes": [60], "densities": [0.4], "trials": 2, "noise": {"model": "gaussian", "level": 0.05}}"#,
        dir.path(),
    );
    let first = run_experiment(&cfg).unwrap();
    let second = run_experiment(&cfg).unwrap();
    assert!(!first.rows.is_empty());
    assert!(same_results(&first.rows, &second.rows));

    let other = ExperimentConfig { seed: cfg.seed + 1, ..cfg.clone() };
    assert!(!same_results(&first.rows, &run_experiment(&other).unwrap().rows));
}

#[test]
fn results_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested").join("out.csv");
    let rows = vec![
        ResultRow::new("demo", params(&[("n", "10".into()), ("p", "0.5".into())]), Metric::RelError, 1.25e-7, 0, 9),
        ResultRow::new("demo", params(&[("n", "10".into())]), Metric::WallMs, 3.5, 1, 10),
    ];
    let manifest = Manifest::new("demo", serde_json::json!({"n": 10}), "0".into(), vec!["one failure".into()]);
    emit_results(&rows, &path, &manifest).unwrap();
    assert_eq!(read_results(&path).unwrap(), rows);
    let back = read_manifest(&path).unwrap();
    assert_eq!(back.rows, 2);
    assert!(!back.passed);
    assert!(manifest_path(&path).exists());
}

#[test]
fn ratings_predictions_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("ratings.dat");
    let truth = lowrank_truth(12, 9, 2, &mut rng::seeded(3));
    let mut text = String::new();
    for u in 0..12 {
        for i in 0..9 {
            if (u + i) % 3 != 0 {
                text.push_str(&format!("u{u}::m{i}::{}::0\n", truth.entry(u, i)));
            }
        }
    }
    std::fs::write(&input, text).unwrap();
    let data = ingest_ratings(&input, None, 0.75, 5).unwrap();
    assert_eq!((data.rows(), data.cols()), (12, 9));
    assert_eq!(data.ratings.len(), 72);
    assert_eq!(data.in_train.iter().filter(|&&t| t).count(), 54);

    let out = dir.path().join("pred.csv");
    write_predictions(&data, &truth, &out).unwrap();
    let preds = read_predictions(&out).unwrap();
    assert_eq!(preds.len(), 18);
    for (user, item, value) in preds {
        // the model is indexed by dense ids, the file by original ids
        let u = data.users.iter().position(|x| *x == user).unwrap();
        let i = data.items.iter().position(|x| *x == item).unwrap();
        assert!((value - truth.entry(u, i)).abs() <= 1e-12);
    }
}
