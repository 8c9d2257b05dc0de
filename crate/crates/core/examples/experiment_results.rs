//! Runs a small configured experiment and writes its rows and manifest, the
//! same way the `svp` binary does.

use svp::harness::{emit_results, read_results, run_experiment, same_results, ExperimentConfig, ExperimentKind, Manifest};

fn main() -> svp::Result<()> {
    let mut cfg = ExperimentConfig::from_json(
        r#"{"sizes": [200], "densities": [0.2], "trials": 2, "noise": {"model": "gaussian", "level": 0.05}}"#,
        Some(ExperimentKind::NoiseRobustness),
    )?;
    cfg.output = std::env::temp_dir().join("svp-noise.csv");

    let outcome = run_experiment(&cfg)?;
    let manifest = Manifest::new(cfg.kind.name(), cfg.to_json(), "0".into(), outcome.failures.clone());
    emit_results(&outcome.rows, &cfg.output, &manifest)?;
    for row in &outcome.rows {
        println!("{:<40} {:?} = {:.4e}", row.params, row.metric, row.value);
    }
    println!("passed: {}", outcome.passed());
    println!("rows read back identical: {}", same_results(&outcome.rows, &read_results(&cfg.output)?));
    Ok(())
}
