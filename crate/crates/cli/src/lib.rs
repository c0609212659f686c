//! Config-driven runner for the itlab experiments: each run validates its
//! configuration, executes one experiment, writes its tables into the
//! output directory and records a manifest with digests of every file.

pub mod config;
pub mod error;
pub mod experiments;
pub mod export;
pub mod manifest;

use std::time::Instant;

use serde_json::json;

pub use config::{ExperimentConfig, ExperimentKind, Format};
pub use error::{CliError, CliResult};
pub use export::Table;
pub use manifest::RunManifest;

/// Runs `kind` under `cfg` and writes its outputs and manifest.
pub fn run(kind: ExperimentKind, cfg: &ExperimentConfig) -> CliResult<RunManifest> {
    cfg.validate(kind)?;
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let start = Instant::now();
    let outcome = experiments::run(kind, cfg)?;
    let mut outputs = Vec::with_capacity(outcome.tables.len());
    for table in &outcome.tables {
        let meta = json!({
            "experiment": kind.name(),
            "table": table.name,
            "seed": cfg.seed,
            "version": env!("CARGO_PKG_VERSION"),
        });
        let path = export::export(table, dir, cfg.output.format, &meta)?;
        outputs.push(manifest::digest_file(&path)?);
    }
    let manifest = RunManifest {
        experiment: kind.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        rng_algorithm: itlab_core::rng::RNG_ALGORITHM.to_string(),
        seed: cfg.seed,
        wall_time_s: start.elapsed().as_secs_f64(),
        config: cfg.clone(),
        outputs,
        summary: outcome
            .summary
            .into_iter()
            .filter(|(_, v)| v.is_finite())
            .collect(),
    };
    manifest.write(dir)?;
    Ok(manifest)
}
