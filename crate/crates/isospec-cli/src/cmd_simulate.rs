//! `isospec simulate`: draw a replicate ensemble and write it with its
//! manifest. Reruns with the same config produce byte-identical replicate
//! files; only the recorded timings differ.

use std::path::Path;
use std::time::Instant;

use isospec::simulate::{run_ensemble, write_ensemble, SimulationConfig};
use sha2::{Digest, Sha256};

use crate::report::RunReport;

pub fn run(config_path: &Path, out: &Path, seed: Option<u64>) -> isospec::Result<()> {
    let start = Instant::now();
    let bytes = std::fs::read(config_path)?;
    let hash = hex::encode(Sha256::digest(&bytes));
    let mut config: SimulationConfig = serde_json::from_slice(&bytes)?;
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    config.validate()?;

    let ensemble = run_ensemble(&config)?;
    let seconds = start.elapsed().as_secs_f64();
    let manifest = write_ensemble(out, &ensemble, &config, seconds)?;

    let mut report = RunReport::new(Some(hash));
    report.outputs = manifest.replicates.iter().map(|r| r.file.clone()).collect();
    report.outputs.push("manifest.json".into());
    report.seconds = start.elapsed().as_secs_f64();
    report.write(out)?;
    Ok(())
}
