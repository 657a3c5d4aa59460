//! On-disk layout of an ensemble: one coefficient CSV per replicate plus a
//! JSON manifest carrying the config, per-file checksums, and timing.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{seed_lineage, SimulationConfig};
use crate::error::{Error, Result};
use crate::harmonics::{read_coeffs_csv, write_coeffs_csv};
use crate::spectra::CoeffEnsemble;

const MANIFEST_FILE: &str = "manifest.json";

/// One replicate file and the SHA-256 of its bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    /// File name relative to the ensemble directory.
    pub file: String,
    /// Lowercase hex digest.
    pub sha256: String,
}

/// Contents of `manifest.json`.
///
/// The embedded config makes a written ensemble self-describing, and the
/// checksums let [`read_ensemble`] refuse silently corrupted inputs instead
/// of feeding them to the estimators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleManifest {
    pub config: SimulationConfig,
    pub replicates: Vec<ReplicateRecord>,
    /// Wall-clock seconds the caller spent producing the ensemble; the only
    /// field expected to differ between reruns of the same config.
    pub seconds: f64,
}

/// Write every replicate and the manifest into `dir`, creating it if needed.
///
/// The ensemble must actually match the config it is stored with. File
/// contents are a pure function of the config, so reruns produce identical
/// bytes apart from the recorded seconds.
pub fn write_ensemble(
    dir: &Path,
    ensemble: &CoeffEnsemble,
    config: &SimulationConfig,
    seconds: f64,
) -> Result<EnsembleManifest> {
    config.validate()?;
    if ensemble.n_replicates() != config.n_replicates || ensemble.lmax() != config.lmax {
        return Err(Error::invalid(format!(
            "ensemble ({} replicates, lmax {}) does not match config ({}, {})",
            ensemble.n_replicates(),
            ensemble.lmax(),
            config.n_replicates,
            config.lmax
        )));
    }
    fs::create_dir_all(dir)?;
    let mut replicates = Vec::with_capacity(ensemble.n_replicates());
    for (i, rep) in ensemble.replicates().iter().enumerate() {
        let file = format!("replicate_{i:04}.csv");
        let path = dir.join(&file);
        write_coeffs_csv(&path, rep)?;
        let sha256 = hex::encode(Sha256::digest(fs::read(&path)?));
        replicates.push(ReplicateRecord { file, sha256 });
    }
    let manifest = EnsembleManifest {
        config: config.clone(),
        replicates,
        seconds,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(manifest)
}

/// Load an ensemble written by [`write_ensemble`].
///
/// Every replicate file is checked against its recorded digest and band
/// limit before anything is returned, so a truncated or edited file fails
/// loudly with its name.
pub fn read_ensemble(dir: &Path) -> Result<(CoeffEnsemble, EnsembleManifest)> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
    let manifest: EnsembleManifest = serde_json::from_str(&text)?;
    manifest.config.validate()?;
    if manifest.replicates.len() != manifest.config.n_replicates {
        return Err(Error::Parse(format!(
            "manifest lists {} replicate files but the config says {}",
            manifest.replicates.len(),
            manifest.config.n_replicates
        )));
    }
    let mut reps = Vec::with_capacity(manifest.replicates.len());
    for record in &manifest.replicates {
        let path = dir.join(&record.file);
        if !path.is_file() {
            return Err(Error::Parse(format!(
                "manifest names {} but the file is missing",
                record.file
            )));
        }
        let digest = hex::encode(Sha256::digest(fs::read(&path)?));
        if digest != record.sha256 {
            return Err(Error::Parse(format!(
                "checksum mismatch for {}",
                record.file
            )));
        }
        let coeffs = read_coeffs_csv(&path)?;
        if coeffs.lmax() != manifest.config.lmax {
            return Err(Error::Parse(format!(
                "{} has band limit {} but the manifest says {}",
                record.file,
                coeffs.lmax(),
                manifest.config.lmax
            )));
        }
        reps.push(coeffs);
    }
    let mut ensemble = CoeffEnsemble::new(reps)?;
    ensemble.set_seed_lineage(seed_lineage(manifest.config.master_seed));
    Ok((ensemble, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{run_ensemble, BaseArraySpec, FieldSpec, M0Law};
    use std::fs::OpenOptions;
    use std::io::Write;

    fn sample_config() -> SimulationConfig {
        let base =
            BaseArraySpec::uniform(vec![1.0, 0.5, 0.25], M0Law::CenteredExponential { rate: 2.0 })
                .unwrap();
        SimulationConfig {
            lmax: 2,
            n_replicates: 3,
            master_seed: 5,
            field: FieldSpec::Isotropized { base },
        }
    }

    #[test]
    fn write_then_read_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let config = sample_config();
        let e = run_ensemble(&config).unwrap();
        let manifest = write_ensemble(dir.path(), &e, &config, 1.25).unwrap();
        assert_eq!(manifest.seconds, 1.25);
        assert_eq!(manifest.replicates.len(), 3);
        assert!(dir.path().join("manifest.json").is_file());
        assert!(dir.path().join("replicate_0002.csv").is_file());

        let (back, read_manifest) = read_ensemble(dir.path()).unwrap();
        assert_eq!(back.replicates(), e.replicates());
        assert_eq!(back.seed_lineage(), e.seed_lineage());
        assert_eq!(read_manifest, manifest);
    }

    #[test]
    fn corruption_and_inconsistency_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let config = sample_config();
        let e = run_ensemble(&config).unwrap();
        write_ensemble(dir.path(), &e, &config, 0.0).unwrap();

        let victim = dir.path().join("replicate_0001.csv");
        let pristine = fs::read(&victim).unwrap();
        let mut file = OpenOptions::new().append(true).open(&victim).unwrap();
        file.write_all(b"0,0,9.0,0.0\n").unwrap();
        drop(file);
        let err = read_ensemble(dir.path()).unwrap_err();
        assert!(err.to_string().contains("checksum mismatch"), "{err}");
        fs::write(&victim, pristine).unwrap();
        read_ensemble(dir.path()).unwrap();

        // Claiming more replicates than were written is caught before any
        // file is opened.
        let manifest_path = dir.path().join("manifest.json");
        let mut manifest: EnsembleManifest =
            serde_json::from_str(&fs::read_to_string(&manifest_path).unwrap()).unwrap();
        manifest.config.n_replicates = 5;
        fs::write(&manifest_path, serde_json::to_string(&manifest).unwrap()).unwrap();
        let err = read_ensemble(dir.path()).unwrap_err();
        assert!(err.to_string().contains("replicate files"), "{err}");

        // A missing replicate file is an ensemble inconsistency, not an
        // environmental I/O failure.
        manifest.config.n_replicates = 3;
        fs::write(&manifest_path, serde_json::to_string(&manifest).unwrap()).unwrap();
        fs::remove_file(&victim).unwrap();
        let err = read_ensemble(dir.path()).unwrap_err();
        assert!(
            matches!(err, Error::Parse(_)) && err.to_string().contains("missing"),
            "{err}"
        );
    }

    #[test]
    fn reruns_write_identical_bytes() {
        let config = sample_config();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        write_ensemble(dir_a.path(), &run_ensemble(&config).unwrap(), &config, 0.0).unwrap();
        write_ensemble(dir_b.path(), &run_ensemble(&config).unwrap(), &config, 0.0).unwrap();
        for name in [
            "replicate_0000.csv",
            "replicate_0001.csv",
            "replicate_0002.csv",
            "manifest.json",
        ] {
            let a = fs::read(dir_a.path().join(name)).unwrap();
            let b = fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between identical runs");
        }
    }

    #[test]
    fn write_rejects_mismatched_pairs() {
        let dir = tempfile::tempdir().unwrap();
        let config = sample_config();
        let e = run_ensemble(&config).unwrap();
        let mut wrong = config.clone();
        wrong.n_replicates = 4;
        assert!(write_ensemble(dir.path(), &e, &wrong, 0.0).is_err());
    }
}
