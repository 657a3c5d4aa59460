//! `isospec estimate`: load a simulated ensemble by its manifest and write
//! the power spectrum plus any requested polyspectrum tables.

use std::path::Path;
use std::time::Instant;

use isospec::harmonics::write_spectrum_csv;
use isospec::simulate::read_ensemble;
use isospec::spectra::{polyspectrum_estimate, power_spectrum_estimate};
use isospec::Error;

use crate::report::{hash_file, RunReport};

/// Comma-separated estimation orders, each in 3..=5.
fn parse_orders(text: &str) -> isospec::Result<Vec<u32>> {
    let mut orders = Vec::new();
    for part in text.split(',') {
        let p: u32 = part
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("order {part:?} is not an integer")))?;
        if !(3..=5).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "estimation order must be 3, 4, or 5, got {p}"
            )));
        }
        if !orders.contains(&p) {
            orders.push(p);
        }
    }
    if orders.is_empty() {
        return Err(Error::InvalidArgument(
            "the order list is empty".to_string(),
        ));
    }
    Ok(orders)
}

pub fn run(
    dir: &Path,
    orders: Option<&str>,
    lmax: Option<u32>,
    out: &Path,
) -> isospec::Result<()> {
    let start = Instant::now();
    let orders = match orders {
        Some(text) => parse_orders(text)?,
        None => Vec::new(),
    };
    let hash = hash_file(&dir.join("manifest.json"))?;
    let (ensemble, manifest) = read_ensemble(dir)?;
    let lmax = lmax.unwrap_or(manifest.config.lmax);

    std::fs::create_dir_all(out)?;
    let fhat = power_spectrum_estimate(&ensemble);
    write_spectrum_csv(&out.join("power_spectrum.csv"), &fhat)?;
    let mut outputs = vec!["power_spectrum.csv".to_string()];

    for &p in &orders {
        let table = polyspectrum_estimate(p, &ensemble, lmax)?;
        let name = format!("polyspectrum_p{p}.json");
        let mut text = serde_json::to_string_pretty(&table)?;
        text.push('\n');
        std::fs::write(out.join(&name), text)?;
        outputs.push(name);
    }

    let mut report = RunReport::new(Some(hash));
    report.outputs = outputs;
    report.seconds = start.elapsed().as_secs_f64();
    report.write(out)?;
    Ok(())
}
