//! `isospec verify`: run the cross-module identity suite and write a report.
//! Exits 0 only when every check passes; a failing check exits 1 with the
//! offending names on stderr.

use std::path::Path;
use std::time::Instant;

use isospec::Error;

use crate::checks::{run_checks, sign_fault_provider, VerifyLevel, WignerProvider};
use crate::report::RunReport;

/// Test-harness hook: `ISOSPEC_FAULT_3J=sign` corrupts the 3j source so the
/// suite's ability to catch a bad symbol table can itself be exercised.
const FAULT_ENV: &str = "ISOSPEC_FAULT_3J";

pub fn run(level: &str, out: &Path) -> isospec::Result<u8> {
    let start = Instant::now();
    let level: VerifyLevel = level.parse()?;
    let provider = match std::env::var(FAULT_ENV) {
        Ok(v) if v == "sign" => sign_fault_provider(),
        Ok(v) => {
            return Err(Error::InvalidArgument(format!(
                "unsupported {FAULT_ENV} value {v:?}, expected \"sign\""
            )))
        }
        Err(_) => WignerProvider::default(),
    };

    let checks = run_checks(level, &provider);
    std::fs::create_dir_all(out)?;
    let mut report = RunReport::new(None);
    report.checks = checks;
    report.seconds = start.elapsed().as_secs_f64();
    let report = report.write(out)?;

    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let note = c.note.as_deref().map(|n| format!("; {n}")).unwrap_or_default();
        println!(
            "{status} {} (residual {:.3e}, tolerance {:.1e}){note}",
            c.name, c.residual, c.tolerance
        );
    }
    if report.all_passed() {
        Ok(0)
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        eprintln!("failed checks: {}", failed.join(", "));
        Ok(1)
    }
}
