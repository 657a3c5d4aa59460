//! CSV serialization of coefficient arrays, maps, and spectra.
//!
//! All floats are written with 17 significant digits, which round-trips
//! f64 exactly. Formats:
//! coefficients `l,m,re,im` (m ≥ 0 rows only, canonical order),
//! maps `theta,phi,value` (row-major over the grid),
//! spectra `l,f`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonics::coeffs::{AngularPowerSpectrum, HarmonicCoeffs};
use crate::harmonics::grid::{SphereGrid, SphereMap};

/// 17-significant-digit float format; parses back to the identical bits.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("bad {what} field: {s:?}")))
}

fn parse_u32(s: &str, what: &str) -> Result<u32> {
    s.trim()
        .parse::<u32>()
        .map_err(|_| Error::Parse(format!("bad {what} field: {s:?}")))
}

fn expect_header<I>(lines: &mut I, header: &str, path: &Path) -> Result<()>
where
    I: Iterator<Item = std::io::Result<String>>,
{
    match lines.next() {
        Some(line) => {
            let line = line?;
            if line.trim() == header {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "{}: expected header {header:?}, got {line:?}",
                    path.display()
                )))
            }
        }
        None => Err(Error::Parse(format!(
            "{}: empty file, expected header {header:?}",
            path.display()
        ))),
    }
}

fn split_fields<'a>(line: &'a str, n: usize, what: &str) -> Result<Vec<&'a str>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != n {
        return Err(Error::Parse(format!(
            "{what} row needs {n} fields, got {}: {line:?}",
            fields.len()
        )));
    }
    Ok(fields)
}

/// Writes a coefficient array as `l,m,re,im` rows for m ≥ 0.
pub fn write_coeffs_csv(path: &Path, c: &HarmonicCoeffs) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "l,m,re,im")?;
    for (l, m, z) in c.iter() {
        writeln!(w, "{l},{m},{},{}", fmt_f64(z.re), fmt_f64(z.im))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a coefficient CSV written by [`write_coeffs_csv`]. The full
/// m ≥ 0 triangle must be present in canonical order.
pub fn read_coeffs_csv(path: &Path) -> Result<HarmonicCoeffs> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    expect_header(&mut lines, "l,m,re,im", path)?;
    let mut rows = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f = split_fields(&line, 4, "coefficient")?;
        rows.push((
            parse_u32(f[0], "l")?,
            parse_u32(f[1], "m")?,
            Complex64::new(parse_f64(f[2], "re")?, parse_f64(f[3], "im")?),
        ));
    }
    let lmax = match rows.last() {
        Some(&(l, _, _)) => l,
        None => return Err(Error::Parse("coefficient file has no rows".into())),
    };
    let expected = ((lmax as usize + 1) * (lmax as usize + 2)) / 2;
    if rows.len() != expected {
        return Err(Error::Parse(format!(
            "coefficient file has {} rows, expected the full triangle of {expected} up to l = {lmax}",
            rows.len()
        )));
    }
    let mut c = HarmonicCoeffs::zero(lmax);
    let mut iter = rows.into_iter();
    for l in 0..=lmax {
        for m in 0..=l {
            let (rl, rm, z) = iter.next().expect("row count checked above");
            if rl != l || rm != m {
                return Err(Error::Parse(format!(
                    "coefficient rows out of canonical order at l={rl}, m={rm}"
                )));
            }
            if m == 0 && z.im != 0.0 {
                return Err(Error::Parse(format!(
                    "Z_{l}^0 must be real, file has imaginary part {}",
                    z.im
                )));
            }
            c.set(l, m as i32, z)
                .map_err(|e| Error::Parse(format!("invalid coefficient row: {e}")))?;
        }
    }
    Ok(c)
}

/// Writes a sampled map as `theta,phi,value` rows in grid row-major order.
pub fn write_map_csv(path: &Path, map: &SphereMap) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "theta,phi,value")?;
    let grid = map.grid();
    for (i, &theta) in grid.colatitudes().iter().enumerate() {
        for (j, &phi) in grid.longitudes().iter().enumerate() {
            writeln!(
                w,
                "{},{},{}",
                fmt_f64(theta),
                fmt_f64(phi),
                fmt_f64(map.value(i, j))
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a map CSV written by [`write_map_csv`], reconstructing the grid
/// from the row structure and checking the sample points against it.
pub fn read_map_csv(path: &Path) -> Result<SphereMap> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    expect_header(&mut lines, "theta,phi,value", path)?;
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f = split_fields(&line, 3, "map")?;
        rows.push((
            parse_f64(f[0], "theta")?,
            parse_f64(f[1], "phi")?,
            parse_f64(f[2], "value")?,
        ));
    }
    if rows.is_empty() {
        return Err(Error::Parse("map file has no rows".into()));
    }
    // Longitudes repeat with the first colatitude until θ changes.
    let theta0 = rows[0].0;
    let n_phi = rows.iter().take_while(|r| r.0 == theta0).count();
    if n_phi == 0 || rows.len() % n_phi != 0 {
        return Err(Error::Parse("map rows do not form a rectangular grid".into()));
    }
    let n_theta = rows.len() / n_phi;
    let grid = SphereGrid::new(n_theta, n_phi)?;
    let mut values = Vec::with_capacity(rows.len());
    for (idx, (theta, phi, v)) in rows.into_iter().enumerate() {
        let i = idx / n_phi;
        let j = idx % n_phi;
        if (theta - grid.colatitudes()[i]).abs() > 1e-12
            || (phi - grid.longitudes()[j]).abs() > 1e-12
        {
            return Err(Error::Parse(format!(
                "map sample ({theta},{phi}) does not match the Gauss grid node ({},{})",
                grid.colatitudes()[i],
                grid.longitudes()[j]
            )));
        }
        values.push(v);
    }
    SphereMap::new(grid, values)
}

/// Writes a power spectrum as `l,f` rows.
pub fn write_spectrum_csv(path: &Path, f: &AngularPowerSpectrum) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "l,f")?;
    for (l, v) in f.values().iter().enumerate() {
        writeln!(w, "{l},{}", fmt_f64(*v))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a spectrum CSV written by [`write_spectrum_csv`]; degrees must be
/// consecutive from 0.
pub fn read_spectrum_csv(path: &Path) -> Result<AngularPowerSpectrum> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    expect_header(&mut lines, "l,f", path)?;
    let mut f = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_fields(&line, 2, "spectrum")?;
        let l = parse_u32(fields[0], "l")?;
        if l as usize != f.len() {
            return Err(Error::Parse(format!(
                "spectrum degrees must be consecutive from 0; got {l} at position {}",
                f.len()
            )));
        }
        f.push(parse_f64(fields[1], "f")?);
    }
    AngularPowerSpectrum::new(f)
}
