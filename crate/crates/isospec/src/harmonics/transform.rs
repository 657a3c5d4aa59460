//! Forward/inverse spherical harmonic transforms and the Legendre
//! (Funk–Hecke) transform between covariances and spectra.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::harmonics::coeffs::{AngularPowerSpectrum, HarmonicCoeffs};
use crate::harmonics::grid::{SphereGrid, SphereMap};
use crate::harmonics::legendre::{legendre_all, normalized_assoc_table, tri_index};
use crate::harmonics::quadrature::gauss_legendre;
use crate::numeric::KahanSum;

fn degree_selected(degrees: Option<&[u32]>, l: u32) -> bool {
    match degrees {
        None => true,
        Some(set) => set.contains(&l),
    }
}

/// Synthesis X(θ,φ) = Σ_{ℓ,m} Z_ℓ^m Y_ℓ^m(θ,φ) sampled on a grid.
///
/// `degrees` restricts the outer sum to a subset of degrees (the
/// fixed-degree component fields); `None` sums everything up to `c.lmax()`.
/// The map is real by the coefficient reality constraint, so only the
/// m ≥ 0 half is ever touched: the m and −m terms combine into
/// 2·Re(Z_ℓ^m Y_ℓ^m).
pub fn synthesize(
    c: &HarmonicCoeffs,
    grid: &SphereGrid,
    degrees: Option<&[u32]>,
) -> Result<SphereMap> {
    if c.lmax() > grid.lmax_exact() {
        return Err(Error::BandLimit {
            requested: c.lmax(),
            available: grid.lmax_exact(),
        });
    }
    let lmax = c.lmax();
    let n_phi = grid.n_phi();
    let mut values = vec![0.0; grid.n_theta() * n_phi];

    for (i, &theta) in grid.colatitudes().iter().enumerate() {
        let table = normalized_assoc_table(lmax, theta.cos());
        // Collapse the ℓ sum first: G_m = Σ_ℓ N̄_ℓ^m Z_ℓ^m.
        let mut g = vec![Complex64::new(0.0, 0.0); lmax as usize + 1];
        for l in 0..=lmax {
            if !degree_selected(degrees, l) {
                continue;
            }
            for m in 0..=l {
                g[m as usize] += table[tri_index(l, m)] * c.get(l, m as i32);
            }
        }
        for (j, &phi) in grid.longitudes().iter().enumerate() {
            let mut x = g[0].re;
            for (m, gm) in g.iter().enumerate().skip(1) {
                x += 2.0 * (gm * Complex64::from_polar(1.0, m as f64 * phi)).re;
            }
            values[i * n_phi + j] = x;
        }
    }
    SphereMap::new(grid.clone(), values)
}

/// Pointwise synthesis at an arbitrary location, same sum as [`synthesize`].
pub fn synthesize_at(
    c: &HarmonicCoeffs,
    theta: f64,
    phi: f64,
    degrees: Option<&[u32]>,
) -> Result<f64> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::invalid(format!("theta = {theta} outside [0, pi]")));
    }
    let lmax = c.lmax();
    let table = normalized_assoc_table(lmax, theta.cos());
    let mut acc = KahanSum::default();
    for l in 0..=lmax {
        if !degree_selected(degrees, l) {
            continue;
        }
        acc.add(table[tri_index(l, 0)] * c.get(l, 0).re);
        for m in 1..=l {
            let y = table[tri_index(l, m)] * Complex64::from_polar(1.0, m as f64 * phi);
            acc.add(2.0 * (y * c.get(l, m as i32)).re);
        }
    }
    Ok(acc.value())
}

/// Longitude sums F_m(θ_i) = Σ_j X_ij e^{−imφ_j} for 0 ≤ m ≤ lmax, direct.
fn longitude_sums_direct(map: &SphereMap, lmax: u32) -> Vec<Vec<Complex64>> {
    let longitudes = map.grid().longitudes();
    (0..map.grid().n_theta())
        .map(|i| {
            (0..=lmax)
                .map(|m| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, &phi) in longitudes.iter().enumerate() {
                        acc += map.value(i, j) * Complex64::from_polar(1.0, -(m as f64) * phi);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Longitude sums via FFT rows; identical to the direct path because the
/// longitudes are exactly the n-th roots of unity.
fn longitude_sums_fft(map: &SphereMap, lmax: u32) -> Vec<Vec<Complex64>> {
    let n_phi = map.grid().n_phi();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n_phi);
    (0..map.grid().n_theta())
        .map(|i| {
            let mut row: Vec<Complex64> = (0..n_phi)
                .map(|j| Complex64::new(map.value(i, j), 0.0))
                .collect();
            fft.process(&mut row);
            (0..=lmax as usize).map(|m| row[m]).collect()
        })
        .collect()
}

fn analyze_with(map: &SphereMap, lmax: u32, fm: Vec<Vec<Complex64>>) -> HarmonicCoeffs {
    let grid = map.grid();
    let dphi = std::f64::consts::TAU / grid.n_phi() as f64;
    let mut out = HarmonicCoeffs::zero(lmax);
    // Z_ℓ^m = Σ_i w_i N̄_ℓ^m(cosθ_i) F_m(θ_i) Δφ
    let tables: Vec<Vec<f64>> = grid
        .colatitudes()
        .iter()
        .map(|&t| normalized_assoc_table(lmax, t.cos()))
        .collect();
    for l in 0..=lmax {
        for m in 0..=l {
            let mut re = KahanSum::default();
            let mut im = KahanSum::default();
            for (i, &w) in grid.colat_weights().iter().enumerate() {
                let v = w * tables[i][tri_index(l, m)] * fm[i][m as usize];
                re.add(v.re);
                im.add(v.im);
            }
            let z = Complex64::new(re.value(), im.value()) * dphi;
            if m == 0 {
                // The φ-average of a real map is real; drop the residue.
                out.set_raw(l, 0, Complex64::new(z.re, 0.0));
            } else {
                out.set_raw(l, m as i32, z);
            }
        }
    }
    out
}

/// Analysis Z_ℓ^m = ∫ X(L) conj(Y_ℓ^m(L)) Ω(dL) by grid quadrature,
/// with the longitude transform done by direct summation.
///
/// Exact (to round-off) whenever the map is band-limited within the grid's
/// exact band limit.
pub fn analyze(map: &SphereMap, lmax: u32) -> Result<HarmonicCoeffs> {
    if lmax > map.grid().lmax_exact() {
        return Err(Error::BandLimit {
            requested: lmax,
            available: map.grid().lmax_exact(),
        });
    }
    Ok(analyze_with(map, lmax, longitude_sums_direct(map, lmax)))
}

/// [`analyze`] with the longitude sums computed by FFT. Agrees with the
/// direct path to 1e−12; the direct path is the correctness oracle.
pub fn analyze_fft(map: &SphereMap, lmax: u32) -> Result<HarmonicCoeffs> {
    if lmax > map.grid().lmax_exact() {
        return Err(Error::BandLimit {
            requested: lmax,
            available: map.grid().lmax_exact(),
        });
    }
    Ok(analyze_with(map, lmax, longitude_sums_fft(map, lmax)))
}

/// A spectrum entry that came out negative beyond round-off but within the
/// positive-definiteness tolerance; clamped to zero in the returned spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClampedEntry {
    pub degree: u32,
    pub value: f64,
}

/// Funk–Hecke transform of a covariance kernel on [−1, 1]:
/// f_ℓ = 2π ∫_{−1}^{1} C(x) P_ℓ(x) dx,
/// the convention under which C(cosγ) = Σ_ℓ f_ℓ (2ℓ+1)/(4π) P_ℓ(cosγ).
///
/// Entries in (−1e−12, 0) are round-off and clamped silently; entries in
/// [−1e−8, −1e−12] are clamped and returned in the report; anything below
/// −1e−8 is a genuine positive-definiteness failure and is an error.
pub fn legendre_transform_reporting<C>(
    cov: C,
    lmax: u32,
    nquad: usize,
) -> Result<(AngularPowerSpectrum, Vec<ClampedEntry>)>
where
    C: Fn(f64) -> f64,
{
    if nquad < lmax as usize + 1 {
        return Err(Error::invalid(format!(
            "nquad = {nquad} cannot resolve degree {lmax}; need at least lmax+1 nodes"
        )));
    }
    let (nodes, weights) = gauss_legendre(nquad)?;
    let mut sums = vec![KahanSum::default(); lmax as usize + 1];
    for (&x, &w) in nodes.iter().zip(weights.iter()) {
        let cw = cov(x) * w;
        let p = legendre_all(lmax, x)?;
        for (l, pl) in p.iter().enumerate() {
            sums[l].add(cw * pl);
        }
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut f = Vec::with_capacity(lmax as usize + 1);
    let mut clamped = Vec::new();
    for (l, s) in sums.iter().enumerate() {
        let v = two_pi * s.value();
        if v < -1e-8 {
            return Err(Error::NotPositiveDefinite {
                degree: l as u32,
                value: v,
            });
        }
        if v < 0.0 {
            if v <= -1e-12 {
                clamped.push(ClampedEntry {
                    degree: l as u32,
                    value: v,
                });
            }
            f.push(0.0);
        } else {
            f.push(v);
        }
    }
    Ok((AngularPowerSpectrum::new(f)?, clamped))
}

/// [`legendre_transform_reporting`] without the clamp report.
pub fn legendre_transform<C>(cov: C, lmax: u32, nquad: usize) -> Result<AngularPowerSpectrum>
where
    C: Fn(f64) -> f64,
{
    legendre_transform_reporting(cov, lmax, nquad).map(|(f, _)| f)
}

/// Covariance value C(cosγ) = Σ_ℓ f_ℓ (2ℓ+1)/(4π) P_ℓ(cosγ).
///
/// At cosγ = 1 this is the field variance.
pub fn covariance_eval(f: &AngularPowerSpectrum, cos_gamma: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&cos_gamma) {
        return Err(Error::invalid(format!(
            "cos(gamma) = {cos_gamma} outside [-1, 1]"
        )));
    }
    let p = legendre_all(f.lmax(), cos_gamma)?;
    let norm = 1.0 / (4.0 * std::f64::consts::PI);
    let mut acc = KahanSum::default();
    for (l, pl) in p.iter().enumerate() {
        acc.add(f.get(l as u32) * (2 * l + 1) as f64 * pl * norm);
    }
    Ok(acc.value())
}
