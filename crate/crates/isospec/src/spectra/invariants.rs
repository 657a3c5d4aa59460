//! Rotation-invariant products of spherical harmonics and the expansion of
//! the three-point cumulant function in the bispectrum.
//!
//! The two-point invariant reduces to a Legendre polynomial of the inner
//! product; the three-point invariant contracts three harmonics with a 3j
//! symbol. Fixing the third location at the pole gives the reduced kernel
//! used to expand collocated-axis three-point cumulants, with the table
//! entries as coefficients.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonics::{normalized_assoc_table, tri_index};
use crate::numeric::KahanComplex;
use crate::wigner::{triangle_ok, vector_to_direction, wigner_3j};

use super::PolySpectrum;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

fn checked_direction(v: [f64; 3]) -> Result<(f64, f64)> {
    let norm2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if !norm2.is_finite() || norm2 < 1e-300 {
        return Err(Error::invalid("location must be a nonzero finite vector"));
    }
    Ok(vector_to_direction(v))
}

/// All Y_ℓ^m(θ, φ) for m ≥ 0 up to a band limit, in packed (ℓ, m) order.
struct HarmonicRow {
    lmax: u32,
    vals: Vec<Complex64>,
}

impl HarmonicRow {
    fn new(lmax: u32, theta: f64, phi: f64) -> Self {
        let tab = normalized_assoc_table(lmax, theta.cos());
        let mut vals = Vec::with_capacity(tab.len());
        for l in 0..=lmax {
            for m in 0..=l {
                let phase = Complex64::from_polar(1.0, m as f64 * phi);
                vals.push(phase * tab[tri_index(l, m)]);
            }
        }
        HarmonicRow { lmax, vals }
    }

    fn get(&self, l: u32, m: i32) -> Complex64 {
        debug_assert!(l <= self.lmax && m.unsigned_abs() <= l);
        let v = self.vals[tri_index(l, m.unsigned_abs())];
        if m >= 0 {
            v
        } else if m % 2 == 0 {
            v.conj()
        } else {
            -v.conj()
        }
    }
}

/// (4π / (2ℓ+1)) Σ_k (−1)^k Y_ℓ^k(L₁) Y_ℓ^{−k}(L₂), the degree-ℓ invariant
/// of two locations. Equals the Legendre polynomial of their inner product.
pub fn invariant_i2(l: u32, a: [f64; 3], b: [f64; 3]) -> Result<Complex64> {
    let (ta, pa) = checked_direction(a)?;
    let (tb, pb) = checked_direction(b)?;
    let row_a = HarmonicRow::new(l, ta, pa);
    let row_b = HarmonicRow::new(l, tb, pb);
    let mut acc = KahanComplex::default();
    for k in -(l as i32)..=l as i32 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(sign * row_a.get(l, k) * row_b.get(l, -k));
    }
    Ok(acc.value() * (FOUR_PI / (2 * l + 1) as f64))
}

/// The three-location invariant: a 3j-contracted product of harmonics,
/// normalized so degrees (0, 0, 0) give exactly one. Conjugation flips its
/// sign when the degree sum is odd, so odd-sum values are purely imaginary.
pub fn invariant_i3(
    degrees: (u32, u32, u32),
    a: [f64; 3],
    b: [f64; 3],
    c: [f64; 3],
) -> Result<Complex64> {
    let (l1, l2, l3) = degrees;
    let (ta, pa) = checked_direction(a)?;
    let (tb, pb) = checked_direction(b)?;
    let (tc, pc) = checked_direction(c)?;
    let row_a = HarmonicRow::new(l1, ta, pa);
    let row_b = HarmonicRow::new(l2, tb, pb);
    let row_c = HarmonicRow::new(l3, tc, pc);
    let mut acc = KahanComplex::default();
    for m1 in -(l1 as i32)..=l1 as i32 {
        for m2 in -(l2 as i32)..=l2 as i32 {
            let m3 = -m1 - m2;
            if m3.unsigned_abs() > l3 {
                continue;
            }
            let w = wigner_3j(l1, l2, l3, m1, m2, m3)?;
            if w == 0.0 {
                continue;
            }
            acc.add(w * row_a.get(l1, m1) * row_b.get(l2, m2) * row_c.get(l3, m3));
        }
    }
    let norm = FOUR_PI.powi(3).sqrt()
        / (((2 * l1 + 1) * (2 * l2 + 1) * (2 * l3 + 1)) as f64).sqrt();
    Ok(acc.value() * norm)
}

/// Reduced expansion kernel with the third location pinned to the pole:
/// √((2ℓ₃+1)/4π) Σ_m 3j(ℓ₁,ℓ₂,ℓ₃; m,−m,0) Y_{ℓ₁}^m(θ₁,φ₁) Y_{ℓ₂}^{−m}(θ₂,0).
///
/// Distinct kernels are orthogonal over the two free locations, and the 3j
/// orthogonality identity (2ℓ₃+1) Σ_m 3j² = 1 fixes every squared norm to
/// 1/(4π) under the plain product of sphere measures. Pairing a series with
/// 4π times a kernel therefore extracts that kernel's coefficient.
pub fn reduced_invariant_i3(
    l1: u32,
    l2: u32,
    l3: u32,
    theta1: f64,
    phi1: f64,
    theta2: f64,
) -> Result<Complex64> {
    check_polar(theta1)?;
    check_polar(theta2)?;
    let row1 = HarmonicRow::new(l1, theta1, phi1);
    let row2 = HarmonicRow::new(l2, theta2, 0.0);
    let kmax = l1.min(l2) as i32;
    let mut acc = KahanComplex::default();
    for m in -kmax..=kmax {
        let w = wigner_3j(l1, l2, l3, m, -m, 0)?;
        if w == 0.0 {
            continue;
        }
        acc.add(w * row1.get(l1, m) * row2.get(l2, -m));
    }
    Ok(acc.value() * ((2 * l3 + 1) as f64 / FOUR_PI).sqrt())
}

fn check_polar(theta: f64) -> Result<()> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::invalid(format!(
            "polar angle {theta} outside [0, pi]"
        )));
    }
    Ok(())
}

/// Three-point cumulant of the field at (θ₁, φ₁), (θ₂, 0) and the pole,
/// summed from an order-3 table: Σ over ordered degree triples of the table
/// value times the reduced kernel. Degrees run to `lmax` in each slot.
pub fn bicovariance_series(
    b: &PolySpectrum,
    theta1: f64,
    phi1: f64,
    theta2: f64,
    lmax: u32,
) -> Result<f64> {
    if b.order() != 3 {
        return Err(Error::invalid(format!(
            "bicovariance needs an order-3 table, got order {}",
            b.order()
        )));
    }
    check_polar(theta1)?;
    check_polar(theta2)?;
    let row1 = HarmonicRow::new(lmax, theta1, phi1);
    let row2 = HarmonicRow::new(lmax, theta2, 0.0);
    let mut key = super::PolyKey::new(vec![], vec![]);
    let mut acc = KahanComplex::default();
    for l1 in 0..=lmax {
        for l2 in 0..=lmax {
            for l3 in 0..=lmax {
                if (l1 + l2 + l3) % 2 == 1 || !triangle_ok(l1, l2, l3) {
                    continue;
                }
                key.l.clear();
                key.l.extend([l1, l2, l3]);
                key.l.sort_unstable();
                let v = b.value(&key);
                if v == 0.0 {
                    continue;
                }
                let kmax = l1.min(l2) as i32;
                let mut inner = KahanComplex::default();
                for m in -kmax..=kmax {
                    let w = wigner_3j(l1, l2, l3, m, -m, 0)?;
                    if w == 0.0 {
                        continue;
                    }
                    inner.add(w * row1.get(l1, m) * row2.get(l2, -m));
                }
                acc.add(inner.value() * (((2 * l3 + 1) as f64 / FOUR_PI).sqrt() * v));
            }
        }
    }
    Ok(acc.value().re)
}

/// Same series with the free azimuth attached to the second polar angle.
/// Which off-pole location carries the azimuth is a labeling choice: by
/// slot exchange the cumulant obeys C(θ₁, φ, θ₂) = C(θ₂, φ, θ₁), so this
/// just delegates with the polar angles swapped.
pub fn bicovariance_series_azimuth2(
    b: &PolySpectrum,
    theta1: f64,
    theta2: f64,
    phi2: f64,
    lmax: u32,
) -> Result<f64> {
    bicovariance_series(b, theta2, phi2, theta1, lmax)
}
