//! Coefficient arrays of real fields and their per-degree power.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Triangular array of harmonic coefficients Z_ℓ^m of a real field,
/// 0 ≤ ℓ ≤ lmax.
///
/// Only the m ≥ 0 half is stored; the real-field constraint
/// Z_ℓ^{−m} = (−1)^m conj(Z_ℓ^m) defines the rest, and Z_ℓ^0 is kept real
/// by construction, so the constraint can never be violated.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicCoeffs {
    lmax: u32,
    z: Vec<Complex64>,
}

#[inline]
fn pack_index(l: u32, m: u32) -> usize {
    (l as usize * (l as usize + 1)) / 2 + m as usize
}

impl HarmonicCoeffs {
    /// All-zero array up to `lmax`.
    pub fn zero(lmax: u32) -> Self {
        let n = pack_index(lmax, lmax) + 1;
        HarmonicCoeffs {
            lmax,
            z: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn lmax(&self) -> u32 {
        self.lmax
    }

    /// Z_ℓ^m for any −ℓ ≤ m ≤ ℓ; negative orders come from the reality
    /// constraint. Panics on out-of-range indices.
    #[inline]
    pub fn get(&self, l: u32, m: i32) -> Complex64 {
        assert!(l <= self.lmax, "degree {l} above lmax {}", self.lmax);
        assert!(m.unsigned_abs() <= l, "order {m} exceeds degree {l}");
        if m >= 0 {
            self.z[pack_index(l, m as u32)]
        } else {
            let v = self.z[pack_index(l, (-m) as u32)].conj();
            if m.rem_euclid(2) == 0 {
                v
            } else {
                -v
            }
        }
    }

    /// Sets Z_ℓ^m for m ≥ 0. Setting m = 0 requires a real value so the
    /// stored half always satisfies the field-reality constraint.
    pub fn set(&mut self, l: u32, m: i32, value: Complex64) -> Result<()> {
        if l > self.lmax {
            return Err(Error::invalid(format!("degree {l} above lmax {}", self.lmax)));
        }
        if m < 0 || m as u32 > l {
            return Err(Error::invalid(format!(
                "order {m} not in the stored range 0..={l}"
            )));
        }
        if m == 0 && value.im != 0.0 {
            return Err(Error::invalid(format!(
                "Z_{l}^0 must be real, got imaginary part {}",
                value.im
            )));
        }
        self.z[pack_index(l, m as u32)] = value;
        Ok(())
    }

    /// Unchecked store for internal hot paths; caller guarantees m ≥ 0 and
    /// a real value at m = 0.
    #[inline]
    pub(crate) fn set_raw(&mut self, l: u32, m: i32, value: Complex64) {
        debug_assert!(m >= 0 && (m as u32) <= l && l <= self.lmax);
        debug_assert!(m != 0 || value.im == 0.0);
        self.z[pack_index(l, m as u32)] = value;
    }

    /// Iterates the stored half: (ℓ, m, Z_ℓ^m) with m ≥ 0.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, Complex64)> + '_ {
        (0..=self.lmax).flat_map(move |l| (0..=l).map(move |m| (l, m, self.z[pack_index(l, m)])))
    }

    /// Total power of one degree, Σ_{m=−ℓ}^{ℓ} |Z_ℓ^m|².
    pub fn degree_power(&self, l: u32) -> f64 {
        assert!(l <= self.lmax);
        let mut s = self.z[pack_index(l, 0)].norm_sqr();
        for m in 1..=l {
            s += 2.0 * self.z[pack_index(l, m)].norm_sqr();
        }
        s
    }
}

/// Angular power spectrum f_0..f_lmax; entries are per-degree coefficient
/// variances and must be nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct AngularPowerSpectrum {
    f: Vec<f64>,
}

impl AngularPowerSpectrum {
    /// Validates nonnegativity and finiteness.
    pub fn new(f: Vec<f64>) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::invalid("spectrum needs at least the ℓ = 0 entry"));
        }
        for (l, v) in f.iter().enumerate() {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::invalid(format!(
                    "spectrum entry f_{l} = {v} is not a nonnegative finite value"
                )));
            }
        }
        Ok(AngularPowerSpectrum { f })
    }

    pub fn lmax(&self) -> u32 {
        (self.f.len() - 1) as u32
    }

    #[inline]
    pub fn get(&self, l: u32) -> f64 {
        self.f[l as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_orders_follow_the_reality_constraint() {
        let mut c = HarmonicCoeffs::zero(2);
        c.set(2, 1, Complex64::new(0.3, -0.7)).unwrap();
        let v = c.get(2, -1);
        assert_eq!(v, -Complex64::new(0.3, 0.7));
        c.set(2, 2, Complex64::new(-1.0, 2.0)).unwrap();
        assert_eq!(c.get(2, -2), Complex64::new(-1.0, -2.0));
    }

    #[test]
    fn m0_must_be_real() {
        let mut c = HarmonicCoeffs::zero(1);
        assert!(c.set(1, 0, Complex64::new(1.0, 0.5)).is_err());
        assert!(c.set(1, 0, Complex64::new(1.0, 0.0)).is_ok());
        assert!(c.set(1, -1, Complex64::new(1.0, 0.0)).is_err());
        assert!(c.set(2, 0, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn degree_power_counts_both_halves() {
        let mut c = HarmonicCoeffs::zero(1);
        c.set(1, 0, Complex64::new(2.0, 0.0)).unwrap();
        c.set(1, 1, Complex64::new(1.0, 1.0)).unwrap();
        assert!((c.degree_power(1) - (4.0 + 2.0 * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn spectrum_validation() {
        assert!(AngularPowerSpectrum::new(vec![]).is_err());
        assert!(AngularPowerSpectrum::new(vec![1.0, -0.1]).is_err());
        assert!(AngularPowerSpectrum::new(vec![1.0, f64::NAN]).is_err());
        let f = AngularPowerSpectrum::new(vec![1.0, 0.5]).unwrap();
        assert_eq!(f.lmax(), 1);
        assert_eq!(f.get(1), 0.5);
    }
}
