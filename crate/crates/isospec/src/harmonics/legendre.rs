//! Legendre polynomials, fully normalized associated Legendre functions,
//! and spherical harmonics.
//!
//! P_ℓ uses the classic three-term recurrence
//! (ℓ+1) P_{ℓ+1}(x) = (2ℓ+1) x P_ℓ(x) − ℓ P_{ℓ−1}(x).
//!
//! The associated functions are kept fully normalized throughout
//! (N̄_ℓ^m = √((2ℓ+1)(ℓ−m)! / (4π(ℓ+m)!)) P_ℓ^m with Condon–Shortley sign),
//! ascending in ℓ at fixed m from the closed-form sectoral seed. Raw P_ℓ^m
//! overflows near ℓ ≈ 30; the normalized recurrence stays O(1) at any degree.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Legendre polynomial P_ℓ(x) for |x| ≤ 1, with P_ℓ(1) = 1.
pub fn legendre(l: u32, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("legendre argument {x} outside [-1, 1]")));
    }
    let mut prev = 1.0; // P_0
    if l == 0 {
        return Ok(prev);
    }
    let mut cur = x; // P_1
    for k in 1..l {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// All P_0(x)..P_lmax(x) in one recurrence pass.
pub fn legendre_all(lmax: u32, x: f64) -> Result<Vec<f64>> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("legendre argument {x} outside [-1, 1]")));
    }
    let mut out = Vec::with_capacity(lmax as usize + 1);
    out.push(1.0);
    if lmax == 0 {
        return Ok(out);
    }
    out.push(x);
    for k in 1..lmax {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * out[k as usize] - kf * out[k as usize - 1])
            / (kf + 1.0);
        out.push(next);
    }
    Ok(out)
}

/// Index of (ℓ, m) with 0 ≤ m ≤ ℓ in the packed triangular layout.
#[inline]
pub(crate) fn tri_index(l: u32, m: u32) -> usize {
    (l as usize * (l as usize + 1)) / 2 + m as usize
}

/// Table of fully normalized associated Legendre values N̄_ℓ^m(x) for all
/// 0 ≤ m ≤ ℓ ≤ lmax, packed triangularly ([`tri_index`]).
///
/// N̄ is chosen so that Y_ℓ^m(θ,φ) = N̄_ℓ^m(cosθ) e^{imφ}.
pub(crate) fn normalized_assoc_table(lmax: u32, x: f64) -> Vec<f64> {
    debug_assert!((-1.0..=1.0).contains(&x));
    let n = tri_index(lmax, lmax) + 1;
    let mut t = vec![0.0; n];
    let sin_theta = (1.0 - x * x).max(0.0).sqrt();

    // Sectoral seed N̄_0^0 = 1/√(4π); then
    // N̄_m^m = −√((2m+1)/(2m)) sinθ N̄_{m−1}^{m−1} (Condon–Shortley sign).
    t[0] = 0.5 / std::f64::consts::PI.sqrt();
    for m in 1..=lmax {
        let prev = t[tri_index(m - 1, m - 1)];
        let mf = m as f64;
        t[tri_index(m, m)] = -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_theta * prev;
    }
    // First off-diagonal N̄_{m+1}^m = √(2m+3) x N̄_m^m, then ascending ℓ.
    for m in 0..=lmax {
        if m + 1 <= lmax {
            t[tri_index(m + 1, m)] = ((2 * m + 3) as f64).sqrt() * x * t[tri_index(m, m)];
        }
        let mf = (m as f64) * (m as f64);
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf)).sqrt();
            let lp = lf - 1.0;
            let b = ((lp * lp - mf) / (4.0 * lp * lp - 1.0)).sqrt();
            t[tri_index(l, m)] =
                a * (x * t[tri_index(l - 1, m)] - b * t[tri_index(l - 2, m)]);
        }
    }
    t
}

/// Orthonormal spherical harmonic Y_ℓ^m(θ, φ) with the Condon–Shortley
/// phase; satisfies conj(Y_ℓ^m) = (−1)^m Y_ℓ^{−m}.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return Err(Error::invalid(format!("order {m} exceeds degree {l}")));
    }
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::invalid(format!("theta = {theta} outside [0, pi]")));
    }
    let table = normalized_assoc_table(l, theta.cos());
    let mag = table[tri_index(l, m.unsigned_abs())];
    let value = Complex64::from_polar(1.0, m.abs() as f64 * phi) * mag;
    if m >= 0 {
        Ok(value)
    } else {
        // Y_ℓ^{−|m|} = (−1)^{|m|} conj(Y_ℓ^{|m|})
        let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Ok(value.conj() * sign)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_basics() {
        assert!(legendre(0, 0.3).unwrap() == 1.0);
        for l in 0..=50 {
            assert!((legendre(l, 1.0).unwrap() - 1.0).abs() < 1e-12, "l={l}");
        }
        assert!((legendre(2, 0.5).unwrap() + 0.125).abs() < 1e-15);
        assert!(legendre(3, 1.5).is_err());
    }

    #[test]
    fn low_degree_harmonics_match_closed_forms() {
        let (theta, phi) = (1.1_f64, 2.3_f64);
        let (st, ct) = theta.sin_cos();
        let y00 = spherical_harmonic(0, 0, theta, phi).unwrap();
        assert!((y00.re - (1.0 / (4.0 * PI)).sqrt()).abs() < 1e-15 && y00.im == 0.0);

        let y10 = spherical_harmonic(1, 0, theta, phi).unwrap();
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt() * ct).abs() < 1e-15);

        let y11 = spherical_harmonic(1, 1, theta, phi).unwrap();
        let expect = -(3.0 / (8.0 * PI)).sqrt() * st;
        assert!((y11 - Complex64::from_polar(1.0, phi) * expect).norm() < 1e-15);

        let y22 = spherical_harmonic(2, 2, theta, phi).unwrap();
        let expect = 0.25 * (15.0 / (2.0 * PI)).sqrt() * st * st;
        assert!((y22 - Complex64::from_polar(1.0, 2.0 * phi) * expect).norm() < 1e-15);

        let y21 = spherical_harmonic(2, 1, theta, phi).unwrap();
        let expect = -(15.0 / (8.0 * PI)).sqrt() * st * ct;
        assert!((y21 - Complex64::from_polar(1.0, phi) * expect).norm() < 1e-15);
    }

    #[test]
    fn north_pole_spike() {
        for l in [0u32, 1, 3, 8] {
            for m in -(l as i32)..=(l as i32) {
                let y = spherical_harmonic(l, m, 0.0, 0.0).unwrap();
                let expect = if m == 0 {
                    ((2 * l + 1) as f64 / (4.0 * PI)).sqrt()
                } else {
                    0.0
                };
                assert!((y - expect).norm() < 1e-14, "l={l} m={m}");
            }
        }
    }

    #[test]
    fn conjugation_rule() {
        for (l, m) in [(3u32, 2i32), (5, -4), (8, 7)] {
            let plus = spherical_harmonic(l, m, 0.9, 4.0).unwrap();
            let minus = spherical_harmonic(l, -m, 0.9, 4.0).unwrap();
            let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            assert!((plus.conj() - sign * minus).norm() < 1e-14);
        }
    }

    #[test]
    fn normalized_table_stays_bounded_at_high_degree() {
        // Raw P_ℓ^m would overflow here; the normalized values must stay O(1).
        let t = normalized_assoc_table(200, 0.3);
        for v in &t {
            assert!(v.is_finite() && v.abs() < 100.0);
        }
    }
}
