//! Wigner 3j symbols and the coupling coefficients derived from them.
//!
//! Everything here reduces to the Racah single-sum factorial formula,
//! evaluated in log space against a precomputed ln-factorial table with
//! compensated summation. That keeps every admissible symbol with
//! ℓ ≤ 64 accurate to better than 1e−10 relative error. Beyond ℓ ≈ 64 the
//! alternating sum slowly loses digits (roughly one digit per doubling);
//! degrees above [`MAX_DEGREE`] are rejected outright rather than returning
//! silently degraded values.

use crate::error::{Error, Result};
use crate::numeric::{ln_fact, KahanSum};

/// Hard cap on accepted degrees. The factorial table and the documented
/// accuracy statement both end here.
pub const MAX_DEGREE: u32 = 256;

/// (−1)^n for possibly negative n.
#[inline]
pub(crate) fn parity_sign(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Triangle inequality |ℓ₁−ℓ₂| ≤ ℓ₃ ≤ ℓ₁+ℓ₂ (symmetric in all three).
#[inline]
pub(crate) fn triangle_ok(l1: u32, l2: u32, l3: u32) -> bool {
    let (l1, l2, l3) = (l1 as i64, l2 as i64, l3 as i64);
    (l1 - l2).abs() <= l3 && l3 <= l1 + l2
}

fn check_pair(l: u32, m: i32) -> Result<()> {
    if l > MAX_DEGREE {
        return Err(Error::invalid(format!(
            "degree {l} exceeds the supported maximum {MAX_DEGREE}"
        )));
    }
    if m.unsigned_abs() > l {
        return Err(Error::invalid(format!("order {m} exceeds degree {l}")));
    }
    Ok(())
}

/// Wigner 3j symbol (ℓ₁ ℓ₂ ℓ₃; m₁ m₂ m₃).
///
/// Returns exactly `0.0` when a selection rule fails (m₁+m₂+m₃ ≠ 0 or the
/// triangle inequality is violated). Rejects |m| > ℓ and ℓ > [`MAX_DEGREE`]
/// as invalid arguments.
pub fn wigner_3j(l1: u32, l2: u32, l3: u32, m1: i32, m2: i32, m3: i32) -> Result<f64> {
    check_pair(l1, m1)?;
    check_pair(l2, m2)?;
    check_pair(l3, m3)?;
    if m1 as i64 + m2 as i64 + m3 as i64 != 0 || !triangle_ok(l1, l2, l3) {
        return Ok(0.0);
    }

    let (l1, l2, l3) = (l1 as i64, l2 as i64, l3 as i64);
    let (m1, m2, m3) = (m1 as i64, m2 as i64, m3 as i64);

    // ln Δ(ℓ₁ℓ₂ℓ₃) plus the six (ℓ±m)! factors, all under one square root.
    let ln_num = ln_fact(l1 + l2 - l3)
        + ln_fact(l1 - l2 + l3)
        + ln_fact(-l1 + l2 + l3)
        - ln_fact(l1 + l2 + l3 + 1)
        + ln_fact(l1 + m1)
        + ln_fact(l1 - m1)
        + ln_fact(l2 + m2)
        + ln_fact(l2 - m2)
        + ln_fact(l3 + m3)
        + ln_fact(l3 - m3);
    let ln_pref = 0.5 * ln_num;

    let t_min = 0.max(l2 - l3 - m1).max(l1 - l3 + m2);
    let t_max = (l1 + l2 - l3).min(l1 - m1).min(l2 + m2);
    debug_assert!(t_min <= t_max);

    // Scale by the largest term so exp never overflows, then sum the
    // alternating series with compensation.
    let mut exponents = Vec::with_capacity((t_max - t_min + 1) as usize);
    let mut max_e = f64::NEG_INFINITY;
    for t in t_min..=t_max {
        let e = ln_pref
            - ln_fact(t)
            - ln_fact(l3 - l2 + m1 + t)
            - ln_fact(l3 - l1 - m2 + t)
            - ln_fact(l1 + l2 - l3 - t)
            - ln_fact(l1 - m1 - t)
            - ln_fact(l2 + m2 - t);
        max_e = max_e.max(e);
        exponents.push(e);
    }
    let mut acc = KahanSum::default();
    for (i, e) in exponents.iter().enumerate() {
        let t = t_min + i as i64;
        acc.add(parity_sign(t) * (e - max_e).exp());
    }
    Ok(parity_sign(l1 - l2 - m3) * max_e.exp() * acc.value())
}

/// 3j symbol with all orders zero, via its closed form.
///
/// For even L = ℓ₁+ℓ₂+ℓ₃ this is
/// (−1)^{L/2} √(∏ⱼ(L−2ℓⱼ)! / (L+1)!) · (L/2)! / ∏ⱼ(L/2−ℓⱼ)!;
/// for odd L the symbol vanishes. The triangle inequality is a
/// precondition here (violations are an error, unlike [`wigner_3j`]).
pub fn wigner_3j_zero(l1: u32, l2: u32, l3: u32) -> Result<f64> {
    check_pair(l1, 0)?;
    check_pair(l2, 0)?;
    check_pair(l3, 0)?;
    if !triangle_ok(l1, l2, l3) {
        return Err(Error::invalid(format!(
            "degrees ({l1},{l2},{l3}) violate the triangle inequality"
        )));
    }
    let big_l = (l1 + l2 + l3) as i64;
    if big_l % 2 != 0 {
        return Ok(0.0);
    }
    let half = big_l / 2;
    let (l1, l2, l3) = (l1 as i64, l2 as i64, l3 as i64);
    let ln_mag = 0.5
        * (ln_fact(big_l - 2 * l1) + ln_fact(big_l - 2 * l2) + ln_fact(big_l - 2 * l3)
            - ln_fact(big_l + 1))
        + ln_fact(half)
        - ln_fact(half - l1)
        - ln_fact(half - l2)
        - ln_fact(half - l3);
    Ok(parity_sign(half) * ln_mag.exp())
}

/// Clebsch–Gordan coefficient ⟨ℓ₁ k₁; ℓ₂ k₂ | ℓ k⟩.
///
/// Equal to (−1)^{ℓ₁−ℓ₂+k} √(2ℓ+1) · 3j(ℓ₁ ℓ₂ ℓ; k₁ k₂ −k); zero whenever
/// k ≠ k₁ + k₂.
pub fn clebsch_gordan(l1: u32, k1: i32, l2: u32, k2: i32, l: u32, k: i32) -> Result<f64> {
    let three_j = wigner_3j(l1, l2, l, k1, k2, -k)?;
    let sign = parity_sign(l1 as i64 - l2 as i64 + k as i64);
    Ok(sign * ((2 * l + 1) as f64).sqrt() * three_j)
}

/// Gaunt coefficient √(∏ᵢ(2ℓᵢ+1)/(4π)) · 3j(ℓ₁ℓ₂ℓ₃;000) · 3j(ℓ₁ℓ₂ℓ₃;m₁m₂m₃).
///
/// This is the coefficient coupling Y_{ℓ₁}^{m₁} Y_{ℓ₂}^{m₂} to the conjugate
/// of Y_{ℓ₃}^{−m₃}, i.e. the full-sphere integral of the three harmonics.
pub fn gaunt(l1: u32, m1: i32, l2: u32, m2: i32, l3: u32, m3: i32) -> Result<f64> {
    let zeros = wigner_3j(l1, l2, l3, 0, 0, 0)?;
    if zeros == 0.0 {
        // Still validate the order arguments before returning the zero.
        check_pair(l1, m1)?;
        check_pair(l2, m2)?;
        check_pair(l3, m3)?;
        return Ok(0.0);
    }
    let orders = wigner_3j(l1, l2, l3, m1, m2, m3)?;
    let norm = ((2 * l1 + 1) as f64 * (2 * l2 + 1) as f64 * (2 * l3 + 1) as f64
        / (4.0 * std::f64::consts::PI))
        .sqrt();
    Ok(norm * zeros * orders)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn selection_rules_are_exact_zeros() {
        // order sum nonzero
        assert_eq!(wigner_3j(1, 2, 3, 0, 0, 1).unwrap(), 0.0);
        // triangle violated
        assert_eq!(wigner_3j(1, 1, 3, 0, 0, 0).unwrap(), 0.0);
        assert_eq!(wigner_3j(5, 1, 1, 1, 0, -1).unwrap(), 0.0);
    }

    #[test]
    fn invalid_arguments_rejected() {
        assert!(wigner_3j(1, 1, 0, 2, -2, 0).is_err());
        assert!(wigner_3j(300, 300, 300, 0, 0, 0).is_err());
        assert!(wigner_3j_zero(1, 1, 5).is_err());
    }

    #[test]
    fn hand_checked_values() {
        // 1/√3, 1/√30, −1/√6: worked out from the Racah sum by hand.
        assert!((wigner_3j(1, 1, 0, 1, -1, 0).unwrap() - 1.0 / 3.0_f64.sqrt()).abs() < TOL);
        assert!((wigner_3j(1, 1, 2, 1, -1, 0).unwrap() - 1.0 / 30.0_f64.sqrt()).abs() < TOL);
        assert!((wigner_3j(1, 1, 1, 1, 0, -1).unwrap() + 1.0 / 6.0_f64.sqrt()).abs() < TOL);
    }

    #[test]
    fn zero_order_closed_form() {
        assert_eq!(wigner_3j_zero(1, 1, 1).unwrap(), 0.0);
        assert!((wigner_3j_zero(2, 2, 2).unwrap() + (2.0_f64 / 35.0).sqrt()).abs() < TOL);
        assert!((wigner_3j_zero(1, 1, 2).unwrap() - (2.0_f64 / 15.0).sqrt()).abs() < TOL);
        // The closed form and the Racah sum are independent routes.
        for (l1, l2, l3) in [(2, 4, 6), (8, 8, 8), (3, 5, 8), (10, 12, 20), (7, 7, 2)] {
            let a = wigner_3j_zero(l1, l2, l3).unwrap();
            let b = wigner_3j(l1, l2, l3, 0, 0, 0).unwrap();
            assert!((a - b).abs() < TOL, "({l1},{l2},{l3}): {a} vs {b}");
        }
    }

    #[test]
    fn column_permutation_symmetry() {
        // Even permutations preserve the value; odd ones pick up (−1)^{ℓ₁+ℓ₂+ℓ₃}.
        let v = wigner_3j(3, 2, 4, 1, -2, 1).unwrap();
        let cyc = wigner_3j(2, 4, 3, -2, 1, 1).unwrap();
        let swap = wigner_3j(2, 3, 4, -2, 1, 1).unwrap();
        assert!((v - cyc).abs() < TOL);
        assert!((swap - parity_sign(3 + 2 + 4) * v).abs() < TOL);
        // Order negation: same (−1)^{ℓ-sum} phase.
        let neg = wigner_3j(3, 2, 4, -1, 2, -1).unwrap();
        assert!((neg - parity_sign(3 + 2 + 4) * v).abs() < TOL);
    }

    #[test]
    fn clebsch_gordan_values() {
        assert!((clebsch_gordan(1, 0, 1, 0, 0, 0).unwrap() + 1.0 / 3.0_f64.sqrt()).abs() < TOL);
        assert!((clebsch_gordan(1, 0, 1, 0, 2, 0).unwrap() - (2.0_f64 / 3.0).sqrt()).abs() < TOL);
        assert_eq!(clebsch_gordan(1, 1, 1, 0, 2, 0).unwrap(), 0.0);
    }

    #[test]
    fn gaunt_values() {
        let g = gaunt(1, 0, 1, 0, 2, 0).unwrap();
        assert!((g - 1.0 / (5.0 * std::f64::consts::PI).sqrt()).abs() < TOL);
        // Y₀⁰ is the constant 1/√(4π), so coupling to it is a normalization.
        for (l, m) in [(1u32, 1i32), (2, 0), (3, -2)] {
            let g = gaunt(0, 0, l, m, l, -m).unwrap();
            let expect = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
            assert!((g.abs() - expect).abs() < TOL, "l={l} m={m}");
        }
        assert_eq!(gaunt(1, 0, 1, 0, 1, 0).unwrap(), 0.0);
    }

    #[test]
    fn orthogonality_small_degrees() {
        // (2ℓ+1) Σ_{m₁m₂} 3j(ℓ₁ℓ₂ℓ;m₁m₂m) 3j(ℓ₁ℓ₂j;m₁m₂k) = δ_{ℓj} δ_{mk}
        let (l1, l2) = (3u32, 2u32);
        for l in 1..=5u32 {
            for j in 1..=5u32 {
                for m in -(l as i32)..=(l as i32) {
                    for k in -(j as i32)..=(j as i32) {
                        let mut s = 0.0;
                        for m1 in -(l1 as i32)..=(l1 as i32) {
                            for m2 in -(l2 as i32)..=(l2 as i32) {
                                s += wigner_3j(l1, l2, l, m1, m2, m).unwrap()
                                    * wigner_3j(l1, l2, j, m1, m2, k).unwrap();
                            }
                        }
                        let expect = if l == j && m == k {
                            1.0 / (2 * l + 1) as f64
                        } else {
                            0.0
                        };
                        assert!((s - expect).abs() < 1e-12, "l={l} j={j} m={m} k={k}");
                    }
                }
            }
        }
    }
}
