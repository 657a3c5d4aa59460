//! Bessel evaluations needed by the covariance-model zoo.
//!
//! Everything here is hand-rolled on three-term recurrences: spherical
//! `j_l`, modified spherical ratios `i_l/i_0`, the cylindrical `J_0`, and
//! the entire series `sum_j z^j/(j!)^2` that unifies `I_0` (z > 0) and
//! `J_0` (z < 0) arguments. Downward (Miller) recurrence is used wherever
//! the upward direction is unstable.

use crate::error::{Error, Result};
use crate::numeric::{ln_fact, KahanSum};

/// Magnitude at which a running downward recurrence is rescaled.
const RESCALE: f64 = 1e250;

/// Starting order for a downward recurrence targeting orders `<= lmax`
/// at argument `x`; past `max(lmax, x)` the minimal solution decays fast
/// enough that the extra margin washes out the arbitrary seed.
fn miller_start(lmax: u32, x: f64) -> u32 {
    let base = (lmax as f64).max(x.abs()).max(1.0);
    lmax.max(x.abs().ceil() as u32) + 20 + (160.0 * base).sqrt().ceil() as u32
}

/// Spherical Bessel j_l(x) for all l in 0..=lmax, x >= 0.
pub fn spherical_j_all(lmax: u32, x: f64) -> Result<Vec<f64>> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid(format!(
            "spherical_j_all requires finite x >= 0, got {x}"
        )));
    }
    let n = lmax as usize + 1;
    if x == 0.0 {
        let mut out = vec![0.0; n];
        out[0] = 1.0;
        return Ok(out);
    }
    if x < 1e-4 {
        // Three-term ascending series; relative error below 1e-26 here.
        let out = (0..=lmax)
            .map(|l| {
                let lf = f64::from(l);
                let ln_lead = lf * x.ln() - (ln_fact(2 * i64::from(l) + 1)
                    - lf * std::f64::consts::LN_2
                    - ln_fact(i64::from(l)));
                let x2 = x * x;
                ln_lead.exp()
                    * (1.0 - x2 / (2.0 * (2.0 * lf + 3.0))
                        + x2 * x2 / (8.0 * (2.0 * lf + 3.0) * (2.0 * lf + 5.0)))
            })
            .collect();
        return Ok(out);
    }
    let s = x.sin();
    let c = x.cos();
    let j0 = s / x;
    if lmax == 0 {
        return Ok(vec![j0]);
    }
    let j1 = s / (x * x) - c / x;
    let mut buf = vec![0.0_f64; n];
    let start = miller_start(lmax, x);
    let mut above = 0.0_f64; // j~_{l+1}
    let mut here = 1e-280_f64; // j~_l, arbitrary seed
    for l in (0..=start).rev() {
        if (l as usize) < n {
            buf[l as usize] = here;
        }
        let below = (2.0 * f64::from(l) + 1.0) / x * here - above;
        above = here;
        here = below;
        if here.abs() > RESCALE {
            let f = 1.0 / RESCALE;
            here *= f;
            above *= f;
            for v in buf.iter_mut() {
                *v *= f;
            }
        }
    }
    // Anchor on whichever true low-order value is larger in magnitude; the
    // Miller shape is least accurate where the true value is tiny.
    let scale = if j0.abs() >= j1.abs() {
        j0 / buf[0]
    } else {
        j1 / buf[1]
    };
    for v in buf.iter_mut() {
        *v *= scale;
    }
    Ok(buf)
}

/// Spherical Bessel j_l(x). Uses the stable upward recurrence in the
/// oscillatory region x >> l and Miller's algorithm otherwise.
pub fn spherical_j(l: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid(format!(
            "spherical_j requires finite x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(if l == 0 { 1.0 } else { 0.0 });
    }
    if x >= 1.5 * f64::from(l) + 10.0 {
        let s = x.sin();
        let c = x.cos();
        let mut below = s / x;
        if l == 0 {
            return Ok(below);
        }
        let mut here = s / (x * x) - c / x;
        for k in 1..l {
            let next = (2.0 * f64::from(k) + 1.0) / x * here - below;
            below = here;
            here = next;
        }
        return Ok(here);
    }
    Ok(spherical_j_all(l, x)?[l as usize])
}

/// Ratios i_l(x)/i_0(x) of modified spherical Bessel functions for
/// l in 0..=lmax, x > 0. Entry 0 is exactly 1.
pub fn spherical_i_ratios(lmax: u32, x: f64) -> Result<Vec<f64>> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::invalid(format!(
            "spherical_i_ratios requires finite x > 0, got {x}"
        )));
    }
    let n = lmax as usize + 1;
    let mut buf = vec![0.0_f64; n];
    let start = miller_start(lmax, x);
    let mut above = 0.0_f64;
    let mut here = 1e-280_f64;
    for l in (0..=start).rev() {
        if (l as usize) < n {
            buf[l as usize] = here;
        }
        let below = above + (2.0 * f64::from(l) + 1.0) / x * here;
        above = here;
        here = below;
        if here.abs() > RESCALE {
            let f = 1.0 / RESCALE;
            here *= f;
            above *= f;
            for v in buf.iter_mut() {
                *v *= f;
            }
        }
    }
    // Normalizing by the unnormalized i~_0 keeps everything in ratio form,
    // so sinh(x) never has to be formed and large x cannot overflow.
    let inv = 1.0 / buf[0];
    for v in buf.iter_mut() {
        *v *= inv;
    }
    buf[0] = 1.0;
    Ok(buf)
}

/// Cylindrical Bessel J_0(x) by integer-order Miller recurrence with the
/// normalization J_0 + 2 sum_k J_{2k} = 1.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("bessel_j0 requires finite x, got {x}")));
    }
    let ax = x.abs();
    if ax == 0.0 {
        return Ok(1.0);
    }
    let start = miller_start(0, ax);
    if start > 100_000 {
        return Err(Error::NonConvergent(format!(
            "bessel_j0 argument {x} too large for the downward recurrence"
        )));
    }
    // Even starting order so the even-order normalization sum is complete.
    let start = start + (start & 1);
    let mut above = 0.0_f64;
    let mut here = 1e-280_f64;
    let mut norm = KahanSum::default();
    let mut j0 = 0.0;
    for n in (0..=start).rev() {
        if n == 0 {
            norm.add(here);
            j0 = here;
        } else if n % 2 == 0 {
            norm.add(2.0 * here);
        }
        let below = 2.0 * f64::from(n) / ax * here - above;
        above = here;
        here = below;
        if here.abs() > RESCALE {
            let f = 1.0 / RESCALE;
            here *= f;
            above *= f;
            j0 *= f;
            norm.scale(f);
        }
    }
    Ok(j0 / norm.value())
}

/// The entire series sum_{j>=0} z^j/(j!)^2 for real z. Equals I_0(2 sqrt z)
/// for z >= 0 and J_0(2 sqrt(-z)) for z < 0.
pub fn i0_series(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::invalid(format!("i0_series requires finite z, got {z}")));
    }
    let mut sum = KahanSum::default();
    sum.add(1.0);
    let mut term = 1.0_f64;
    for j in 1..=600_i64 {
        term *= z / ((j * j) as f64);
        sum.add(term);
        if !term.is_finite() {
            return Err(Error::NonConvergent(format!(
                "i0_series overflowed at argument {z}"
            )));
        }
        if j > 4 && term.abs() <= 1e-17 * (1.0 + sum.value().abs()) {
            return Ok(sum.value());
        }
    }
    Err(Error::NonConvergent(format!(
        "i0_series did not converge at argument {z}"
    )))
}
