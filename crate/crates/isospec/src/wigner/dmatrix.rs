//! Wigner small-d and big-D rotation matrices, and their action on
//! harmonic coefficient arrays.
//!
//! Conventions, fixed once and used everywhere:
//! d^ℓ_{m,k}(θ) is the real factorial sum with the (−1)^{m−k+s} phase and
//! cos(θ/2)/sin(θ/2) powers, and D^ℓ_{m,k}(φ,θ,γ) = e^{−imφ} d^ℓ_{m,k}(θ) e^{−ikγ}.
//! Under these choices √((2ℓ+1)/4π) · conj(D^ℓ_{m,0}(φ,θ,·)) equals the
//! Condon–Shortley spherical harmonic Y_ℓ^m(θ,φ), which the test suite pins.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonics::HarmonicCoeffs;
use crate::numeric::{ln_fact, KahanSum};
use crate::wigner::rotation::Rotation;
use crate::wigner::threej::{parity_sign, MAX_DEGREE};

/// Real (2ℓ+1)×(2ℓ+1) small-d matrix at a fixed middle Euler angle.
#[derive(Clone, Debug)]
pub struct SmallDMatrix {
    degree: u32,
    dim: usize,
    data: Vec<f64>,
}

impl SmallDMatrix {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Entry d_{m,k}; both indices must lie in [−ℓ, ℓ].
    #[inline]
    pub fn get(&self, m: i32, k: i32) -> f64 {
        let l = self.degree as i32;
        assert!(m.abs() <= l && k.abs() <= l, "order outside [-l, l]");
        self.data[(m + l) as usize * self.dim + (k + l) as usize]
    }
}

/// Evaluates one d^ℓ_{m,k}(θ) entry by the factorial sum in log space.
fn small_d_entry(l: i64, m: i64, k: i64, cos_half: f64, sin_half: f64) -> f64 {
    let ln_pref =
        0.5 * (ln_fact(l + m) + ln_fact(l - m) + ln_fact(l + k) + ln_fact(l - k));
    let s_min = 0.max(k - m);
    let s_max = (l + k).min(l - m);
    if s_min > s_max {
        return 0.0;
    }

    // Per-term log magnitudes; a zero base with positive power kills the term.
    let mut terms: Vec<(i64, f64)> = Vec::with_capacity((s_max - s_min + 1) as usize);
    let mut max_e = f64::NEG_INFINITY;
    for s in s_min..=s_max {
        let a = 2 * l + k - m - 2 * s; // power of cos(θ/2)
        let b = m - k + 2 * s; // power of sin(θ/2)
        if (cos_half == 0.0 && a > 0) || (sin_half == 0.0 && b > 0) {
            continue;
        }
        let mut e = ln_pref
            - ln_fact(l + k - s)
            - ln_fact(s)
            - ln_fact(m - k + s)
            - ln_fact(l - m - s);
        if a > 0 {
            e += a as f64 * cos_half.ln();
        }
        if b > 0 {
            e += b as f64 * sin_half.ln();
        }
        max_e = max_e.max(e);
        terms.push((s, e));
    }
    if terms.is_empty() {
        return 0.0;
    }
    let mut acc = KahanSum::default();
    for (s, e) in terms {
        acc.add(parity_sign(m - k + s) * (e - max_e).exp());
    }
    max_e.exp() * acc.value()
}

/// Wigner small-d matrix d^ℓ(θ) for θ ∈ [0, π].
///
/// Accuracy tracks the 3j kernel: full double precision through ℓ ≈ 64,
/// slow digit loss beyond, hard rejection above [`MAX_DEGREE`].
pub fn wigner_d(l: u32, theta: f64) -> Result<SmallDMatrix> {
    if l > MAX_DEGREE {
        return Err(Error::invalid(format!(
            "degree {l} exceeds the supported maximum {MAX_DEGREE}"
        )));
    }
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::invalid(format!("theta = {theta} outside [0, pi]")));
    }
    let dim = (2 * l + 1) as usize;
    let li = l as i64;
    let mut data = vec![0.0; dim * dim];
    // The endpoints are exact: d(0) = I and d(π)_{m,k} = (−1)^{ℓ−k} δ_{m,−k}.
    // cos(θ/2) never evaluates to exactly 0 in floating point at θ = π, so
    // these cases are handled directly instead of through the general sum.
    if theta == 0.0 {
        for m in 0..dim {
            data[m * dim + m] = 1.0;
        }
    } else if theta == std::f64::consts::PI {
        for k in -li..=li {
            data[(-k + li) as usize * dim + (k + li) as usize] = parity_sign(li - k);
        }
    } else {
        let (sin_half, cos_half) = (0.5 * theta).sin_cos();
        for m in -li..=li {
            for k in -li..=li {
                data[(m + li) as usize * dim + (k + li) as usize] =
                    small_d_entry(li, m, k, cos_half, sin_half);
            }
        }
    }
    Ok(SmallDMatrix {
        degree: l,
        dim,
        data,
    })
}

/// Complex (2ℓ+1)×(2ℓ+1) rotation matrix block
/// D^ℓ_{m,k}(g) = e^{−imφ} d^ℓ_{m,k}(θ) e^{−ikγ}.
#[derive(Clone, Debug)]
pub struct WignerDBlock {
    degree: u32,
    dim: usize,
    data: Vec<Complex64>,
}

impl WignerDBlock {
    /// Builds the block for a degree and rotation.
    pub fn new(l: u32, g: &Rotation) -> Result<Self> {
        let d = wigner_d(l, g.theta())?;
        let li = l as i32;
        let dim = d.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        // Row/column phase factors e^{−imφ}, e^{−ikγ}.
        let phase = |angle: f64, idx: i32| Complex64::from_polar(1.0, -(idx as f64) * angle);
        let row_phases: Vec<Complex64> = (-li..=li).map(|m| phase(g.phi(), m)).collect();
        let col_phases: Vec<Complex64> = (-li..=li).map(|k| phase(g.gamma(), k)).collect();
        for (mi, row_phase) in row_phases.iter().enumerate() {
            for (ki, col_phase) in col_phases.iter().enumerate() {
                data[mi * dim + ki] = row_phase * col_phase * d.data[mi * dim + ki];
            }
        }
        Ok(WignerDBlock { degree: l, dim, data })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Entry D_{m,k}; both indices must lie in [−ℓ, ℓ].
    #[inline]
    pub fn get(&self, m: i32, k: i32) -> Complex64 {
        let l = self.degree as i32;
        assert!(m.abs() <= l && k.abs() <= l, "order outside [-l, l]");
        self.data[(m + l) as usize * self.dim + (k + l) as usize]
    }

    /// Matrix product, used to test the representation property.
    pub fn matmul(&self, other: &WignerDBlock) -> WignerDBlock {
        assert_eq!(self.degree, other.degree);
        let n = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..n {
                    acc += self.data[i * n + t] * other.data[t * n + j];
                }
                data[i * n + j] = acc;
            }
        }
        WignerDBlock {
            degree: self.degree,
            dim: n,
            data,
        }
    }

    /// Largest |D D† − I| entry, for unitarity checks.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..n {
                    acc += self.data[i * n + t] * self.data[j * n + t].conj();
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - expect).norm());
            }
        }
        worst
    }
}

/// Rotates a coefficient array degree by degree: Z′_ℓ,k = Σ_m D^ℓ_{k,m}(g) Z_ℓ,m.
///
/// Only the k ≥ 0 half is computed and stored, so the real-field conjugation
/// constraint Z_{ℓ,−k} = (−1)^k conj(Z_{ℓ,k}) holds exactly on the output;
/// per-degree power is preserved to round-off by unitarity.
pub fn rotate_coefficients(c: &HarmonicCoeffs, g: &Rotation) -> HarmonicCoeffs {
    let lmax = c.lmax();
    let mut out = HarmonicCoeffs::zero(lmax);
    for l in 0..=lmax {
        let block = WignerDBlock::new(l, g).expect("degree/rotation already validated");
        let li = l as i32;
        for k in 0..=li {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in -li..=li {
                acc += block.get(k, m) * c.get(l, m);
            }
            if k == 0 {
                // Exact reality of the m = 0 row; the residue is round-off.
                out.set_raw(l, 0, Complex64::new(acc.re, 0.0));
            } else {
                out.set_raw(l, k, acc);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::wigner::rotation::sample_haar_rotation;

    #[test]
    fn rejects_theta_outside_range() {
        assert!(wigner_d(2, -0.1).is_err());
        assert!(wigner_d(2, 3.2).is_err());
        assert!(wigner_d(300, 1.0).is_err());
    }

    #[test]
    fn degree_one_closed_forms() {
        let theta = 0.77;
        let d = wigner_d(1, theta).unwrap();
        let (s, c) = theta.sin_cos();
        let r2 = std::f64::consts::SQRT_2;
        assert!((d.get(0, 0) - c).abs() < 1e-15);
        assert!((d.get(1, 0) + s / r2).abs() < 1e-15);
        assert!((d.get(0, 1) - s / r2).abs() < 1e-15);
        assert!((d.get(1, 1) - (1.0 + c) / 2.0).abs() < 1e-15);
        assert!((d.get(1, -1) - (1.0 - c) / 2.0).abs() < 1e-15);
        assert!((d.get(-1, 1) - (1.0 - c) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn endpoint_values() {
        // d(0) = identity, d(π)_{m,k} = (−1)^{ℓ−k} δ_{m,−k}.
        for l in [0u32, 1, 2, 5] {
            let id = wigner_d(l, 0.0).unwrap();
            let pi = wigner_d(l, std::f64::consts::PI).unwrap();
            let li = l as i32;
            for m in -li..=li {
                for k in -li..=li {
                    let expect_id = if m == k { 1.0 } else { 0.0 };
                    assert_eq!(id.get(m, k), expect_id, "l={l} m={m} k={k}");
                    let expect_pi = if m == -k {
                        parity_sign((l as i64) - (k as i64))
                    } else {
                        0.0
                    };
                    assert_eq!(pi.get(m, k), expect_pi, "l={l} m={m} k={k}");
                }
            }
            // The exact endpoint branches must join the general sum smoothly.
            let near0 = wigner_d(l, 1e-9).unwrap();
            let near_pi = wigner_d(l, std::f64::consts::PI - 1e-9).unwrap();
            for m in -li..=li {
                for k in -li..=li {
                    assert!((near0.get(m, k) - id.get(m, k)).abs() < 1e-8);
                    assert!((near_pi.get(m, k) - pi.get(m, k)).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn symmetries_and_orthogonality() {
        let l = 5u32;
        let d = wigner_d(l, 1.1).unwrap();
        let li = l as i32;
        for m in -li..=li {
            for k in -li..=li {
                assert!((d.get(m, k) - d.get(-k, -m)).abs() < 1e-13);
                let sign = parity_sign((m - k) as i64);
                assert!((d.get(m, k) - sign * d.get(k, m)).abs() < 1e-13);
            }
        }
        // dᵀ d = I
        for i in -li..=li {
            for j in -li..=li {
                let mut acc = 0.0;
                for t in -li..=li {
                    acc += d.get(t, i) * d.get(t, j);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((acc - expect).abs() < 1e-12, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn big_d_identity_and_unitarity() {
        let eye = WignerDBlock::new(3, &Rotation::identity()).unwrap();
        for m in -3..=3 {
            for k in -3..=3 {
                let expect = if m == k { 1.0 } else { 0.0 };
                assert!((eye.get(m, k) - expect).norm() < 1e-15);
            }
        }
        let g = Rotation::new(0.3, 1.2, 2.5).unwrap();
        let d = WignerDBlock::new(8, &g).unwrap();
        assert!(d.unitarity_residual() < 1e-12);
    }

    #[test]
    fn conjugation_symmetry() {
        let g = Rotation::new(5.1, 2.2, 0.4).unwrap();
        let d = WignerDBlock::new(4, &g).unwrap();
        for m in -4..=4 {
            for k in -4..=4 {
                let sign = parity_sign((m - k) as i64);
                let expect = sign * d.get(-m, -k).conj();
                assert!((d.get(m, k) - expect).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn representation_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for l in [1u32, 2, 4] {
            for _ in 0..20 {
                let a = sample_haar_rotation(&mut rng);
                let b = sample_haar_rotation(&mut rng);
                let left = WignerDBlock::new(l, &a.compose(&b)).unwrap();
                let right = WignerDBlock::new(l, &a)
                    .unwrap()
                    .matmul(&WignerDBlock::new(l, &b).unwrap());
                let li = l as i32;
                for m in -li..=li {
                    for k in -li..=li {
                        assert!(
                            (left.get(m, k) - right.get(m, k)).norm() < 1e-10,
                            "l={l} m={m} k={k}"
                        );
                    }
                }
            }
        }
    }
}
