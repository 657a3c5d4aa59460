//! Rotation-group machinery: Wigner 3j symbols, Clebsch–Gordan and Gaunt
//! coefficients, small-d/big-D rotation matrices, Haar-random rotations, and
//! numeric integration over SO(3).

mod dmatrix;
mod rotation;
mod threej;

pub use dmatrix::{rotate_coefficients, wigner_d, SmallDMatrix, WignerDBlock};
pub use rotation::{
    direction_to_vector, sample_haar_rotation, vector_to_direction, Rotation,
};
pub use threej::{clebsch_gordan, gaunt, wigner_3j, wigner_3j_zero, MAX_DEGREE};

pub(crate) use threej::triangle_ok;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonics::gauss_legendre;
use crate::numeric::KahanComplex;

/// Node counts for the product quadrature on SO(3): Gauss–Legendre in cosθ,
/// equispaced periodic rules in φ and γ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct So3Resolution {
    pub n_theta: usize,
    pub n_phi: usize,
    pub n_gamma: usize,
}

impl So3Resolution {
    /// Resolution that integrates products of D-matrix entries exactly when
    /// their total degree stays at or below `lmax`: ℓmax+1 Gauss nodes and
    /// 2ℓmax+2 points on each circle.
    pub fn for_degree(lmax: u32) -> Self {
        So3Resolution {
            n_theta: lmax as usize + 1,
            n_phi: 2 * lmax as usize + 2,
            n_gamma: 2 * lmax as usize + 2,
        }
    }
}

/// Integral of `f` over SO(3) against the normalized Haar measure
/// dg = sinθ dθ dφ dγ / 8π².
///
/// Exact to round-off for integrands that are trigonometric polynomials of
/// bounded degree (products of D entries), provided the resolution covers
/// that degree; see [`So3Resolution::for_degree`].
pub fn so3_integral<F>(f: F, res: &So3Resolution) -> Result<Complex64>
where
    F: Fn(&Rotation) -> Complex64,
{
    if res.n_theta == 0 || res.n_phi == 0 || res.n_gamma == 0 {
        return Err(Error::invalid("so3 quadrature sizes must be nonzero"));
    }
    let (nodes, weights) = gauss_legendre(res.n_theta)?;
    let tau = std::f64::consts::TAU;
    let phi_step = tau / res.n_phi as f64;
    let gamma_step = tau / res.n_gamma as f64;
    let circle_weight = 1.0 / (res.n_phi as f64 * res.n_gamma as f64);

    let mut acc = KahanComplex::default();
    for (x, w) in nodes.iter().zip(weights.iter()) {
        let theta = x.clamp(-1.0, 1.0).acos();
        // w/2 normalizes ∫ sinθ dθ / 2 = ∫ d(cosθ)/2 to unit mass.
        let w_theta = 0.5 * w;
        for j in 0..res.n_phi {
            let phi = phi_step * j as f64;
            for k in 0..res.n_gamma {
                let gamma = gamma_step * k as f64;
                let g = Rotation::new(phi, theta, gamma)
                    .expect("quadrature nodes lie in canonical ranges");
                acc.add(f(&g) * (w_theta * circle_weight));
            }
        }
    }
    Ok(acc.value())
}
