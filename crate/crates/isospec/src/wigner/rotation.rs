//! Rotations of the sphere in z-y-z Euler coordinates, with Haar sampling.
//!
//! A [`Rotation`] g = (φ, θ, γ) acts on points as the matrix
//! R(g) = R_z(φ) R_y(θ) R_z(γ). Composition and inversion go through the
//! matrix representation so that the Euler ranges stay canonical:
//! φ ∈ [0,2π), θ ∈ [0,π], γ ∈ [0,2π).

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::error::{Error, Result};

/// Wraps an angle into [0, 2π), guarding the rounding case where
/// `rem_euclid` lands exactly on 2π.
fn wrap_angle(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// A rotation of the sphere in z-y-z Euler coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    phi: f64,
    theta: f64,
    gamma: f64,
}

impl Rotation {
    /// Builds a rotation, validating φ ∈ [0,2π), θ ∈ [0,π], γ ∈ [0,2π).
    pub fn new(phi: f64, theta: f64, gamma: f64) -> Result<Self> {
        if !(0.0..TAU).contains(&phi) || !phi.is_finite() {
            return Err(Error::invalid(format!("phi = {phi} outside [0, 2pi)")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::invalid(format!("theta = {theta} outside [0, pi]")));
        }
        if !(0.0..TAU).contains(&gamma) || !gamma.is_finite() {
            return Err(Error::invalid(format!("gamma = {gamma} outside [0, 2pi)")));
        }
        Ok(Rotation { phi, theta, gamma })
    }

    pub fn identity() -> Self {
        Rotation {
            phi: 0.0,
            theta: 0.0,
            gamma: 0.0,
        }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The 3×3 matrix R_z(φ) R_y(θ) R_z(γ) acting on column vectors.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let (sp, cp) = self.phi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        let (sg, cg) = self.gamma.sin_cos();
        [
            [
                cp * ct * cg - sp * sg,
                -cp * ct * sg - sp * cg,
                cp * st,
            ],
            [
                sp * ct * cg + cp * sg,
                -sp * ct * sg + cp * cg,
                sp * st,
            ],
            [-st * cg, st * sg, ct],
        ]
    }

    /// Recovers canonical Euler angles from a rotation matrix.
    ///
    /// At the gimbal singularities (θ = 0 or π, where only φ±γ is
    /// determined) γ is set to 0.
    pub fn from_matrix(r: &[[f64; 3]; 3]) -> Self {
        // atan2(sinθ, cosθ) stays accurate where acos(r[2][2]) loses half the
        // significant digits (near θ = 0 and θ = π).
        let st = f64::hypot(r[0][2], r[1][2]);
        let theta = f64::atan2(st, r[2][2]);
        // sinθ ≈ 0 leaves the θ-column degenerate; switch extraction there.
        if st > 1e-12 {
            let phi = wrap_angle(f64::atan2(r[1][2], r[0][2]));
            let gamma = wrap_angle(f64::atan2(r[2][1], -r[2][0]));
            Rotation { phi, theta, gamma }
        } else if r[2][2] > 0.0 {
            // R = R_z(φ+γ)
            let phi = wrap_angle(f64::atan2(r[1][0], r[0][0]));
            Rotation {
                phi,
                theta: 0.0,
                gamma: 0.0,
            }
        } else {
            // R = R_z(φ−γ) R_y(π)
            let phi = wrap_angle(f64::atan2(-r[0][1], -r[0][0]));
            Rotation {
                phi,
                theta: PI,
                gamma: 0.0,
            }
        }
    }

    /// Composition: `a.compose(&b)` applies `b` first, then `a`, so the
    /// matrix (and D-matrix) representation is the product R(a)·R(b).
    pub fn compose(&self, other: &Rotation) -> Rotation {
        let a = self.matrix();
        let b = other.matrix();
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Rotation::from_matrix(&m)
    }

    /// Inverse rotation; in Euler angles ((π−γ) mod 2π, θ, (π−φ) mod 2π).
    pub fn inverse(&self) -> Rotation {
        if self.theta == 0.0 || self.theta == PI {
            // Only φ±γ matters on the gimbal axis; keep the canonical γ = 0.
            // θ=0: R = R_z(φ+γ), so the inverse angle is −(φ+γ).
            // θ=π: R = R_z(φ−γ) R_y(π) is an involution; the inverse is the
            // same rotation in canonical form.
            let phi = wrap_angle(if self.theta == 0.0 {
                -(self.phi + self.gamma)
            } else {
                self.phi - self.gamma
            });
            return Rotation {
                phi,
                theta: self.theta,
                gamma: 0.0,
            };
        }
        Rotation {
            phi: wrap_angle(PI - self.gamma),
            theta: self.theta,
            gamma: wrap_angle(PI - self.phi),
        }
    }

    /// Applies the rotation matrix to a vector.
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let r = self.matrix();
        [
            r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
            r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
            r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2],
        ]
    }

    /// Image of the direction (θ, φ) under the rotation, as (θ′, φ′).
    pub fn rotate_direction(&self, theta: f64, phi: f64) -> (f64, f64) {
        let v = direction_to_vector(theta, phi);
        vector_to_direction(self.apply(v))
    }
}

/// Unit vector of the direction with colatitude θ and longitude φ.
pub fn direction_to_vector(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Colatitude/longitude of a (not necessarily unit) vector; φ ∈ [0,2π).
pub fn vector_to_direction(v: [f64; 3]) -> (f64, f64) {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let theta = (v[2] / norm).clamp(-1.0, 1.0).acos();
    if v[0] == 0.0 && v[1] == 0.0 {
        (theta, 0.0)
    } else {
        (theta, wrap_angle(f64::atan2(v[1], v[0])))
    }
}

/// Draws a rotation from the normalized Haar measure on SO(3):
/// φ, γ uniform on [0,2π), cosθ uniform on [−1,1], independently.
pub fn sample_haar_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    let phi = wrap_angle(TAU * rng.random::<f64>());
    let gamma = wrap_angle(TAU * rng.random::<f64>());
    let ct: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let theta = ct.clamp(-1.0, 1.0).acos();
    Rotation { phi, theta, gamma }
}
