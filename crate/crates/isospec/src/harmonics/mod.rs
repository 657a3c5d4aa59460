//! Spherical harmonic analysis: Legendre functions, quadrature grids,
//! forward/inverse transforms, and the covariance ↔ spectrum transform.

mod coeffs;
mod grid;
mod io;
mod legendre;
mod quadrature;
mod transform;

pub use coeffs::{AngularPowerSpectrum, HarmonicCoeffs};
pub use grid::{SphereGrid, SphereMap};
pub use io::{
    read_coeffs_csv, read_map_csv, read_spectrum_csv, write_coeffs_csv, write_map_csv,
    write_spectrum_csv,
};
pub use legendre::{legendre, legendre_all, spherical_harmonic};
pub use quadrature::gauss_legendre;
pub use transform::{
    analyze, analyze_fft, covariance_eval, legendre_transform, legendre_transform_reporting,
    synthesize, synthesize_at, ClampedEntry,
};

pub(crate) use legendre::{normalized_assoc_table, tri_index};
