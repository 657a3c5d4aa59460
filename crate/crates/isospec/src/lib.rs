//! Isotropic random fields on the sphere: angular power spectra and
//! higher-order polyspectra, exact rotation-group algebra, and Monte Carlo
//! simulation of non-Gaussian strictly isotropic fields.
//!
//! The crate is organized around the pipeline
//! covariance model → spectrum → simulated coefficient ensembles →
//! estimated bi/tri/polyspectra, with the Wigner-symbol machinery that
//! couples coefficient cumulants to rotation-invariant spectra.

pub mod error;
pub mod cumulants;
pub mod harmonics;
pub mod models;
pub mod simulate;
pub mod spectra;
pub mod wigner;

mod numeric;

pub use error::{Error, Result};
