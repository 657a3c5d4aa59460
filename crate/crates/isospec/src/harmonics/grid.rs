//! Quadrature grids on the sphere and sampled real maps.

use crate::error::{Error, Result};
use crate::harmonics::quadrature::gauss_legendre;

/// Product quadrature grid: Gauss–Legendre colatitudes (interior, no pole
/// samples) × equispaced longitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    colatitudes: Vec<f64>,
    colat_weights: Vec<f64>,
    longitudes: Vec<f64>,
    lmax_exact: u32,
}

impl SphereGrid {
    /// Grid with `n_theta` Gauss colatitudes and `n_phi` longitudes.
    ///
    /// The exact band limit is the largest ℓmax with
    /// n_theta ≥ ℓmax+1 and n_phi ≥ 2ℓmax+1.
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::invalid("grid sizes must be nonzero"));
        }
        let (nodes, colat_weights) = gauss_legendre(n_theta)?;
        // Gauss nodes ascend in x = cosθ; colatitudes are stored ascending
        // in θ, i.e. from pole-near-north downward.
        let colatitudes: Vec<f64> = nodes.iter().rev().map(|x| x.clamp(-1.0, 1.0).acos()).collect();
        let colat_weights: Vec<f64> = colat_weights.iter().rev().copied().collect();
        let longitudes: Vec<f64> = (0..n_phi)
            .map(|j| std::f64::consts::TAU * j as f64 / n_phi as f64)
            .collect();
        let lmax_exact = ((n_theta - 1).min((n_phi - 1) / 2)) as u32;
        Ok(SphereGrid {
            colatitudes,
            colat_weights,
            longitudes,
            lmax_exact,
        })
    }

    /// Smallest grid whose transforms are exact through `lmax`.
    pub fn for_band_limit(lmax: u32) -> Result<Self> {
        SphereGrid::new(lmax as usize + 1, 2 * lmax as usize + 1)
    }

    pub fn n_theta(&self) -> usize {
        self.colatitudes.len()
    }

    pub fn n_phi(&self) -> usize {
        self.longitudes.len()
    }

    /// Largest band limit for which analyze ∘ synthesize is the identity.
    pub fn lmax_exact(&self) -> u32 {
        self.lmax_exact
    }

    pub fn colatitudes(&self) -> &[f64] {
        &self.colatitudes
    }

    /// Positive θ-quadrature weights; they sum to 2 (the measure of d cosθ).
    pub fn colat_weights(&self) -> &[f64] {
        &self.colat_weights
    }

    pub fn longitudes(&self) -> &[f64] {
        &self.longitudes
    }
}

/// Real-valued map sampled on a [`SphereGrid`], row-major over
/// (colatitude, longitude).
#[derive(Clone, Debug, PartialEq)]
pub struct SphereMap {
    grid: SphereGrid,
    values: Vec<f64>,
}

impl SphereMap {
    /// Wraps sample values; dimensions must match the grid and every value
    /// must be finite.
    pub fn new(grid: SphereGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_theta() * grid.n_phi() {
            return Err(Error::invalid(format!(
                "map has {} values but the grid needs {}",
                values.len(),
                grid.n_theta() * grid.n_phi()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("map contains non-finite values"));
        }
        Ok(SphereMap { grid, values })
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    #[inline]
    pub fn value(&self, i_theta: usize, j_phi: usize) -> f64 {
        self.values[i_theta * self.grid.n_phi() + j_phi]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Quadrature of the map over the sphere: Σ w_θ (2π/n_φ) X.
    pub fn integral(&self) -> f64 {
        let dphi = std::f64::consts::TAU / self.grid.n_phi() as f64;
        let mut acc = 0.0;
        for (i, w) in self.grid.colat_weights.iter().enumerate() {
            let mut row = 0.0;
            for j in 0..self.grid.n_phi() {
                row += self.value(i, j);
            }
            acc += w * row * dphi;
        }
        acc
    }
}
