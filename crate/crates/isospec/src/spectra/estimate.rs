//! Replicate-ensemble estimators: power spectrum, polyspectra with jackknife
//! standard errors, and bicoherence.
//!
//! Estimation averages over independent coefficient replicates rather than
//! over orders within one map, so every key gets a distribution-free
//! leave-one-replicate-out standard error. Order summation is restricted to
//! zero-sum tuples; everything else is consistent at zero and would only add
//! variance.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cumulants::{cumulant_from_moments_with, masked_subset, partitions, Partition};
use crate::error::{Error, Result};
use crate::harmonics::{AngularPowerSpectrum, HarmonicCoeffs};
use crate::numeric::KahanComplex;

use super::chain::{chain_weight, for_each_zero_sum};
use super::{principal_domain, PolyKey, PolySpectrum, SpectrumEntry};

/// Independent coefficient replicates sharing one band limit.
#[derive(Clone, Debug)]
pub struct CoeffEnsemble {
    replicates: Vec<HarmonicCoeffs>,
    lmax: u32,
    seed_lineage: Option<String>,
}

impl CoeffEnsemble {
    /// At least one replicate, all with the same band limit. Estimators
    /// state their own minimum counts.
    pub fn new(replicates: Vec<HarmonicCoeffs>) -> Result<Self> {
        if replicates.is_empty() {
            return Err(Error::invalid("an ensemble needs at least 1 replicate"));
        }
        let lmax = replicates[0].lmax();
        if replicates.iter().any(|r| r.lmax() != lmax) {
            return Err(Error::invalid("replicates disagree on the band limit"));
        }
        Ok(CoeffEnsemble {
            replicates,
            lmax,
            seed_lineage: None,
        })
    }

    /// Records where the randomness came from (master seed, stream layout).
    pub fn set_seed_lineage(&mut self, lineage: impl Into<String>) {
        self.seed_lineage = Some(lineage.into());
    }

    pub fn seed_lineage(&self) -> Option<&str> {
        self.seed_lineage.as_deref()
    }

    pub fn lmax(&self) -> u32 {
        self.lmax
    }

    pub fn n_replicates(&self) -> usize {
        self.replicates.len()
    }

    pub fn replicates(&self) -> &[HarmonicCoeffs] {
        &self.replicates
    }
}

/// Mean over replicates of the per-degree average power,
/// f̂_ℓ = N⁻¹ Σ_reps (2ℓ+1)⁻¹ Σ_m |Z_ℓ^m|².
pub fn power_spectrum_estimate(e: &CoeffEnsemble) -> AngularPowerSpectrum {
    let n = e.n_replicates() as f64;
    let mut f = vec![0.0_f64; e.lmax() as usize + 1];
    for rep in e.replicates() {
        for (l, slot) in f.iter_mut().enumerate() {
            *slot += rep.degree_power(l as u32);
        }
    }
    for (l, slot) in f.iter_mut().enumerate() {
        *slot /= n * (2 * l + 1) as f64;
    }
    AngularPowerSpectrum::new(f).expect("replicate power is nonnegative and finite")
}

/// Order-p polyspectrum estimate over the principal domain up to `lmax`,
/// with a jackknife standard error per key. Needs at least p + 1 replicates
/// so every subset moment has a leave-one-out version. Keys run in parallel;
/// the reduction within a key is sequential, so results are deterministic.
pub fn polyspectrum_estimate(p: u32, e: &CoeffEnsemble, lmax: u32) -> Result<PolySpectrum> {
    let n = e.n_replicates();
    if n < p as usize + 1 {
        return Err(Error::invalid(format!(
            "order-{p} estimation needs at least {} replicates, got {n}",
            p + 1
        )));
    }
    if lmax > e.lmax() {
        return Err(Error::BandLimit {
            requested: lmax,
            available: e.lmax(),
        });
    }
    let parts = partitions(p as usize)?;
    let keys = principal_domain(p, lmax)?;
    let estimates = keys
        .into_par_iter()
        .map(|key| key_estimate(&parts, &key, e).map(|entry| (key, entry)))
        .collect::<Result<Vec<_>>>()?;
    let mut table = PolySpectrum::new(p)?;
    for (key, entry) in estimates {
        table.insert(key, entry)?;
    }
    Ok(table)
}

/// One key: the 3j-weighted combination of joint sample cumulants over all
/// zero-sum order tuples. The reported value is the real part; imaginary
/// scatter stays folded into the jackknife standard error.
fn key_estimate(parts: &[Partition], key: &PolyKey, e: &CoeffEnsemble) -> Result<SpectrumEntry> {
    let p = key.l.len();
    let n = e.n_replicates();
    let reps = e.replicates();
    let nmask = 1_usize << p;

    let mut full = KahanComplex::default();
    let mut loo = vec![Complex64::new(0.0, 0.0); n]; // leave-one-out estimates
    let mut cols = vec![vec![Complex64::new(0.0, 0.0); n]; p];
    let mut prods = vec![Complex64::new(0.0, 0.0); n * nmask];

    for_each_zero_sum(&key.l, &mut |m| {
        let w = chain_weight(&key.l, m, &key.diag)?;
        if w == 0.0 {
            return Ok(());
        }
        for (i, col) in cols.iter_mut().enumerate() {
            for (r, slot) in col.iter_mut().enumerate() {
                *slot = reps[r].get(key.l[i], m[i]);
            }
        }
        // Subset products per replicate double as the correction that
        // deletes one replicate from each subset moment.
        let mut sums = vec![KahanComplex::default(); nmask];
        for r in 0..n {
            let row = &mut prods[r * nmask..(r + 1) * nmask];
            row[0] = Complex64::new(1.0, 0.0);
            for mask in 1..nmask {
                let low = mask.trailing_zeros() as usize;
                row[mask] = row[mask & (mask - 1)] * cols[low][r];
            }
            for (mask, s) in sums.iter_mut().enumerate().skip(1) {
                s.add(row[mask]);
            }
        }
        let sums: Vec<Complex64> = sums.iter().map(|s| s.value()).collect();

        let kap = cumulant_from_moments_with(parts, |sub| {
            Some(sums[masked_subset(sub)] / n as f64)
        })?;
        full.add(kap * w);

        for (r, out) in loo.iter_mut().enumerate() {
            let row = &prods[r * nmask..(r + 1) * nmask];
            let kap_r = cumulant_from_moments_with(parts, |sub| {
                let mask = masked_subset(sub);
                Some((sums[mask] - row[mask]) / (n - 1) as f64)
            })?;
            *out += kap_r * w;
        }
        Ok(())
    })?;

    let mut mean = Complex64::new(0.0, 0.0);
    for v in &loo {
        mean += v;
    }
    mean /= n as f64;
    let mut scatter = 0.0;
    for v in &loo {
        scatter += (v - mean).norm_sqr();
    }
    let se = ((n as f64 - 1.0) / n as f64 * scatter).sqrt();
    Ok(SpectrumEntry {
        value: full.value().re,
        se: Some(se),
    })
}

/// Ratio table b(ℓ₁,ℓ₂,ℓ₃) / √(f_{ℓ₁} f_{ℓ₂} f_{ℓ₃}); standard errors,
/// when present, scale by the same factor. Degrees past the band limit of
/// `f` count as vanishing.
pub fn bicoherence(b: &PolySpectrum, f: &AngularPowerSpectrum) -> Result<PolySpectrum> {
    if b.order() != 3 {
        return Err(Error::invalid(format!(
            "bicoherence needs an order-3 table, got order {}",
            b.order()
        )));
    }
    let mut out = PolySpectrum::new(3)?;
    for (key, entry) in b.entries() {
        let mut denom = 1.0;
        for &l in &key.l {
            let fl = if l <= f.lmax() { f.get(l) } else { 0.0 };
            if fl <= 0.0 {
                return Err(Error::ZeroSpectrum(l));
            }
            denom *= fl;
        }
        let denom = denom.sqrt();
        out.insert(
            key.clone(),
            SpectrumEntry {
                value: entry.value / denom,
                se: entry.se.map(|s| s / denom),
            },
        )?;
    }
    Ok(out)
}
