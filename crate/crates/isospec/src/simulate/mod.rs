//! Replicate ensembles of random coefficient arrays.
//!
//! Two field constructions are available. A Gaussian field draws every
//! coefficient independently from the target power spectrum. A non-Gaussian
//! field starts from a base array whose m = 0 entries follow a chosen
//! centered law, then applies a Haar-random rotation so the ensemble law is
//! invariant under all rotations. The rotation mixes orders within each
//! degree only, so the power spectrum of the base array is preserved exactly
//! while odd-order cumulants of the m = 0 slot spread into every order and
//! show up as nonzero polyspectra.
//!
//! [`run_ensemble`] draws independent replicates from a per-replicate RNG
//! stream, so results are reproducible from the master seed alone and do not
//! depend on thread count. [`theoretical_polyspectra`] tabulates the exact
//! order-3 and order-4 spectra implied by a base-array description, which is
//! what the estimators in [`crate::spectra`] should recover within error
//! bands.

mod manifest;

pub use manifest::{read_ensemble, write_ensemble, EnsembleManifest, ReplicateRecord};

use crate::error::{Error, Result};
use crate::harmonics::{AngularPowerSpectrum, HarmonicCoeffs};
use crate::spectra::{principal_domain, CoeffEnsemble, PolySpectrum, SpectrumEntry};
use crate::wigner::{rotate_coefficients, sample_haar_rotation, wigner_3j_zero};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Centered law for the real m = 0 entry of a base array.
///
/// Each law is centered (mean zero) and keeps its natural scale; degree
/// variances are imposed later by rescaling, see [`BaseArraySpec::kappa`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum M0Law {
    /// Standard normal; the resulting field is Gaussian at this degree.
    Gaussian,
    /// Exponential with the given rate, shifted to mean zero.
    CenteredExponential { rate: f64 },
    /// Gamma with the given shape and rate, shifted to mean zero.
    CenteredGamma { shape: f64, rate: f64 },
}

impl M0Law {
    fn validate(&self) -> Result<()> {
        match *self {
            M0Law::Gaussian => Ok(()),
            M0Law::CenteredExponential { rate } => {
                if rate.is_finite() && rate > 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(format!(
                        "exponential rate must be positive and finite, got {rate}"
                    )))
                }
            }
            M0Law::CenteredGamma { shape, rate } => {
                if shape.is_finite() && shape > 0.0 && rate.is_finite() && rate > 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(format!(
                        "gamma shape and rate must be positive and finite, got {shape}, {rate}"
                    )))
                }
            }
        }
    }

    /// Cumulant of the unscaled law; orders 2 to 4.
    ///
    /// Centering shifts only the first cumulant, so these are the plain
    /// exponential and gamma cumulants: 2k/rate^3 and 6k/rate^4 with
    /// shape k = 1 for the exponential.
    fn raw_cumulant(&self, order: u32) -> f64 {
        assert!((2..=4).contains(&order), "tabulated orders are 2..=4");
        match *self {
            M0Law::Gaussian => {
                if order == 2 {
                    1.0
                } else {
                    0.0
                }
            }
            M0Law::CenteredExponential { rate } => match order {
                2 => rate.powi(-2),
                3 => 2.0 * rate.powi(-3),
                _ => 6.0 * rate.powi(-4),
            },
            M0Law::CenteredGamma { shape, rate } => match order {
                2 => shape * rate.powi(-2),
                3 => 2.0 * shape * rate.powi(-3),
                _ => 6.0 * shape * rate.powi(-4),
            },
        }
    }

    /// One centered draw at the law's natural scale.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            M0Law::Gaussian => rng.sample(StandardNormal),
            M0Law::CenteredExponential { rate } => {
                let d = Exp::new(rate).expect("rate validated on construction");
                d.sample(rng) - 1.0 / rate
            }
            M0Law::CenteredGamma { shape, rate } => {
                let d = Gamma::new(shape, 1.0 / rate).expect("parameters validated");
                d.sample(rng) - shape / rate
            }
        }
    }
}

/// Description of a base array: a target power spectrum together with the
/// per-degree law of the m = 0 entry.
///
/// Entries with m > 0 are always complex Gaussian. Degrees whose law is
/// [`M0Law::Gaussian`] contribute nothing beyond the power spectrum; a
/// skewed law at a single degree is enough to plant an order-3 spectrum
/// there without touching any other degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BaseArrayRepr", into = "BaseArrayRepr")]
pub struct BaseArraySpec {
    f: Vec<f64>,
    m0: Vec<M0Law>,
}

#[derive(Serialize, Deserialize)]
struct BaseArrayRepr {
    f: Vec<f64>,
    m0: Vec<M0Law>,
}

impl TryFrom<BaseArrayRepr> for BaseArraySpec {
    type Error = Error;

    fn try_from(r: BaseArrayRepr) -> Result<Self> {
        BaseArraySpec::new(r.f, r.m0)
    }
}

impl From<BaseArraySpec> for BaseArrayRepr {
    fn from(s: BaseArraySpec) -> Self {
        BaseArrayRepr { f: s.f, m0: s.m0 }
    }
}

impl BaseArraySpec {
    /// One law per degree; lengths must match and the spectrum must be a
    /// valid power spectrum.
    pub fn new(f: Vec<f64>, m0: Vec<M0Law>) -> Result<Self> {
        AngularPowerSpectrum::new(f.clone())?;
        if m0.len() != f.len() {
            return Err(Error::invalid(format!(
                "need one m = 0 law per degree: {} laws for {} degrees",
                m0.len(),
                f.len()
            )));
        }
        for law in &m0 {
            law.validate()?;
        }
        Ok(BaseArraySpec { f, m0 })
    }

    /// All degrees Gaussian; the resulting field matches [`FieldSpec::Gaussian`].
    pub fn gaussian(f: Vec<f64>) -> Result<Self> {
        let n = f.len();
        BaseArraySpec::new(f, vec![M0Law::Gaussian; n])
    }

    /// The same law at every degree.
    pub fn uniform(f: Vec<f64>, law: M0Law) -> Result<Self> {
        let n = f.len();
        BaseArraySpec::new(f, vec![law; n])
    }

    /// Replace the law at one degree.
    pub fn set_m0_law(&mut self, l: u32, law: M0Law) -> Result<()> {
        law.validate()?;
        if l > self.lmax() {
            return Err(Error::BandLimit {
                requested: l,
                available: self.lmax(),
            });
        }
        self.m0[l as usize] = law;
        Ok(())
    }

    pub fn lmax(&self) -> u32 {
        (self.f.len() - 1) as u32
    }

    pub fn f(&self, l: u32) -> f64 {
        self.f[l as usize]
    }

    pub fn f_values(&self) -> &[f64] {
        &self.f
    }

    pub fn m0_law(&self, l: u32) -> M0Law {
        self.m0[l as usize]
    }

    /// Cumulant of the scaled m = 0 entry at degree `l`; orders 2 to 4.
    ///
    /// The raw law is multiplied by s with s^2 raw_var = f_l, so the
    /// order-n cumulant is s^n times the raw one and `kappa(2, l)` is
    /// exactly `f(l)`.
    pub fn kappa(&self, order: u32, l: u32) -> Result<f64> {
        if !(2..=4).contains(&order) {
            return Err(Error::invalid(format!(
                "tabulated cumulant orders are 2..=4, got {order}"
            )));
        }
        if l > self.lmax() {
            return Err(Error::BandLimit {
                requested: l,
                available: self.lmax(),
            });
        }
        let law = self.m0[l as usize];
        let s = (self.f[l as usize] / law.raw_cumulant(2)).sqrt();
        Ok(s.powi(order as i32) * law.raw_cumulant(order))
    }
}

/// Field construction used by [`run_ensemble`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FieldSpec {
    /// Independent Gaussian coefficients with power spectrum `f`.
    Gaussian { f: Vec<f64> },
    /// Base array isotropized by a Haar-random rotation.
    Isotropized { base: BaseArraySpec },
}

/// Full description of an ensemble run.
///
/// Serializes to a flat JSON object; [`SimulationConfig::validate`] checks
/// the cross-field constraints and is called by [`run_ensemble`], so a
/// deserialized config cannot silently produce an inconsistent ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Band limit of every replicate.
    pub lmax: u32,
    /// Number of replicates; at least 1.
    pub n_replicates: usize,
    /// Seed of the master RNG; replicate i uses stream i.
    pub master_seed: u64,
    pub field: FieldSpec,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_replicates == 0 {
            return Err(Error::invalid("n_replicates must be at least 1"));
        }
        let field_lmax = match &self.field {
            FieldSpec::Gaussian { f } => {
                AngularPowerSpectrum::new(f.clone())?.lmax()
            }
            FieldSpec::Isotropized { base } => base.lmax(),
        };
        if field_lmax != self.lmax {
            return Err(Error::invalid(format!(
                "field band limit {field_lmax} does not match configured lmax {}",
                self.lmax
            )));
        }
        Ok(())
    }
}

/// One Gaussian coefficient array: Z_l0 real N(0, f_l), entries with m > 0
/// complex with independent N(0, f_l / 2) parts. Draw order is m = 0 then
/// ascending m within each degree, degrees ascending, so equal seeds give
/// equal arrays.
pub fn gaussian_coefficients<R: Rng + ?Sized>(
    f: &AngularPowerSpectrum,
    rng: &mut R,
) -> HarmonicCoeffs {
    let lmax = f.lmax();
    let mut c = HarmonicCoeffs::zero(lmax);
    for l in 0..=lmax {
        let fl = f.get(l);
        let z0 = fl.sqrt() * rng.sample::<f64, _>(StandardNormal);
        c.set(l, 0, Complex64::new(z0, 0.0))
            .expect("m = 0 entry is real");
        let sd = (fl / 2.0).sqrt();
        for m in 1..=l {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c.set(l, m as i32, Complex64::new(sd * re, sd * im))
                .expect("m > 0 entry is unconstrained");
        }
    }
    c
}

/// One base array: the m = 0 entry of each degree is drawn from its law and
/// rescaled to variance f_l; entries with m > 0 are complex Gaussian exactly
/// as in [`gaussian_coefficients`]. Same draw order, so a
/// [`BaseArraySpec::gaussian`] description reproduces the Gaussian arrays
/// draw for draw.
pub fn base_array<R: Rng + ?Sized>(spec: &BaseArraySpec, rng: &mut R) -> HarmonicCoeffs {
    let mut c = HarmonicCoeffs::zero(spec.lmax());
    for l in 0..=spec.lmax() {
        let fl = spec.f(l);
        let law = spec.m0_law(l);
        let s = (fl / law.raw_cumulant(2)).sqrt();
        let z0 = s * law.sample(rng);
        c.set(l, 0, Complex64::new(z0, 0.0))
            .expect("m = 0 entry is real");
        let sd = (fl / 2.0).sqrt();
        for m in 1..=l {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c.set(l, m as i32, Complex64::new(sd * re, sd * im))
                .expect("m > 0 entry is unconstrained");
        }
    }
    c
}

/// Apply one Haar-random rotation to the whole array. Degree powers are
/// untouched; everything the array's law had beyond them becomes
/// rotation-invariant in distribution.
pub fn isotropize<R: Rng + ?Sized>(c: &HarmonicCoeffs, rng: &mut R) -> HarmonicCoeffs {
    rotate_coefficients(c, &sample_haar_rotation(rng))
}

/// Draw the configured ensemble.
///
/// Replicate i seeds its own ChaCha stream i from the master seed, so the
/// result is independent of thread count and scheduling. Gaussian fields are
/// already rotation invariant and skip the isotropizing rotation.
pub fn run_ensemble(config: &SimulationConfig) -> Result<CoeffEnsemble> {
    config.validate()?;
    let spectrum = match &config.field {
        FieldSpec::Gaussian { f } => Some(AngularPowerSpectrum::new(f.clone())?),
        FieldSpec::Isotropized { .. } => None,
    };
    let replicates: Vec<HarmonicCoeffs> = (0..config.n_replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
            rng.set_stream(i as u64);
            match &config.field {
                FieldSpec::Gaussian { .. } => {
                    let f = spectrum.as_ref().expect("validated above");
                    gaussian_coefficients(f, &mut rng)
                }
                FieldSpec::Isotropized { base } => {
                    let c = base_array(base, &mut rng);
                    isotropize(&c, &mut rng)
                }
            }
        })
        .collect();
    let mut ensemble = CoeffEnsemble::new(replicates)?;
    ensemble.set_seed_lineage(seed_lineage(config.master_seed));
    Ok(ensemble)
}

pub(crate) fn seed_lineage(master_seed: u64) -> String {
    format!("chacha8(master_seed = {master_seed}, stream = replicate index)")
}

/// Exact order-3 or order-4 spectrum of the isotropized field described by
/// `spec`, tabulated over the whole principal domain.
///
/// Only the m = 0 entries carry cumulants beyond order 2, and the rotation
/// mixes orders within one degree, so entries with mixed degrees vanish and
/// the equal-degree entries are the m = 0 cumulant times the rotational
/// average of the rotation-matrix column products:
///
/// - order 3: `B(l,l,l) = w3j0(l,l,l) kappa_3(l)`,
/// - order 4: `T(l,l,l,l | d) = sqrt(2d+1) w3j0(l,l,d)^2 kappa_4(l)`.
///
/// Entries at odd diagonal degrees are exact zeros of the zero-argument
/// symbol. A Gaussian law yields the all-zero table.
pub fn theoretical_polyspectra(spec: &BaseArraySpec, p: u32) -> Result<PolySpectrum> {
    if !(3..=4).contains(&p) {
        return Err(Error::invalid(format!(
            "theoretical tables cover orders 3 and 4, got {p}"
        )));
    }
    let mut table = PolySpectrum::new(p)?;
    for key in principal_domain(p, spec.lmax())? {
        let l0 = key.l[0];
        let value = if key.l.iter().any(|&d| d != l0) {
            0.0
        } else if p == 3 {
            wigner_3j_zero(l0, l0, l0)? * spec.kappa(3, l0)?
        } else {
            let d = key.diag[0];
            let w = wigner_3j_zero(l0, l0, d)?;
            f64::from(2 * d + 1).sqrt() * w * w * spec.kappa(4, l0)?
        };
        table.insert(key, SpectrumEntry::plain(value))?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{polyspectrum_estimate, power_spectrum_estimate, PolyKey};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn law_cumulants_and_validation() {
        let g = M0Law::Gaussian;
        assert_eq!(g.raw_cumulant(2), 1.0);
        assert_eq!(g.raw_cumulant(3), 0.0);
        assert_eq!(g.raw_cumulant(4), 0.0);

        let e = M0Law::CenteredExponential { rate: 2.0 };
        assert!((e.raw_cumulant(2) - 0.25).abs() < 1e-15);
        assert!((e.raw_cumulant(3) - 0.25).abs() < 1e-15);
        assert!((e.raw_cumulant(4) - 0.375).abs() < 1e-15);

        let gm = M0Law::CenteredGamma {
            shape: 3.0,
            rate: 2.0,
        };
        assert!((gm.raw_cumulant(2) - 0.75).abs() < 1e-15);
        assert!((gm.raw_cumulant(3) - 0.75).abs() < 1e-15);
        assert!((gm.raw_cumulant(4) - 1.125).abs() < 1e-15);

        for bad in [
            M0Law::CenteredExponential { rate: 0.0 },
            M0Law::CenteredExponential { rate: f64::NAN },
            M0Law::CenteredGamma {
                shape: -1.0,
                rate: 2.0,
            },
            M0Law::CenteredGamma {
                shape: 1.0,
                rate: f64::INFINITY,
            },
        ] {
            assert!(BaseArraySpec::uniform(vec![1.0], bad).is_err());
        }
    }

    #[test]
    fn base_spec_accessors_and_scaled_cumulants() {
        assert!(BaseArraySpec::new(vec![1.0], vec![]).is_err());
        assert!(BaseArraySpec::gaussian(vec![-1.0]).is_err());
        assert!(BaseArraySpec::gaussian(vec![]).is_err());

        let mut spec = BaseArraySpec::gaussian(vec![1.0, 0.5, 4.0]).unwrap();
        assert_eq!(spec.lmax(), 2);
        assert_eq!(spec.m0_law(1), M0Law::Gaussian);
        spec.set_m0_law(2, M0Law::CenteredExponential { rate: 1.0 })
            .unwrap();
        assert!(spec
            .set_m0_law(3, M0Law::Gaussian)
            .is_err());

        // f = 4 with a unit-rate exponential scales draws by s = 2, so the
        // third and fourth cumulants pick up s^3 = 8 and s^4 = 16.
        assert!((spec.kappa(2, 2).unwrap() - 4.0).abs() < 1e-15);
        assert!((spec.kappa(3, 2).unwrap() - 16.0).abs() < 1e-14);
        assert!((spec.kappa(4, 2).unwrap() - 96.0).abs() < 1e-13);
        assert_eq!(spec.kappa(3, 1).unwrap(), 0.0);
        assert!((spec.kappa(2, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!(spec.kappa(5, 2).is_err());
        assert!(spec.kappa(3, 9).is_err());

        // Zero power silences the whole degree regardless of law.
        let dead = BaseArraySpec::uniform(vec![0.0], M0Law::CenteredExponential { rate: 1.0 })
            .unwrap();
        assert_eq!(dead.kappa(3, 0).unwrap(), 0.0);
    }

    #[test]
    fn law_sample_moments_match_the_stated_cumulants() {
        let n = 200_000;
        for (law, var, k3) in [
            (M0Law::CenteredExponential { rate: 1.5 }, 1.0 / 2.25, 2.0 / 3.375),
            (
                M0Law::CenteredGamma {
                    shape: 2.5,
                    rate: 2.0,
                },
                0.625,
                0.625,
            ),
        ] {
            let mut r = rng(4242);
            let xs: Vec<f64> = (0..n).map(|_| law.sample(&mut r)).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
            let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n as f64;
            assert!(mean.abs() < 0.02, "mean {mean} for {law:?}");
            assert!((m2 - var).abs() < 0.02, "variance {m2} vs {var} for {law:?}");
            assert!((m3 - k3).abs() < 0.12, "skew {m3} vs {k3} for {law:?}");
        }
    }

    #[test]
    fn gaussian_base_spec_reproduces_gaussian_draws() {
        let f = AngularPowerSpectrum::new(vec![1.0, 0.5, 0.25, 2.0]).unwrap();
        let spec = BaseArraySpec::gaussian(f.values().to_vec()).unwrap();
        let a = gaussian_coefficients(&f, &mut rng(7));
        let b = base_array(&spec, &mut rng(7));
        assert_eq!(a, b);
    }

    #[test]
    fn base_array_structure_and_moments() {
        let mut spec = BaseArraySpec::gaussian(vec![1.0, 1.0, 1.0]).unwrap();
        spec.set_m0_law(2, M0Law::CenteredExponential { rate: 1.0 })
            .unwrap();

        let n = 50_000;
        let mut r = rng(90210);
        let mut sum0 = 0.0;
        let mut sum0_sq = 0.0;
        let mut sum0_cu = 0.0;
        let mut cross = 0.0;
        let mut pow21 = 0.0;
        for _ in 0..n {
            let c = base_array(&spec, &mut r);
            for (_, m, z) in c.iter() {
                if m == 0 {
                    assert_eq!(z.im, 0.0);
                }
            }
            let z20 = c.get(2, 0).re;
            sum0 += z20;
            sum0_sq += z20 * z20;
            sum0_cu += z20 * z20 * z20;
            cross += z20 * c.get(1, 0).re;
            pow21 += c.get(2, 1).norm_sqr();
        }
        let nf = n as f64;
        let mean = sum0 / nf;
        assert!(mean.abs() < 0.03, "mean {mean}");
        assert!((sum0_sq / nf - 1.0).abs() < 0.06, "variance {}", sum0_sq / nf);
        // Third raw moment of the centered draw equals the third cumulant, 2.
        assert!((sum0_cu / nf - 2.0).abs() < 0.4, "skew {}", sum0_cu / nf);
        assert!((cross / nf).abs() < 0.03, "cross correlation {}", cross / nf);
        assert!((pow21 / nf - 1.0).abs() < 0.05, "|Z_21|^2 mean {}", pow21 / nf);

        // A zero-power degree is identically zero whatever the law.
        let dead =
            BaseArraySpec::uniform(vec![0.0, 1.0], M0Law::CenteredExponential { rate: 0.5 })
                .unwrap();
        let c = base_array(&dead, &mut rng(3));
        assert_eq!(c.get(0, 0), Complex64::new(0.0, 0.0));
        assert!(c.get(1, 1).norm() > 0.0);
    }

    #[test]
    fn isotropize_preserves_degree_power() {
        let f = AngularPowerSpectrum::new(vec![1.0, 2.0, 0.5, 1.5, 0.25, 1.0, 3.0]).unwrap();
        let mut r = rng(55);
        let c = gaussian_coefficients(&f, &mut r);
        let rotated = isotropize(&c, &mut r);
        let mut moved = 0.0f64;
        for l in 0..=6 {
            let before = c.degree_power(l);
            let after = rotated.degree_power(l);
            assert!(
                (before - after).abs() <= 1e-12 * before.max(1.0),
                "degree {l}: {before} vs {after}"
            );
        }
        for l in 1..=6u32 {
            for m in -(l as i32)..=l as i32 {
                moved = moved.max((c.get(l, m) - rotated.get(l, m)).norm());
            }
        }
        assert!(moved > 1e-3, "rotation should actually move coefficients");
    }

    #[test]
    fn run_ensemble_is_deterministic_and_stream_seeded() {
        let config = SimulationConfig {
            lmax: 3,
            n_replicates: 4,
            master_seed: 99,
            field: FieldSpec::Gaussian {
                f: vec![1.0, 0.5, 0.25, 0.125],
            },
        };
        let a = run_ensemble(&config).unwrap();
        let b = run_ensemble(&config).unwrap();
        assert_eq!(a.replicates(), b.replicates());
        assert_eq!(a.seed_lineage(), Some(seed_lineage(99).as_str()));
        assert_ne!(a.replicates()[0], a.replicates()[1]);

        let reseeded = SimulationConfig {
            master_seed: 100,
            ..config.clone()
        };
        assert_ne!(
            run_ensemble(&reseeded).unwrap().replicates()[0],
            a.replicates()[0]
        );

        let singleton = SimulationConfig {
            n_replicates: 1,
            ..config.clone()
        };
        assert_eq!(run_ensemble(&singleton).unwrap().n_replicates(), 1);

        // The first replicates agree regardless of how many follow.
        let shorter = SimulationConfig {
            n_replicates: 2,
            ..config.clone()
        };
        assert_eq!(
            run_ensemble(&shorter).unwrap().replicates(),
            &a.replicates()[..2]
        );

        for bad in [
            SimulationConfig {
                n_replicates: 0,
                ..config.clone()
            },
            SimulationConfig {
                lmax: 2,
                ..config.clone()
            },
            SimulationConfig {
                field: FieldSpec::Gaussian {
                    f: vec![1.0, f64::NAN, 0.25, 0.125],
                },
                ..config.clone()
            },
            SimulationConfig {
                field: FieldSpec::Isotropized {
                    base: BaseArraySpec::gaussian(vec![1.0]).unwrap(),
                },
                ..config
            },
        ] {
            assert!(run_ensemble(&bad).is_err());
        }
    }

    #[test]
    fn gaussian_ensemble_power_is_unbiased() {
        let f = vec![1.0, 0.5, 0.25, 0.125];
        let config = SimulationConfig {
            lmax: 3,
            n_replicates: 300,
            master_seed: 17,
            field: FieldSpec::Gaussian { f: f.clone() },
        };
        let e = run_ensemble(&config).unwrap();
        let hat = power_spectrum_estimate(&e);
        for l in 0..=3u32 {
            let band = 5.0 * f[l as usize] * (2.0 / (300.0 * (2 * l + 1) as f64)).sqrt();
            assert!(
                (hat.get(l) - f[l as usize]).abs() < band,
                "degree {l}: {} vs {}",
                hat.get(l),
                f[l as usize]
            );
        }
    }

    #[test]
    fn isotropized_ensemble_recovers_the_planted_order3_spectrum() {
        let base =
            BaseArraySpec::uniform(vec![0.0, 0.0, 1.0], M0Law::CenteredExponential { rate: 1.0 })
                .unwrap();
        let config = SimulationConfig {
            lmax: 2,
            n_replicates: 2500,
            master_seed: 2024,
            field: FieldSpec::Isotropized { base: base.clone() },
        };
        let e = run_ensemble(&config).unwrap();
        let hat = polyspectrum_estimate(3, &e, 2).unwrap();
        let truth = theoretical_polyspectra(&base, 3).unwrap();

        let key = PolyKey::new([2, 2, 2], vec![]);
        let target = truth.value(&key);
        assert!((target - (-0.4780914437337574)).abs() < 1e-12);
        let entry = hat.get(&key).unwrap();
        let se = entry.se.unwrap();
        assert!(se > 0.0);
        assert!(
            (entry.value - target).abs() < 5.0 * se,
            "estimate {} vs target {target} with se {se}",
            entry.value
        );
        // The signal is far from zero at this replicate count.
        assert!(entry.value < -0.2, "planted skew should be visible");
    }

    #[test]
    fn theoretical_tables_cover_the_principal_domain() {
        let exp1 = BaseArraySpec::uniform(vec![1.0; 5], M0Law::CenteredExponential { rate: 1.0 })
            .unwrap();

        let b = theoretical_polyspectra(&exp1, 3).unwrap();
        let domain = principal_domain(3, 4).unwrap();
        assert_eq!(b.len(), domain.len());
        for key in &domain {
            let v = b.value(key);
            if key.l.iter().any(|&d| d != key.l[0]) {
                assert_eq!(v, 0.0, "cross-degree entry {key:?}");
            }
        }
        assert!((b.value(&PolyKey::new([2, 2, 2], vec![])) - (-0.4780914437337574)).abs() < 1e-12);

        let t = theoretical_polyspectra(&exp1, 4).unwrap();
        // 3j(2,2,0)^2 = 1/5 and kappa_4 = 6, so the d = 0 entry is 6/5; odd
        // d vanishes by parity; d = 2 carries sqrt(5) (2/35) 6.
        assert!((t.value(&PolyKey::new([2, 2, 2, 2], [0])) - 1.2).abs() < 1e-12);
        assert_eq!(t.value(&PolyKey::new([2, 2, 2, 2], [1])), 0.0);
        assert!(
            (t.value(&PolyKey::new([2, 2, 2, 2], [2])) - 0.7666518779999279).abs() < 1e-12
        );
        assert_eq!(t.value(&PolyKey::new([1, 1, 2, 2], [2])), 0.0);

        // Gamma(3, 2) with f = 1 rescales to kappa_4 = 2, so d = 0 gives 2/5.
        let gm = BaseArraySpec::uniform(
            vec![1.0; 3],
            M0Law::CenteredGamma {
                shape: 3.0,
                rate: 2.0,
            },
        )
        .unwrap();
        let tg = theoretical_polyspectra(&gm, 4).unwrap();
        assert!((tg.value(&PolyKey::new([2, 2, 2, 2], [0])) - 0.4).abs() < 1e-13);

        let gauss = BaseArraySpec::gaussian(vec![1.0; 4]).unwrap();
        for p in [3, 4] {
            let table = theoretical_polyspectra(&gauss, p).unwrap();
            assert!(table.entries().all(|(_, e)| e.value == 0.0));
        }

        assert!(theoretical_polyspectra(&exp1, 2).is_err());
        assert!(theoretical_polyspectra(&exp1, 5).is_err());
    }

    #[test]
    fn config_json_round_trip_and_validation() {
        let mut base = BaseArraySpec::gaussian(vec![1.0, 0.5, 0.25]).unwrap();
        base.set_m0_law(
            2,
            M0Law::CenteredGamma {
                shape: 2.0,
                rate: 1.0,
            },
        )
        .unwrap();
        let config = SimulationConfig {
            lmax: 2,
            n_replicates: 10,
            master_seed: 7,
            field: FieldSpec::Isotropized { base },
        };
        let text = serde_json::to_string_pretty(&config).unwrap();
        let back: SimulationConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, config);
        back.validate().unwrap();

        // A negative power spectrum inside a base spec fails at parse time.
        let bad = r#"{
            "lmax": 0,
            "n_replicates": 1,
            "master_seed": 1,
            "field": { "type": "isotropized",
                       "base": { "f": [-1.0], "m0": [{ "law": "gaussian" }] } }
        }"#;
        assert!(serde_json::from_str::<SimulationConfig>(bad).is_err());

        // A Gaussian field's spectrum is checked by validate().
        let lenient = r#"{
            "lmax": 0,
            "n_replicates": 1,
            "master_seed": 1,
            "field": { "type": "gaussian", "f": [-1.0] }
        }"#;
        let parsed: SimulationConfig = serde_json::from_str(lenient).unwrap();
        assert!(parsed.validate().is_err());
    }
}
