//! Set partitions, bidirectional moment/cumulant conversions, and plug-in
//! sample cumulants of complex ensembles.
//!
//! Conversions work over an index set {0, .., n-1}; callers supply subset
//! moments (or cumulants) through a closure keyed by the sorted subset.

use crate::error::{Error, Result};
use crate::numeric::KahanComplex;
use num_complex::Complex64;

/// Largest supported conversion order; Bell(8) = 4140 partitions.
pub const MAX_PARTITION_SET: usize = 8;

/// A set partition of {0, .., n-1} in canonical form: blocks internally
/// ascending and ordered by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }
}

/// All set partitions of {0, .., n-1}, ordered by block count and then
/// lexicographically on the canonical block list.
pub fn partitions(n: usize) -> Result<Vec<Partition>> {
    if n == 0 || n > MAX_PARTITION_SET {
        return Err(Error::invalid(format!(
            "partitions supports set sizes 1..={MAX_PARTITION_SET}, got {n}"
        )));
    }
    // Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[..i]).
    let mut out = Vec::new();
    let mut a = vec![0usize; n];
    loop {
        let k = a.iter().copied().max().unwrap() + 1;
        let mut blocks = vec![Vec::new(); k];
        for (i, &b) in a.iter().enumerate() {
            blocks[b].push(i);
        }
        out.push(Partition { blocks });
        // Advance to the next growth string; position 0 is pinned to 0.
        let mut i = n - 1;
        while i > 0 {
            let cap = 1 + a[..i].iter().copied().max().unwrap();
            if a[i] < cap {
                a[i] += 1;
                for v in a.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                break;
            }
            i -= 1;
        }
        if i == 0 {
            break;
        }
    }
    out.sort_by(|x, y| {
        x.block_count()
            .cmp(&y.block_count())
            .then_with(|| x.blocks.cmp(&y.blocks))
    });
    Ok(out)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Joint cumulant from subset moments over a precomputed partition list.
///
/// Cum = Σ_partitions (-1)^(m-1) (m-1)! Π_blocks E[Π X]. The closure gets a
/// sorted subset and may return None to signal a missing entry.
pub fn cumulant_from_moments_with<F>(parts: &[Partition], moments: F) -> Result<Complex64>
where
    F: Fn(&[usize]) -> Option<Complex64>,
{
    let mut acc = KahanComplex::default();
    for p in parts {
        let m = p.block_count();
        let sign = if (m - 1) % 2 == 0 { 1.0 } else { -1.0 };
        let mut prod = Complex64::new(sign * factorial(m - 1), 0.0);
        for b in &p.blocks {
            let v = moments(b).ok_or_else(|| {
                Error::invalid(format!("missing moment for subset {b:?}"))
            })?;
            prod *= v;
        }
        acc.add(prod);
    }
    Ok(acc.value())
}

/// Joint cumulant of {0, .., n-1} from its subset moments.
pub fn cumulant_from_moments<F>(moments: F, n: usize) -> Result<Complex64>
where
    F: Fn(&[usize]) -> Option<Complex64>,
{
    cumulant_from_moments_with(&partitions(n)?, moments)
}

/// Joint moment of {0, .., n-1} from its subset cumulants:
/// E[Π X] = Σ_partitions Π_blocks Cum(X_block).
pub fn moment_from_cumulants<F>(cumulants: F, n: usize) -> Result<Complex64>
where
    F: Fn(&[usize]) -> Option<Complex64>,
{
    let mut acc = KahanComplex::default();
    for p in partitions(n)? {
        let mut prod = Complex64::new(1.0, 0.0);
        for b in &p.blocks {
            let v = cumulants(b).ok_or_else(|| {
                Error::invalid(format!("missing cumulant for subset {b:?}"))
            })?;
            prod *= v;
        }
        acc.add(prod);
    }
    Ok(acc.value())
}

/// Replicated complex observations: N rows (replicates), p columns (variables).
#[derive(Debug, Clone)]
pub struct JointSample {
    n_reps: usize,
    n_vars: usize,
    values: Vec<Complex64>,
}

impl JointSample {
    /// Row-major values of shape N x n_vars; N >= 2, entries finite.
    pub fn new(n_vars: usize, values: Vec<Complex64>) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::invalid("sample needs at least one variable"));
        }
        if values.len() % n_vars != 0 {
            return Err(Error::invalid(format!(
                "value count {} is not a multiple of n_vars {n_vars}",
                values.len()
            )));
        }
        let n_reps = values.len() / n_vars;
        if n_reps < 2 {
            return Err(Error::invalid(format!(
                "sample needs at least 2 replicates, got {n_reps}"
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("sample values must be finite"));
        }
        Ok(JointSample {
            n_reps,
            n_vars,
            values,
        })
    }

    pub fn n_reps(&self) -> usize {
        self.n_reps
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    #[inline]
    pub fn value(&self, rep: usize, var: usize) -> Complex64 {
        self.values[rep * self.n_vars + var]
    }
}

/// Mean subset products E^[Π_{i in A} X_i] for every nonempty A of the
/// selected columns, indexed by bitmask. Shared by the plain and jackknife
/// estimator paths.
pub(crate) fn subset_product_sums(s: &JointSample, cols: &[usize]) -> Vec<KahanComplex> {
    let p = cols.len();
    let full = 1usize << p;
    let mut sums = vec![KahanComplex::default(); full];
    let mut prods = vec![Complex64::new(1.0, 0.0); full];
    for r in 0..s.n_reps {
        for mask in 1..full {
            let low = mask.trailing_zeros() as usize;
            prods[mask] = prods[mask & (mask - 1)] * s.value(r, cols[low]);
        }
        for mask in 1..full {
            sums[mask].add(prods[mask]);
        }
    }
    sums
}

pub(crate) fn masked_subset(local: &[usize]) -> usize {
    local.iter().fold(0usize, |m, &i| m | (1 << i))
}

/// Plug-in sample joint cumulant of the selected columns (a multiset; order
/// does not matter). No conjugation is applied; supply conjugated columns
/// explicitly when needed. Requires p <= 6 and N > p.
pub fn sample_joint_cumulant(s: &JointSample, indices: &[usize]) -> Result<Complex64> {
    let p = indices.len();
    if p == 0 || p > 6 {
        return Err(Error::invalid(format!(
            "sample cumulant order must be 1..=6, got {p}"
        )));
    }
    if let Some(&bad) = indices.iter().find(|&&c| c >= s.n_vars) {
        return Err(Error::invalid(format!(
            "column {bad} out of range for {} variables",
            s.n_vars
        )));
    }
    if s.n_reps <= p {
        return Err(Error::invalid(format!(
            "need more replicates ({}) than the cumulant order ({p})",
            s.n_reps
        )));
    }
    let mut cols = indices.to_vec();
    cols.sort_unstable();
    let sums = subset_product_sums(s, &cols);
    let inv_n = 1.0 / s.n_reps as f64;
    let parts = partitions(p)?;
    cumulant_from_moments_with(&parts, |subset| {
        Some(sums[masked_subset(subset)].value() * inv_n)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn bell(n: usize) -> usize {
        partitions(n).unwrap().len()
    }

    #[test]
    fn partition_counts_are_bell_numbers() {
        assert_eq!(bell(1), 1);
        assert_eq!(bell(2), 2);
        assert_eq!(bell(3), 5);
        assert_eq!(bell(4), 15);
        assert_eq!(bell(8), 4140);
        assert!(partitions(0).is_err());
        assert!(partitions(9).is_err());
    }

    #[test]
    fn partitions_are_canonical_and_cover() {
        for n in 1..=6 {
            let ps = partitions(n).unwrap();
            for p in &ps {
                let mut seen = vec![false; n];
                for b in &p.blocks {
                    assert!(!b.is_empty());
                    assert!(b.windows(2).all(|w| w[0] < w[1]));
                    for &i in b {
                        assert!(!seen[i], "index {i} repeated");
                        seen[i] = true;
                    }
                }
                assert!(seen.iter().all(|&s| s));
            }
            // Ordered by block count: single block first, singletons last.
            assert_eq!(ps[0].block_count(), 1);
            assert_eq!(ps[ps.len() - 1].block_count(), n);
            for w in ps.windows(2) {
                assert!(w[0].block_count() <= w[1].block_count());
            }
        }
    }

    #[test]
    fn three_element_partitions_enumerated() {
        let ps = partitions(3).unwrap();
        let want: Vec<Vec<Vec<usize>>> = vec![
            vec![vec![0, 1, 2]],
            vec![vec![0], vec![1, 2]],
            vec![vec![0, 1], vec![2]],
            vec![vec![0, 2], vec![1]],
            vec![vec![0], vec![1], vec![2]],
        ];
        let got: Vec<_> = ps.into_iter().map(|p| p.blocks).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn centered_third_cumulant_is_third_moment() {
        // With vanishing first moments only the full block survives.
        let m3 = Complex64::new(0.4, -1.1);
        let c = cumulant_from_moments(
            |s| {
                Some(match s.len() {
                    1 => Complex64::new(0.0, 0.0),
                    2 => Complex64::new(0.3, 0.2),
                    _ => m3,
                })
            },
            3,
        )
        .unwrap();
        assert!((c - m3).norm() < 1e-15);
    }

    #[test]
    fn gaussian_fourth_cumulant_vanishes() {
        // Standard normal powers: E X^2 = 1, E X^4 = 3, odd moments 0.
        let c = cumulant_from_moments(
            |s| {
                Some(Complex64::new(
                    match s.len() {
                        2 => 1.0,
                        4 => 3.0,
                        _ => 0.0,
                    },
                    0.0,
                ))
            },
            4,
        )
        .unwrap();
        assert!(c.norm() < 1e-14);
    }

    #[test]
    fn exponential_fourth_cumulant() {
        // Moments of exponential(1): E X^k = k!.
        let c = cumulant_from_moments(
            |s| Some(Complex64::new(factorial(s.len()), 0.0)),
            4,
        )
        .unwrap();
        assert!((c.re - 6.0).abs() < 1e-12 && c.im == 0.0);
    }

    #[test]
    fn scalar_third_moment_from_cumulants() {
        let (k1, k2, k3) = (0.7, 1.3, -0.4);
        let m = moment_from_cumulants(
            |s| {
                Some(Complex64::new(
                    match s.len() {
                        1 => k1,
                        2 => k2,
                        _ => k3,
                    },
                    0.0,
                ))
            },
            3,
        )
        .unwrap();
        let want = k3 + 3.0 * k1 * k2 + k1 * k1 * k1;
        assert!((m.re - want).abs() < 1e-14);
    }

    #[test]
    fn only_first_cumulant_gives_power_of_mean() {
        let k1 = Complex64::new(0.9, 0.3);
        for n in 1..=6 {
            let m = moment_from_cumulants(
                |s| Some(if s.len() == 1 { k1 } else { Complex64::default() }),
                n,
            )
            .unwrap();
            assert!((m - k1.powu(n as u32)).norm() < 1e-12);
        }
    }

    #[test]
    fn conversions_invert_each_other() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6usize {
            // Random cumulant value for every nonempty subset, by bitmask.
            let table: Vec<Complex64> = (0..1usize << n)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let cum = |s: &[usize]| Some(table[masked_subset(s)]);
            // Moments of every subset via relabeling into {0..k-1}.
            let mut moments = vec![Complex64::default(); 1usize << n];
            for mask in 1..1usize << n {
                let members: Vec<usize> =
                    (0..n).filter(|i| mask & (1 << i) != 0).collect();
                moments[mask] = moment_from_cumulants(
                    |local: &[usize]| {
                        let global: Vec<usize> =
                            local.iter().map(|&i| members[i]).collect();
                        cum(&global)
                    },
                    members.len(),
                )
                .unwrap();
            }
            let back = cumulant_from_moments(
                |s: &[usize]| Some(moments[masked_subset(s)]),
                n,
            )
            .unwrap();
            let want = table[(1usize << n) - 1];
            assert!((back - want).norm() < 1e-12, "n={n}: {back} vs {want}");
        }
    }

    fn sample_from<F: FnMut(&mut ChaCha8Rng) -> Complex64>(
        n: usize,
        mut gen: F,
        seed: u64,
    ) -> JointSample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        JointSample::new(1, (0..n).map(|_| gen(&mut rng)).collect()).unwrap()
    }

    #[test]
    fn sample_cumulant_validation() {
        let s = JointSample::new(
            2,
            vec![Complex64::new(1.0, 0.0); 8],
        )
        .unwrap();
        assert!(sample_joint_cumulant(&s, &[]).is_err());
        assert!(sample_joint_cumulant(&s, &[0; 7]).is_err());
        assert!(sample_joint_cumulant(&s, &[2]).is_err());
        // N = 4 is not enough for order 4.
        assert!(sample_joint_cumulant(&s, &[0, 0, 1, 1]).is_err());
        assert!(JointSample::new(3, vec![Complex64::default(); 4]).is_err());
        assert!(JointSample::new(1, vec![Complex64::new(f64::NAN, 0.0); 4]).is_err());
    }

    #[test]
    fn sample_cumulant_is_multilinear_and_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let vals: Vec<Complex64> = (0..300)
            .map(|_| Complex64::new(rng.random::<f64>(), rng.random::<f64>() - 0.5))
            .collect();
        let c = Complex64::new(-1.7, 0.4);
        let scaled: Vec<Complex64> = vals
            .chunks(3)
            .flat_map(|row| [row[0] * c, row[1], row[2]])
            .collect();
        let s = JointSample::new(3, vals).unwrap();
        let t = JointSample::new(3, scaled).unwrap();
        let base = sample_joint_cumulant(&s, &[0, 1, 2]).unwrap();
        let scaled = sample_joint_cumulant(&t, &[0, 1, 2]).unwrap();
        assert!((scaled - c * base).norm() < 1e-12 * base.norm().max(1.0));
        // Exact permutation invariance.
        let perm = sample_joint_cumulant(&s, &[2, 0, 1]).unwrap();
        assert_eq!(base, perm);
    }

    #[test]
    fn gaussian_sample_third_cumulant_near_zero() {
        let n = 100_000;
        let s = sample_from(
            n,
            |rng| Complex64::new(StandardNormal.sample(rng), 0.0),
            42,
        );
        let k3 = sample_joint_cumulant(&s, &[0, 0, 0]).unwrap();
        let band = 5.0 * (6.0 / n as f64).sqrt();
        assert!(k3.re.abs() < band, "{} vs {band}", k3.re);
        assert_eq!(k3.im, 0.0);
    }

    #[test]
    fn exponential_sample_third_cumulant() {
        let n = 100_000;
        let s = sample_from(
            n,
            |rng| Complex64::new(-(1.0 - rng.random::<f64>()).ln(), 0.0),
            43,
        );
        let k3 = sample_joint_cumulant(&s, &[0, 0, 0]).unwrap();
        // Asymptotic variance of the third k-statistic for exp(1) is ~216/N.
        let band = 5.0 * (216.0 / n as f64).sqrt();
        assert!((k3.re - 2.0).abs() < band, "{} not in 2 +- {band}", k3.re);
    }

    #[test]
    fn independent_sum_adds_cumulants() {
        let n = 200_000;
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let vals: Vec<Complex64> = (0..n)
            .map(|_| {
                let x = -(1.0 - rng.random::<f64>()).ln();
                let g: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(x + g, 0.0)
            })
            .collect();
        let s = JointSample::new(1, vals).unwrap();
        let k3 = sample_joint_cumulant(&s, &[0, 0, 0]).unwrap();
        // Third cumulant of exp(1) + independent normal is still 2.
        let band = 5.0 * (500.0 / n as f64).sqrt();
        assert!((k3.re - 2.0).abs() < band, "{} not in 2 +- {band}", k3.re);
    }
}
