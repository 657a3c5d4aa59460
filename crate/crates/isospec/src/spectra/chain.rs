//! The 3j chain that couples a degree tuple through its diagonals, and the
//! two maps it generates between coefficient cumulants and polyspectrum
//! tables.
//!
//! For an order-p tuple the chain visits p − 2 triangles. Internal orders
//! telescope: the order entering triangle a + 1 equals the one entering
//! triangle a minus the tuple order consumed there, so a zero-sum order
//! tuple fixes the whole internal assignment and the weight of one diagonal
//! vector is the plain product
//!
//!   (−1)^{Σ internal orders} · Π_a 3j(chain_a, ℓ_{a+1}, chain_{a+1};
//!                                     −mc_a, m_{a+1}, mc_{a+1})
//!                            · Π_diag √(2·diag + 1).
//!
//! The cumulant of (Z_{ℓ₁}^{m₁}, .., Z_{ℓ_p}^{m_p}) is the weight-times-
//! table-entry sum over diagonals; the table entry is the weight-times-
//! cumulant sum over zero-sum order tuples. The 3j orthogonality relations
//! make the two maps mutually inverse.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{KahanComplex, KahanSum};
use crate::wigner::wigner_3j;

use super::{admissible_diagonals, principal_domain, PolyKey, PolySpectrum, SpectrumEntry};

/// Weight multiplying the table entry at `diag` inside the cumulant of
/// (Z_{ℓ₁}^{m₁}, .., Z_{ℓ_p}^{m_p}). Orders must sum to zero with
/// |m_i| ≤ ℓ_i; degrees need not be sorted.
pub(crate) fn chain_weight(l: &[u32], m: &[i32], diag: &[u32]) -> Result<f64> {
    let p = l.len();
    debug_assert!(p >= 3 && m.len() == p && diag.len() == p - 3);
    debug_assert_eq!(m.iter().sum::<i32>(), 0);

    let mut weight = 1.0;
    let mut internal_sum = 0i32;
    let mut prev_l = l[0];
    let mut prev_m = -m[0];
    for a in 0..p - 2 {
        let last = a == p - 3;
        let next_l = if last { l[p - 1] } else { diag[a] };
        let next_m = prev_m - m[a + 1];
        if next_m.unsigned_abs() > next_l {
            return Ok(0.0); // no internal assignment reaches this diagonal
        }
        weight *= wigner_3j(prev_l, l[a + 1], next_l, -prev_m, m[a + 1], next_m)?;
        if weight == 0.0 {
            return Ok(0.0);
        }
        if !last {
            weight *= ((2 * next_l + 1) as f64).sqrt();
            internal_sum += next_m;
        }
        prev_l = next_l;
        prev_m = next_m;
    }
    debug_assert_eq!(prev_m, m[p - 1]);
    Ok(if internal_sum.rem_euclid(2) == 1 {
        -weight
    } else {
        weight
    })
}

/// Calls `f` on every order tuple with |m_i| ≤ ℓ_i and Σm = 0.
pub(crate) fn for_each_zero_sum<F>(l: &[u32], f: &mut F) -> Result<()>
where
    F: FnMut(&[i32]) -> Result<()>,
{
    let mut m = vec![0i32; l.len()];
    zero_sum_rec(l, &mut m, 0, 0, f)
}

fn zero_sum_rec<F>(l: &[u32], m: &mut [i32], pos: usize, sum: i32, f: &mut F) -> Result<()>
where
    F: FnMut(&[i32]) -> Result<()>,
{
    if pos + 1 == l.len() {
        let last = -sum;
        if last.unsigned_abs() <= l[pos] {
            m[pos] = last;
            f(m)?;
        }
        return Ok(());
    }
    let li = l[pos] as i32;
    for v in -li..=li {
        m[pos] = v;
        zero_sum_rec(l, m, pos + 1, sum + v, f)?;
    }
    Ok(())
}

/// Builds the order-p table from a cumulant source over the coefficient
/// array. The source is consulted on zero-sum order tuples only; all other
/// tuples carry no weight. Output values are real for any source with the
/// conjugation symmetry of a real field; the largest imaginary part dropped
/// is recorded in [`PolySpectrum::imag_residue`].
pub fn polyspectrum_from_cumulants<F>(p: u32, cum: F, lmax: u32) -> Result<PolySpectrum>
where
    F: Fn(&[u32], &[i32]) -> Complex64,
{
    let mut table = PolySpectrum::new(p)?;
    let mut residue = 0.0_f64;
    for key in principal_domain(p, lmax)? {
        let mut acc = KahanComplex::default();
        for_each_zero_sum(&key.l, &mut |m| {
            let w = chain_weight(&key.l, m, &key.diag)?;
            if w != 0.0 {
                acc.add(cum(&key.l, m) * w);
            }
            Ok(())
        })?;
        let v = acc.value();
        residue = residue.max(v.im.abs());
        table.insert(key, SpectrumEntry::plain(v.re))?;
    }
    table.set_imag_residue(residue);
    Ok(table)
}

/// Joint cumulant Cum(Z_{ℓ₁}^{m₁}, .., Z_{ℓ_p}^{m_p}) reconstructed from
/// the table. Returns 0 whenever Σm ≠ 0 or the degree sum is odd; degrees
/// absent from the table contribute 0.
///
/// The degrees are brought to the table's canonical sorted order with their
/// orders carried along; the sort is stable, so equal degrees keep their
/// given arrangement. On tables realizable as spectra of an isotropic array
/// the value is invariant under simultaneous permutation of the (degree,
/// order) pairs, because the diagonal-summed product of two chain weights
/// is slot-symmetric; a generic table has no such constraint and the chain
/// is evaluated exactly as given.
pub fn cumulants_from_polyspectrum(
    s: &PolySpectrum,
    degrees: &[u32],
    orders: &[i32],
) -> Result<Complex64> {
    let p = s.order() as usize;
    if degrees.len() != p || orders.len() != p {
        return Err(Error::invalid(format!(
            "expected {p} degrees and {p} orders, got {} and {}",
            degrees.len(),
            orders.len()
        )));
    }
    for (&l, &m) in degrees.iter().zip(orders) {
        if m.unsigned_abs() > l {
            return Err(Error::invalid(format!("order {m} exceeds degree {l}")));
        }
    }
    if orders.iter().sum::<i32>() != 0 || degrees.iter().sum::<u32>() % 2 != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }

    let mut pairs: Vec<(u32, i32)> = degrees
        .iter()
        .copied()
        .zip(orders.iter().copied())
        .collect();
    pairs.sort_by_key(|&(l, _)| l);
    let l: Vec<u32> = pairs.iter().map(|&(l, _)| l).collect();
    let m: Vec<i32> = pairs.iter().map(|&(_, m)| m).collect();

    let mut acc = KahanSum::default();
    let mut key = PolyKey::new(l, vec![]);
    for diag in admissible_diagonals(&key.l) {
        let w = chain_weight(&key.l, &m, &diag)?;
        if w == 0.0 {
            continue;
        }
        key.diag = diag;
        acc.add(w * s.value(&key));
    }
    Ok(Complex64::new(acc.value(), 0.0))
}
