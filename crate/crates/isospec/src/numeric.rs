//! Shared numeric primitives: factorial logarithms and compensated sums.

use num_complex::Complex64;
use once_cell::sync::Lazy;

/// Largest factorial argument the tables serve. Degrees are capped at 256,
/// so the longest factorial needed is (3*256 + 1)! from triangle weights.
pub(crate) const MAX_FACT_ARG: usize = 1024;

static LN_FACT: Lazy<Vec<f64>> = Lazy::new(|| {
    let mut table = vec![0.0_f64; MAX_FACT_ARG + 1];
    // Kahan-compensated prefix sum of ln k keeps the tail entries at ~1 ulp.
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for (k, slot) in table.iter_mut().enumerate().skip(1) {
        let y = (k as f64).ln() - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        *slot = sum;
    }
    table
});

/// ln(n!) from a precomputed table. Panics if `n` exceeds the table.
#[inline]
pub(crate) fn ln_fact(n: i64) -> f64 {
    debug_assert!(n >= 0, "ln_fact of negative argument");
    LN_FACT[n as usize]
}

/// Kahan–Neumaier compensated accumulator for f64.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Multiply the accumulated state in place (used by recurrence rescaling).
    #[inline]
    pub fn scale(&mut self, f: f64) {
        self.sum *= f;
        self.comp *= f;
    }
}

/// Compensated accumulator for complex values (componentwise Kahan).
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct KahanComplex {
    re: KahanSum,
    im: KahanSum,
}

impl KahanComplex {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_table_matches_direct_products() {
        // Exact integer factorials fit in f64 up to 20!.
        let mut f = 1.0_f64;
        for n in 1..=20_i64 {
            f *= n as f64;
            assert!((ln_fact(n) - f.ln()).abs() < 1e-13, "n = {n}");
        }
        // Stirling cross-check deep in the table.
        let n = 1000.0_f64;
        let stirling = n * n.ln() - n + 0.5 * (2.0 * std::f64::consts::PI * n).ln()
            + 1.0 / (12.0 * n)
            - 1.0 / (360.0 * n.powi(3));
        assert!((ln_fact(1000) - stirling).abs() < 1e-10);
    }

    #[test]
    fn kahan_recovers_ill_conditioned_sum() {
        let mut acc = KahanSum::default();
        acc.add(1e16);
        for _ in 0..10 {
            acc.add(1.0);
        }
        acc.add(-1e16);
        assert_eq!(acc.value(), 10.0);
    }
}
