//! Polyspectrum chain maps at contract sizes: inversion, structural zeros,
//! and table serialization.

use isospec::spectra::{
    cumulants_from_polyspectrum, polyspectrum_from_cumulants, principal_domain, PolyKey,
    PolySpectrum, SpectrumEntry,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_table(p: u32, lmax: u32, seed: u64) -> PolySpectrum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = PolySpectrum::new(p).unwrap();
    for key in principal_domain(p, lmax).unwrap() {
        s.insert(key, SpectrumEntry::plain(rng.random::<f64>() - 0.5))
            .unwrap();
    }
    s
}

fn inversion_residual(p: u32, lmax: u32) -> f64 {
    let s0 = random_table(p, lmax, 40 + u64::from(p));
    let rebuilt = polyspectrum_from_cumulants(
        p,
        |l, m| cumulants_from_polyspectrum(&s0, l, m).unwrap(),
        lmax,
    )
    .unwrap();
    let mut worst = 0.0_f64;
    for key in principal_domain(p, lmax).unwrap() {
        worst = worst.max((rebuilt.value(&key) - s0.value(&key)).abs());
    }
    worst
}

#[test]
fn bispectrum_inversion_to_degree_six() {
    let worst = inversion_residual(3, 6);
    assert!(worst < 1e-10, "worst {worst:.3e}");
}

#[test]
fn trispectrum_inversion_to_degree_four() {
    let worst = inversion_residual(4, 4);
    assert!(worst < 1e-10, "worst {worst:.3e}");
}

#[test]
fn order_five_inversion_to_degree_two() {
    let worst = inversion_residual(5, 2);
    assert!(worst < 1e-10, "worst {worst:.3e}");
}

#[test]
fn parity_and_order_sum_zeros_are_structural() {
    let s3 = random_table(3, 4, 9);
    // Odd degree sums and nonzero order sums vanish exactly, not to rounding.
    assert_eq!(
        cumulants_from_polyspectrum(&s3, &[1, 2, 2], &[1, -1, 0]).unwrap(),
        Complex64::new(0.0, 0.0)
    );
    assert_eq!(
        cumulants_from_polyspectrum(&s3, &[2, 2, 2], &[1, 1, 1]).unwrap(),
        Complex64::new(0.0, 0.0)
    );
    // Triangle violations also collapse: no admissible diagonal exists.
    assert_eq!(
        cumulants_from_polyspectrum(&s3, &[0, 1, 4], &[0, 1, -1]).unwrap(),
        Complex64::new(0.0, 0.0)
    );

    let s4 = random_table(4, 3, 10);
    assert_eq!(
        cumulants_from_polyspectrum(&s4, &[1, 1, 1, 2], &[1, -1, 1, -1]).unwrap(),
        Complex64::new(0.0, 0.0)
    );
    assert_eq!(
        cumulants_from_polyspectrum(&s4, &[2, 2, 2, 2], &[2, 1, 0, 0]).unwrap(),
        Complex64::new(0.0, 0.0)
    );
}

#[test]
fn principal_domain_keys_are_canonical_and_complete() {
    for (p, lmax) in [(3u32, 6u32), (4, 4), (5, 2)] {
        let keys = principal_domain(p, lmax).unwrap();
        assert!(!keys.is_empty());
        let mut seen = std::collections::HashSet::new();
        for key in &keys {
            let mut sorted = key.l.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, key.l, "degrees arrive sorted: {key:?}");
            assert_eq!(key.l.iter().sum::<u32>() % 2, 0, "even degree sum: {key:?}");
            assert_eq!(key.l.len(), p as usize);
            assert_eq!(key.diag.len(), p as usize - 3);
            assert!(seen.insert(key.clone()), "no duplicates: {key:?}");
        }
    }
}

#[test]
fn tables_round_trip_through_json_with_errors() {
    let mut s = PolySpectrum::new(4).unwrap();
    for (i, key) in principal_domain(4, 2).unwrap().into_iter().enumerate() {
        let entry = if i % 2 == 0 {
            SpectrumEntry {
                value: 0.1 * i as f64,
                se: Some(0.01 + 0.001 * i as f64),
            }
        } else {
            SpectrumEntry::plain(-0.2 * i as f64)
        };
        s.insert(key, entry).unwrap();
    }
    let text = serde_json::to_string(&s).unwrap();
    let back: PolySpectrum = serde_json::from_str(&text).unwrap();
    assert_eq!(back.order(), 4);
    for (key, entry) in s.entries() {
        let twin = back.get(key).unwrap();
        assert_eq!(entry.value, twin.value);
        assert_eq!(entry.se, twin.se);
    }

    // A tampered key is rejected on the way back in.
    let bad = text.replace("\"l\":[0,0,0,0]", "\"l\":[0,0,0,1]");
    assert!(bad != text, "replacement matched the serialized layout");
    assert!(serde_json::from_str::<PolySpectrum>(&bad).is_err());
}

#[test]
fn backward_map_reads_entries_off_non_canonical_orderings() {
    // The (2,2,2) entry divided by its zero-order symbol reappears at any
    // order tuple through the chain weights.
    let mut s = PolySpectrum::new(3).unwrap();
    s.insert(PolyKey::new([2, 2, 2], vec![]), SpectrumEntry::plain(0.75))
        .unwrap();
    let base = cumulants_from_polyspectrum(&s, &[2, 2, 2], &[1, 1, -2]).unwrap();
    for (l, m) in [
        ([2u32, 2, 2], [1i32, -2, 1]),
        ([2, 2, 2], [-2, 1, 1]),
        ([2, 2, 2], [1, 1, -2]),
    ] {
        let got = cumulants_from_polyspectrum(&s, &l, &m).unwrap();
        assert!((got - base).norm() < 1e-14);
    }
}
