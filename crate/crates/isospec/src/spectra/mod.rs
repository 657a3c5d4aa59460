//! Angular polyspectra of isotropic fields.
//!
//! An order-p polyspectrum is a real table indexed by p field degrees and
//! p − 3 internal "diagonal" degrees. The diagonals thread the degree tuple
//! onto a chain of triangles: the chain starts at ℓ₁, ends at ℓ_p, and
//! triangle a couples (chain_a, ℓ_{a+2}, chain_{a+1}). The table determines
//! every joint cumulant of the coefficient array through 3j-symbol weights
//! and is recovered from the cumulants by the mirror-image sum; both maps
//! live in this module, together with replicate-ensemble estimators and the
//! rotation-invariant expansion systems for cumulant functions on the
//! sphere.

mod chain;
mod estimate;
mod invariants;

pub use chain::{cumulants_from_polyspectrum, polyspectrum_from_cumulants};
pub use estimate::{bicoherence, polyspectrum_estimate, power_spectrum_estimate, CoeffEnsemble};
pub use invariants::{
    bicovariance_series, bicovariance_series_azimuth2, invariant_i2, invariant_i3,
    reduced_invariant_i3,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wigner::triangle_ok;

/// Canonical index of one polyspectrum entry: degrees sorted ascending plus
/// the diagonal degrees of the coupling chain (empty at order 3).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolyKey {
    /// Field degrees ℓ₁ ≤ ℓ₂ ≤ ... ≤ ℓ_p.
    pub l: Vec<u32>,
    /// Diagonal degrees; entry a closes the triangle (chain_a, ℓ_{a+2}, ·).
    pub diag: Vec<u32>,
}

impl PolyKey {
    pub fn new(l: impl Into<Vec<u32>>, diag: impl Into<Vec<u32>>) -> Self {
        PolyKey {
            l: l.into(),
            diag: diag.into(),
        }
    }

    /// Number of field degrees p.
    pub fn order(&self) -> usize {
        self.l.len()
    }
}

/// Value stored at one key, with a standard error when an estimator
/// produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
}

impl SpectrumEntry {
    /// Entry without a standard error.
    pub fn plain(value: f64) -> Self {
        SpectrumEntry { value, se: None }
    }
}

/// Real polyspectrum table of one order, keyed canonically.
///
/// Serializes as `{"p":3,"entries":[{"l":[2,2,2],"diag":[],"value":…},…]}`;
/// `se` appears per entry when present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "TableRepr", try_from = "TableRepr")]
pub struct PolySpectrum {
    order: u32,
    entries: BTreeMap<PolyKey, SpectrumEntry>,
    imag_residue: f64,
}

impl PolySpectrum {
    /// Empty table of the given order (at least 3).
    pub fn new(order: u32) -> Result<Self> {
        if order < 3 {
            return Err(Error::invalid(format!(
                "polyspectrum order must be at least 3, got {order}"
            )));
        }
        Ok(PolySpectrum {
            order,
            entries: BTreeMap::new(),
            imag_residue: 0.0,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest imaginary part dropped while the table was assembled from
    /// complex cumulant sums; zero for tables built any other way.
    pub fn imag_residue(&self) -> f64 {
        self.imag_residue
    }

    pub(crate) fn set_imag_residue(&mut self, r: f64) {
        self.imag_residue = r;
    }

    /// Inserts after checking that the key is canonical and admissible for
    /// this order.
    pub fn insert(&mut self, key: PolyKey, entry: SpectrumEntry) -> Result<()> {
        check_key(self.order, &key)?;
        self.entries.insert(key, entry);
        Ok(())
    }

    pub fn get(&self, key: &PolyKey) -> Option<SpectrumEntry> {
        self.entries.get(key).copied()
    }

    /// Stored value; keys absent from the table count as zero.
    pub fn value(&self, key: &PolyKey) -> f64 {
        self.entries.get(key).map_or(0.0, |e| e.value)
    }

    /// Entries in canonical key order.
    pub fn entries(&self) -> impl Iterator<Item = (&PolyKey, &SpectrumEntry)> {
        self.entries.iter()
    }
}

/// Chain of degrees threaded through the diagonals: ℓ₁, diagonals, ℓ_p.
fn degree_chain(key: &PolyKey) -> Vec<u32> {
    let mut chain = Vec::with_capacity(key.l.len() - 1);
    chain.push(key.l[0]);
    chain.extend_from_slice(&key.diag);
    chain.push(*key.l.last().unwrap());
    chain
}

fn check_key(order: u32, key: &PolyKey) -> Result<()> {
    let p = order as usize;
    if key.l.len() != p {
        return Err(Error::invalid(format!(
            "key has {} degrees, table order is {p}",
            key.l.len()
        )));
    }
    if key.diag.len() != p - 3 {
        return Err(Error::invalid(format!(
            "key has {} diagonals, order {p} needs {}",
            key.diag.len(),
            p - 3
        )));
    }
    if key.l.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid(format!(
            "degrees {:?} are not sorted ascending",
            key.l
        )));
    }
    if key.l.iter().sum::<u32>() % 2 != 0 {
        return Err(Error::invalid(format!("degree sum of {:?} is odd", key.l)));
    }
    let chain = degree_chain(key);
    for a in 0..p - 2 {
        if !triangle_ok(chain[a], key.l[a + 1], chain[a + 1]) {
            return Err(Error::invalid(format!(
                "degrees ({}, {}, {}) violate the triangle inequality",
                chain[a],
                key.l[a + 1],
                chain[a + 1]
            )));
        }
    }
    Ok(())
}

/// Every admissible diagonal vector for the (not necessarily sorted) degree
/// tuple `l`: each diagonal must close a triangle with the previous chain
/// degree, and the last triangle must reach ℓ_p.
pub(crate) fn admissible_diagonals(l: &[u32]) -> Vec<Vec<u32>> {
    fn extend(l: &[u32], prefix: &mut Vec<u32>, prev: u32, out: &mut Vec<Vec<u32>>) {
        let p = l.len();
        let a = prefix.len();
        if a == p - 3 {
            if triangle_ok(prev, l[p - 2], l[p - 1]) {
                out.push(prefix.clone());
            }
            return;
        }
        let side = l[a + 1];
        for d in prev.abs_diff(side)..=prev + side {
            prefix.push(d);
            extend(l, prefix, d, out);
            prefix.pop();
        }
    }
    debug_assert!(l.len() >= 3);
    let mut out = Vec::new();
    extend(l, &mut Vec::new(), l[0], &mut out);
    out
}

/// All canonical keys of order `p` with degrees up to `lmax`: sorted degree
/// tuples with an even sum and every admissible diagonal assignment.
/// Diagonals are not capped by `lmax`; they range over whatever the chain
/// triangles allow. Keys come back in ascending canonical order.
pub fn principal_domain(p: u32, lmax: u32) -> Result<Vec<PolyKey>> {
    if !(3..=5).contains(&p) {
        return Err(Error::invalid(format!(
            "unsupported polyspectrum order {p}; expected 3, 4, or 5"
        )));
    }
    let mut keys = Vec::new();
    let mut degrees = vec![0u32; p as usize];
    fill_sorted(&mut degrees, 0, 0, lmax, &mut |l| {
        if l.iter().sum::<u32>() % 2 != 0 {
            return;
        }
        for diag in admissible_diagonals(l) {
            keys.push(PolyKey::new(l.to_vec(), diag));
        }
    });
    Ok(keys)
}

fn fill_sorted(buf: &mut Vec<u32>, pos: usize, lo: u32, lmax: u32, f: &mut impl FnMut(&[u32])) {
    if pos == buf.len() {
        f(buf);
        return;
    }
    for l in lo..=lmax {
        buf[pos] = l;
        fill_sorted(buf, pos + 1, l, lmax, f);
    }
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    l: Vec<u32>,
    diag: Vec<u32>,
    value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    se: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    p: u32,
    entries: Vec<EntryRepr>,
}

impl From<PolySpectrum> for TableRepr {
    fn from(s: PolySpectrum) -> TableRepr {
        TableRepr {
            p: s.order,
            entries: s
                .entries
                .into_iter()
                .map(|(k, e)| EntryRepr {
                    l: k.l,
                    diag: k.diag,
                    value: e.value,
                    se: e.se,
                })
                .collect(),
        }
    }
}

impl TryFrom<TableRepr> for PolySpectrum {
    type Error = Error;

    fn try_from(r: TableRepr) -> Result<PolySpectrum> {
        let mut s = PolySpectrum::new(r.p)?;
        for e in r.entries {
            s.insert(
                PolyKey::new(e.l, e.diag),
                SpectrumEntry {
                    value: e.value,
                    se: e.se,
                },
            )?;
        }
        Ok(s)
    }
}
