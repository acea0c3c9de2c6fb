//! Laplace spectra for the Berger metrics `g_{(r,s)}` on `S^{2n-1}/Γ`.
//!
//! `H^Γ_{p,q}` is an eigenspace with eigenvalue `c_s s² + c_r r²` where
//!
//! ```text
//! c_s = 4 min(p,q) (min(p,q) + |p-q| + n) + 2 |p-q| n
//! c_r = 2 (p-q)²
//! ```
//!
//! Spectra are kept as formal pairs `(c_s, c_r)`, so equality of line lists
//! means isospectrality for every `(r, s)` at once.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::DimTable;
use crate::quotient::SphereQuotient;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BergerLine {
    pub c_s: u64,
    pub c_r: u64,
    pub multiplicity: BigUint,
    /// Bidegrees contributing a nonzero dimension.
    pub bidegrees: Vec<(usize, usize)>,
}

pub fn coefficients(p: usize, q: usize, n: usize) -> (u64, u64) {
    let (lo, diff, n) = (p.min(q) as u64, p.abs_diff(q) as u64, n as u64);
    (4 * lo * (lo + diff + n) + 2 * diff * n, 2 * diff * diff)
}

/// Lines for all `p + q <= cutoff`, sorted by `(c_s, c_r)`, zero lines dropped.
pub fn berger_spectrum<Q: SphereQuotient + ?Sized>(quotient: &Q, cutoff: usize) -> Result<Vec<BergerLine>> {
    let n = quotient.n();
    let table = DimTable::compute(quotient, cutoff)?;
    let mut lines: BTreeMap<(u64, u64), BergerLine> = BTreeMap::new();
    for p in 0..=cutoff {
        for q in 0..=cutoff - p {
            let dim = table.get(p, q);
            if dim.is_zero() {
                continue;
            }
            let (c_s, c_r) = coefficients(p, q, n);
            let line = lines.entry((c_s, c_r)).or_insert_with(|| BergerLine {
                c_s,
                c_r,
                multiplicity: BigUint::zero(),
                bidegrees: Vec::new(),
            });
            line.multiplicity += dim;
            line.bidegrees.push((p, q));
        }
    }
    Ok(lines.into_values().collect())
}

/// Equality of `(c_s, c_r, multiplicity)` lists up to `p + q <= cutoff`.
pub fn berger_isospectral_upto<A, B>(a: &A, b: &B, cutoff: usize) -> Result<bool>
where
    A: SphereQuotient + ?Sized,
    B: SphereQuotient + ?Sized,
{
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(a.n(), b.n()));
    }
    let key = |lines: Vec<BergerLine>| -> Vec<(u64, u64, BigUint)> {
        lines.into_iter().map(|l| (l.c_s, l.c_r, l.multiplicity)).collect()
    };
    Ok(key(berger_spectrum(a, cutoff)?) == key(berger_spectrum(b, cutoff)?))
}

/// Numerical eigenvalues `c_s s² + c_r r²` for given `r²`, `s²`, merging
/// lines that coincide; sorted by value.
pub fn specialize(lines: &[BergerLine], r2: &BigRational, s2: &BigRational) -> Vec<(BigRational, BigUint)> {
    let mut out: BTreeMap<BigRational, BigUint> = BTreeMap::new();
    for l in lines {
        let value = s2 * BigRational::from_integer(BigInt::from(l.c_s)) + r2 * BigRational::from_integer(BigInt::from(l.c_r));
        *out.entry(value).or_insert_with(BigUint::zero) += &l.multiplicity;
    }
    out.into_iter().collect()
}

/// CSV with columns `c_s,c_r,multiplicity,bidegrees`; bidegrees are `p:q`
/// separated by spaces.
pub fn to_csv(lines: &[BergerLine]) -> String {
    let mut out = String::from("c_s,c_r,multiplicity,bidegrees\n");
    for l in lines {
        let bideg: Vec<String> = l.bidegrees.iter().map(|(p, q)| format!("{p}:{q}")).collect();
        out.push_str(&format!("{},{},{},{}\n", l.c_s, l.c_r, l.multiplicity, bideg.join(" ")));
    }
    out
}
