//! Dimensions of `Γ`-invariant bigraded polynomial and harmonic spaces.
//!
//! For a lens space the count of invariant monomials `z^α z̄^β` is a
//! lattice-point count with one congruence, done by dynamic programming over
//! residues. For a general monomial group the dimension is a character
//! average evaluated in `Z[ζ_N]`.
//!
//! Harmonic dimensions use `dim H^Γ_{p,q} = dim P^Γ_{p,q} - dim P^Γ_{p-1,q-1}`:
//! multiplication by `|z|²` is `U(n)`-equivariant and injective, so the
//! decomposition `P_{p,q} = H_{p,q} ⊕ |z|² P_{p-1,q-1}` restricts to invariants.

use std::ops::AddAssign;

use num_bigint::{BigInt, BigUint};
use num_traits::{CheckedSub, One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::binomial;
use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};
use crate::groups::MonomialGroup;
use crate::lens::LensSpace;
use crate::quotient::SphereQuotient;

/// `counts[p][c] = #{α ∈ N^n : |α| = p, Σ s_i α_i ≡ c (mod k)}`.
fn residue_counts<T>(k: usize, s: &[u64], bound: usize) -> Vec<Vec<T>>
where
    T: Clone + Zero + One + for<'a> AddAssign<&'a T>,
{
    let mut counts = vec![vec![T::zero(); k]; bound + 1];
    counts[0][0] = T::one();
    for &si in s {
        let shift = si as usize % k;
        // Multiplying by 1/(1 - t x^{s_i}) in place: row p picks up the
        // already-updated row p-1 shifted by s_i.
        for p in 1..=bound {
            let (lo, hi) = counts.split_at_mut(p);
            let prev = &lo[p - 1];
            for (c, slot) in hi[0].iter_mut().enumerate() {
                *slot += &prev[(c + k - shift) % k];
            }
        }
    }
    counts
}

/// Upper bound on any single residue count, when it fits in u128.
fn monomial_count(bound: usize, n: usize) -> Option<u128> {
    let (top, k) = ((bound + n - 1) as u64, (n - 1) as u64);
    let k = k.min(top - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((top - i) as u128)? / (i + 1) as u128;
    }
    Some(acc)
}

fn pair_table<T>(counts: &[Vec<T>]) -> Vec<Vec<BigUint>>
where
    T: Clone + Zero + Sync + Send + Into<BigUint> + for<'a> AddAssign<&'a T>,
    for<'a> &'a T: std::ops::Mul<&'a T, Output = T>,
{
    let b = counts.len();
    (0..b)
        .into_par_iter()
        .map(|p| {
            (0..b)
                .map(|q| {
                    let mut acc = T::zero();
                    for (x, y) in counts[p].iter().zip(&counts[q]) {
                        acc += &(x * y);
                    }
                    acc.into()
                })
                .collect()
        })
        .collect()
}

/// `dim P^Γ_{p,q}` for a lens space, `0 <= p, q <= bound`.
pub fn lens_dim_p_table(l: &LensSpace, bound: usize) -> Vec<Vec<BigUint>> {
    let k = l.order() as usize;
    let fits = monomial_count(bound, l.n())
        .and_then(|c| c.checked_mul(c))
        .and_then(|c2| c2.checked_mul(k as u128))
        .is_some();
    if fits {
        pair_table(&residue_counts::<u128>(k, l.residues(), bound))
    } else {
        pair_table(&residue_counts::<BigUint>(k, l.residues(), bound))
    }
}

/// `dim P^Γ_{p,q}` for a single bidegree of a lens space.
pub fn dim_p_invariant_lens(l: &LensSpace, p: usize, q: usize) -> BigUint {
    let k = l.order() as usize;
    let counts = residue_counts::<BigUint>(k, l.residues(), p.max(q));
    counts[p]
        .iter()
        .zip(&counts[q])
        .map(|(x, y)| x * y)
        .sum()
}

/// Coefficients of `Π_cycles 1/(1 - ζ^e x^ℓ)` up to `x^bound`, each an
/// element of `Z[ζ_N]` stored as counts over exponents.
fn complete_homogeneous(cycles: &[(usize, u64)], modulus: usize, bound: usize) -> Vec<Vec<i64>> {
    let mut h = vec![vec![0i64; modulus]; bound + 1];
    h[0][0] = 1;
    for &(len, e) in cycles {
        let e = e as usize % modulus;
        for p in len..=bound {
            let (lo, hi) = h.split_at_mut(p);
            let prev = &lo[p - len];
            for (t, slot) in hi[0].iter_mut().enumerate() {
                *slot += prev[(t + modulus - e) % modulus];
            }
        }
    }
    h
}

/// `dim P^Γ_{p,q} = (1/|Γ|) Σ_γ h_p(λ(γ)) · conj(h_q(λ(γ)))`, evaluated in
/// `Z[ζ_N]`, certified integral and divided exactly.
pub fn group_dim_p_table(g: &MonomialGroup, bound: usize) -> Result<Vec<Vec<BigUint>>> {
    let modulus = g.modulus() as usize;
    let order = g.order();
    let per_entry = monomial_count(bound, g.dim())
        .filter(|&c| c <= i64::MAX as u128)
        .ok_or_else(|| Error::NotIntegral(format!("bound {bound} too large for the character route")))?;
    let total = per_entry
        .checked_mul(per_entry)
        .and_then(|x| x.checked_mul(order as u128));
    if total.map_or(true, |t| t >= 1u128 << 120) {
        return Err(Error::NotIntegral(format!(
            "bound {bound} too large for the character route"
        )));
    }
    let side = bound + 1;
    let classes: Vec<_> = g.cycle_classes().into_iter().collect();
    let acc = classes
        .par_iter()
        .fold(
            || vec![0i128; side * side * modulus],
            |mut acc, (cycles, count)| {
                let h = complete_homogeneous(cycles, modulus, bound);
                let sparse: Vec<Vec<(usize, i128)>> = h
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(_, &v)| v != 0)
                            .map(|(t, &v)| (t, v as i128))
                            .collect()
                    })
                    .collect();
                let count = *count as i128;
                for p in 0..side {
                    for q in 0..side {
                        let base = (p * side + q) * modulus;
                        for &(a, x) in &sparse[p] {
                            let cx = count * x;
                            for &(b, y) in &sparse[q] {
                                acc[base + (a + modulus - b) % modulus] += cx * y;
                            }
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0i128; side * side * modulus],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let order_big = BigInt::from(order);
    let mut table = vec![vec![BigUint::zero(); side]; side];
    for p in 0..side {
        for q in 0..side {
            let base = (p * side + q) * modulus;
            let sum = CycInt::from_counts(&acc[base..base + modulus]);
            let value = sum.is_rational_integer().ok_or_else(|| {
                Error::NotIntegral(format!("character sum at ({p},{q}) for {} is not rational", g.label()))
            })?;
            let (quot, rem) = num_integer::Integer::div_rem(&value, &order_big);
            if !rem.is_zero() || quot < BigInt::zero() {
                return Err(Error::NotIntegral(format!(
                    "character sum {value} at ({p},{q}) is not a nonnegative multiple of |Γ| = {order}"
                )));
            }
            table[p][q] = quot.to_biguint().expect("nonnegative");
        }
    }
    Ok(table)
}

fn harmonic_from_p(p_table: Vec<Vec<BigUint>>) -> Result<Vec<Vec<BigUint>>> {
    let side = p_table.len();
    let mut h = p_table.clone();
    for p in 1..side {
        for q in 1..side {
            let lower = &p_table[p - 1][q - 1];
            if &p_table[p][q] < lower {
                return Err(Error::Inconsistent(format!(
                    "dim P at ({p},{q}) is smaller than at ({},{})",
                    p - 1,
                    q - 1
                )));
            }
            h[p][q] = &p_table[p][q] - lower;
        }
    }
    Ok(h)
}

/// `dim H^Γ_{p,q}` for `0 <= p, q <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDimTable", into = "RawDimTable")]
pub struct DimTable {
    descriptor: String,
    n: usize,
    bound: usize,
    entries: Vec<Vec<BigUint>>,
}

#[derive(Serialize, Deserialize)]
struct RawDimTable {
    group: String,
    n: usize,
    bound: usize,
    table: Vec<Vec<String>>,
}

impl From<DimTable> for RawDimTable {
    fn from(t: DimTable) -> Self {
        RawDimTable {
            group: t.descriptor,
            n: t.n,
            bound: t.bound,
            table: t
                .entries
                .iter()
                .map(|row| row.iter().map(ToString::to_string).collect())
                .collect(),
        }
    }
}

impl TryFrom<RawDimTable> for DimTable {
    type Error = Error;
    fn try_from(raw: RawDimTable) -> Result<Self> {
        let side = raw.bound + 1;
        if raw.table.len() != side || raw.table.iter().any(|r| r.len() != side) {
            return Err(Error::InsufficientBound {
                have: raw.table.len().saturating_sub(1),
                need: raw.bound,
            });
        }
        let entries = raw
            .table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        x.parse::<BigUint>().map_err(|_| Error::Parse {
                            pos: 0,
                            msg: format!("bad table entry `{x}`"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DimTable {
            descriptor: raw.group,
            n: raw.n,
            bound: raw.bound,
            entries,
        })
    }
}

impl DimTable {
    pub fn compute<Q: SphereQuotient + ?Sized>(quotient: &Q, bound: usize) -> Result<Self> {
        let entries = harmonic_from_p(quotient.dim_p_table(bound)?)?;
        Ok(DimTable {
            descriptor: quotient.descriptor(),
            n: quotient.n(),
            bound,
            entries,
        })
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn get(&self, p: usize, q: usize) -> &BigUint {
        &self.entries[p][q]
    }

    pub fn rows(&self) -> &[Vec<BigUint>] {
        &self.entries
    }

    /// The sub-table for `p, q <= bound`.
    pub fn truncated(&self, bound: usize) -> DimTable {
        let b = bound.min(self.bound);
        DimTable {
            descriptor: self.descriptor.clone(),
            n: self.n,
            bound: b,
            entries: self.entries[..=b].iter().map(|r| r[..=b].to_vec()).collect(),
        }
    }

    /// First bidegree, by total degree then `p`, where the tables differ
    /// within their common bound.
    pub fn first_difference(&self, other: &DimTable) -> Option<(usize, usize)> {
        let b = self.bound.min(other.bound);
        (0..=2 * b).find_map(|total| {
            (total.saturating_sub(b)..=total.min(b))
                .map(|p| (p, total - p))
                .find(|&(p, q)| self.entries[p][q] != other.entries[p][q])
        })
    }

    /// CSV with header row `p\q,0,1,...`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p\\q");
        for q in 0..=self.bound {
            out.push_str(&format!(",{q}"));
        }
        out.push('\n');
        for (p, row) in self.entries.iter().enumerate() {
            out.push_str(&p.to_string());
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(src: &str) -> Result<Self> {
        Ok(serde_json::from_str(src)?)
    }
}

/// `dim H^Γ_{p,q}` for one bidegree.
pub fn dim_h_invariant<Q: SphereQuotient + ?Sized>(quotient: &Q, p: usize, q: usize) -> Result<BigUint> {
    let table = quotient.dim_p_table(p.max(q))?;
    let upper = &table[p][q];
    if p == 0 || q == 0 {
        return Ok(upper.clone());
    }
    let lower = &table[p - 1][q - 1];
    upper.checked_sub(lower).ok_or_else(|| {
        Error::Inconsistent(format!("dim P at ({p},{q}) is smaller than at ({},{})", p - 1, q - 1))
    })
}

/// One eigenvalue `2r` of the Kohn Laplacian with its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KohnSpectrumLine {
    pub eigenvalue: u64,
    pub multiplicity: BigUint,
}

/// Bidegrees `(p, q)` with `q (p + n - 1) = r`.
fn kohn_bidegrees(r: u64, n: usize) -> Vec<(usize, usize)> {
    (1..=r)
        .filter(|q| r % q == 0)
        .filter_map(|q| {
            let s = r / q;
            (s + 1 >= n as u64).then(|| ((s + 1 - n as u64) as usize, q as usize))
        })
        .collect()
}

/// Multiplicity of the eigenvalue `2r` of the Kohn Laplacian; zero when
/// `2r` is not in the spectrum.
pub fn kohn_multiplicity<Q: SphereQuotient + ?Sized>(quotient: &Q, r: u64) -> Result<BigUint> {
    if r == 0 {
        return Err(Error::InfiniteMultiplicity);
    }
    let pairs = kohn_bidegrees(r, quotient.n());
    let Some(bound) = pairs.iter().map(|&(p, q)| p.max(q)).max() else {
        return Ok(BigUint::zero());
    };
    let table = DimTable::compute(quotient, bound)?;
    Ok(pairs.iter().map(|&(p, q)| table.get(p, q)).sum())
}

/// The positive Kohn eigenvalues `2r <= 2 r_max` with nonzero multiplicity.
pub fn kohn_spectrum<Q: SphereQuotient + ?Sized>(quotient: &Q, r_max: u64) -> Result<Vec<KohnSpectrumLine>> {
    let n = quotient.n();
    let bound = (r_max as usize).max(1);
    let table = DimTable::compute(quotient, bound)?;
    let mut out = Vec::new();
    for r in 1..=r_max {
        let multiplicity: BigUint = kohn_bidegrees(r, n)
            .into_iter()
            .map(|(p, q)| table.get(p, q))
            .sum();
        if !multiplicity.is_zero() {
            out.push(KohnSpectrumLine {
                eigenvalue: 2 * r,
                multiplicity,
            });
        }
    }
    Ok(out)
}

/// `dim H̃^Γ_l = Σ_p dim H^Γ_{p, l-p}` for `l <= l_max`: the multiplicity of
/// `l(l + 2n - 2)` for the round Laplace-Beltrami operator.
pub fn laplace_multiplicities<Q: SphereQuotient + ?Sized>(quotient: &Q, l_max: usize) -> Result<Vec<BigUint>> {
    let table = DimTable::compute(quotient, l_max)?;
    Ok(diagonal_sums(&table, l_max))
}

pub(crate) fn diagonal_sums(table: &DimTable, l_max: usize) -> Vec<BigUint> {
    (0..=l_max)
        .map(|l| (0..=l).map(|p| table.get(p, l - p)).sum())
        .collect()
}

/// Total count of bidegree-`(p, q)` monomials, `C(p+n-1, n-1) C(q+n-1, n-1)`.
pub fn full_dim_p(n: usize, p: usize, q: usize) -> u128 {
    binomial((p + n - 1) as u64, (n - 1) as u64) * binomial((q + n - 1) as u64, (n - 1) as u64)
}
