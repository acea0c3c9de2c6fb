//! The bigraded generating function `F_Γ(z, w) = Σ dim H^Γ_{p,q} z^p w^q`.
//!
//! For a lens space `L = L(k; s)`,
//!
//! ```text
//! F_L(z, w) = (1/k) (1 - zw) P_L(z, w) / ((z^k - 1)^n (w^k - 1)^n)
//! P_L(z, w) = Σ_{m<k} Π_i (z^k - 1)/(z - ξ^{-s_i m}) · (w^k - 1)/(w - ξ^{s_i m})
//! ```
//!
//! with `P_L` an integer polynomial of degree at most `n(k-1)` in each
//! variable. At fixed `(n, k)` the prefactor is fixed, so `P_L` is the
//! comparison object.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{binomial, gcd, units};
use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};
use crate::groups::almost_conjugate;
use crate::harmonic::{diagonal_sums, DimTable};
use crate::lens::LensSpace;
use crate::quotient::{Quotient, SphereQuotient};

/// Integer polynomial in `z, w`, sparse, with declared degree bounds.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BivariatePoly {
    bound: (usize, usize),
    terms: BTreeMap<(usize, usize), BigInt>,
}

impl BivariatePoly {
    pub fn zero(bound: (usize, usize)) -> Self {
        BivariatePoly {
            bound,
            terms: BTreeMap::new(),
        }
    }

    /// Drops zero coefficients; panics if a key exceeds the bound.
    pub fn from_terms(bound: (usize, usize), terms: impl IntoIterator<Item = ((usize, usize), BigInt)>) -> Self {
        let mut p = Self::zero(bound);
        for (key, c) in terms {
            p.add_term(key, &c);
        }
        p
    }

    pub fn add_term(&mut self, (a, b): (usize, usize), c: &BigInt) {
        assert!(a <= self.bound.0 && b <= self.bound.1, "term ({a},{b}) beyond bound {:?}", self.bound);
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((a, b)).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn bound(&self) -> (usize, usize) {
        self.bound
    }

    pub fn coeff(&self, a: usize, b: usize) -> BigInt {
        self.terms.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &BigInt)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest exponents actually present.
    pub fn degrees(&self) -> (usize, usize) {
        self.terms
            .keys()
            .fold((0, 0), |(x, y), &(a, b)| (x.max(a), y.max(b)))
    }

    /// Coefficient equality; bounds are not compared.
    pub fn same_coefficients(&self, other: &Self) -> bool {
        self.terms == other.terms
    }

    /// `P(z, z)` as a dense coefficient vector.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.bound.0 + self.bound.1 + 1];
        for (&(a, b), c) in &self.terms {
            out[a + b] += c;
        }
        out
    }

    /// Little-endian bytes of every term, for hashing.
    pub fn digest_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (&(a, b), c) in &self.terms {
            out.extend_from_slice(&(a as u64).to_le_bytes());
            out.extend_from_slice(&(b as u64).to_le_bytes());
            let (sign, mag) = c.to_bytes_le();
            out.push(if sign == Sign::Minus { 1 } else { 0 });
            out.extend_from_slice(&(mag.len() as u32).to_le_bytes());
            out.extend_from_slice(&mag);
        }
        out
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (&(a, b), c)) in self.terms.iter().rev().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            let unit = mag.is_one() && (a, b) != (0, 0);
            if !unit {
                write!(f, "{mag}")?;
            }
            for (var, e) in [("z", a), ("w", b)] {
                match e {
                    0 => {}
                    1 => f.write_str(var)?,
                    _ => write!(f, "{var}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RawPoly {
    bound: (usize, usize),
    terms: Vec<(usize, usize, serde_json::Number)>,
}

impl Serialize for BivariatePoly {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(&(a, b), c)| {
                let num: serde_json::Number = c.to_string().parse().map_err(serde::ser::Error::custom)?;
                Ok((a, b, num))
            })
            .collect::<std::result::Result<Vec<_>, S::Error>>()?;
        RawPoly {
            bound: self.bound,
            terms,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BivariatePoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPoly::deserialize(de)?;
        let mut p = BivariatePoly::zero(raw.bound);
        for (a, b, num) in raw.terms {
            if a > raw.bound.0 || b > raw.bound.1 {
                return Err(D::Error::custom(format!("term ({a},{b}) beyond bound")));
            }
            let c: BigInt = num
                .to_string()
                .parse()
                .map_err(|_| D::Error::custom(format!("non-integer coefficient {num}")))?;
            p.add_term((a, b), &c);
        }
        Ok(p)
    }
}

/// `n(k-1)`, the degree bound of `P_L` in each variable.
pub fn degree_bound(l: &LensSpace) -> usize {
    l.n() * (l.order() as usize - 1)
}

/// Coefficients of `Π_i Σ_j ξ^{-s_i g (k-1-j)} z^j` as count vectors over
/// exponents of `ξ = ζ_k`.
fn factor_product(l: &LensSpace, g: usize) -> Vec<Vec<i128>> {
    let k = l.order() as usize;
    let deg = degree_bound(l);
    let mut acc = vec![vec![0i128; k]; deg + 1];
    acc[0][0] = 1;
    let mut cur_deg = 0;
    for &s in l.residues() {
        let mut next = vec![vec![0i128; k]; deg + 1];
        for (d, row) in acc.iter().enumerate().take(cur_deg + 1) {
            for (t, &x) in row.iter().enumerate().filter(|(_, &x)| x != 0) {
                for j in 0..k {
                    let shift = (k - (s as usize * g) % k) * (k - 1 - j) % k;
                    next[d + j][(t + shift) % k] += x;
                }
            }
        }
        acc = next;
        cur_deg += k - 1;
    }
    acc
}

/// `P_L` by direct expansion of the `m`-sum in `Z[ζ_k]`.
///
/// Terms are grouped by `g = gcd(m, k)`: the summands with the same `g` are
/// the Galois conjugates of the one at `m = g`, so each group contributes a
/// trace. The final coefficients are certified to be rational integers.
pub fn p_poly_direct(l: &LensSpace) -> Result<BivariatePoly> {
    let k = l.order() as usize;
    let deg = degree_bound(l);
    if k == 1 {
        return Ok(BivariatePoly::from_terms((0, 0), [((0, 0), BigInt::one())]));
    }
    let digits = (deg as f64 + 1.0).log2() * l.n() as f64 * 2.0 + (k as f64).log2() * 2.0;
    if digits > 110.0 {
        return Err(Error::NotIntegral(format!("{l} is too large for the direct expansion")));
    }
    let classes: Vec<(usize, Vec<Vec<i128>>, Vec<u64>)> = crate::arith::divisors(k as u64)
        .into_iter()
        .map(|g| {
            let g = g as usize;
            (g, factor_product(l, g % k), units((k / g) as u64))
        })
        .collect();
    let rows: Vec<Vec<(usize, BigInt)>> = (0..=deg)
        .into_par_iter()
        .map(|alpha| {
            let mut row = Vec::new();
            for beta in 0..=deg {
                let mut total = vec![0i128; k];
                for (_, a, us) in &classes {
                    let x = &a[alpha];
                    let y = &a[beta];
                    let mut prod = vec![0i128; k];
                    for (s, &xs) in x.iter().enumerate().filter(|(_, &v)| v != 0) {
                        for (t, &yt) in y.iter().enumerate().filter(|(_, &v)| v != 0) {
                            prod[(s + k - t) % k] += xs * yt;
                        }
                    }
                    for &u in us {
                        for (e, &c) in prod.iter().enumerate().filter(|(_, &v)| v != 0) {
                            total[e * u as usize % k] += c;
                        }
                    }
                }
                let value = CycInt::from_counts(&total)
                    .is_rational_integer()
                    .expect("Galois trace over all of (Z/k)^x is rational");
                if !value.is_zero() {
                    row.push((beta, value));
                }
            }
            row
        })
        .collect();
    let mut p = BivariatePoly::zero((deg, deg));
    for (alpha, row) in rows.into_iter().enumerate() {
        for (beta, c) in row {
            p.add_term((alpha, beta), &c);
        }
    }
    Ok(p)
}

/// `a_{α,β} = a_{α-1,β-1} + k Σ_{i,j} (-1)^{i+j} C(n,i) C(n,j) h_{α-ik, β-jk}`.
fn recursion<T>(n: usize, k: usize, deg: usize, h: &[Vec<T>]) -> Vec<Vec<T>>
where
    T: Clone + Zero + From<i64> + std::ops::Mul<Output = T> + for<'a> std::ops::AddAssign<&'a T>,
{
    let signed_binom: Vec<T> = (0..=n)
        .map(|i| {
            let c = binomial(n as u64, i as u64) as i64;
            T::from(if i % 2 == 0 { c } else { -c })
        })
        .collect();
    let big_k = T::from(k as i64);
    let mut a = vec![vec![T::zero(); deg + 1]; deg + 1];
    for alpha in 0..=deg {
        for beta in 0..=deg {
            let mut acc = T::zero();
            for i in 0..=n.min(alpha / k) {
                for j in 0..=n.min(beta / k) {
                    let term = signed_binom[i].clone() * signed_binom[j].clone() * h[alpha - i * k][beta - j * k].clone();
                    acc += &term;
                }
            }
            let mut v = big_k.clone() * acc;
            if alpha > 0 && beta > 0 {
                v += &a[alpha - 1][beta - 1];
            }
            a[alpha][beta] = v;
        }
    }
    a
}

/// `P_L` from the harmonic dimension table by the coefficient recursion
/// `a_{α,β} = a_{α-1,β-1} + k Σ_{i,j} (-1)^{i+j} C(n,i) C(n,j) dim H_{α-ik, β-jk}`.
pub fn p_poly_from_dims(l: &LensSpace, table: &DimTable) -> Result<BivariatePoly> {
    let k = l.order() as usize;
    let n = l.n();
    let deg = degree_bound(l);
    if table.bound() < deg {
        return Err(Error::InsufficientBound {
            have: table.bound(),
            need: deg,
        });
    }
    if table.n() != n {
        return Err(Error::DimensionMismatch(table.n(), n));
    }
    let max_h = table.rows().iter().flatten().max().cloned().unwrap_or_default();
    let fits = (max_h * BigUint::from(k) * (BigUint::from(4u32).pow(n as u32)) * BigUint::from(deg + 1)).bits() < 124;
    let a: Vec<Vec<BigInt>> = if fits {
        let h: Vec<Vec<i128>> = table
            .rows()
            .iter()
            .map(|row| row.iter().map(|v| v.to_i128().expect("bounded")).collect())
            .collect();
        recursion(n, k, deg, &h)
            .into_iter()
            .map(|row| row.into_iter().map(BigInt::from).collect())
            .collect()
    } else {
        let h: Vec<Vec<BigInt>> = table
            .rows()
            .iter()
            .map(|row| row.iter().map(|v| BigInt::from(v.clone())).collect())
            .collect();
        recursion(n, k, deg, &h)
    };
    let mut p = BivariatePoly::zero((deg, deg));
    for (alpha, row) in a.into_iter().enumerate() {
        for (beta, c) in row.into_iter().enumerate() {
            p.add_term((alpha, beta), &c);
        }
    }
    Ok(p)
}

/// `P_L` via the dimension table, the fast route.
pub fn p_poly(l: &LensSpace) -> Result<BivariatePoly> {
    let table = DimTable::compute(l, degree_bound(l))?;
    p_poly_from_dims(l, &table)
}

/// Dense coefficients of `1/(x^k - 1)^n` up to `x^len-1`, up to the sign `(-1)^n`.
fn inverse_power_series(k: usize, n: usize, len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (j, idx) in (0..).map(|j| (j, j * k)).take_while(|&(_, i)| i < len) {
        out[idx] = BigInt::from(binomial((j + n - 1) as u64, (n - 1) as u64));
    }
    out
}

/// Expands `(1/k)(1 - zw) P_L / ((z^k - 1)^n (w^k - 1)^n)` as a power series and
/// returns `dim H^Γ_{p,q}` for `p, q <= bound`. Division by `k` must be exact.
pub fn dims_from_p_poly(p: &BivariatePoly, n: usize, k: usize, bound: usize) -> Result<Vec<Vec<BigUint>>> {
    let side = bound + 1;
    let g = inverse_power_series(k, n, side);
    // k · dim P = P_L · G(z) G(w); the two sign factors (-1)^n cancel.
    let mut in_z = vec![vec![BigInt::zero(); side]; side];
    for (&(a, b), c) in p.terms() {
        if a > bound || b > bound {
            continue;
        }
        for (i, gi) in g.iter().enumerate().take(side - a) {
            if !gi.is_zero() {
                in_z[a + i][b] += c * gi;
            }
        }
    }
    let mut kp = vec![vec![BigInt::zero(); side]; side];
    for (a, row) in in_z.iter().enumerate() {
        for (b, c) in row.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (j, gj) in g.iter().enumerate().take(side - b) {
                if !gj.is_zero() {
                    kp[a][b + j] += c * gj;
                }
            }
        }
    }
    let big_k = BigInt::from(k);
    let mut out = vec![vec![BigUint::zero(); side]; side];
    for a in 0..side {
        for b in 0..side {
            let mut v = kp[a][b].clone();
            if a > 0 && b > 0 {
                v -= &kp[a - 1][b - 1];
            }
            let (q, r) = v.div_rem(&big_k);
            if !r.is_zero() || q.is_negative() {
                return Err(Error::NotIntegral(format!("series coefficient ({a},{b}) = {v}/{k}")));
            }
            out[a][b] = q.to_biguint().expect("nonnegative");
        }
    }
    Ok(out)
}

/// Which certificate established equality of generating functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// Equal `P_L` at the same `(n, k)`.
    Numerator,
    /// Almost conjugate in `U(n)`, confirmed by dimension tables.
    AlmostConjugate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum FComparison {
    Equal { certificate: Certificate },
    /// Dimension tables agree for `p, q <= bound`; no finite certificate.
    EqualUpTo { bound: usize },
    /// The first differing bidegree, ordered by `p + q` then `p`.
    Different { first: (usize, usize) },
}

impl FComparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, FComparison::Equal { .. })
    }
}

/// Compares `F_Γ` and `F_Γ'`. `bound` applies when no finite certificate is
/// available; it defaults to `max |Γ| · n`.
pub fn compare_f(a: &Quotient, b: &Quotient, bound: Option<usize>) -> Result<FComparison> {
    let n = a.n();
    if n != b.n() {
        return Err(Error::DimensionMismatch(n, b.n()));
    }
    if let (Some(la), Some(lb)) = (a.as_lens(), b.as_lens()) {
        if la.order() == lb.order() {
            let deg = degree_bound(la);
            let ta = DimTable::compute(la, deg)?;
            let tb = DimTable::compute(lb, deg)?;
            let pa = p_poly_from_dims(la, &ta)?;
            let pb = p_poly_from_dims(lb, &tb)?;
            return match (pa.same_coefficients(&pb), ta.first_difference(&tb)) {
                (true, None) => Ok(FComparison::Equal {
                    certificate: Certificate::Numerator,
                }),
                (false, Some(first)) => Ok(FComparison::Different { first }),
                _ => Err(Error::Inconsistent(format!(
                    "P_L and the dimension table disagree for {la} and {lb}"
                ))),
            };
        }
    }
    let bound = bound.unwrap_or_else(|| {
        (a.group_order().max(b.group_order()) as usize) * n
    });
    let ta = DimTable::compute(a, bound)?;
    let tb = DimTable::compute(b, bound)?;
    let first = ta.first_difference(&tb);
    if a.group_order() == b.group_order() && almost_conjugate(&a.to_group(), &b.to_group()) {
        return match first {
            None => Ok(FComparison::Equal {
                certificate: Certificate::AlmostConjugate,
            }),
            Some((p, q)) => Err(Error::Inconsistent(format!(
                "{a} and {b} are almost conjugate but dim H differs at ({p},{q})"
            ))),
        };
    }
    Ok(match first {
        None => FComparison::EqualUpTo { bound },
        Some(first) => FComparison::Different { first },
    })
}

/// True only when equality is certified; `EqualUpTo` counts as false.
pub fn f_equal(a: &Quotient, b: &Quotient) -> Result<bool> {
    Ok(compare_f(a, b, None)?.is_equal())
}

/// `F_L(z, z)` for a lens space, from `P_L`:
/// `(1/k)(1 - z²) P_L(z, z) / (z^k - 1)^{2n}`.
pub fn f_diag_lens(l: &LensSpace, l_max: usize) -> Result<Vec<BigUint>> {
    let k = l.order() as usize;
    let n = l.n();
    let p = p_poly(l)?;
    let len = l_max + 1;
    let mut num = vec![BigInt::zero(); len];
    for (i, c) in p.diagonal().into_iter().enumerate() {
        if i < len {
            num[i] += &c;
        }
        if i + 2 < len {
            num[i + 2] -= &c;
        }
    }
    let g = inverse_power_series(k, 2 * n, len);
    let big_k = BigInt::from(k);
    (0..len)
        .map(|l_deg| {
            let v: BigInt = (0..=l_deg).map(|i| &num[i] * &g[l_deg - i]).sum();
            let (q, r) = v.div_rem(&big_k);
            if !r.is_zero() || q.is_negative() {
                return Err(Error::NotIntegral(format!("diagonal coefficient {l_deg} = {v}/{k}")));
            }
            Ok(q.to_biguint().expect("nonnegative"))
        })
        .collect()
}

/// Coefficients of `F_Γ(z, z)` up to `z^l_max`. Lens spaces go through `P_L`;
/// groups through the dimension table.
pub fn f_diag(q: &Quotient, l_max: usize) -> Result<Vec<BigUint>> {
    match q {
        Quotient::Lens(l) if l.order() > 1 => f_diag_lens(l, l_max),
        _ => {
            let table = DimTable::compute(q, l_max)?;
            Ok(diagonal_sums(&table, l_max))
        }
    }
}

/// `gcd`-class sizes, exposed for diagnostics.
pub fn gcd_classes(k: u64) -> Vec<(u64, usize)> {
    let mut out: BTreeMap<u64, usize> = BTreeMap::new();
    for m in 0..k {
        *out.entry(gcd(m, k)).or_default() += 1;
    }
    out.into_iter().collect()
}
