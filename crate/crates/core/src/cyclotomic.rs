//! Exact arithmetic in the ring of cyclotomic integers `Z[ζ_N]`.
//!
//! Values are stored densely modulo `x^N - 1`, so a `CycInt` has many
//! coefficient vectors describing the same complex number. Equality and
//! integrality are always decided after reduction modulo the cyclotomic
//! polynomial `Φ_N`; plain coefficient comparison is never used.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::divisors;
use crate::error::{Error, Result};

type PolyCache = Mutex<HashMap<usize, Arc<Vec<BigInt>>>>;

fn cache() -> &'static PolyCache {
    static CACHE: OnceLock<PolyCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (constant term first) of the `n`-th cyclotomic polynomial.
///
/// Computed by dividing `x^n - 1` by `Φ_d` for every proper divisor `d`;
/// results are memoised process-wide.
pub fn cyclotomic_polynomial(n: usize) -> Arc<Vec<BigInt>> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    if let Some(p) = cache().lock().unwrap().get(&n) {
        return Arc::clone(p);
    }
    let mut num = vec![BigInt::zero(); n + 1];
    num[0] = -BigInt::one();
    num[n] = BigInt::one();
    for d in divisors(n as u64) {
        let d = d as usize;
        if d == n {
            continue;
        }
        let phi_d = cyclotomic_polynomial(d);
        num = exact_div_monic(&num, &phi_d);
    }
    let out = Arc::new(num);
    cache().lock().unwrap().insert(n, Arc::clone(&out));
    out
}

/// Quotient of `num` by the monic polynomial `den`; the remainder must vanish.
fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dd;
    let mut q = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    q
}

/// Remainder of a polynomial (constant term first) modulo `Φ_n`, padded to
/// length `φ(n)`.
fn reduce_mod_phi(coeffs: &[BigInt], n: usize) -> Vec<BigInt> {
    let phi = cyclotomic_polynomial(n);
    let deg = phi.len() - 1;
    if let Some(small) = reduce_small(coeffs, &phi) {
        return small.into_iter().map(BigInt::from).collect();
    }
    let mut r = coeffs.to_vec();
    for i in (deg..r.len()).rev() {
        let c = std::mem::take(&mut r[i]);
        if c.is_zero() {
            continue;
        }
        for (j, pj) in phi.iter().enumerate().take(deg) {
            r[i - deg + j] -= &c * pj;
        }
    }
    r.truncate(deg);
    r.resize(deg, BigInt::zero());
    r
}

/// i128 version of the reduction; `None` on any overflow.
fn reduce_small(coeffs: &[BigInt], phi: &[BigInt]) -> Option<Vec<i128>> {
    let deg = phi.len() - 1;
    let phi: Vec<i128> = phi.iter().map(|c| c.to_i128()).collect::<Option<_>>()?;
    let mut r: Vec<i128> = coeffs.iter().map(|c| c.to_i128()).collect::<Option<_>>()?;
    for i in (deg..r.len()).rev() {
        let c = std::mem::take(&mut r[i]);
        if c == 0 {
            continue;
        }
        for (j, pj) in phi.iter().enumerate().take(deg) {
            let t = c.checked_mul(*pj)?;
            r[i - deg + j] = r[i - deg + j].checked_sub(t)?;
        }
    }
    r.truncate(deg);
    r.resize(deg, 0);
    Some(r)
}

/// An element `Σ_j coeffs[j] ζ_N^j` of `Z[ζ_N]`.
#[derive(Clone)]
pub struct CycInt {
    modulus: usize,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(modulus: usize) -> Self {
        assert!(modulus >= 1, "cyclotomic modulus must be positive");
        CycInt {
            modulus,
            coeffs: vec![BigInt::zero(); modulus],
        }
    }

    pub fn from_integer(modulus: usize, value: impl Into<BigInt>) -> Self {
        let mut z = Self::zero(modulus);
        z.coeffs[0] = value.into();
        z
    }

    pub fn one(modulus: usize) -> Self {
        Self::from_integer(modulus, 1)
    }

    /// `ζ_N^exponent`.
    pub fn root(modulus: usize, exponent: i64) -> Self {
        let mut z = Self::zero(modulus);
        z.coeffs[exponent.rem_euclid(modulus as i64) as usize] = BigInt::one();
        z
    }

    /// Builds a value from a coefficient vector of length `modulus`.
    pub fn from_coeffs(modulus: usize, coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() != modulus || modulus == 0 {
            return Err(Error::ModulusMismatch(modulus, coeffs.len()));
        }
        Ok(CycInt { modulus, coeffs })
    }

    /// Builds a value from machine-integer counts, `Σ_j counts[j] ζ^j`.
    pub fn from_counts(counts: &[i128]) -> Self {
        CycInt {
            modulus: counts.len(),
            coeffs: counts.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    /// Raw (unreduced) coefficients modulo `x^N - 1`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycInt {
            modulus: self.modulus,
            coeffs,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycInt {
            modulus: self.modulus,
            coeffs,
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.modulus;
        if let Some(out) = mul_small(&self.coeffs, &other.coeffs) {
            return Ok(CycInt::from_counts(&out));
        }
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[(i + j) % n] += a * b;
                }
            }
        }
        Ok(CycInt {
            modulus: n,
            coeffs: out,
        })
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        CycInt {
            modulus: self.modulus,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Multiplication by `ζ^shift`, a rotation of the coefficient vector.
    pub fn mul_root(&self, shift: i64) -> Self {
        let n = self.modulus;
        let s = shift.rem_euclid(n as i64) as usize;
        let mut coeffs = vec![BigInt::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[(j + s) % n] = c.clone();
        }
        CycInt { modulus: n, coeffs }
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// The automorphism `ζ ↦ ζ^u`. Only meaningful for `u` prime to `N`, but
    /// the substitution itself is well-defined for any `u`.
    pub fn galois(&self, u: i64) -> Self {
        let n = self.modulus as i64;
        let mut coeffs = vec![BigInt::zero(); self.modulus];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[(j as i64 * u).rem_euclid(n) as usize] += c;
            }
        }
        CycInt {
            modulus: self.modulus,
            coeffs,
        }
    }

    /// Canonical representative: the remainder modulo `Φ_N` (length `φ(N)`).
    pub fn reduce(&self) -> Vec<BigInt> {
        reduce_mod_phi(&self.coeffs, self.modulus)
    }

    pub fn is_zero(&self) -> bool {
        self.reduce().iter().all(Zero::is_zero)
    }

    /// `Some(n)` when the value is the rational integer `n`.
    pub fn is_rational_integer(&self) -> Option<BigInt> {
        let r = self.reduce();
        if r[1..].iter().all(Zero::is_zero) {
            Some(r[0].clone())
        } else {
            None
        }
    }

    /// Equality as complex numbers, decided modulo `Φ_N`.
    pub fn try_eq(&self, other: &Self) -> Result<bool> {
        Ok(self.try_sub(other)?.is_zero())
    }
}

/// Dense cyclic convolution in i128; `None` when the bound cannot be proved.
fn mul_small(a: &[BigInt], b: &[BigInt]) -> Option<Vec<i128>> {
    let n = a.len();
    let a: Vec<i64> = a.iter().map(|c| c.to_i64()).collect::<Option<_>>()?;
    let b: Vec<i64> = b.iter().map(|c| c.to_i64()).collect::<Option<_>>()?;
    let ma = a.iter().map(|x| x.unsigned_abs() as u128).max().unwrap_or(0);
    let mb = b.iter().map(|x| x.unsigned_abs() as u128).max().unwrap_or(0);
    let bound = ma.checked_mul(mb)?.checked_mul(n as u128)?;
    if bound >= (1u128 << 126) {
        return None;
    }
    let nz_b: Vec<(usize, i128)> = b
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| (j, c as i128))
        .collect();
    let mut out = vec![0i128; n];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let x = x as i128;
        for &(j, y) in &nz_b {
            let idx = if i + j >= n { i + j - n } else { i + j };
            out[idx] += x * y;
        }
    }
    Some(out)
}

impl PartialEq for CycInt {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.try_eq(other).unwrap_or(false)
    }
}

impl Eq for CycInt {}

impl Hash for CycInt {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.modulus.hash(state);
        self.reduce().hash(state);
    }
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycInt[{}](", self.modulus)?;
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}·ζ^{j}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        self.try_add(rhs).expect("cyclotomic modulus mismatch")
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        self.try_sub(rhs).expect("cyclotomic modulus mismatch")
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        self.try_mul(rhs).expect("cyclotomic modulus mismatch")
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        CycInt {
            modulus: self.modulus,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Polynomial in one or two formal variables with `CycInt` coefficients.
/// Univariate polynomials use exponent pairs `(i, 0)`.
#[derive(Clone, Debug)]
pub struct CycPoly {
    modulus: usize,
    terms: BTreeMap<(usize, usize), CycInt>,
}

impl CycPoly {
    pub fn zero(modulus: usize) -> Self {
        CycPoly {
            modulus,
            terms: BTreeMap::new(),
        }
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &CycInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: (usize, usize)) -> CycInt {
        self.terms
            .get(&exps)
            .cloned()
            .unwrap_or_else(|| CycInt::zero(self.modulus))
    }

    pub fn add_term(&mut self, exps: (usize, usize), c: &CycInt) -> Result<()> {
        if c.modulus() != self.modulus {
            return Err(Error::ModulusMismatch(self.modulus, c.modulus()));
        }
        match self.terms.get_mut(&exps) {
            Some(slot) => *slot = slot.try_add(c)?,
            None => {
                self.terms.insert(exps, c.clone());
            }
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        let mut out = CycPoly::zero(self.modulus);
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                out.add_term((a1 + a2, b1 + b2), &c1.try_mul(c2)?)?;
            }
        }
        Ok(out)
    }

    /// Applies `ζ ↦ ζ^u` coefficientwise.
    pub fn galois(&self, u: i64) -> Self {
        CycPoly {
            modulus: self.modulus,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c.galois(u)))
                .collect(),
        }
    }

    /// Certifies every coefficient as a rational integer.
    pub fn to_integer_terms(&self) -> Result<BTreeMap<(usize, usize), BigInt>> {
        let mut out = BTreeMap::new();
        for (k, c) in &self.terms {
            let v = c.is_rational_integer().ok_or_else(|| {
                Error::NotIntegral(format!("coefficient {k:?} = {c:?} is not rational"))
            })?;
            if !v.is_zero() {
                out.insert(*k, v);
            }
        }
        Ok(out)
    }
}
