//! Finite monomial subgroups of `U(d)` with root-of-unity entries, in
//! particular the images `π_{k,l}(Γ_d(m, n, r))` of Type I metacyclic groups.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::arith::{gcd, lcm, mod_pow, multiplicative_order, prime_factors};
use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};
use crate::lens::{Cursor, LensSpace};

/// A monomial matrix: row `i` has the single nonzero entry
/// `ζ_N^{exps[i]}` in column `perm[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialElement {
    modulus: u64,
    perm: Vec<usize>,
    exps: Vec<u64>,
}

impl MonomialElement {
    pub fn new(modulus: u64, perm: Vec<usize>, exps: Vec<i64>) -> Result<Self> {
        let d = perm.len();
        if exps.len() != d {
            return Err(Error::DimensionMismatch(d, exps.len()));
        }
        let mut seen = vec![false; d];
        for &p in &perm {
            if p >= d || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidTypeOne(format!("{perm:?} is not a permutation")));
            }
        }
        let exps = exps
            .into_iter()
            .map(|e| e.rem_euclid(modulus as i64) as u64)
            .collect();
        Ok(MonomialElement { modulus, perm, exps })
    }

    pub fn identity(dim: usize, modulus: u64) -> Self {
        MonomialElement {
            modulus,
            perm: (0..dim).collect(),
            exps: vec![0; dim],
        }
    }

    pub fn diagonal(modulus: u64, exps: &[i64]) -> Self {
        MonomialElement::new(modulus, (0..exps.len()).collect(), exps.to_vec())
            .expect("identity permutation")
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn exps(&self) -> &[u64] {
        &self.exps
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&e| e == 0) && self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.modulus, other.modulus);
        let n = self.modulus;
        let perm = self.perm.iter().map(|&j| other.perm[j]).collect();
        let exps = self
            .exps
            .iter()
            .zip(&self.perm)
            .map(|(&e, &j)| (e + other.exps[j]) % n)
            .collect();
        MonomialElement {
            modulus: n,
            perm,
            exps,
        }
    }

    pub fn inverse(&self) -> Self {
        let d = self.dim();
        let mut perm = vec![0; d];
        let mut exps = vec![0; d];
        for (i, (&p, &e)) in self.perm.iter().zip(&self.exps).enumerate() {
            perm[p] = i;
            exps[p] = (self.modulus - e) % self.modulus;
        }
        MonomialElement {
            modulus: self.modulus,
            perm,
            exps,
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = MonomialElement::identity(self.dim(), self.modulus);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Cycle data `(length, exponent of the entry product)`, sorted.
    pub fn cycle_data(&self) -> Vec<(usize, u64)> {
        let d = self.dim();
        let mut seen = vec![false; d];
        let mut out = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let (mut i, mut len, mut e) = (start, 0, 0);
            while !seen[i] {
                seen[i] = true;
                e = (e + self.exps[i]) % self.modulus;
                i = self.perm[i];
                len += 1;
            }
            out.push((len, e));
        }
        out.sort_unstable();
        out
    }

    /// Eigenvalue exponents modulo `big`, sorted; `big` must be a multiple
    /// of `N · ℓ` for every cycle length `ℓ`.
    fn spectrum(&self, big: u64) -> Vec<u64> {
        let n = self.modulus;
        let mut out = Vec::with_capacity(self.dim());
        for (len, e) in self.cycle_data() {
            let step = big / (n * len as u64);
            for j in 0..len as u64 {
                out.push((e + j * n) * step % big);
            }
        }
        out.sort_unstable();
        out
    }
}

/// Factors `(ℓ, c)` of the characteristic polynomial `Π (x^ℓ - c)`, one per
/// cycle of the underlying permutation.
pub fn char_poly_factors(g: &MonomialElement) -> Vec<(usize, CycInt)> {
    g.cycle_data()
        .into_iter()
        .map(|(len, e)| (len, CycInt::root(g.modulus as usize, e as i64)))
        .collect()
}

/// A finite group of monomial matrices, stored as a sorted element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialGroup {
    dim: usize,
    modulus: u64,
    elements: Vec<MonomialElement>,
    label: String,
}

impl MonomialGroup {
    /// Breadth-first closure of `generators`; fails once more than `limit`
    /// elements appear.
    pub fn generate(
        generators: &[MonomialElement],
        limit: usize,
        label: impl Into<String>,
    ) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::InvalidTypeOne("no generators".into()))?;
        let (dim, modulus) = (first.dim(), first.modulus);
        for g in generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch(dim, g.dim()));
            }
            if g.modulus != modulus {
                return Err(Error::InvalidTypeOne("generators use different root orders".into()));
            }
        }
        let id = MonomialElement::identity(dim, modulus);
        let mut seen: HashSet<MonomialElement> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in generators {
                let y = x.mul(g);
                if seen.insert(y.clone()) {
                    if seen.len() > limit {
                        return Err(Error::ClosureOverflow { limit });
                    }
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<_> = seen.into_iter().collect();
        elements.sort();
        Ok(MonomialGroup {
            dim,
            modulus,
            elements,
            label: label.into(),
        })
    }

    /// The cyclic group generated by `diag(ξ_k^{s_1}, ..., ξ_k^{s_n})`.
    pub fn from_lens(l: &LensSpace) -> Self {
        let k = l.order();
        let elements: Vec<_> = (0..k)
            .map(|m| {
                let exps: Vec<i64> = l.residues().iter().map(|&s| (s * m % k) as i64).collect();
                MonomialElement::diagonal(k, &exps)
            })
            .collect();
        let mut elements = elements;
        elements.sort();
        MonomialGroup {
            dim: l.n(),
            modulus: k,
            elements,
            label: l.to_string(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[MonomialElement] {
        &self.elements
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Elements grouped by cycle data, with multiplicities. Cycle data
    /// determines the spectrum, hence every class function used here.
    pub fn cycle_classes(&self) -> BTreeMap<Vec<(usize, u64)>, usize> {
        let mut out = BTreeMap::new();
        for g in &self.elements {
            *out.entry(g.cycle_data()).or_insert(0) += 1;
        }
        out
    }

    fn spectrum_modulus(&self) -> u64 {
        let lengths = self
            .elements
            .iter()
            .flat_map(|g| g.cycle_data().into_iter().map(|(l, _)| l as u64))
            .fold(1, lcm);
        self.modulus * lengths
    }

    /// Sorted multiset of spectra, each a sorted list of eigenvalue exponents
    /// modulo `big`.
    fn spectra(&self, big: u64) -> Vec<Vec<u64>> {
        let mut v: Vec<_> = self.elements.iter().map(|g| g.spectrum(big)).collect();
        v.sort_unstable();
        v
    }
}

impl fmt::Display for MonomialGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// True iff no non-identity element has eigenvalue 1, i.e. no cycle whose
/// entry product is 1.
pub fn acts_freely(g: &MonomialGroup) -> bool {
    g.elements
        .iter()
        .filter(|x| !x.is_identity())
        .all(|x| x.cycle_data().iter().all(|&(_, e)| e != 0))
}

/// Almost conjugacy in `U(d)`: a bijection preserving spectra.
pub fn almost_conjugate(a: &MonomialGroup, b: &MonomialGroup) -> bool {
    if a.dim != b.dim || a.order() != b.order() {
        return false;
    }
    let big = lcm(a.spectrum_modulus(), b.spectrum_modulus());
    a.spectra(big) == b.spectra(big)
}

/// Parameters of the Type I group `⟨A, B | A^m, B^n, BAB^{-1} = A^r⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TypeIParams {
    pub m: u64,
    pub n: u64,
    pub r: u64,
    /// Multiplicative order of `r` modulo `m`.
    pub d: u64,
    /// `n / d`.
    pub n_prime: u64,
}

impl TypeIParams {
    pub fn new(m: u64, n: u64, r: u64) -> Result<Self> {
        if m == 0 || n == 0 || r == 0 {
            return Err(Error::InvalidTypeOne("m, n, r must be positive".into()));
        }
        if gcd(n * (r.max(1) - 1), m) != 1 {
            return Err(Error::InvalidTypeOne(format!("gcd(n(r-1), m) != 1 for ({m},{n},{r})")));
        }
        let d = multiplicative_order(r, m)
            .ok_or_else(|| Error::InvalidTypeOne(format!("{r} is not a unit mod {m}")))?;
        if n % d != 0 {
            return Err(Error::InvalidTypeOne(format!("d = {d} does not divide n = {n}")));
        }
        let n_prime = n / d;
        if let Some(p) = prime_factors(d).into_iter().find(|p| n_prime % p != 0) {
            return Err(Error::InvalidTypeOne(format!("prime {p} | d does not divide n' = {n_prime}")));
        }
        debug_assert_eq!(mod_pow(r, d, m), 1 % m);
        Ok(TypeIParams { m, n, r, d, n_prime })
    }

    pub fn root_order(&self) -> u64 {
        lcm(self.m, self.n_prime)
    }

    /// `π_{k,l}(A)` and `π_{k,l}(B)`.
    pub fn generators(&self, k: u64, l: u64) -> Result<(MonomialElement, MonomialElement)> {
        if gcd(k, self.m) != 1 {
            return Err(Error::InvalidTypeOne(format!("gcd(k={k}, m={}) != 1", self.m)));
        }
        if gcd(l, self.n) != 1 {
            return Err(Error::InvalidTypeOne(format!("gcd(l={l}, n={}) != 1", self.n)));
        }
        if k % self.d != 1 % self.d {
            return Err(Error::InvalidTypeOne(format!("k={k} is not 1 mod d={}", self.d)));
        }
        let big = self.root_order();
        let d = self.d as usize;
        let a_scale = big / self.m;
        let a_exps: Vec<i64> = (0..self.d)
            .map(|i| (k % self.m * mod_pow(self.r, i, self.m) % self.m * a_scale) as i64)
            .collect();
        let a = MonomialElement::diagonal(big, &a_exps);
        let mut b_exps = vec![0i64; d];
        b_exps[d - 1] = (l % self.n_prime * (big / self.n_prime)) as i64;
        let b_perm = (0..d).map(|i| (i + 1) % d).collect();
        let b = MonomialElement::new(big, b_perm, b_exps)?;
        Ok((a, b))
    }
}

/// The image `π_{k,l}(Γ_d(m, n, r))`, closed under products.
pub fn type_one_group(params: &TypeIParams, k: u64, l: u64) -> Result<MonomialGroup> {
    let (a, b) = params.generators(k, l)?;
    let order = (params.m * params.n) as usize;
    let label = format!(
        "GammaI({},{},{};{},{})",
        params.m, params.n, params.r, k, l
    );
    let g = MonomialGroup::generate(&[a, b], order, label)?;
    if g.order() != order {
        return Err(Error::InvalidTypeOne(format!(
            "closure has {} elements, expected m·n = {order}",
            g.order()
        )));
    }
    Ok(g)
}

/// A parsed `GammaI(m,n,r;k,l)` literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TypeILiteral {
    pub params: TypeIParams,
    pub k: u64,
    pub l: u64,
}

impl FromStr for TypeILiteral {
    type Err = Error;

    fn from_str(src: &str) -> Result<Self> {
        let mut cur = Cursor::new(src);
        cur.expect("GammaI")?;
        cur.expect("(")?;
        let start = cur.pos();
        let mut nums = [0i64; 5];
        for (i, slot) in nums.iter_mut().enumerate() {
            if i > 0 {
                cur.expect(if i == 3 { ";" } else { "," })?;
            }
            *slot = cur.integer()?;
            if *slot <= 0 {
                return cur.err("parameters must be positive");
            }
        }
        cur.expect(")")?;
        cur.finish()?;
        let [m, n, r, k, l] = nums.map(|x| x as u64);
        let params = TypeIParams::new(m, n, r).map_err(|e| Error::Parse {
            pos: start,
            msg: e.to_string(),
        })?;
        params.generators(k, l).map_err(|e| Error::Parse {
            pos: start,
            msg: e.to_string(),
        })?;
        Ok(TypeILiteral { params, k, l })
    }
}

impl TypeILiteral {
    pub fn build(&self) -> Result<MonomialGroup> {
        type_one_group(&self.params, self.k, self.l)
    }
}
