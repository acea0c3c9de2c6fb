//! Lens spaces `L(k; s_1, ..., s_n)`, their CR and Riemannian equivalence
//! tests, canonical forms and class enumeration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, mod_inverse, units};
use crate::error::{Error, Result};

/// Quotient of `S^{2n-1}` by the cyclic group generated by
/// `diag(ξ_k^{s_1}, ..., ξ_k^{s_n})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawLens", into = "RawLens")]
pub struct LensSpace {
    k: u64,
    s: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawLens {
    k: u64,
    s: Vec<i64>,
}

impl TryFrom<RawLens> for LensSpace {
    type Error = Error;
    fn try_from(raw: RawLens) -> Result<Self> {
        LensSpace::new(raw.k, &raw.s)
    }
}

impl From<LensSpace> for RawLens {
    fn from(l: LensSpace) -> Self {
        RawLens {
            k: l.k,
            s: l.s.iter().map(|&x| x as i64).collect(),
        }
    }
}

impl LensSpace {
    /// Validates and reduces the residues into `[1, k-1]`.
    pub fn new(k: u64, s: &[i64]) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidLens(format!("order k = {k} must be at least 2")));
        }
        if s.is_empty() {
            return Err(Error::InvalidLens("empty residue vector".into()));
        }
        if s.len() < 2 {
            return Err(Error::InvalidLens(format!(
                "need at least two residues, got {}",
                s.len()
            )));
        }
        let mut reduced = Vec::with_capacity(s.len());
        for &x in s {
            let r = x.rem_euclid(k as i64) as u64;
            if gcd(r, k) != 1 {
                return Err(Error::InvalidLens(format!(
                    "gcd({x}, {k}) != 1, the action is not free"
                )));
            }
            reduced.push(r);
        }
        Ok(LensSpace { k, s: reduced })
    }

    /// The round sphere `S^{2n-1}` itself, written as `L(1; 0, ..., 0)`.
    pub fn sphere(n: usize) -> Self {
        assert!(n >= 2, "sphere dimension parameter n must be >= 2");
        LensSpace { k: 1, s: vec![0; n] }
    }

    pub fn order(&self) -> u64 {
        self.k
    }

    pub fn residues(&self) -> &[u64] {
        &self.s
    }

    /// Complex dimension `n` of the ambient `C^n`.
    pub fn n(&self) -> usize {
        self.s.len()
    }

    /// Real dimension `2n - 1` of the manifold.
    pub fn manifold_dim(&self) -> usize {
        2 * self.s.len() - 1
    }

    fn scaled_sorted(&self, c: u64) -> Vec<u64> {
        let mut v: Vec<u64> = self.s.iter().map(|&x| x * c % self.k).collect();
        v.sort_unstable();
        v
    }

    /// Lexicographically least sorted residue vector over all unit multiples.
    pub fn cr_canonical_form(&self) -> LensSpace {
        if self.k == 1 {
            return self.clone();
        }
        let best = units(self.k)
            .into_iter()
            .map(|c| self.scaled_sorted(c))
            .min()
            .expect("Z/k has at least one unit");
        LensSpace { k: self.k, s: best }
    }

    pub fn is_cr_canonical(&self) -> bool {
        let mut sorted = self.s.clone();
        sorted.sort_unstable();
        sorted == self.s && self.cr_canonical_form().s == self.s
    }
}

impl fmt::Display for LensSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L({}; ", self.k)?;
        for (i, x) in self.s.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Small cursor-based parser shared by the literal grammars.
pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    pub(crate) fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    pub(crate) fn expect(&mut self, token: &str) -> Result<()> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            self.err(format!("expected `{token}`"))
        }
    }

    pub(crate) fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[self.pos..];
        let mut len = 0;
        for (i, c) in rest.char_indices() {
            if c.is_ascii_digit() || (i == 0 && c == '-') {
                len = i + 1;
            } else {
                break;
            }
        }
        let text = &rest[..len];
        match text.parse::<i64>() {
            Ok(v) => {
                self.pos += len;
                Ok(v)
            }
            Err(_) => Err(Error::Parse {
                pos: start,
                msg: "expected an integer".into(),
            }),
        }
    }

    pub(crate) fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos == self.src.len() {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }
}

impl FromStr for LensSpace {
    type Err = Error;

    /// Parses `L(k; s1,s2,...,sn)`; whitespace is optional.
    fn from_str(src: &str) -> Result<Self> {
        let mut cur = Cursor::new(src);
        cur.expect("L")?;
        cur.expect("(")?;
        let k_pos = cur.pos();
        let k = cur.integer()?;
        if k < 2 {
            return Err(Error::Parse {
                pos: k_pos,
                msg: format!("order {k} must be at least 2"),
            });
        }
        cur.expect(";")?;
        let mut s = Vec::new();
        loop {
            let pos = cur.pos();
            let x = cur.integer()?;
            if gcd(x.rem_euclid(k) as u64, k as u64) != 1 {
                return Err(Error::Parse {
                    pos,
                    msg: format!("residue {x} is not prime to {k}"),
                });
            }
            s.push(x);
            if !cur.eat(",") {
                break;
            }
        }
        cur.expect(")")?;
        cur.finish()?;
        LensSpace::new(k as u64, &s)
    }
}

/// Witness for `s_i ≡ c · s'_{σ(i)} (mod k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrWitness {
    pub c: u64,
    pub sigma: Vec<usize>,
}

/// Witness for `s_i ≡ ε_i · c · s'_{σ(i)} (mod k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsometryWitness {
    pub c: u64,
    pub sigma: Vec<usize>,
    pub signs: Vec<i8>,
}

/// Matches `target[i]` against `key(source[j])` and returns `σ` with
/// `key(target[i]) == key(source[σ(i)])`, if the multisets agree.
fn match_multisets(target: &[u64], source: &[u64], key: impl Fn(u64) -> u64) -> Option<Vec<usize>> {
    let mut t: Vec<(u64, usize)> = target.iter().enumerate().map(|(i, &x)| (key(x), i)).collect();
    let mut s: Vec<(u64, usize)> = source.iter().enumerate().map(|(j, &x)| (key(x), j)).collect();
    t.sort_unstable();
    s.sort_unstable();
    if t.iter().map(|p| p.0).ne(s.iter().map(|p| p.0)) {
        return None;
    }
    let mut sigma = vec![0; target.len()];
    for ((_, i), (_, j)) in t.into_iter().zip(s) {
        sigma[i] = j;
    }
    Some(sigma)
}

pub fn cr_witness(a: &LensSpace, b: &LensSpace) -> Option<CrWitness> {
    if a.k != b.k || a.n() != b.n() {
        return None;
    }
    let k = a.k;
    units(k).into_iter().find_map(|c| {
        let scaled: Vec<u64> = b.s.iter().map(|&x| x * c % k).collect();
        match_multisets(&a.s, &scaled, |x| x).map(|sigma| CrWitness { c, sigma })
    })
}

pub fn isometry_witness(a: &LensSpace, b: &LensSpace) -> Option<IsometryWitness> {
    if a.k != b.k || a.n() != b.n() {
        return None;
    }
    let k = a.k;
    let fold = |x: u64| x.min((k - x) % k);
    units(k).into_iter().find_map(|c| {
        let scaled: Vec<u64> = b.s.iter().map(|&x| x * c % k).collect();
        match_multisets(&a.s, &scaled, fold).map(|sigma| {
            let signs = a
                .s
                .iter()
                .enumerate()
                .map(|(i, &x)| if x == scaled[sigma[i]] { 1 } else { -1 })
                .collect();
            IsometryWitness { c, sigma, signs }
        })
    })
}

/// CR equivalence: the generating groups are conjugate in `U(n)`.
pub fn are_cr_equivalent(a: &LensSpace, b: &LensSpace) -> bool {
    cr_witness(a, b).is_some()
}

/// Riemannian isometry: the generating groups are conjugate in `O(2n)`.
pub fn are_isometric(a: &LensSpace, b: &LensSpace) -> bool {
    isometry_witness(a, b).is_some()
}

/// Streams one canonical representative per CR class of `n`-tuples mod `k`.
///
/// Candidates are the nondecreasing unit tuples starting with 1; a candidate
/// is emitted when it equals its own canonical form.
pub fn enumerate_cr_classes(n: usize, k: u64) -> CrClasses {
    CrClasses::new(n, k, None)
}

/// The classes whose canonical form has second residue `second`; the union
/// over all units `second` is `enumerate_cr_classes(n, k)`.
pub fn enumerate_cr_classes_with_second(n: usize, k: u64, second: u64) -> CrClasses {
    CrClasses::new(n, k, Some(second))
}

pub struct CrClasses {
    k: u64,
    units: Vec<u64>,
    idx: Vec<usize>,
    started: bool,
    done: bool,
    pinned: bool,
}

impl CrClasses {
    fn new(n: usize, k: u64, second: Option<u64>) -> Self {
        assert!(n >= 2 && k >= 2, "enumeration needs n >= 2 and k >= 2");
        let units = units(k);
        let mut idx = vec![0; n - 1];
        let mut done = false;
        let mut pinned = false;
        if let Some(s2) = second {
            match units.iter().position(|&u| u == s2 % k) {
                Some(p) => {
                    idx.iter_mut().for_each(|x| *x = p);
                    pinned = true;
                }
                None => done = true,
            }
        }
        CrClasses {
            k,
            units,
            idx,
            started: false,
            done,
            pinned,
        }
    }

    /// Next nondecreasing index tuple; the first slot stays fixed if pinned.
    fn advance(&mut self) -> bool {
        let lo = usize::from(self.pinned);
        let top = self.units.len() - 1;
        let mut i = self.idx.len();
        while i > lo {
            i -= 1;
            if self.idx[i] < top {
                let v = self.idx[i] + 1;
                for x in &mut self.idx[i..] {
                    *x = v;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for CrClasses {
    type Item = LensSpace;

    fn next(&mut self) -> Option<LensSpace> {
        while !self.done {
            if self.started {
                if !self.advance() {
                    self.done = true;
                    return None;
                }
            } else {
                self.started = true;
            }
            let mut s = Vec::with_capacity(self.idx.len() + 1);
            s.push(1);
            s.extend(self.idx.iter().map(|&i| self.units[i]));
            let cand = LensSpace { k: self.k, s };
            if cand.is_cr_canonical() {
                return Some(cand);
            }
        }
        None
    }
}

/// Applies `x ↦ c·x` and then a permutation, producing a CR-equivalent space.
pub fn transform(l: &LensSpace, c: u64, perm: &[usize]) -> LensSpace {
    debug_assert_eq!(gcd(c, l.k), 1);
    let s = perm.iter().map(|&j| l.s[j] * c % l.k).collect();
    LensSpace { k: l.k, s }
}

/// `s_1^{-1}·s`, the representative with leading residue 1 (unsorted).
pub fn normalize_leading(l: &LensSpace) -> LensSpace {
    let inv = mod_inverse(l.s[0], l.k).expect("residues are units");
    LensSpace {
        k: l.k,
        s: l.s.iter().map(|&x| x * inv % l.k).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn lens(k: u64, s: &[i64]) -> LensSpace {
        LensSpace::new(k, s).unwrap()
    }

    /// Orbit representatives by brute force over all tuples.
    fn brute_classes(n: usize, k: u64) -> BTreeSet<Vec<u64>> {
        let us = units(k);
        let mut out = BTreeSet::new();
        let mut idx = vec![0usize; n];
        loop {
            let s: Vec<u64> = idx.iter().map(|&i| us[i]).collect();
            let orbit_min = us
                .iter()
                .map(|&c| {
                    let mut v: Vec<u64> = s.iter().map(|&x| x * c % k).collect();
                    v.sort_unstable();
                    v
                })
                .min()
                .unwrap();
            out.insert(orbit_min);
            let mut i = n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < us.len() {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    #[test]
    fn construction() {
        assert_eq!(lens(7, &[8, 2]).residues(), &[1, 2]);
        assert!(LensSpace::new(4, &[2, 1]).is_err());
        assert!(LensSpace::new(1, &[1, 1]).is_err());
        assert!(LensSpace::new(5, &[]).is_err());
        assert!(LensSpace::new(5, &[1, 2]).is_ok());
    }

    #[test]
    fn literal_round_trip() {
        let l: LensSpace = "L(7; 1,2,3,5)".parse().unwrap();
        assert_eq!(l.to_string(), "L(7; 1,2,3,5)");
        let l2: LensSpace = "L(5;1,2)".parse().unwrap();
        assert_eq!(l2, lens(5, &[1, 2]));
        match "L(7;0,1)".parse::<LensSpace>() {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!("L(7;1,2".parse::<LensSpace>().is_err());
        assert!("L(7;1,2) x".parse::<LensSpace>().is_err());
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(
            lens(5, &[1, 3]).cr_canonical_form(),
            lens(5, &[1, 2]).cr_canonical_form()
        );
        assert_ne!(
            lens(3, &[1, 2]).cr_canonical_form(),
            lens(3, &[1, 1]).cr_canonical_form()
        );
        let l = lens(16, &[1, 3, 5, 7, 9]);
        assert_eq!(l.cr_canonical_form(), l.cr_canonical_form().cr_canonical_form());
    }

    #[test]
    fn equivalence_examples() {
        assert!(!are_cr_equivalent(&lens(7, &[1, 2, 3, 4]), &lens(7, &[1, 2, 3, 5])));
        assert!(are_cr_equivalent(&lens(5, &[1, 2]), &lens(5, &[1, 3])));
        let a = lens(3, &[1, 1]);
        let b = lens(3, &[1, 2]);
        assert!(are_isometric(&a, &b));
        assert!(!are_cr_equivalent(&a, &b));
        assert!(are_cr_equivalent(&a, &a));
        let c = lens(16, &[1, 3, 5, 7, 9]);
        let d = lens(16, &[1, 3, 5, 7, 11]);
        assert!(are_isometric(&c, &d));
        assert!(!are_cr_equivalent(&c, &d));
        // different k or n
        assert!(!are_cr_equivalent(&lens(5, &[1, 2]), &lens(7, &[1, 2])));
        assert!(!are_isometric(&lens(5, &[1, 2]), &lens(5, &[1, 2, 1])));
    }

    #[test]
    fn witnesses_satisfy_congruences() {
        let a = lens(16, &[1, 3, 5, 7, 9]);
        let b = lens(16, &[1, 3, 5, 7, 11]);
        let w = isometry_witness(&a, &b).unwrap();
        for i in 0..a.n() {
            let rhs = (w.signs[i] as i64 * (w.c * b.s[w.sigma[i]]) as i64).rem_euclid(16) as u64;
            assert_eq!(a.s[i], rhs);
        }
        let a = lens(5, &[1, 2]);
        let b = lens(5, &[3, 1]);
        let w = cr_witness(&a, &b).unwrap();
        for i in 0..2 {
            assert_eq!(a.s[i], w.c * b.s[w.sigma[i]] % 5);
        }
    }

    #[test]
    fn enumeration_examples() {
        let c23: Vec<_> = enumerate_cr_classes(2, 3).collect();
        assert_eq!(c23, vec![lens(3, &[1, 1]), lens(3, &[1, 2])]);
        let c22: Vec<_> = enumerate_cr_classes(2, 2).collect();
        assert_eq!(c22, vec![lens(2, &[1, 1])]);
        let c25: Vec<_> = enumerate_cr_classes(2, 5).collect();
        assert_eq!(c25, vec![lens(5, &[1, 1]), lens(5, &[1, 2]), lens(5, &[1, 4])]);
    }

    #[test]
    fn enumeration_matches_brute_force_orbits() {
        for n in 2..=6usize {
            for k in 2..=60u64 {
                if (k as f64).powi(n as i32) > 1e6 {
                    continue;
                }
                let got: BTreeSet<Vec<u64>> =
                    enumerate_cr_classes(n, k).map(|l| l.s.clone()).collect();
                let count = enumerate_cr_classes(n, k).count();
                assert_eq!(count, got.len(), "duplicates for n={n}, k={k}");
                assert_eq!(got, brute_classes(n, k), "n={n}, k={k}");
            }
        }
    }

    #[test]
    fn partition_by_second_residue_covers_everything() {
        for (n, k) in [(3usize, 20u64), (4, 9), (2, 30)] {
            let all: Vec<_> = enumerate_cr_classes(n, k).collect();
            let mut parts: Vec<_> = units(k)
                .into_iter()
                .flat_map(|u| enumerate_cr_classes_with_second(n, k, u))
                .collect();
            parts.sort();
            assert_eq!(parts, all);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn lens_and_move() -> impl Strategy<Value = (LensSpace, u64, Vec<usize>)> {
            (2u64..=200, 2usize..=6).prop_flat_map(|(k, n)| {
                let us = units(k);
                let pick = proptest::sample::select(us);
                (
                    proptest::collection::vec(pick.clone(), n),
                    pick,
                    Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                )
                    .prop_map(move |(s, c, perm)| (LensSpace { k, s }, c, perm))
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(10_000))]

            #[test]
            fn canonical_form_is_orbit_invariant((l, c, perm) in lens_and_move()) {
                let canon = l.cr_canonical_form();
                prop_assert_eq!(canon.cr_canonical_form(), canon.clone());
                let moved = transform(&l, c, &perm);
                prop_assert_eq!(moved.cr_canonical_form(), canon);
                prop_assert!(are_cr_equivalent(&l, &moved));
                prop_assert!(are_isometric(&l, &moved));
            }
        }
    }
}
