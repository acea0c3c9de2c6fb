//! Explicit isospectral constructions: the prime-order families `G(n, k)` and
//! the order-`r²` pairs `L±`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_prime, mod_inverse, mod_pow, units};
use crate::error::{Error, Result};
use crate::genfun::p_poly;
use crate::lens::{are_cr_equivalent, LensSpace};

/// True iff `s` has distinct unit residues and some `s_i` whose negative is
/// not among the `s_j`.
fn gerson_condition(k: u64, s: &[u64]) -> bool {
    let set: BTreeSet<u64> = s.iter().copied().collect();
    set.len() == s.len()
        && s.iter().all(|&x| gcd(x, k) == 1)
        && s.iter().any(|&x| !set.contains(&((k - x) % k)))
}

/// Increasing `n`-subsets of a slice, in lexicographic order.
struct Subsets<'a> {
    items: &'a [u64],
    idx: Vec<usize>,
    first: bool,
}

impl Iterator for Subsets<'_> {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let (n, m) = (self.idx.len(), self.items.len());
        if n > m {
            return None;
        }
        if self.first {
            self.first = false;
        } else {
            let i = (0..n).rev().find(|&i| self.idx[i] < m - n + i)?;
            self.idx[i] += 1;
            for j in i + 1..n {
                self.idx[j] = self.idx[j - 1] + 1;
            }
        }
        Some(self.idx.iter().map(|&i| self.items[i]).collect())
    }
}

/// The members of `G(n, k)` as increasing residue sets. Every ordering of a
/// set is also a member; those are CR equivalent and not listed.
pub fn gerson_members(n: usize, k: u64) -> impl Iterator<Item = LensSpace> {
    let us = units(k);
    let sets: Vec<Vec<u64>> = Subsets {
        items: &us,
        idx: (0..n).collect(),
        first: true,
    }
    .filter(|s| gerson_condition(k, s))
    .collect();
    sets.into_iter().map(move |s| {
        assert!(gerson_condition(k, &s));
        let s: Vec<i64> = s.iter().map(|&x| x as i64).collect();
        LensSpace::new(k, &s).expect("units mod k form a lens space")
    })
}

/// Counts for `G(k-3, k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GersonCounts {
    pub k: u64,
    pub n: usize,
    /// Ordered tuples.
    pub raw: u128,
    pub sets: usize,
    /// CR equivalence classes, by canonical form.
    pub classes: usize,
    /// `(k-3)/2`.
    pub expected_classes: u64,
}

fn check_odd_prime(k: u64) -> Result<()> {
    if k < 5 || !is_prime(k) {
        return Err(Error::NotOddPrime(k));
    }
    Ok(())
}

/// `(k-3)/2`, the number of CR classes in `G(k-3, k)` for a prime `k >= 5`.
pub fn gerson_class_count(k: u64) -> Result<u64> {
    check_odd_prime(k)?;
    Ok((k - 3) / 2)
}

/// One representative per CR class of `G(k-3, k)`, sorted.
pub fn gerson_classes(k: u64) -> Result<Vec<LensSpace>> {
    check_odd_prime(k)?;
    let reps: BTreeSet<LensSpace> = gerson_members(k as usize - 3, k)
        .map(|l| l.cr_canonical_form())
        .collect();
    Ok(reps.into_iter().collect())
}

pub fn gerson_counts(k: u64) -> Result<GersonCounts> {
    let expected_classes = gerson_class_count(k)?;
    let n = k as usize - 3;
    let sets = gerson_members(n, k).count();
    let factorial: u128 = (1..=n as u128).product();
    Ok(GersonCounts {
        k,
        n,
        raw: sets as u128 * factorial,
        sets,
        classes: gerson_classes(k)?.len(),
        expected_classes,
    })
}

/// True iff all classes of `G(k-3, k)` share `P_L`.
pub fn verify_gerson_isospectral(k: u64) -> Result<bool> {
    let classes = gerson_classes(k)?;
    let polys = classes.iter().map(p_poly).collect::<Result<Vec<_>>>()?;
    Ok(polys.windows(2).all(|w| w[0].same_coefficients(&w[1])))
}

/// `r` odd, `r > 3`, and `0 <= a_1 < ... < a_n < r` with all differences
/// prime to `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairParams {
    r: u64,
    a: Vec<u64>,
}

impl PairParams {
    pub fn new(r: u64, a: &[u64]) -> Result<Self> {
        if r <= 3 || r % 2 == 0 {
            return Err(Error::InvalidPair(format!("r = {r} must be odd and greater than 3")));
        }
        if a.len() < 3 {
            return Err(Error::InvalidPair(format!("need n >= 3 exponents, got {}", a.len())));
        }
        if a.windows(2).any(|w| w[0] >= w[1]) || a[a.len() - 1] >= r {
            return Err(Error::InvalidPair(format!("exponents {a:?} must increase strictly below {r}")));
        }
        for (i, &x) in a.iter().enumerate() {
            for &y in &a[i + 1..] {
                if gcd(y - x, r) != 1 {
                    return Err(Error::InvalidPair(format!("a_j - a_i = {} is not prime to {r}", y - x)));
                }
            }
        }
        Ok(PairParams { r, a: a.to_vec() })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn k(&self) -> u64 {
        self.r * self.r
    }

    pub fn theta(&self) -> u64 {
        self.r + 1
    }
}

/// `θ^a mod r²`, checked against `θ^a ≡ ar + 1`.
fn theta_power(r: u64, a: u64) -> u64 {
    let k = r * r;
    let v = mod_pow(r + 1, a, k);
    assert_eq!(v, (a * r + 1) % k);
    v
}

/// `L+ = L(r²; θ^{a_1}, ..., θ^{a_n})` and `L- = L(r²; θ^{-a_1}, ..., θ^{-a_n})`.
pub fn make_pair(params: &PairParams) -> (LensSpace, LensSpace) {
    let k = params.k();
    let plus: Vec<u64> = params.a.iter().map(|&a| theta_power(params.r, a)).collect();
    let minus: Vec<i64> = plus
        .iter()
        .map(|&x| mod_inverse(x, k).expect("θ is a unit") as i64)
        .collect();
    let plus: Vec<i64> = plus.into_iter().map(|x| x as i64).collect();
    (
        LensSpace::new(k, &plus).expect("θ powers are units"),
        LensSpace::new(k, &minus).expect("θ powers are units"),
    )
}

/// Involutions of `0..n` made of exactly `⌊n/2⌋` disjoint transpositions.
fn maximal_involutions(n: usize) -> Vec<Vec<usize>> {
    fn go(free: &mut Vec<usize>, sigma: &mut Vec<usize>, fixed_left: usize, out: &mut Vec<Vec<usize>>) {
        let Some(&i) = free.first() else {
            out.push(sigma.clone());
            return;
        };
        free.remove(0);
        if fixed_left > 0 {
            sigma[i] = i;
            go(free, sigma, fixed_left - 1, out);
        }
        for pos in 0..free.len() {
            let j = free.remove(pos);
            sigma[i] = j;
            sigma[j] = i;
            go(free, sigma, fixed_left, out);
            free.insert(pos, j);
        }
        free.insert(0, i);
    }
    let mut out = Vec::new();
    go(&mut (0..n).collect(), &mut (0..n).collect(), n % 2, &mut out);
    out
}

/// True iff some `σ` made of `⌊n/2⌋` disjoint transpositions makes
/// `a_i + a_{σ(i)}` constant mod `r`.
pub fn pair_equivalent(params: &PairParams) -> bool {
    let (r, a) = (params.r, &params.a);
    maximal_involutions(a.len()).into_iter().any(|sigma| {
        let sums: BTreeSet<u64> = (0..a.len()).map(|i| (a[i] + a[sigma[i]]) % r).collect();
        sums.len() == 1
    })
}

/// Every valid exponent vector of length `n` for `r`.
pub fn all_pair_params(r: u64, n: usize) -> Vec<PairParams> {
    let items: Vec<u64> = (0..r).collect();
    Subsets {
        items: &items,
        idx: (0..n).collect(),
        first: true,
    }
    .filter_map(|a| PairParams::new(r, &a).ok())
    .collect()
}

/// `a_i = 2^{i-1} - 1`.
pub fn power_of_two_params(r: u64, n: usize) -> Result<PairParams> {
    let a: Vec<u64> = (0..n as u32).map(|i| (1u64 << i) - 1).collect();
    PairParams::new(r, &a)
}

/// Checks a pair: `(P_{L+} = P_{L-}, L+ ~ L-)`.
pub fn check_pair(params: &PairParams) -> Result<(bool, bool)> {
    let (plus, minus) = make_pair(params);
    let equal = p_poly(&plus)?.same_coefficients(&p_poly(&minus)?);
    Ok((equal, are_cr_equivalent(&plus, &minus)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lens(lit: &str) -> LensSpace {
        lit.parse().unwrap()
    }

    #[test]
    fn gerson_membership() {
        let members: Vec<LensSpace> = gerson_members(2, 5).collect();
        assert!(members.contains(&lens("L(5;1,2)")));
        assert!(!members.contains(&lens("L(5;1,4)")));
        assert!(members.iter().all(|l| gerson_condition(5, l.residues())));
        assert_eq!(gerson_members(4, 5).count(), 0);
        assert_eq!(gerson_members(6, 7).count(), 0);
        assert!(gerson_members(5, 7).count() > 0);
    }

    #[test]
    fn gerson_classes_for_seven() {
        assert_eq!(
            gerson_classes(7).unwrap(),
            vec![lens("L(7;1,2,3,4)"), lens("L(7;1,2,3,5)")]
        );
    }

    #[test]
    fn gerson_counts_small_primes() {
        for (k, c) in [(5u64, 1u64), (7, 2), (11, 4), (13, 5)] {
            assert_eq!(gerson_class_count(k).unwrap(), c);
            let counts = gerson_counts(k).unwrap();
            assert_eq!(counts.classes as u64, c);
            assert_eq!(counts.raw, counts.sets as u128 * (1..=counts.n as u128).product::<u128>());
        }
        assert!(matches!(gerson_class_count(4), Err(Error::NotOddPrime(4))));
        assert!(matches!(gerson_class_count(9), Err(Error::NotOddPrime(9))));
        assert!(matches!(gerson_class_count(3), Err(Error::NotOddPrime(3))));
    }

    #[test]
    fn gerson_isospectral() {
        for k in [5, 7, 11] {
            assert!(verify_gerson_isospectral(k).unwrap());
        }
    }

    #[test]
    fn pair_r7() {
        let params = PairParams::new(7, &[0, 1, 3]).unwrap();
        let (plus, minus) = make_pair(&params);
        assert_eq!(plus, lens("L(49;1,8,22)"));
        assert_eq!(minus, lens("L(49;1,43,29)"));
        assert_eq!(minus.cr_canonical_form(), lens("L(49;1,8,36)").cr_canonical_form());
        assert!(!pair_equivalent(&params));
        assert_eq!(check_pair(&params).unwrap(), (true, false));
    }

    #[test]
    fn pair_r5_is_equivalent() {
        let params = PairParams::new(5, &[0, 1, 2]).unwrap();
        assert!(pair_equivalent(&params));
        let (plus, minus) = make_pair(&params);
        assert!(are_cr_equivalent(&plus, &minus));
    }

    #[test]
    fn power_of_two_family() {
        for (r, n) in [(11u64, 3usize), (13, 3), (17, 4), (19, 4)] {
            let params = power_of_two_params(r, n).unwrap();
            assert!(!pair_equivalent(&params));
            let (plus, minus) = make_pair(&params);
            assert!(!are_cr_equivalent(&plus, &minus));
        }
    }

    #[test]
    fn involution_counts() {
        assert_eq!(maximal_involutions(3).len(), 3);
        assert_eq!(maximal_involutions(4).len(), 3);
        assert_eq!(maximal_involutions(5).len(), 15);
    }

    #[test]
    fn invalid_params() {
        assert!(PairParams::new(3, &[0, 1, 2]).is_err());
        assert!(PairParams::new(8, &[0, 1, 3]).is_err());
        assert!(PairParams::new(9, &[0, 1, 4]).is_err());
        assert!(PairParams::new(7, &[0, 3, 1]).is_err());
        assert!(PairParams::new(7, &[0, 1]).is_err());
    }
}
