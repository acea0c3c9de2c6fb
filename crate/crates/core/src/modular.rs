//! Evaluation of `P_L` at points of a prime field.
//!
//! With `p ≡ 1 (mod k)` and `ω` a primitive `k`-th root of unity in `F_p`,
//! the ring map `Z[ζ_k] → F_p`, `ζ_k ↦ ω`, sends the defining sum of `P_L`
//! to a sum of `k` products of precomputed factors. Equal `P_L` gives equal
//! values, so this is a cheap necessary condition.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::arith::{is_prime, mod_inverse, mod_pow, prime_factors};
use crate::lens::LensSpace;

#[derive(Debug)]
pub struct ModularEvaluator {
    k: u64,
    prime: u64,
    /// For each point, `(z^k - 1)/(z - ω^a)` for `a < k`, as `[z-table, w-table]`.
    tables: Vec<[Vec<u64>; 2]>,
}

fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Largest prime `p < 2^62` with `p ≡ 1 (mod k)`.
fn field_prime(k: u64) -> u64 {
    let top = (1u64 << 62) - 1;
    let mut p = top - (top - 1) % k;
    while !is_prime(p) {
        p -= k;
    }
    p
}

fn primitive_root_of_unity(k: u64, p: u64) -> u64 {
    let primes = prime_factors(k);
    (2..)
        .map(|g| mod_pow(g, (p - 1) / k, p))
        .find(|&w| primes.iter().all(|&q| mod_pow(w, k / q, p) != 1))
        .expect("a generator exists")
}

/// Fixed evaluation points, away from the `k`-th roots of unity.
const POINTS: [(u64, u64); 2] = [(0x243F_6A88_85A3_08D3, 0x1319_8A2E_0370_7344), (0x0A40_9382_2299_F31D, 0x0082_EFA9_8EC4_E6C8)];

impl ModularEvaluator {
    pub fn new(k: u64) -> Self {
        assert!(k >= 1);
        let prime = field_prime(k);
        let omega = primitive_root_of_unity(k, prime);
        let roots: Vec<u64> = (0..k).scan(1u64, |acc, _| {
            let r = *acc;
            *acc = mul(*acc, omega, prime);
            Some(r)
        }).collect();
        let table = |x: u64| -> Vec<u64> {
            let mut x = x % prime;
            while mod_pow(x, k, prime) == 1 {
                x += 1;
            }
            let top = (mod_pow(x, k, prime) + prime - 1) % prime;
            roots
                .iter()
                .map(|&r| {
                    let inv = mod_inverse((x + prime - r) % prime, prime).expect("x is not a root");
                    mul(top, inv, prime)
                })
                .collect()
        };
        let tables = POINTS.iter().map(|&(z, w)| [table(z), table(w)]).collect();
        ModularEvaluator { k, prime, tables }
    }

    /// Shared evaluator for modulus `k`.
    pub fn cached(k: u64) -> Arc<ModularEvaluator> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<ModularEvaluator>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(e) = cache.lock().expect("cache poisoned").get(&k) {
            return e.clone();
        }
        let e = Arc::new(ModularEvaluator::new(k));
        cache.lock().expect("cache poisoned").insert(k, e.clone());
        e
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// `P_L` at each evaluation point.
    pub fn eval(&self, l: &LensSpace) -> Vec<u64> {
        assert_eq!(l.order(), self.k, "evaluator built for a different k");
        let k = self.k;
        let p = self.prime;
        self.tables
            .iter()
            .map(|[fz, fw]| {
                let mut sum = 0u64;
                for m in 0..k {
                    let mut prod = 1u64;
                    for &s in l.residues() {
                        let a = s * m % k;
                        prod = mul(prod, fz[((k - a) % k) as usize], p);
                        prod = mul(prod, fw[a as usize], p);
                    }
                    sum = (sum + prod) % p;
                }
                sum
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfun::p_poly;
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;

    fn eval_poly(l: &LensSpace, ev: &ModularEvaluator, point: usize) -> u64 {
        let p = ev.prime();
        let (mut z, mut w) = POINTS[point];
        z %= p;
        w %= p;
        while mod_pow(z, l.order(), p) == 1 {
            z += 1;
        }
        while mod_pow(w, l.order(), p) == 1 {
            w += 1;
        }
        let poly = p_poly(l).unwrap();
        let big_p = BigInt::from(p);
        let mut acc = 0u64;
        for (&(a, b), c) in poly.terms() {
            let c = (c % &big_p + &big_p) % &big_p;
            let term = mul(mul(c.to_u64().unwrap(), mod_pow(z, a as u64, p), p), mod_pow(w, b as u64, p), p);
            acc = (acc + term) % p;
        }
        acc
    }

    #[test]
    fn prime_and_root() {
        for k in [2u64, 7, 49, 100] {
            let p = field_prime(k);
            assert!(is_prime(p) && p % k == 1 && p < 1 << 62);
            let w = primitive_root_of_unity(k, p);
            assert_eq!(mod_pow(w, k, p), 1);
        }
    }

    #[test]
    fn matches_polynomial() {
        for lit in ["L(5;1,2)", "L(7;1,2,4)", "L(12;1,5,7)", "L(9;1,1,2,4)"] {
            let l: LensSpace = lit.parse().unwrap();
            let ev = ModularEvaluator::new(l.order());
            let vals = ev.eval(&l);
            for (i, &v) in vals.iter().enumerate() {
                assert_eq!(v, eval_poly(&l, &ev, i), "{lit}");
            }
        }
    }

    #[test]
    fn known_pair_collides() {
        let ev = ModularEvaluator::cached(49);
        let a: LensSpace = "L(49;1,8,22)".parse().unwrap();
        let b: LensSpace = "L(49;1,8,36)".parse().unwrap();
        let c: LensSpace = "L(49;1,8,23)".parse().unwrap();
        assert_eq!(ev.eval(&a), ev.eval(&b));
        assert_ne!(ev.eval(&a), ev.eval(&c));
    }
}
