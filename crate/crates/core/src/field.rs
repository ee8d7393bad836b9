//! Arithmetic in a prime field F_q with a runtime modulus.
//!
//! Elements are plain reduced residues; the modulus lives in [`PrimeField`]
//! and every operation goes through it.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 2^61 - 1, a Mersenne prime that keeps products inside `u128`.
pub const DEFAULT_MODULUS: u64 = (1 << 61) - 1;

/// A residue in `[0, q)` for the field it was produced by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Fe(u64);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeField {
    q: u64,
    /// How many unreduced products fit in a `u128` accumulator.
    dot_chunk: usize,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if q >= 1 << 63 || !is_prime(q) {
            return Err(Error::InvalidModulus(q));
        }
        let max_prod = ((q - 1) as u128) * ((q - 1) as u128);
        let dot_chunk = u128::MAX.checked_div(max_prod).map_or(usize::MAX, |c| c.min(usize::MAX as u128) as usize);
        Ok(PrimeField { q, dot_chunk: dot_chunk.max(1) })
    }

    pub fn default_field() -> Self {
        PrimeField::new(DEFAULT_MODULUS).expect("2^61-1 is prime")
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn elem(&self, v: u64) -> Fe {
        Fe(v % self.q)
    }

    pub fn from_i64(&self, v: i64) -> Fe {
        let r = v.rem_euclid(self.q as i64) as u64;
        Fe(r)
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let s = a.0 + b.0;
        Fe(if s >= self.q { s - self.q } else { s })
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        Fe(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.q - b.0 })
    }

    pub fn neg(&self, a: Fe) -> Fe {
        if a.0 == 0 {
            a
        } else {
            Fe(self.q - a.0)
        }
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        Fe(((a.0 as u128 * b.0 as u128) % self.q as u128) as u64)
    }

    pub fn pow(&self, base: Fe, mut exp: u64) -> Fe {
        let mut acc = Fe(1 % self.q);
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm.
    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let (mut r0, mut r1) = (self.q as i128, a.0 as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(Fe(t0.rem_euclid(self.q as i128) as u64))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.q))
    }

    /// Inner product with lazy reduction.
    pub fn dot(&self, a: &[Fe], b: &[Fe]) -> Fe {
        debug_assert_eq!(a.len(), b.len());
        let q = self.q as u128;
        let mut acc = 0u128;
        for (ca, cb) in a.chunks(self.dot_chunk).zip(b.chunks(self.dot_chunk)) {
            let mut part = 0u128;
            for (x, y) in ca.iter().zip(cb) {
                part += x.0 as u128 * y.0 as u128;
            }
            acc = (acc + part % q) % q;
        }
        Fe(acc as u64)
    }
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        acc
    };
    'witness: for &a in &BASES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f11() -> PrimeField {
        PrimeField::new(11).unwrap()
    }

    #[test]
    fn small_examples() {
        let f = f11();
        assert_eq!(f.mul(f.elem(3), f.elem(5)), f.elem(4));
        assert_eq!(f.inv(f.elem(2)).unwrap(), f.elem(6));
        assert_eq!(f.pow(f.elem(2), 7), f.elem(7));
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let f = f11();
        for base in 0..11 {
            let mut acc = f.elem(1);
            for e in 0..25 {
                assert_eq!(f.pow(f.elem(base), e), acc, "{base}^{e}");
                acc = f.mul(acc, f.elem(base));
            }
        }
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        assert!(matches!(f11().inv(Fe::ZERO), Err(Error::DivisionByZero)));
    }

    #[test]
    fn rejects_composite_moduli() {
        for q in [0, 1, 4, 9, 15, 561, (1u64 << 61) - 3] {
            assert!(matches!(PrimeField::new(q), Err(Error::InvalidModulus(_))), "{q}");
        }
        for q in [2, 3, 7, 11, 65_537, DEFAULT_MODULUS] {
            assert!(PrimeField::new(q).is_ok(), "{q}");
        }
    }

    #[test]
    fn dot_with_many_terms_reduces_correctly() {
        let f = PrimeField::default_field();
        let a = vec![f.elem(DEFAULT_MODULUS - 1); 300];
        // (-1)(-1) summed 300 times
        assert_eq!(f.dot(&a, &a), f.elem(300));
    }

    proptest! {
        #[test]
        fn field_axioms(a in 0u64..DEFAULT_MODULUS, b in 0u64..DEFAULT_MODULUS, c in 0u64..DEFAULT_MODULUS) {
            let f = PrimeField::default_field();
            let (a, b, c) = (f.elem(a), f.elem(b), f.elem(c));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(f.sub(a, b), b), a);
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
            }
        }
    }
}
