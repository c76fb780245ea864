//! Integer number theory: primality, Legendre and Hilbert symbols, square classes.

use std::fmt;

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Deterministic Miller-Rabin, exact for every `u64`.
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
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Modular inverse via the extended Euclidean algorithm.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Legendre symbol `(u / p)` for an odd prime `p`, via Euler's criterion.
pub fn legendre_symbol(u: i64, p: u64) -> i8 {
    debug_assert!(p % 2 == 1);
    let r = (u as i128).rem_euclid(p as i128) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn legendre_big(u: &BigInt, p: u64) -> i8 {
    let r = u.mod_floor(&BigInt::from(p)).to_u64().unwrap_or(0);
    legendre_symbol(r as i64, p)
}

/// Trial-division factorisation into distinct primes, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Squarefree representative of the square class of a nonzero integer.
///
/// The sign is kept, so `squarefree_part(-12) == -3`.
pub fn squarefree_part(n: i128) -> i128 {
    assert!(n != 0, "square class of zero is undefined");
    let sign = n.signum();
    let mut m = n.unsigned_abs();
    let mut out: u128 = 1;
    let mut d: u128 = 2;
    while d * d <= m {
        let mut e = 0;
        while m.is_multiple_of(d) {
            m /= d;
            e += 1;
        }
        if e % 2 == 1 {
            out *= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    out *= m;
    sign * out as i128
}

/// p-adic valuation of a nonzero integer together with its unit part.
pub fn split_valuation(n: &BigInt, p: u64) -> (u32, BigInt) {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut v = 0;
    let mut u = n.clone();
    loop {
        let (q, r) = u.div_rem(&p);
        if !r.is_zero() {
            return (v, u);
        }
        u = q;
        v += 1;
    }
}

/// A place of the rationals: the real place or a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinity,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Integer in the square class of a nonzero rational (`n/d` and `n*d` differ by `d^2`).
pub(crate) fn class_integer(x: &BigRational) -> BigInt {
    x.numer() * x.denom()
}

/// Hilbert symbol `(a, b)_v` of two nonzero rationals.
///
/// # Panics
/// If either argument is zero.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, place: Place) -> i8 {
    assert!(!a.is_zero() && !b.is_zero(), "Hilbert symbol of zero");
    hilbert_symbol_int(&class_integer(a), &class_integer(b), place)
}

/// Hilbert symbol of two nonzero integers.
pub fn hilbert_symbol_int(a: &BigInt, b: &BigInt, place: Place) -> i8 {
    assert!(!a.is_zero() && !b.is_zero(), "Hilbert symbol of zero");
    match place {
        Place::Infinity => {
            if a.sign() == Sign::Minus && b.sign() == Sign::Minus {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (alpha, u) = split_valuation(a, 2);
            let (beta, v) = split_valuation(b, 2);
            let u8_ = u.mod_floor(&BigInt::from(8)).to_u64().unwrap();
            let v8 = v.mod_floor(&BigInt::from(8)).to_u64().unwrap();
            let eps = |x: u64| ((x - 1) / 2) % 2;
            let omega = |x: u64| ((x * x - 1) / 8) % 2;
            let e = eps(u8_) * eps(v8) + alpha as u64 * omega(v8) + beta as u64 * omega(u8_);
            if e.is_multiple_of(2) {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (alpha, u) = split_valuation(a, p);
            let (beta, v) = split_valuation(b, p);
            let mut s: i8 = 1;
            if (alpha as u64 * beta as u64) % 2 == 1 && ((p - 1) / 2) % 2 == 1 {
                s = -s;
            }
            if beta % 2 == 1 {
                s *= legendre_big(&u, p);
            }
            if alpha % 2 == 1 {
                s *= legendre_big(&v, p);
            }
            s
        }
    }
}

/// Whether a nonzero integer is a square in `Q_p` (or `R` for the real place).
pub fn is_local_square(n: &BigInt, place: Place) -> bool {
    assert!(!n.is_zero());
    match place {
        Place::Infinity => n.is_positive(),
        Place::Prime(p) => {
            let (v, u) = split_valuation(n, p);
            if v % 2 == 1 {
                return false;
            }
            if p == 2 {
                u.mod_floor(&BigInt::from(8)) == BigInt::one()
            } else {
                legendre_big(&u, p) == 1
            }
        }
    }
}

/// Exact integer square root if `n` is a perfect square.
pub(crate) fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn primality_small_and_large() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_symbol(4, 5), 1);
        assert_eq!(legendre_symbol(2, 3), -1);
        assert_eq!(legendre_symbol(3, 3), 0);
        assert_eq!(legendre_symbol(-1, 5), 1);
        assert_eq!(legendre_symbol(-1, 7), -1);
    }

    #[test]
    fn legendre_is_multiplicative() {
        for p in [3u64, 5, 7, 11, 13] {
            for u in 1..p as i64 {
                for v in 1..p as i64 {
                    assert_eq!(legendre_symbol(u * v, p), legendre_symbol(u, p) * legendre_symbol(v, p));
                }
            }
        }
    }

    #[test]
    fn hilbert_examples() {
        for p in [Place::Infinity, Place::Prime(2), Place::Prime(3), Place::Prime(7)] {
            for b in [-7, -1, 2, 3, 10] {
                assert_eq!(hilbert_symbol(&q(1), &q(b), p), 1);
            }
        }
        assert_eq!(hilbert_symbol(&q(2), &q(3), Place::Prime(3)), -1);
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Infinity), -1);
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Prime(2)), -1);
        assert_eq!(hilbert_symbol(&q(2), &q(5), Place::Prime(2)), -1);
    }

    #[test]
    fn hilbert_of_a_and_minus_a_is_trivial() {
        for a in [-10i64, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10, 14] {
            for place in [
                Place::Infinity,
                Place::Prime(2),
                Place::Prime(3),
                Place::Prime(5),
                Place::Prime(7),
            ] {
                assert_eq!(hilbert_symbol(&q(a), &q(-a), place), 1, "a={a} at {place}");
            }
        }
    }

    #[test]
    fn rational_arguments_use_square_class() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(
            hilbert_symbol(&half, &q(5), Place::Prime(2)),
            hilbert_symbol(&q(2), &q(5), Place::Prime(2))
        );
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_part(12), 3);
        assert_eq!(squarefree_part(-24), -6);
        assert_eq!(squarefree_part(4), 1);
        assert_eq!(squarefree_part(-4), -1);
        assert_eq!(squarefree_part(72), 2);
    }

    #[test]
    fn local_squares() {
        assert!(is_local_square(&BigInt::from(-7), Place::Prime(2)));
        assert!(!is_local_square(&BigInt::from(5), Place::Prime(2)));
        assert!(is_local_square(&BigInt::from(-1), Place::Prime(5)));
        assert!(!is_local_square(&BigInt::from(3), Place::Prime(3)));
        assert!(is_local_square(&BigInt::from(9), Place::Prime(3)));
    }
}
