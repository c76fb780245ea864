//! Finite fields `GF(p^k)` and residue rings `Z/p^k`.
//!
//! Elements are encoded as integers in `[0, order)`. For `GF(p^k)` the encoding
//! is the coefficient vector of the residue polynomial read as base-`p` digits
//! (constant term least significant); for `Z/p^k` it is the usual residue. The
//! numeric order of encodings is the canonical element order used for every
//! deterministic scan in the crate.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::numtheory::{inv_mod, is_prime, mul_mod, pow_mod};
use crate::error::{Error, Result};

/// Canonical encoding of a ring element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(transparent)]
pub struct Elem(pub u64);

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Largest extension field for which log/exp tables are built.
const MAX_TABLE_ORDER: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FiniteKind {
    /// `GF(p^k)`.
    Field,
    /// `Z/p^k` with `p` odd.
    Residue,
}

#[derive(Debug)]
struct Inner {
    kind: FiniteKind,
    p: u64,
    k: u32,
    order: u64,
    /// Monic modulus `c_0 + c_1 x + ... + x^k` (fields only).
    modulus: Vec<u64>,
    /// Discrete log tables for proper extension fields.
    exp: Vec<u64>,
    log: Vec<u32>,
    nonsquare: Option<Elem>,
}

/// Handle to a finite field or a residue ring `Z/p^k`.
///
/// Cheap to clone; equality is structural on `(kind, p, k, modulus)`.
#[derive(Clone)]
pub struct FiniteRing(Arc<Inner>);

impl PartialEq for FiniteRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.kind == other.0.kind
                && self.0.p == other.0.p
                && self.0.k == other.0.k
                && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FiniteRing {}

impl fmt::Debug for FiniteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FiniteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.0.kind, self.0.k) {
            (FiniteKind::Field, 1) => write!(f, "gf:{}", self.0.p),
            (FiniteKind::Field, k) => write!(f, "gf:{}^{}", self.0.p, k),
            (FiniteKind::Residue, k) => write!(f, "zmod:{}^{}", self.0.p, k),
        }
    }
}

fn checked_order(p: u64, k: u32) -> Result<u64> {
    p.checked_pow(k)
        .filter(|&q| q < (1u64 << 62))
        .ok_or_else(|| Error::Unsupported(format!("{p}^{k} is too large")))
}

impl FiniteRing {
    /// `GF(p^k)` with the lexicographically smallest irreducible monic modulus.
    pub fn field(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::Precondition("extension degree must be at least 1".into()));
        }
        let order = checked_order(p, k)?;
        let mut inner = Inner {
            kind: FiniteKind::Field,
            p,
            k,
            order,
            modulus: vec![0, 1],
            exp: Vec::new(),
            log: Vec::new(),
            nonsquare: None,
        };
        if k > 1 {
            if order > MAX_TABLE_ORDER {
                return Err(Error::Unsupported(format!(
                    "extension fields are limited to {MAX_TABLE_ORDER} elements"
                )));
            }
            inner.modulus = smallest_irreducible(p, k)
                .ok_or_else(|| Error::Internal(format!("no irreducible polynomial of degree {k} over GF({p})")))?;
            let (exp, log) = discrete_log_tables(p, k, order, &inner.modulus)?;
            inner.exp = exp;
            inner.log = log;
        }
        let mut ring = FiniteRing(Arc::new(inner));
        if p != 2 {
            let ns = ring.elements().skip(1).find(|&x| !ring.is_square(x));
            Arc::get_mut(&mut ring.0).expect("fresh handle").nonsquare = ns;
        }
        Ok(ring)
    }

    /// The residue ring `Z/p^k` for an odd prime `p`.
    pub fn residue(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Err(Error::Unsupported(
                "Z/2^k is not supported: reduction to the residue field needs 2 to be a unit".into(),
            ));
        }
        if k == 0 {
            return Err(Error::Precondition("exponent must be at least 1".into()));
        }
        let order = checked_order(p, k)?;
        let mut ring = FiniteRing(Arc::new(Inner {
            kind: FiniteKind::Residue,
            p,
            k,
            order,
            modulus: Vec::new(),
            exp: Vec::new(),
            log: Vec::new(),
            nonsquare: None,
        }));
        let ns = (2..p).map(Elem).find(|&x| !ring.is_square(x));
        Arc::get_mut(&mut ring.0).expect("fresh handle").nonsquare = ns;
        Ok(ring)
    }

    pub fn kind(&self) -> FiniteKind {
        self.0.kind
    }

    pub fn is_field(&self) -> bool {
        self.0.kind == FiniteKind::Field
    }

    /// Characteristic of the residue field.
    pub fn p(&self) -> u64 {
        self.0.p
    }

    /// Extension degree (fields) or exponent (residue rings).
    pub fn k(&self) -> u32 {
        self.0.k
    }

    pub fn order(&self) -> u64 {
        self.0.order
    }

    /// Characteristic of the ring itself: `p` for fields, `p^k` for `Z/p^k`.
    pub fn characteristic(&self) -> u64 {
        match self.0.kind {
            FiniteKind::Field => self.0.p,
            FiniteKind::Residue => self.0.order,
        }
    }

    /// Monic modulus coefficients, constant term first. Prime fields report `x`.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    /// The canonical non-square (smallest encoding), absent in characteristic 2.
    pub fn nonsquare(&self) -> Option<Elem> {
        self.0.nonsquare
    }

    pub fn zero(&self) -> Elem {
        Elem(0)
    }

    pub fn one(&self) -> Elem {
        Elem(1)
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.0.order).map(Elem)
    }

    fn is_extension(&self) -> bool {
        self.0.kind == FiniteKind::Field && self.0.k > 1
    }

    /// Image of an integer under the unique ring map `Z -> R`.
    pub fn from_int(&self, n: i64) -> Elem {
        let m = if self.is_extension() { self.0.p } else { self.0.order };
        Elem((n as i128).rem_euclid(m as i128) as u64)
    }

    /// Element with the given canonical encoding.
    pub fn from_encoding(&self, e: u64) -> Result<Elem> {
        if e < self.0.order {
            Ok(Elem(e))
        } else {
            Err(Error::Parse(format!("encoding {e} out of range for {self}")))
        }
    }

    /// Interprets an integer literal as written in forms and scalars.
    ///
    /// Over proper extension fields literals are canonical encodings and must lie
    /// in `[0, p^k)`; elsewhere any integer is reduced into the ring.
    pub fn from_literal(&self, n: i64) -> Result<Elem> {
        if self.is_extension() {
            if n < 0 {
                return Err(Error::Parse(format!(
                    "negative literal {n}: elements of {self} are given by their encodings"
                )));
            }
            self.from_encoding(n as u64)
        } else {
            Ok(self.from_int(n))
        }
    }

    pub fn contains(&self, x: Elem) -> bool {
        x.0 < self.0.order
    }

    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        if !self.is_extension() {
            let m = self.0.order;
            let s = x.0 + y.0;
            return Elem(if s >= m { s - m } else { s });
        }
        let p = self.0.p;
        if p == 2 {
            return Elem(x.0 ^ y.0);
        }
        let (mut a, mut b, mut out, mut place) = (x.0, y.0, 0u64, 1u64);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        Elem(out)
    }

    pub fn neg(&self, x: Elem) -> Elem {
        if !self.is_extension() {
            return Elem(if x.0 == 0 { 0 } else { self.0.order - x.0 });
        }
        let p = self.0.p;
        if p == 2 {
            return x;
        }
        let (mut a, mut out, mut place) = (x.0, 0u64, 1u64);
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        Elem(out)
    }

    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        if !self.is_extension() {
            return Elem(mul_mod(x.0, y.0, self.0.order));
        }
        if x.0 == 0 || y.0 == 0 {
            return Elem(0);
        }
        let n = self.0.order - 1;
        let l = (self.0.log[x.0 as usize] as u64 + self.0.log[y.0 as usize] as u64) % n;
        Elem(self.0.exp[l as usize])
    }

    pub fn pow(&self, x: Elem, mut e: u64) -> Elem {
        let mut acc = self.one();
        let mut base = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, x: Elem) -> bool {
        match self.0.kind {
            FiniteKind::Field => x.0 != 0,
            FiniteKind::Residue => !x.0.is_multiple_of(self.0.p),
        }
    }

    /// Multiplicative inverse, `None` for zero divisors.
    pub fn inv(&self, x: Elem) -> Option<Elem> {
        if !self.is_unit(x) {
            return None;
        }
        if self.is_extension() {
            let n = self.0.order - 1;
            let l = (n - self.0.log[x.0 as usize] as u64) % n;
            return Some(Elem(self.0.exp[l as usize]));
        }
        inv_mod(x.0, self.0.order).map(Elem)
    }

    pub fn div(&self, x: Elem, y: Elem) -> Result<Elem> {
        self.inv(y).map(|yi| self.mul(x, yi)).ok_or(Error::ZeroDivisor)
    }

    /// p-adic valuation of a nonzero element of `Z/p^k` (0 for fields and units).
    pub fn valuation(&self, x: Elem) -> u32 {
        if self.0.kind == FiniteKind::Field || x.0 == 0 {
            return if x.0 == 0 { self.0.k } else { 0 };
        }
        let mut v = 0;
        let mut a = x.0;
        while a.is_multiple_of(self.0.p) {
            a /= self.0.p;
            v += 1;
        }
        v
    }

    pub fn is_square(&self, x: Elem) -> bool {
        if x.0 == 0 || (self.is_field() && self.0.p == 2) {
            return true;
        }
        match self.0.kind {
            FiniteKind::Field => self.pow(x, (self.0.order - 1) / 2) == self.one(),
            FiniteKind::Residue => {
                let v = self.valuation(x);
                if v % 2 == 1 {
                    return false;
                }
                let unit = x.0 / self.0.p.pow(v);
                pow_mod(unit % self.0.p, (self.0.p - 1) / 2, self.0.p) == 1
            }
        }
    }

    /// A square root; of the roots `r` and `-r` found, the smaller encoding is returned.
    ///
    /// In characteristic 2 the root is unique (inverse Frobenius).
    pub fn sqrt(&self, x: Elem) -> Result<Elem> {
        if !self.is_square(x) {
            return Err(Error::NotASquare);
        }
        if x.0 == 0 {
            return Ok(x);
        }
        let r = match self.0.kind {
            FiniteKind::Field if self.0.p == 2 => return Ok(self.pow(x, self.0.order / 2)),
            FiniteKind::Field => self.tonelli_shanks(x),
            FiniteKind::Residue => self.residue_sqrt(x),
        };
        debug_assert_eq!(self.mul(r, r), x);
        let nr = self.neg(r);
        Ok(if nr < r { nr } else { r })
    }

    fn tonelli_shanks(&self, x: Elem) -> Elem {
        let q1 = self.0.order - 1;
        let s = q1.trailing_zeros();
        let t = q1 >> s;
        let z = self.0.nonsquare.expect("odd field has a non-square");
        let mut m = s;
        let mut c = self.pow(z, t);
        let mut tt = self.pow(x, t);
        let mut r = self.pow(x, t.div_ceil(2));
        while tt != self.one() {
            let mut i = 0;
            let mut probe = tt;
            while probe != self.one() {
                probe = self.mul(probe, probe);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.mul(b, b);
            }
            m = i;
            c = self.mul(b, b);
            tt = self.mul(tt, c);
            r = self.mul(r, b);
        }
        r
    }

    fn residue_sqrt(&self, x: Elem) -> Elem {
        let p = self.0.p;
        let v = self.valuation(x);
        let modulus = p.pow(self.0.k - v);
        let w = (x.0 / p.pow(v)) % modulus;
        let gf_p = FiniteRing::field(p, 1).expect("p is prime");
        let mut z = gf_p.sqrt(Elem(w % p)).expect("unit part is a quadratic residue").0;
        // Newton iteration z <- z - (z^2 - w) / (2z), precision doubles each step.
        for _ in 0..self.0.k {
            let f = (mul_mod(z, z, modulus) + modulus - w) % modulus;
            if f == 0 {
                break;
            }
            let inv = inv_mod(mul_mod(2, z, modulus), modulus).expect("2z is a unit");
            z = (z + modulus - mul_mod(f, inv, modulus)) % modulus;
        }
        Elem(mul_mod(p.pow(v / 2), z, self.0.order))
    }

    /// The residue field `GF(p)` of a residue ring (or of a prime field itself).
    pub fn residue_field(&self) -> Result<FiniteRing> {
        match (self.0.kind, self.0.k) {
            (FiniteKind::Field, 1) => Ok(self.clone()),
            (FiniteKind::Residue, _) => FiniteRing::field(self.0.p, 1),
            _ => Err(Error::Unsupported("residue map is defined for Z/p^k".into())),
        }
    }

    /// Reduction modulo the maximal ideal.
    pub fn residue_map(&self, x: Elem) -> Elem {
        match self.0.kind {
            FiniteKind::Residue => Elem(x.0 % self.0.p),
            FiniteKind::Field => x,
        }
    }

    /// Absolute trace `GF(2^k) -> GF(2)`; its kernel is `{x^2 + x}`.
    pub fn trace_gf2(&self, x: Elem) -> u8 {
        assert!(self.is_field() && self.0.p == 2, "trace_gf2 needs characteristic 2");
        let mut acc = x;
        let mut t = x;
        for _ in 1..self.0.k {
            t = self.mul(t, t);
            acc = self.add(acc, t);
        }
        debug_assert!(acc.0 <= 1);
        acc.0 as u8
    }

    /// Coordinates of an element in base `p` (constant term first, `k` digits).
    pub fn digits(&self, x: Elem) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.0.k as usize);
        let mut a = x.0;
        for _ in 0..self.0.k {
            out.push(a % self.0.p);
            a /= self.0.p;
        }
        out
    }
}

fn poly_rem(mut num: Vec<u64>, den: &[u64], p: u64) -> Vec<u64> {
    let dd = den.len() - 1;
    let lead_inv = inv_mod(den[dd], p).expect("nonzero leading coefficient");
    while num.len() > dd {
        let top = *num.last().unwrap();
        if top != 0 {
            let c = mul_mod(top, lead_inv, p);
            let shift = num.len() - 1 - dd;
            for (i, &d) in den.iter().enumerate() {
                let idx = shift + i;
                num[idx] = (num[idx] + p - mul_mod(c, d, p)) % p;
            }
        }
        num.pop();
    }
    num
}

fn monic_from_index(p: u64, degree: u32, index: u64) -> Vec<u64> {
    let mut coeffs = Vec::with_capacity(degree as usize + 1);
    let mut i = index;
    for _ in 0..degree {
        coeffs.push(i % p);
        i /= p;
    }
    coeffs.push(1);
    coeffs
}

/// Irreducibility by trial division against every monic polynomial of degree `<= k/2`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = (f.len() - 1) as u32;
    for d in 1..=k / 2 {
        for idx in 0..p.pow(d) {
            let g = monic_from_index(p, d, idx);
            if poly_rem(f.to_vec(), &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u64, k: u32) -> Option<Vec<u64>> {
    // Index order compares the high coefficients first.
    (0..p.pow(k))
        .map(|idx| monic_from_index(p, k, idx))
        .find(|f| is_irreducible(f, p))
}

fn encode(coeffs: &[u64], p: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn decode(mut e: u64, p: u64, k: u32) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let c = e % p;
            e /= p;
            c
        })
        .collect()
}

fn poly_mulmod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    let mut r = poly_rem(prod, modulus, p);
    r.resize(modulus.len() - 1, 0);
    r
}

/// Builds exp/log tables from the first primitive element, which also confirms
/// that the multiplicative group is cyclic of order `p^k - 1`.
fn discrete_log_tables(p: u64, k: u32, order: u64, modulus: &[u64]) -> Result<(Vec<u64>, Vec<u32>)> {
    let n = order - 1;
    for g in 2..order {
        let gc = decode(g, p, k);
        let mut exp = Vec::with_capacity(n as usize);
        let mut cur = decode(1, p, k);
        let mut primitive = true;
        for i in 0..n {
            let e = encode(&cur, p);
            if i > 0 && e == 1 {
                primitive = false;
                break;
            }
            exp.push(e);
            cur = poly_mulmod(&cur, &gc, modulus, p);
        }
        if primitive && encode(&cur, p) == 1 {
            let mut log = vec![0u32; order as usize];
            for (i, &e) in exp.iter().enumerate() {
                log[e as usize] = i as u32;
            }
            return Ok((exp, log));
        }
    }
    Err(Error::Internal("no primitive element found".into()))
}
