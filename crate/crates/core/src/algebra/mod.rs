//! Exact scalar arithmetic.
//!
//! [`FiniteRing`] covers `GF(p^k)` and `Z/p^k` with raw [`Elem`] encodings for
//! the hot paths. [`Ring`] and [`RingElement`] add the characteristic-zero
//! rings (`Q`, `Q_p`, `R`, all with exact rational elements) behind one tagged
//! value type that refuses to mix rings.

mod finite;
pub mod numtheory;

use std::fmt;

use num::{BigInt, BigRational, Signed, Zero};

pub use finite::{Elem, FiniteKind, FiniteRing};
pub use numtheory::{hilbert_symbol, is_prime, legendre_symbol, Place};

use crate::error::{Error, Result};

/// A ring of scalars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ring {
    Finite(FiniteRing),
    Rationals,
    PAdic(u64),
    Reals,
}

impl Ring {
    pub fn padic(p: u64) -> Result<Ring> {
        if is_prime(p) {
            Ok(Ring::PAdic(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteRing> {
        match self {
            Ring::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn element(&self, value: Elem) -> Result<RingElement> {
        match self {
            Ring::Finite(r) if r.contains(value) => Ok(RingElement {
                ring: self.clone(),
                value: Scalar::Finite(value),
            }),
            Ring::Finite(r) => Err(Error::Parse(format!("{value} is not an element of {r}"))),
            _ => Err(Error::RingMismatch),
        }
    }

    pub fn rational(&self, value: BigRational) -> Result<RingElement> {
        match self {
            Ring::Finite(_) => Err(Error::RingMismatch),
            _ => Ok(RingElement {
                ring: self.clone(),
                value: Scalar::Rational(value),
            }),
        }
    }

    pub fn integer(&self, n: i64) -> RingElement {
        match self {
            Ring::Finite(r) => RingElement {
                ring: self.clone(),
                value: Scalar::Finite(r.from_int(n)),
            },
            _ => RingElement {
                ring: self.clone(),
                value: Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            },
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Finite(r) => write!(f, "{r}"),
            Ring::Rationals => write!(f, "q"),
            Ring::PAdic(p) => write!(f, "qp:{p}"),
            Ring::Reals => write!(f, "r"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Scalar {
    Finite(Elem),
    Rational(BigRational),
}

/// An element tagged with the ring it lives in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    ring: Ring,
    value: Scalar,
}

/// Result of [`RingElement::apply`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithOutput {
    Element(RingElement),
    Bool(bool),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
    IsSquare,
}

impl RingElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn as_finite(&self) -> Option<Elem> {
        match self.value {
            Scalar::Finite(e) => Some(e),
            Scalar::Rational(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.value {
            Scalar::Rational(r) => Some(r),
            Scalar::Finite(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Scalar::Finite(e) => e.0 == 0,
            Scalar::Rational(r) => r.is_zero(),
        }
    }

    fn binary(
        &self,
        other: &RingElement,
        fin: impl Fn(&FiniteRing, Elem, Elem) -> Result<Elem>,
        rat: impl Fn(&BigRational, &BigRational) -> Result<BigRational>,
    ) -> Result<RingElement> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let value = match (&self.ring, &self.value, &other.value) {
            (Ring::Finite(r), Scalar::Finite(x), Scalar::Finite(y)) => Scalar::Finite(fin(r, *x, *y)?),
            (_, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(rat(x, y)?),
            _ => return Err(Error::RingMismatch),
        };
        Ok(RingElement {
            ring: self.ring.clone(),
            value,
        })
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement> {
        self.binary(other, |r, x, y| Ok(r.add(x, y)), |x, y| Ok(x + y))
    }

    pub fn sub(&self, other: &RingElement) -> Result<RingElement> {
        self.binary(other, |r, x, y| Ok(r.sub(x, y)), |x, y| Ok(x - y))
    }

    pub fn mul(&self, other: &RingElement) -> Result<RingElement> {
        self.binary(other, |r, x, y| Ok(r.mul(x, y)), |x, y| Ok(x * y))
    }

    pub fn div(&self, other: &RingElement) -> Result<RingElement> {
        self.binary(
            other,
            |r, x, y| r.div(x, y),
            |x, y| {
                if y.is_zero() {
                    Err(Error::ZeroDivisor)
                } else {
                    Ok(x / y)
                }
            },
        )
    }

    pub fn is_square(&self) -> bool {
        match (&self.ring, &self.value) {
            (Ring::Finite(r), Scalar::Finite(x)) => r.is_square(*x),
            (_, Scalar::Rational(x)) if x.is_zero() => true,
            (Ring::Reals, Scalar::Rational(x)) => x.is_positive(),
            (Ring::Rationals, Scalar::Rational(x)) => {
                numtheory::exact_sqrt(x.numer()).is_some() && numtheory::exact_sqrt(x.denom()).is_some()
            }
            (Ring::PAdic(p), Scalar::Rational(x)) => {
                numtheory::is_local_square(&numtheory::class_integer(x), Place::Prime(*p))
            }
            _ => unreachable!("ring and value tags are kept consistent"),
        }
    }

    /// Square root. Over `Q`, `Q_p` and `R` only exact rational roots are
    /// representable; other squares yield [`Error::NotRepresentable`].
    pub fn sqrt(&self) -> Result<RingElement> {
        if !self.is_square() {
            return Err(Error::NotASquare);
        }
        let value = match (&self.ring, &self.value) {
            (Ring::Finite(r), Scalar::Finite(x)) => Scalar::Finite(r.sqrt(*x)?),
            (_, Scalar::Rational(x)) => {
                let n = numtheory::exact_sqrt(x.numer()).ok_or(Error::NotRepresentable)?;
                let d = numtheory::exact_sqrt(x.denom()).ok_or(Error::NotRepresentable)?;
                Scalar::Rational(BigRational::new(n, d))
            }
            _ => unreachable!(),
        };
        Ok(RingElement {
            ring: self.ring.clone(),
            value,
        })
    }

    /// Single entry point over the arithmetic operations; unary operations ignore `other`.
    pub fn apply(&self, op: ArithOp, other: Option<&RingElement>) -> Result<ArithOutput> {
        let rhs = || other.ok_or_else(|| Error::Precondition("binary operation needs two operands".into()));
        Ok(match op {
            ArithOp::Add => ArithOutput::Element(self.add(rhs()?)?),
            ArithOp::Sub => ArithOutput::Element(self.sub(rhs()?)?),
            ArithOp::Mul => ArithOutput::Element(self.mul(rhs()?)?),
            ArithOp::Div => ArithOutput::Element(self.div(rhs()?)?),
            ArithOp::Sqrt => ArithOutput::Element(self.sqrt()?),
            ArithOp::IsSquare => ArithOutput::Bool(self.is_square()),
        })
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Scalar::Finite(e) => write!(f, "{e}"),
            Scalar::Rational(r) => write!(f, "{r}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cross_ring_operations_are_rejected() {
        let f5 = Ring::Finite(FiniteRing::field(5, 1).unwrap());
        let f7 = Ring::Finite(FiniteRing::field(7, 1).unwrap());
        let a = f5.integer(2);
        let b = f7.integer(2);
        assert_eq!(a.add(&b), Err(Error::RingMismatch));
        assert_eq!(
            Ring::Rationals.integer(1).mul(&Ring::Reals.integer(1)),
            Err(Error::RingMismatch)
        );
        assert_eq!(
            Ring::PAdic(3).integer(1).add(&Ring::PAdic(5).integer(1)),
            Err(Error::RingMismatch)
        );
    }

    #[test]
    fn finite_arith_through_tagged_values() {
        let f5 = Ring::Finite(FiniteRing::field(5, 1).unwrap());
        let four = f5.integer(4);
        assert_eq!(four.apply(ArithOp::IsSquare, None).unwrap(), ArithOutput::Bool(true));
        assert_eq!(
            f5.integer(2).apply(ArithOp::IsSquare, None).unwrap(),
            ArithOutput::Bool(false)
        );
        let r = four.sqrt().unwrap();
        assert_eq!(r.mul(&r).unwrap(), four);
        assert_eq!(f5.integer(2).sqrt(), Err(Error::NotASquare));
        assert_eq!(four.div(&f5.integer(0)), Err(Error::ZeroDivisor));
        let z9 = Ring::Finite(FiniteRing::residue(3, 2).unwrap());
        assert_eq!(z9.integer(1).div(&z9.integer(3)), Err(Error::ZeroDivisor));
    }

    #[test]
    fn rational_squares_by_ring() {
        let q = Ring::Rationals.rational(rat(9, 4)).unwrap();
        assert!(q.is_square());
        assert_eq!(q.sqrt().unwrap().as_rational().unwrap(), &rat(3, 2));
        assert!(!Ring::Rationals.integer(2).is_square());
        assert!(Ring::Reals.integer(2).is_square());
        assert_eq!(Ring::Reals.integer(2).sqrt(), Err(Error::NotRepresentable));
        assert!(!Ring::Reals.integer(-1).is_square());
        assert!(Ring::PAdic(2).integer(-7).is_square());
        assert!(Ring::PAdic(5).integer(-1).is_square());
        assert!(!Ring::PAdic(3).integer(-1).is_square());
        assert_eq!(
            Ring::Rationals.integer(1).div(&Ring::Rationals.integer(0)),
            Err(Error::ZeroDivisor)
        );
    }
}
