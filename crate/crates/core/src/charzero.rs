//! Clique numbers over `R`, `Q_p` and `Q`.
//!
//! Everything works on diagonal forms with squarefree integer entries. Over
//! `Q` the test form `gamma_{a,n}` diagonalizes as `<2a*1*2, 2a*2*3, ...>`, and
//! `gamma_{a,k}` sits inside `q` exactly when `q + (-gamma_{a,k})` has Witt
//! index at least `k` at every place. Only `inf`, 2 and the odd primes dividing
//! an entry can fail: elsewhere the form is unimodular, and a determinant that
//! is not a rational square is already visible at one of those places.

use std::fmt;

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::numtheory::{self, hilbert_symbol_int, is_local_square, squarefree_part};
use crate::algebra::{Elem, FiniteRing, Place};
use crate::error::{Error, Result};
use crate::qform::QForm;

/// A place of `Q`.
pub type LocalPlace = Place;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub plus: usize,
    pub minus: usize,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.plus, self.minus)
    }
}

/// Diagonal rational form `<a_1, ..., a_n>` up to squares.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalForm {
    entries: Vec<i64>,
}

fn class_of(n: i128) -> Result<i64> {
    if n == 0 {
        return Err(Error::Degenerate);
    }
    i64::try_from(squarefree_part(n)).map_err(|_| Error::Unsupported(format!("entry {n} is too large")))
}

/// Squarefree integer in the square class of a nonzero rational.
pub fn rational_class(x: &BigRational) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::Degenerate);
    }
    let c = (x.numer() * x.denom())
        .to_i128()
        .ok_or_else(|| Error::Unsupported(format!("{x} is too large")))?;
    class_of(c)
}

impl RationalForm {
    /// Zero entries are rejected; the rest are reduced to squarefree parts.
    pub fn new(entries: &[i64]) -> Result<RationalForm> {
        if entries.is_empty() {
            return Err(Error::InvalidForm("a form needs at least one entry".into()));
        }
        let entries = entries.iter().map(|&e| class_of(e as i128)).collect::<Result<_>>()?;
        Ok(RationalForm { entries })
    }

    pub fn from_rationals(entries: &[BigRational]) -> Result<RationalForm> {
        if entries.is_empty() {
            return Err(Error::InvalidForm("a form needs at least one entry".into()));
        }
        let entries = entries.iter().map(rational_class).collect::<Result<_>>()?;
        Ok(RationalForm { entries })
    }

    /// `n x <1>`.
    pub fn sum_of_squares(n: usize) -> Result<RationalForm> {
        RationalForm::new(&vec![1; n])
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn signature(&self) -> Signature {
        let plus = self.entries.iter().filter(|&&e| e > 0).count();
        Signature {
            plus,
            minus: self.dim() - plus,
        }
    }

    pub fn orthogonal_sum(&self, other: &RationalForm) -> RationalForm {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        RationalForm { entries }
    }

    /// `c * q` for a nonzero integer `c`.
    pub fn scale(&self, c: i64) -> Result<RationalForm> {
        let entries = self
            .entries
            .iter()
            .map(|&e| class_of(e as i128 * c as i128))
            .collect::<Result<_>>()?;
        Ok(RationalForm { entries })
    }

    /// Squarefree representative of the determinant.
    pub fn det_class(&self) -> i64 {
        self.entries.iter().fold(1i64, |acc, &e| {
            class_of(acc as i128 * e as i128).expect("nonzero entries")
        })
    }

    /// `prod_{i<j} (a_i, a_j)_v`.
    pub fn hasse_invariant(&self, place: LocalPlace) -> i8 {
        let mut eps = 1;
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                eps *= hilbert_symbol_int(&BigInt::from(self.entries[i]), &BigInt::from(self.entries[j]), place);
            }
        }
        eps
    }

    /// `inf`, 2, then the odd primes dividing some entry, ascending.
    pub fn relevant_places(&self) -> Vec<LocalPlace> {
        let mut primes: Vec<u64> = self
            .entries
            .iter()
            .flat_map(|e| numtheory::prime_factors(e.unsigned_abs()))
            .filter(|&p| p != 2)
            .collect();
        primes.sort_unstable();
        primes.dedup();
        let mut places = vec![Place::Infinity, Place::Prime(2)];
        places.extend(primes.into_iter().map(Place::Prime));
        places
    }
}

impl fmt::Display for RationalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

/// Clique number over the reals: `r_+ + 1` for `a > 0`, `r_- + 1` for `a < 0`.
pub fn real_omega(sig: Signature, a: &BigRational) -> Result<u64> {
    if a.is_zero() {
        return Err(Error::Precondition(
            "a = 0 gives infinite cliques over the reals".into(),
        ));
    }
    if sig.plus + sig.minus == 0 {
        return Err(Error::InvalidForm("empty signature".into()));
    }
    let r = if a.is_positive() { sig.plus } else { sig.minus };
    Ok(r as u64 + 1)
}

/// `gamma_{a,n}` as `<2a*i*(i+1)>`, `i = 1..n`.
pub fn gamma_rational_diag(a: &BigRational, n: usize) -> Result<RationalForm> {
    if a.is_zero() {
        return Err(Error::Precondition("the test form needs a nonzero scalar".into()));
    }
    if n == 0 {
        return Err(Error::Precondition("the test form needs n >= 1".into()));
    }
    let c = rational_class(a)? as i128;
    let entries = (1..=n as i128)
        .map(|i| class_of(2 * c * i * (i + 1)))
        .collect::<Result<_>>()?;
    Ok(RationalForm { entries })
}

/// Witt index of `form` over the completion at `place`.
pub fn local_witt_index(form: &RationalForm, place: LocalPlace) -> Result<usize> {
    match place {
        Place::Infinity => {
            let s = form.signature();
            Ok(s.plus.min(s.minus))
        }
        Place::Prime(2) => Ok(two_adic_witt_index(form)),
        Place::Prime(p) => {
            if !numtheory::is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            residue_witt_index(form, p)
        }
    }
}

/// `i_W(phi_1) + i_W(phi_2)` where `phi_1` collects the unit entries and
/// `phi_2` the entries divisible by `p` (divided by `p`), both read mod `p`.
fn residue_witt_index(form: &RationalForm, p: u64) -> Result<usize> {
    let field = FiniteRing::field(p, 1)?;
    let pi = p as i64;
    let (units, rest): (Vec<i64>, Vec<i64>) = form.entries.iter().partition(|&&e| e % pi != 0);
    let rest: Vec<i64> = rest.iter().map(|e| e / pi).collect();
    let mut total = 0;
    for part in [units, rest] {
        if part.is_empty() {
            continue;
        }
        let diag: Vec<Elem> = part.iter().map(|&e| field.from_int(e)).collect();
        total += QForm::diagonal(&field, &diag)?.witt_index_ff()?;
    }
    Ok(total)
}

/// Isotropy over `Q_p` from dimension, determinant and Hasse invariant.
fn locally_isotropic(dim: usize, det: i64, hasse: i8, place: LocalPlace) -> bool {
    let d = BigInt::from(det);
    let minus_one = BigInt::from(-1);
    match dim {
        0 | 1 => false,
        2 => is_local_square(&-&d, place),
        3 => hilbert_symbol_int(&minus_one, &-&d, place) == hasse,
        4 => !is_local_square(&d, place) || hasse == hilbert_symbol_int(&minus_one, &minus_one, place),
        _ => true,
    }
}

/// Splits hyperbolic planes off while the invariants say the rest is
/// isotropic. Removing `<1, -1>` sends `(n, d, e)` to `(n-2, -d, e (-1, -d))`.
fn invariant_witt_index(form: &RationalForm, place: LocalPlace) -> usize {
    let mut dim = form.dim();
    let mut det = form.det_class();
    let mut hasse = form.hasse_invariant(place);
    let mut index = 0;
    while locally_isotropic(dim, det, hasse, place) {
        index += 1;
        dim -= 2;
        if dim == 0 {
            break;
        }
        det = -det;
        hasse *= hilbert_symbol_int(&BigInt::from(-1), &BigInt::from(det), place);
    }
    index
}

fn two_adic_witt_index(form: &RationalForm) -> usize {
    invariant_witt_index(form, Place::Prime(2))
}

/// Witt indices of one form at its relevant places.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalProfile {
    pub dimension: usize,
    pub places: Vec<PlaceIndex>,
    /// Lower bound `floor((dim - 1) / 2)` at every other place.
    pub unimodular_floor: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlaceIndex {
    pub place: LocalPlace,
    pub witt_index: usize,
}

impl LocalProfile {
    pub fn of(form: &RationalForm) -> Result<LocalProfile> {
        let places = form
            .relevant_places()
            .into_iter()
            .map(|place| {
                Ok(PlaceIndex {
                    place,
                    witt_index: local_witt_index(form, place)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(LocalProfile {
            dimension: form.dim(),
            places,
            unimodular_floor: (form.dim() - 1) / 2,
        })
    }

    /// Global Witt index.
    pub fn min_index(&self) -> usize {
        self.places.iter().map(|p| p.witt_index).min().unwrap_or(0)
    }

    /// First place whose index is below `k`.
    pub fn first_below(&self, k: usize) -> Option<LocalPlace> {
        self.places.iter().find(|p| p.witt_index < k).map(|p| p.place)
    }
}

/// Whether `psi` is a subform of `phi` over `Q`.
pub fn rational_subform_test(psi: &RationalForm, phi: &RationalForm) -> Result<bool> {
    if psi.dim() > phi.dim() {
        return Ok(false);
    }
    let combined = phi.orthogonal_sum(&psi.scale(-1)?);
    Ok(LocalProfile::of(&combined)?.min_index() >= psi.dim())
}

/// Isotropy over `Q` by Hasse-Minkowski.
pub fn is_isotropic(form: &RationalForm) -> Result<bool> {
    Ok(LocalProfile::of(form)?.min_index() >= 1)
}

/// Where the ascent stopped: the profile of `q + (-gamma_{a,k})` at `k = d + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub blocked_at: usize,
    pub place: LocalPlace,
    pub profile: LocalProfile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalCliqueReport {
    pub omega: u64,
    pub d: usize,
    pub signature: Signature,
    pub certificate: Certificate,
}

/// Clique number over `Q` via the local-global principle.
///
/// `d` is the largest `k` with `gamma_{a,k}` inside `q`; `omega = d + 1`.
pub fn rational_omega(q: &RationalForm, a: &BigRational) -> Result<RationalCliqueReport> {
    if a.is_zero() {
        return Err(Error::Precondition("a = 0 gives infinite cliques over Q".into()));
    }
    let n = q.dim();
    let sig = q.signature();
    let bound = if a.is_positive() { sig.plus } else { sig.minus };
    let test = |k: usize| -> Result<bool> {
        // every finite place has i_W >= floor((n+k-3)/2) >= k here
        if k + 3 <= n {
            return Ok(true);
        }
        rational_subform_test(&gamma_rational_diag(a, k)?, q)
    };
    let mut d = 0;
    while d < bound && test(d + 1)? {
        d += 1;
    }
    if cfg!(debug_assertions) {
        for k in 1..d {
            debug_assert!(test(k)?, "subform test is not monotone at k = {k}");
        }
    }
    let blocked_at = d + 1;
    let profile = LocalProfile::of(&q.orthogonal_sum(&gamma_rational_diag(a, blocked_at)?.scale(-1)?))?;
    let place = profile
        .first_below(blocked_at)
        .ok_or_else(|| Error::Internal(format!("no place blocks gamma_{{a,{blocked_at}}}")))?;
    Ok(RationalCliqueReport {
        omega: d as u64 + 1,
        d,
        signature: sig,
        certificate: Certificate {
            blocked_at,
            place,
            profile,
        },
    })
}

/// Clique number over a single completion `Q_p` or `R`.
pub fn local_omega(q: &RationalForm, a: &BigRational, place: LocalPlace) -> Result<u64> {
    if a.is_zero() {
        return Err(Error::Precondition(
            "a = 0 gives infinite cliques over a local field".into(),
        ));
    }
    let mut d = 0;
    while d < q.dim() {
        let combined = q.orthogonal_sum(&gamma_rational_diag(a, d + 1)?.scale(-1)?);
        if local_witt_index(&combined, place)? < d + 1 {
            break;
        }
        d += 1;
    }
    Ok(d as u64 + 1)
}

fn is_square(n: u64) -> bool {
    let r = n.isqrt();
    r * r == n
}

/// `omega(G_{s_n, 1})` over `Q` from the sum-of-squares theorems.
///
/// Even `n`: `n + 1` if `n + 1` is a square, else `n`. Odd `n`: `n - 1` unless
/// `<1, 2(n-1)>` represents `n`, then `n + 1` or `n` as `2(n+1)` is a square or not.
pub fn sos_fastpath(n: usize) -> Result<u64> {
    if n == 0 {
        return Err(Error::Precondition("n >= 1".into()));
    }
    let n64 = n as u64;
    if n.is_multiple_of(2) {
        return Ok(if is_square(n64 + 1) { n64 + 1 } else { n64 });
    }
    let represented = n == 1 || {
        let m = n as i64;
        is_isotropic(&RationalForm::new(&[1, 2 * (m - 1), -m])?)?
    };
    Ok(if !represented {
        n64 - 1
    } else if is_square(2 * (n64 + 1)) {
        n64 + 1
    } else {
        n64
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn form(e: &[i64]) -> RationalForm {
        RationalForm::new(e).unwrap()
    }

    #[test]
    fn real_rule() {
        assert_eq!(real_omega(Signature { plus: 3, minus: 0 }, &rat(1)).unwrap(), 4);
        assert_eq!(real_omega(Signature { plus: 2, minus: 1 }, &rat(-1)).unwrap(), 2);
        assert!(matches!(
            real_omega(Signature { plus: 2, minus: 1 }, &rat(0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn gamma_diagonals() {
        assert_eq!(gamma_rational_diag(&rat(1), 2).unwrap().entries(), &[1, 3]);
        assert_eq!(gamma_rational_diag(&rat(1), 1).unwrap().entries(), &[1]);
        assert_eq!(gamma_rational_diag(&rat(-1), 3).unwrap().entries(), &[-1, -3, -6]);
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(gamma_rational_diag(&half, 1).unwrap().entries(), &[2]);
        assert!(gamma_rational_diag(&rat(0), 2).is_err());
    }

    #[test]
    fn local_indices() {
        let h = form(&[1, -1]);
        for place in [Place::Infinity, Place::Prime(2), Place::Prime(3), Place::Prime(101)] {
            assert_eq!(local_witt_index(&h, place).unwrap(), 1);
        }
        let s4 = form(&[1, 1, 1, 1]);
        assert_eq!(local_witt_index(&s4, Place::Prime(7)).unwrap(), 2);
        assert_eq!(local_witt_index(&s4, Place::Prime(2)).unwrap(), 0);
        assert_eq!(local_witt_index(&s4, Place::Infinity).unwrap(), 0);
        // <2,-6,-7> is anisotropic at 3
        assert_eq!(local_witt_index(&form(&[2, -6, -7]), Place::Prime(3)).unwrap(), 0);
        assert!(matches!(local_witt_index(&h, Place::Prime(9)), Err(Error::NotPrime(9))));
    }

    #[test]
    fn residue_split_agrees_with_invariants_at_odd_primes() {
        let samples: [&[i64]; 8] = [
            &[1, 1, 1],
            &[1, 2, 3, -7],
            &[3, 3, -1, 5],
            &[5, -5, 10, 2, 1],
            &[-1, -1, -1],
            &[6, 10, 15],
            &[7, -14, 1, 3, -3],
            &[2, -6, -7],
        ];
        for e in samples {
            let f = form(e);
            for p in [3, 5, 7, 11] {
                assert_eq!(
                    residue_witt_index(&f, p).unwrap(),
                    invariant_witt_index(&f, Place::Prime(p)),
                    "{f} at {p}"
                );
            }
        }
    }

    #[test]
    fn subform_examples() {
        assert!(rational_subform_test(&form(&[1]), &form(&[1, 5])).unwrap());
        assert!(!rational_subform_test(&form(&[1, 3, 6, 10]), &form(&[1, 1, 1, 1])).unwrap());
        assert!(rational_subform_test(&form(&[1, 3, 6]), &form(&[1, 1, 1, 1])).unwrap());
    }

    #[test]
    fn worked_rational_example() {
        let r = rational_omega(&form(&[1, 2, 3, -7]), &rat(1)).unwrap();
        assert_eq!((r.omega, r.d), (3, 2));
        assert_eq!((r.certificate.blocked_at, r.certificate.place), (3, Place::Prime(3)));
    }

    #[test]
    fn sums_of_squares() {
        let om = |n| {
            rational_omega(&RationalForm::sum_of_squares(n).unwrap(), &rat(1))
                .unwrap()
                .omega
        };
        assert_eq!(om(4), 4);
        assert_eq!(om(8), 9);
        assert_eq!(om(3), 2);
        for n in 1..=20 {
            assert_eq!(sos_fastpath(n).unwrap(), om(n), "n = {n}");
        }
    }

    #[test]
    fn local_omega_at_infinity_is_the_real_rule() {
        for e in [&[1, 2, 3, -7][..], &[-1, -1, 5], &[1, 1, 1, 1, 1]] {
            let f = form(e);
            for a in [1, -1, 3] {
                assert_eq!(
                    local_omega(&f, &rat(a), Place::Infinity).unwrap(),
                    real_omega(f.signature(), &rat(a)).unwrap()
                );
            }
        }
    }
}
