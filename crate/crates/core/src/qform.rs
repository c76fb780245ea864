//! Quadratic forms over finite fields and `Z/p^k`.
//!
//! A form on `R^n` is stored as its upper-triangular coefficient matrix `U`,
//! so `q(x) = x^T U x`. This is valid in every characteristic, unlike a Gram
//! matrix, which does not determine the form when 2 is not a unit. The polar
//! matrix `B = U + U^T` is derived on demand.
//!
//! Vectors of `R^n` are indexed by `sum x_i * |R|^i` (first coordinate least
//! significant). Every deterministic scan in the crate follows this order.

use std::fmt;

use serde::Serialize;

use crate::algebra::{Elem, FiniteRing};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// How a form is given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormSpec {
    /// `<a_1, ..., a_n>`, i.e. `sum a_i x_i^2`.
    Diagonal(Vec<i64>),
    /// Upper-triangular coefficients; entries below the diagonal must be zero.
    Upper(Vec<Vec<i64>>),
    /// Symmetric Gram matrix of the polar form. Needs 2 to be a unit.
    Gram(Vec<Vec<i64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SquareClass {
    Square,
    NonSquare,
}

impl SquareClass {
    /// Canonical representative: 1 or the smallest non-square.
    pub fn representative(self, ring: &FiniteRing) -> Elem {
        match self {
            SquareClass::Square => ring.one(),
            SquareClass::NonSquare => ring.nonsquare().expect("odd characteristic"),
        }
    }
}

/// Classification data of a form over a finite field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormInvariants {
    pub dimension: usize,
    pub nondegenerate: bool,
    /// Square class of `det(B)`, odd characteristic only.
    pub det_class: Option<SquareClass>,
    /// Arf invariant as a class of `F / {x^2 + x}` (0 or 1), characteristic 2 only.
    pub arf: Option<u8>,
    pub witt_index: usize,
    pub hyperbolic: bool,
}

/// Symmetric Gram matrix `B = U + U^T` of the polar form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarMatrix {
    pub entries: Matrix,
}

impl PolarMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn determinant(&self, ring: &FiniteRing) -> Elem {
        linalg::determinant(ring, &self.entries)
    }

    pub fn bilinear(&self, ring: &FiniteRing, x: &[Elem], y: &[Elem]) -> Elem {
        linalg::dot(ring, x, &linalg::mat_vec(ring, &self.entries, y))
    }

    /// Row `i` as a linear functional `y -> b(e_i, y)`.
    pub fn row(&self, i: usize) -> &[Elem] {
        &self.entries[i]
    }
}

/// A quadratic form `q(x) = x^T U x` on `R^n`.
#[derive(Clone, PartialEq, Eq)]
pub struct QForm {
    ring: FiniteRing,
    n: usize,
    upper: Vec<Elem>,
}

impl fmt::Debug for QForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QForm({} over {})", self, self.ring)
    }
}

impl fmt::Display for QForm {
    /// Upper-triangular coefficient rows, e.g. `[[1,1],[0,1]]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.coeff(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl QForm {
    /// Builds a form from a `FormSpec`, mapping literals into the ring.
    pub fn new(ring: &FiniteRing, spec: &FormSpec) -> Result<QForm> {
        match spec {
            FormSpec::Diagonal(d) => {
                let d = d.iter().map(|&x| ring.from_literal(x)).collect::<Result<Vec<_>>>()?;
                QForm::diagonal(ring, &d)
            }
            FormSpec::Upper(rows) => {
                let n = square_dim(rows)?;
                let mut upper = Vec::with_capacity(n * n);
                for row in rows {
                    for &x in row {
                        upper.push(ring.from_literal(x)?);
                    }
                }
                QForm::from_upper(ring, n, upper)
            }
            FormSpec::Gram(rows) => {
                let n = square_dim(rows)?;
                let two_inv = ring.inv(ring.from_int(2)).ok_or_else(|| {
                    Error::InvalidForm("a Gram matrix does not determine the form when 2 is not a unit".into())
                })?;
                let mut upper = vec![ring.zero(); n * n];
                for i in 0..n {
                    for j in 0..n {
                        let bij = ring.from_literal(rows[i][j])?;
                        if bij != ring.from_literal(rows[j][i])? {
                            return Err(Error::InvalidForm("Gram matrix is not symmetric".into()));
                        }
                        if i == j {
                            upper[i * n + i] = ring.mul(bij, two_inv);
                        } else if i < j {
                            upper[i * n + j] = bij;
                        }
                    }
                }
                QForm::from_upper(ring, n, upper)
            }
        }
    }

    /// Builds a form from row-major upper-triangular coefficients.
    pub fn from_upper(ring: &FiniteRing, n: usize, upper: Vec<Elem>) -> Result<QForm> {
        if n == 0 {
            return Err(Error::InvalidForm("dimension must be at least 1".into()));
        }
        if upper.len() != n * n {
            return Err(Error::InvalidForm(format!("expected {} coefficients", n * n)));
        }
        for i in 0..n {
            for j in 0..i {
                if upper[i * n + j] != ring.zero() {
                    return Err(Error::InvalidForm(format!(
                        "coefficient ({i},{j}) below the diagonal must be zero"
                    )));
                }
            }
        }
        if let Some(bad) = upper.iter().find(|&&x| !ring.contains(x)) {
            return Err(Error::InvalidForm(format!("{bad} is not an element of {ring}")));
        }
        Ok(QForm {
            ring: ring.clone(),
            n,
            upper,
        })
    }

    pub fn diagonal(ring: &FiniteRing, entries: &[Elem]) -> Result<QForm> {
        let n = entries.len();
        let mut upper = vec![ring.zero(); n * n];
        for (i, &d) in entries.iter().enumerate() {
            upper[i * n + i] = d;
        }
        QForm::from_upper(ring, n, upper)
    }

    /// The binary form `[a, b] = a x^2 + xy + b y^2`.
    pub fn binary(ring: &FiniteRing, a: Elem, b: Elem) -> QForm {
        QForm::from_upper(ring, 2, vec![a, ring.one(), ring.zero(), b]).expect("well-formed binary form")
    }

    /// The hyperbolic plane `xy`.
    pub fn hyperbolic_plane(ring: &FiniteRing) -> QForm {
        QForm::binary(ring, ring.zero(), ring.zero())
    }

    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, i: usize, j: usize) -> Elem {
        self.upper[i * self.n + j]
    }

    pub fn upper_rows(&self) -> Matrix {
        self.upper.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// `q(x)`, checking the dimension.
    pub fn evaluate(&self, x: &[Elem]) -> Result<Elem> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.eval(x))
    }

    /// `q(x)` without the dimension check.
    pub fn eval(&self, x: &[Elem]) -> Elem {
        let r = &self.ring;
        let mut acc = r.zero();
        for i in 0..self.n {
            if x[i].0 == 0 {
                continue;
            }
            let row = &self.upper[i * self.n..(i + 1) * self.n];
            let mut inner = r.zero();
            for j in i..self.n {
                if row[j].0 != 0 && x[j].0 != 0 {
                    inner = r.add(inner, r.mul(row[j], x[j]));
                }
            }
            acc = r.add(acc, r.mul(x[i], inner));
        }
        acc
    }

    /// `b(x, y) = q(x + y) - q(x) - q(y)`, computed as `x^T (U + U^T) y`.
    pub fn polar(&self, x: &[Elem], y: &[Elem]) -> Elem {
        let r = &self.ring;
        let mut acc = r.zero();
        for i in 0..self.n {
            for j in i..self.n {
                let c = self.coeff(i, j);
                if c.0 == 0 {
                    continue;
                }
                let t = r.add(r.mul(x[i], y[j]), r.mul(x[j], y[i]));
                acc = r.add(acc, r.mul(c, t));
            }
        }
        acc
    }

    pub fn polar_matrix(&self) -> PolarMatrix {
        let r = &self.ring;
        let n = self.n;
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            r.add(self.coeff(i, i), self.coeff(i, i))
                        } else if i < j {
                            self.coeff(i, j)
                        } else {
                            self.coeff(j, i)
                        }
                    })
                    .collect()
            })
            .collect();
        PolarMatrix { entries }
    }

    /// The form `y -> q(sum_j y_j v_j)` on the span of `vectors` (a congruence
    /// transform when the vectors are the columns of an invertible matrix).
    pub fn compose(&self, vectors: &[Vec<Elem>]) -> QForm {
        let m = vectors.len();
        let mut upper = vec![self.ring.zero(); m * m];
        for i in 0..m {
            upper[i * m + i] = self.eval(&vectors[i]);
            for j in i + 1..m {
                upper[i * m + j] = self.polar(&vectors[i], &vectors[j]);
            }
        }
        QForm {
            ring: self.ring.clone(),
            n: m,
            upper,
        }
    }

    pub fn scale(&self, c: Elem) -> QForm {
        QForm {
            ring: self.ring.clone(),
            n: self.n,
            upper: self.upper.iter().map(|&u| self.ring.mul(c, u)).collect(),
        }
    }

    pub fn orthogonal_sum(&self, other: &QForm) -> Result<QForm> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let n = self.n + other.n;
        let mut upper = vec![self.ring.zero(); n * n];
        for i in 0..self.n {
            for j in i..self.n {
                upper[i * n + j] = self.coeff(i, j);
            }
        }
        for i in 0..other.n {
            for j in i..other.n {
                upper[(self.n + i) * n + self.n + j] = other.coeff(i, j);
            }
        }
        QForm::from_upper(&self.ring, n, upper)
    }

    /// Non-degenerate iff `det(B)` is a unit.
    pub fn is_nondegenerate(&self) -> bool {
        self.ring.is_unit(self.polar_matrix().determinant(&self.ring))
    }

    fn require_field(&self) -> Result<()> {
        if self.ring.is_field() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "{} is not a field; reduce to the residue field first",
                self.ring
            )))
        }
    }

    fn require_nondegenerate(&self) -> Result<()> {
        if self.is_nondegenerate() {
            Ok(())
        } else {
            Err(Error::Degenerate)
        }
    }

    /// Square class of `det(B)` over a finite field of odd characteristic.
    pub fn det_class(&self) -> Result<SquareClass> {
        self.require_field()?;
        self.require_nondegenerate()?;
        if self.ring.p() == 2 {
            return Err(Error::Unsupported(
                "determinant classes are trivial in characteristic 2".into(),
            ));
        }
        let d = self.polar_matrix().determinant(&self.ring);
        Ok(if self.ring.is_square(d) {
            SquareClass::Square
        } else {
            SquareClass::NonSquare
        })
    }

    /// Arf invariant over a finite field of characteristic 2, via a symplectic
    /// basis of the alternating polar form: `sum q(e_i) q(f_i)` modulo `{x^2 + x}`.
    pub fn arf(&self) -> Result<u8> {
        self.require_field()?;
        let r = &self.ring;
        if r.p() != 2 {
            return Err(Error::Unsupported(
                "the Arf invariant is defined in characteristic 2".into(),
            ));
        }
        if self.n % 2 == 1 {
            return Err(Error::Precondition(
                "odd-dimensional forms are degenerate in characteristic 2".into(),
            ));
        }
        self.require_nondegenerate()?;
        let mut rest: Vec<Vec<Elem>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| if i == j { r.one() } else { r.zero() }).collect())
            .collect();
        let mut sum = r.zero();
        while !rest.is_empty() {
            let e = rest.remove(0);
            let pos = rest
                .iter()
                .position(|w| self.polar(&e, w) != r.zero())
                .ok_or_else(|| Error::Internal("no symplectic partner in a non-degenerate space".into()))?;
            let w = rest.remove(pos);
            let s = r.inv(self.polar(&e, &w)).expect("nonzero pairing");
            let f: Vec<Elem> = w.iter().map(|&x| r.mul(s, x)).collect();
            sum = r.add(sum, r.mul(self.eval(&e), self.eval(&f)));
            for u in rest.iter_mut() {
                let cf = self.polar(u, &f);
                let ce = self.polar(u, &e);
                for t in 0..self.n {
                    // char 2: u - b(u,f) e - b(u,e) f
                    u[t] = r.add(u[t], r.add(r.mul(cf, e[t]), r.mul(ce, f[t])));
                }
            }
        }
        Ok(r.trace_gf2(sum))
    }

    /// Whether an even-dimensional form is hyperbolic (finite field, non-degenerate).
    pub fn is_hyperbolic(&self) -> Result<bool> {
        if self.n % 2 == 1 {
            self.require_field()?;
            self.require_nondegenerate()?;
            return Ok(false);
        }
        if self.ring.p() == 2 {
            return Ok(self.arf()? == 0);
        }
        let target = self.ring.from_int(if (self.n / 2).is_multiple_of(2) { 1 } else { -1 });
        let target_class = if self.ring.is_square(target) {
            SquareClass::Square
        } else {
            SquareClass::NonSquare
        };
        Ok(self.det_class()? == target_class)
    }

    /// Invariants of a non-degenerate form over a finite field.
    pub fn invariants_ff(&self) -> Result<FormInvariants> {
        self.require_field()?;
        let char2 = self.ring.p() == 2;
        if char2 && self.n % 2 == 1 {
            return Err(Error::Precondition(
                "odd-dimensional forms are degenerate in characteristic 2".into(),
            ));
        }
        self.require_nondegenerate()?;
        let hyperbolic = self.is_hyperbolic()?;
        Ok(FormInvariants {
            dimension: self.n,
            nondegenerate: true,
            det_class: if char2 { None } else { Some(self.det_class()?) },
            arf: if char2 { Some(self.arf()?) } else { None },
            witt_index: witt_from_parts(self.n, hyperbolic),
            hyperbolic,
        })
    }

    /// Witt index over a finite field.
    pub fn witt_index_ff(&self) -> Result<usize> {
        Ok(self.invariants_ff()?.witt_index)
    }

    /// Isometry test by dimension plus determinant class (odd characteristic) or
    /// Arf invariant (characteristic 2).
    pub fn is_isometric_ff(&self, other: &QForm) -> Result<bool> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let a = self.invariants_ff()?;
        let b = other.invariants_ff()?;
        Ok(a.dimension == b.dimension && a.det_class == b.det_class && a.arf == b.arf)
    }

    /// First vector in canonical order with `q(x) = a`.
    ///
    /// Canonical order begins with the vectors supported on the first two
    /// coordinates, so the two-dimensional subproblem is searched first.
    pub fn represent_value(&self, a: Elem) -> Option<Vec<Elem>> {
        VectorIter::new(&self.ring, self.n).find(|x| self.eval(x) == a)
    }

    /// Coefficientwise reduction of a form over `Z/p^k` to `GF(p)`.
    pub fn reduce_residue_form(&self) -> Result<QForm> {
        if self.ring.is_field() {
            return Err(Error::Unsupported("residue reduction applies to Z/p^k".into()));
        }
        self.require_nondegenerate()?;
        let field = self.ring.residue_field()?;
        QForm::from_upper(
            &field,
            self.n,
            self.upper.iter().map(|&x| self.ring.residue_map(x)).collect(),
        )
    }

    /// The form used for classification: itself over a field, its residue form over `Z/p^k`.
    pub fn classification_form(&self) -> Result<QForm> {
        if self.ring.is_field() {
            self.require_nondegenerate()?;
            Ok(self.clone())
        } else {
            self.reduce_residue_form()
        }
    }
}

pub(crate) fn witt_from_parts(n: usize, hyperbolic: bool) -> usize {
    if n % 2 == 1 {
        (n - 1) / 2
    } else if hyperbolic {
        n / 2
    } else {
        n / 2 - 1
    }
}

fn square_dim(rows: &[Vec<i64>]) -> Result<usize> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidForm("dimension must be at least 1".into()));
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidForm("matrix is not square".into()));
    }
    Ok(n)
}

/// Canonical index of a vector.
pub fn vector_index(ring: &FiniteRing, x: &[Elem]) -> u64 {
    x.iter().rev().fold(0, |acc, e| acc * ring.order() + e.0)
}

/// Vector with the given canonical index.
pub fn vector_at(ring: &FiniteRing, n: usize, mut idx: u64) -> Vec<Elem> {
    (0..n)
        .map(|_| {
            let e = Elem(idx % ring.order());
            idx /= ring.order();
            e
        })
        .collect()
}

/// All vectors of `R^n` in canonical order.
#[derive(Clone)]
pub struct VectorIter {
    ring: FiniteRing,
    current: Option<Vec<Elem>>,
}

impl VectorIter {
    pub fn new(ring: &FiniteRing, n: usize) -> Self {
        VectorIter {
            ring: ring.clone(),
            current: Some(vec![ring.zero(); n]),
        }
    }
}

impl Iterator for VectorIter {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        let out = self.current.clone()?;
        let q = self.ring.order();
        let cur = self.current.as_mut().unwrap();
        let mut i = 0;
        loop {
            if i == cur.len() {
                self.current = None;
                break;
            }
            if cur[i].0 + 1 < q {
                cur[i].0 += 1;
                break;
            }
            cur[i].0 = 0;
            i += 1;
        }
        Some(out)
    }
}

pub fn add_vec(ring: &FiniteRing, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
    x.iter().zip(y).map(|(&a, &b)| ring.add(a, b)).collect()
}

pub fn sub_vec(ring: &FiniteRing, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
    x.iter().zip(y).map(|(&a, &b)| ring.sub(a, b)).collect()
}

pub fn scale_vec(ring: &FiniteRing, c: Elem, x: &[Elem]) -> Vec<Elem> {
    x.iter().map(|&a| ring.mul(c, a)).collect()
}
