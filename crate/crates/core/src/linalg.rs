//! Dense linear algebra over a [`FiniteRing`].
//!
//! Elimination routines require a field; determinants also work over `Z/p^k`
//! by computing the integer determinant of the lifted matrix (Bareiss) and
//! reducing it.

use num::{BigInt, Integer, ToPrimitive, Zero};

use crate::algebra::{Elem, FiniteRing};

pub type Matrix = Vec<Vec<Elem>>;

/// Solution set `particular + span(kernel)` of a linear system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSpace {
    pub particular: Vec<Elem>,
    pub kernel: Vec<Vec<Elem>>,
}

impl AffineSpace {
    /// Number of points, saturating.
    pub fn size(&self, ring: &FiniteRing) -> u64 {
        ring.order().saturating_pow(self.kernel.len() as u32)
    }

    /// Points in canonical order: the coefficient of the first kernel vector varies fastest.
    pub fn points<'a>(&'a self, ring: &'a FiniteRing) -> impl Iterator<Item = Vec<Elem>> + 'a {
        let dim = self.kernel.len();
        let q = ring.order();
        let total = q.checked_pow(dim as u32).unwrap_or(u64::MAX);
        (0..total).map(move |mut idx| {
            let mut v = self.particular.clone();
            for basis in &self.kernel {
                let c = Elem(idx % q);
                idx /= q;
                if c.0 != 0 {
                    for (vi, &bi) in v.iter_mut().zip(basis) {
                        *vi = ring.add(*vi, ring.mul(c, bi));
                    }
                }
            }
            v
        })
    }
}

pub fn identity(ring: &FiniteRing, n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { ring.one() } else { ring.zero() }).collect())
        .collect()
}

pub fn mat_vec(ring: &FiniteRing, m: &Matrix, v: &[Elem]) -> Vec<Elem> {
    m.iter().map(|row| dot(ring, row, v)).collect()
}

pub fn dot(ring: &FiniteRing, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter()
        .zip(b)
        .fold(ring.zero(), |acc, (&x, &y)| ring.add(acc, ring.mul(x, y)))
}

pub fn transpose(m: &Matrix) -> Matrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

pub fn mat_mul(ring: &FiniteRing, a: &Matrix, b: &Matrix) -> Matrix {
    let bt = transpose(b);
    a.iter()
        .map(|row| bt.iter().map(|col| dot(ring, row, col)).collect())
        .collect()
}

/// Determinant of a square matrix.
pub fn determinant(ring: &FiniteRing, m: &Matrix) -> Elem {
    if ring.is_field() {
        field_determinant(ring, m.clone())
    } else {
        integer_determinant(ring, m)
    }
}

fn field_determinant(ring: &FiniteRing, mut m: Matrix) -> Elem {
    let n = m.len();
    let mut det = ring.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| m[r][col] != ring.zero()) else {
            return ring.zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = ring.neg(det);
        }
        let pv = m[col][col];
        det = ring.mul(det, pv);
        let inv = ring.inv(pv).expect("nonzero pivot in a field");
        for r in col + 1..n {
            let f = ring.mul(m[r][col], inv);
            if f == ring.zero() {
                continue;
            }
            for c in col..n {
                let t = ring.mul(f, m[col][c]);
                m[r][c] = ring.sub(m[r][c], t);
            }
        }
    }
    det
}

fn integer_determinant(ring: &FiniteRing, m: &Matrix) -> Elem {
    let n = m.len();
    if n == 0 {
        return ring.one();
    }
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| row.iter().map(|e| BigInt::from(e.0)).collect())
        .collect();
    let mut sign = 1i8;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return ring.zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = &a[n - 1][n - 1] * BigInt::from(sign);
    let r = det.mod_floor(&BigInt::from(ring.order()));
    Elem(r.to_u64().expect("reduced below the ring order"))
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(ring: &FiniteRing, m: &mut Matrix, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == m.len() {
            break;
        }
        let Some(piv) = (row..m.len()).find(|&r| m[r][col] != ring.zero()) else {
            continue;
        };
        m.swap(piv, row);
        let inv = ring.inv(m[row][col]).expect("field pivot");
        for c in 0..m[row].len() {
            m[row][c] = ring.mul(m[row][c], inv);
        }
        for r in 0..m.len() {
            if r != row && m[r][col] != ring.zero() {
                let f = m[r][col];
                for c in 0..m[r].len() {
                    let t = ring.mul(f, m[row][c]);
                    m[r][c] = ring.sub(m[r][c], t);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// All solutions of `rows * x = rhs` over a field, or `None` if inconsistent.
pub fn solve_affine(ring: &FiniteRing, n: usize, rows: &[Vec<Elem>], rhs: &[Elem]) -> Option<AffineSpace> {
    debug_assert!(ring.is_field());
    let mut aug: Matrix = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut v = r.clone();
            v.push(b);
            v
        })
        .collect();
    let pivots = rref(ring, &mut aug, n);
    for row in aug.iter().skip(pivots.len()) {
        if row[n] != ring.zero() {
            return None;
        }
    }
    let mut particular = vec![ring.zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = aug[r][n];
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&f| {
            let mut v = vec![ring.zero(); n];
            v[f] = ring.one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = ring.neg(aug[r][f]);
            }
            v
        })
        .collect();
    Some(AffineSpace { particular, kernel })
}

/// Basis of the null space of `rows`.
pub fn nullspace(ring: &FiniteRing, n: usize, rows: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let zeros = vec![ring.zero(); rows.len()];
    solve_affine(ring, n, rows, &zeros)
        .expect("homogeneous systems are consistent")
        .kernel
}

pub fn rank(ring: &FiniteRing, vectors: &[Vec<Elem>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mut m = vectors.to_vec();
    let cols = m[0].len();
    rref(ring, &mut m, cols).len()
}

pub fn in_span(ring: &FiniteRing, basis: &[Vec<Elem>], v: &[Elem]) -> bool {
    let mut all = basis.to_vec();
    all.push(v.to_vec());
    rank(ring, &all) == rank(ring, basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(ring: &FiniteRing, rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| ring.from_int(x)).collect())
            .collect()
    }

    #[test]
    fn determinants() {
        let f5 = FiniteRing::field(5, 1).unwrap();
        assert_eq!(determinant(&f5, &m(&f5, &[&[2, 1], &[1, 2]])), Elem(3));
        assert_eq!(determinant(&f5, &m(&f5, &[&[0, 1], &[1, 0]])), Elem(4));
        let z9 = FiniteRing::residue(3, 2).unwrap();
        // det [[2,1],[1,5]] = 9 = 0 mod 9
        assert_eq!(determinant(&z9, &m(&z9, &[&[2, 1], &[1, 5]])), Elem(0));
        assert_eq!(determinant(&z9, &m(&z9, &[&[2, 0], &[0, 4]])), Elem(8));
        assert_eq!(determinant(&z9, &m(&z9, &[&[0, 3], &[3, 1]])), Elem(0));
        assert_eq!(
            determinant(&z9, &m(&z9, &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]])),
            Elem(8)
        );
    }

    #[test]
    fn affine_solutions() {
        let f5 = FiniteRing::field(5, 1).unwrap();
        let rows = m(&f5, &[&[1, 1, 0]]);
        let sol = solve_affine(&f5, 3, &rows, &[Elem(2)]).unwrap();
        assert_eq!(sol.kernel.len(), 2);
        assert_eq!(sol.size(&f5), 25);
        for x in sol.points(&f5) {
            assert_eq!(dot(&f5, &rows[0], &x), Elem(2));
        }
        let inconsistent = m(&f5, &[&[1, 0], &[1, 0]]);
        assert!(solve_affine(&f5, 2, &inconsistent, &[Elem(1), Elem(2)]).is_none());
    }

    #[test]
    fn span_membership() {
        let f3 = FiniteRing::field(3, 1).unwrap();
        let basis = m(&f3, &[&[1, 1, 0]]);
        assert!(in_span(&f3, &basis, &[Elem(2), Elem(2), Elem(0)]));
        assert!(!in_span(&f3, &basis, &[Elem(1), Elem(0), Elem(0)]));
        assert_eq!(nullspace(&f3, 3, &basis).len(), 2);
    }
}
