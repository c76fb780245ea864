//! Explicit maximum cliques and a clique validator.
//!
//! A unit-`a` clique is `{0, x_1, ..., x_k}` with `q(x_i) = a`,
//! `b(x_i, x_j) = a` and the `x_i` independent, plus `-sum x_i` when the
//! extra-vector condition holds. The `x_i` are found one at a time: each new
//! vector lies in the affine subspace `b(x_j, x) = a` and is searched there
//! in canonical order, backtracking on dead ends. Over `Z/p^k` the search runs
//! on the residue field and the solution is Hensel-lifted.

use std::fmt::Write as _;

use serde::Serialize;

use crate::algebra::{Elem, FiniteRing};
use crate::cliques;
use crate::error::{Error, Result};
use crate::linalg;
use crate::qform::{self, QForm};
use crate::testform::{self, EmbeddingMode};

/// Vertices of an explicit clique in canonical encoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Clique {
    #[serde(skip)]
    pub ring: FiniteRing,
    pub n: usize,
    /// First vertex is 0.
    pub vertices: Vec<Vec<Elem>>,
    /// Number of embedded test-form vectors (the Witt index for `a = 0`).
    pub k: usize,
    pub extra: bool,
    pub mode: Option<EmbeddingMode>,
}

impl Clique {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// One vertex per line, coordinates comma-separated.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let coords: Vec<String> = v.iter().map(|e| e.to_string()).collect();
            writeln!(out, "{}", coords.join(",")).unwrap();
        }
        out
    }
}

/// Outcome of [`validate_clique`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CliqueCheck {
    Valid,
    /// `q(v_i - v_j) != a`.
    NotAdjacent {
        i: usize,
        j: usize,
    },
    Duplicate {
        i: usize,
        j: usize,
    },
}

impl CliqueCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, CliqueCheck::Valid)
    }
}

/// Checks all pairs in order `(0,1), (0,2), ..., (1,2), ...` and reports the first failure.
pub fn validate_clique(q: &QForm, a: Elem, vertices: &[Vec<Elem>]) -> Result<CliqueCheck> {
    let ring = q.ring();
    for v in vertices {
        if v.len() != q.dim() {
            return Err(Error::DimensionMismatch {
                expected: q.dim(),
                got: v.len(),
            });
        }
    }
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            if vertices[i] == vertices[j] {
                return Ok(CliqueCheck::Duplicate { i, j });
            }
            if q.eval(&qform::sub_vec(ring, &vertices[i], &vertices[j])) != a {
                return Ok(CliqueCheck::NotAdjacent { i, j });
            }
        }
    }
    Ok(CliqueCheck::Valid)
}

/// Search steps allowed before giving up.
const STEP_LIMIT: u64 = 50_000_000;
/// Largest isotropic clique that is materialized.
const MAX_ISOTROPIC_VERTICES: u64 = 1 << 20;

struct Extender<'a> {
    q: &'a QForm,
    polar: linalg::Matrix,
    a: Elem,
    steps: u64,
}

impl Extender<'_> {
    /// Rows `r` with `r . y = b(x, y)` for each chosen `x`.
    fn rows(&self, chosen: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
        let ring = self.q.ring();
        chosen.iter().map(|x| linalg::mat_vec(ring, &self.polar, x)).collect()
    }

    fn extend(&mut self, chosen: &mut Vec<Vec<Elem>>, k: usize, pair_value: Elem) -> Result<bool> {
        if chosen.len() == k {
            return Ok(true);
        }
        let ring = self.q.ring().clone();
        let rows = self.rows(chosen);
        let rhs = vec![pair_value; rows.len()];
        let Some(space) = linalg::solve_affine(&ring, self.q.dim(), &rows, &rhs) else {
            return Ok(false);
        };
        for x in space.points(&ring) {
            self.steps += 1;
            if self.steps > STEP_LIMIT {
                return Err(Error::Internal("clique construction exceeded its step limit".into()));
            }
            if self.q.eval(&x) != self.a || x.iter().all(|e| e.0 == 0) || linalg::in_span(&ring, chosen, &x) {
                continue;
            }
            chosen.push(x);
            if self.extend(chosen, k, pair_value)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }
}

/// `k` independent vectors over a field with `q(x_i) = a` and `b(x_i, x_j) = pair_value`.
fn search_family(q: &QForm, a: Elem, pair_value: Elem, k: usize) -> Result<Option<Vec<Vec<Elem>>>> {
    let mut ext = Extender {
        q,
        polar: q.polar_matrix().entries,
        a,
        steps: 0,
    };
    let mut chosen = Vec::with_capacity(k);
    Ok(if ext.extend(&mut chosen, k, pair_value)? {
        Some(chosen)
    } else {
        None
    })
}

/// Independent `x_1..x_k` realizing `gamma_{a,k}` inside `q`, or `None`.
pub fn embed_test_form(q: &QForm, a: Elem, k: usize) -> Result<Option<Vec<Vec<Elem>>>> {
    let ring = q.ring();
    if ring.is_field() {
        return search_family(q, a, a, k);
    }
    let base = q.reduce_residue_form()?;
    let a0 = ring.residue_map(a);
    match search_family(&base, a0, a0, k)? {
        None => Ok(None),
        Some(xs) => lift_family(q, a, &xs).map(Some),
    }
}

/// Hensel lift of a residue solution of `q(x_i) = a`, `b(x_i, x_j) = a`.
///
/// The linearization `y -> (b(x_i, y_i), b(x_i, y_j) + b(y_i, x_j))` is onto
/// whenever the residue vectors are independent, so every step is solvable.
fn lift_family(q: &QForm, a: Elem, residue: &[Vec<Elem>]) -> Result<Vec<Vec<Elem>>> {
    let ring = q.ring();
    let field = ring.residue_field()?;
    let p = ring.p();
    let n = q.dim();
    let k = residue.len();
    let mut xs: Vec<Vec<Elem>> = residue.to_vec();
    let bq = q.polar_matrix().entries;
    let bq_res: linalg::Matrix = bq
        .iter()
        .map(|r| r.iter().map(|&e| ring.residue_map(e)).collect())
        .collect();
    let mut pm: u64 = p;
    while pm < ring.order() {
        // residual equations, all divisible by pm
        let mut eqs: Vec<(usize, usize)> = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..k {
            for j in i..k {
                let v = if i == j {
                    q.eval(&xs[i])
                } else {
                    q.polar(&xs[i], &xs[j])
                };
                let r = ring.sub(v, a);
                debug_assert_eq!(r.0 % pm, 0);
                eqs.push((i, j));
                rhs.push(field.neg(Elem((r.0 / pm) % p)));
            }
        }
        let res_x: Vec<Vec<Elem>> = xs
            .iter()
            .map(|x| x.iter().map(|&e| ring.residue_map(e)).collect())
            .collect();
        let bx: Vec<Vec<Elem>> = res_x.iter().map(|x| linalg::mat_vec(&field, &bq_res, x)).collect();
        let rows: Vec<Vec<Elem>> = eqs
            .iter()
            .map(|&(i, j)| {
                let mut row = vec![field.zero(); n * k];
                if i == j {
                    row[i * n..(i + 1) * n].copy_from_slice(&bx[i]);
                } else {
                    // b(y_i, x_j) + b(x_i, y_j)
                    row[i * n..(i + 1) * n].copy_from_slice(&bx[j]);
                    row[j * n..(j + 1) * n].copy_from_slice(&bx[i]);
                }
                row
            })
            .collect();
        let sol = linalg::solve_affine(&field, n * k, &rows, &rhs)
            .ok_or_else(|| Error::Internal("Hensel step has no solution".into()))?;
        for i in 0..k {
            for t in 0..n {
                let y = sol.particular[i * n + t].0;
                xs[i][t] = ring.add(xs[i][t], ring.from_int((y * pm) as i64));
            }
        }
        pm *= p;
    }
    Ok(xs)
}

/// A maximum clique of `G_{q,a}` of size `omega`.
pub fn construct_max_clique(q: &QForm, a: Elem) -> Result<Clique> {
    let ring = q.ring();
    let report = cliques::clique_number(q, a)?;
    let n = q.dim();
    if a.0 == 0 {
        return isotropic_clique(q, report.omega);
    }
    let emb = testform::max_embedded_dimension(q, a)?;
    let k = emb.k;
    let xs = embed_test_form(q, a, k)?
        .ok_or_else(|| Error::Internal(format!("no copy of gamma_{{a,{k}}} found although one must exist")))?;
    let mut vertices = vec![vec![ring.zero(); n]];
    vertices.extend(xs.iter().cloned());
    let extra = cliques::extra_vector_applies(ring, k);
    if extra {
        let sum = xs
            .iter()
            .fold(vec![ring.zero(); n], |acc, x| qform::add_vec(ring, &acc, x));
        vertices.push(qform::scale_vec(ring, ring.neg(ring.one()), &sum));
    }
    let clique = Clique {
        ring: ring.clone(),
        n,
        vertices,
        k,
        extra,
        mode: Some(emb.mode),
    };
    if clique.len() as u64 != report.omega {
        return Err(Error::Internal(format!(
            "constructed {} vertices but omega = {}",
            clique.len(),
            report.omega
        )));
    }
    let check = validate_clique(q, a, &clique.vertices)?;
    if !check.is_valid() {
        return Err(Error::Internal(format!(
            "constructed clique fails validation: {check:?}"
        )));
    }
    Ok(clique)
}

/// A maximal totally isotropic subspace, listed in full.
fn isotropic_clique(q: &QForm, omega: u64) -> Result<Clique> {
    let ring = q.ring();
    if omega > MAX_ISOTROPIC_VERTICES {
        return Err(Error::Unsupported(format!("isotropic clique has {omega} vertices")));
    }
    let basis = totally_isotropic_basis(q)?;
    let span = linalg::AffineSpace {
        particular: vec![ring.zero(); q.dim()],
        kernel: basis.clone(),
    };
    let vertices: Vec<Vec<Elem>> = span.points(ring).collect();
    if vertices.len() as u64 != omega {
        return Err(Error::Internal(format!(
            "isotropic subspace of size {} but omega = {omega}",
            vertices.len()
        )));
    }
    Ok(Clique {
        ring: ring.clone(),
        n: q.dim(),
        vertices,
        k: basis.len(),
        extra: false,
        mode: None,
    })
}

/// Greedy basis of a maximal totally isotropic subspace: repeatedly take the
/// first isotropic vector orthogonal to and independent of the chosen ones.
pub fn totally_isotropic_basis(q: &QForm) -> Result<Vec<Vec<Elem>>> {
    let ring = q.ring();
    if !ring.is_field() {
        return Err(Error::Unsupported(
            "totally isotropic subspaces are built over fields".into(),
        ));
    }
    let polar = q.polar_matrix().entries;
    let mut basis: Vec<Vec<Elem>> = Vec::new();
    loop {
        let rows: Vec<Vec<Elem>> = basis.iter().map(|x| linalg::mat_vec(ring, &polar, x)).collect();
        let perp =
            linalg::solve_affine(ring, q.dim(), &rows, &vec![ring.zero(); rows.len()]).expect("homogeneous system");
        let next = perp
            .points(ring)
            .find(|x| q.eval(x) == ring.zero() && !linalg::in_span(ring, &basis, x));
        match next {
            Some(x) => basis.push(x),
            None => return Ok(basis),
        }
    }
}

/// Field elements as vectors, for callers holding raw integers.
pub fn parse_vertices(ring: &FiniteRing, raw: &[Vec<i64>]) -> Result<Vec<Vec<Elem>>> {
    raw.iter()
        .map(|v| v.iter().map(|&x| ring.from_literal(x)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qform::FormSpec;

    fn gf(p: u64, k: u32) -> FiniteRing {
        FiniteRing::field(p, k).unwrap()
    }

    fn diag(ring: &FiniteRing, d: &[i64]) -> QForm {
        QForm::new(ring, &FormSpec::Diagonal(d.to_vec())).unwrap()
    }

    fn vs(ring: &FiniteRing, raw: &[&[i64]]) -> Vec<Vec<Elem>> {
        parse_vertices(ring, &raw.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn worked_example_clique_validates() {
        let f5 = gf(5, 1);
        let q = diag(&f5, &[1, 1, 2]);
        let c = vs(&f5, &[&[0, 0, 0], &[1, 0, 0], &[3, 0, 1], &[3, 3, 2], &[3, 2, 2]]);
        assert_eq!(validate_clique(&q, Elem(1), &c).unwrap(), CliqueCheck::Valid);
        let built = construct_max_clique(&q, Elem(1)).unwrap();
        assert_eq!(built.len(), 5);
        assert!(built.extra);
        assert_eq!(built.vertices[1], vs(&f5, &[&[1, 0, 0]])[0]);
    }

    #[test]
    fn validator_examples() {
        let f5 = gf(5, 1);
        let q = diag(&f5, &[1, 1, 2]);
        let c = vs(&f5, &[&[0, 0, 0], &[1, 0, 0]]);
        assert!(validate_clique(&q, Elem(1), &c).unwrap().is_valid());
        let c = vs(&f5, &[&[0, 0, 0], &[1, 0, 0], &[2, 0, 0]]);
        assert_eq!(
            validate_clique(&q, Elem(1), &c).unwrap(),
            CliqueCheck::NotAdjacent { i: 0, j: 2 }
        );
        let c = vs(&f5, &[&[1, 0, 0], &[1, 0, 0]]);
        assert_eq!(
            validate_clique(&q, Elem(1), &c).unwrap(),
            CliqueCheck::Duplicate { i: 0, j: 1 }
        );
        assert!(matches!(
            validate_clique(&q, Elem(1), &vs(&f5, &[&[1, 0]])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn small_constructions() {
        let f5 = gf(5, 1);
        let c = construct_max_clique(&diag(&f5, &[1]), Elem(1)).unwrap();
        assert_eq!(c.vertices, vs(&f5, &[&[0], &[1]]));
        let f7 = gf(7, 1);
        let g = testform::gamma_form(&f7, Elem(1), 2).unwrap();
        let c = construct_max_clique(&g, Elem(1)).unwrap();
        assert_eq!((c.len(), c.extra), (3, false));
    }

    #[test]
    fn residue_ring_lift() {
        for (p, k) in [(3u64, 2u32), (5, 2), (3, 3)] {
            let ring = FiniteRing::residue(p, k).unwrap();
            for d in [vec![1, 1], vec![1, 2, 2], vec![2, 7, 1]] {
                let q = diag(&ring, &d);
                for a in ring.elements().filter(|&e| ring.is_unit(e)).take(6) {
                    let c = construct_max_clique(&q, a).unwrap();
                    assert!(validate_clique(&q, a, &c.vertices).unwrap().is_valid());
                    assert_eq!(c.len() as u64, cliques::clique_number(&q, a).unwrap().omega);
                }
            }
        }
    }

    #[test]
    fn char_two_dominated_family() {
        let f2 = gf(2, 1);
        let h = QForm::hyperbolic_plane(&f2);
        let q = h
            .orthogonal_sum(&h)
            .unwrap()
            .orthogonal_sum(&QForm::binary(&f2, Elem(1), Elem(1)))
            .unwrap();
        let c = construct_max_clique(&q, Elem(1)).unwrap();
        assert_eq!((c.len(), c.k, c.mode), (6, 5, Some(EmbeddingMode::Dominated)));
        assert_eq!(linalg::rank(&f2, &c.vertices[1..]), 5);
    }

    #[test]
    fn isotropic_cliques() {
        let f3 = gf(3, 1);
        let h = QForm::hyperbolic_plane(&f3);
        let q = h.orthogonal_sum(&h).unwrap();
        let c = construct_max_clique(&q, Elem(0)).unwrap();
        assert_eq!(c.len(), 9);
        assert!(validate_clique(&q, Elem(0), &c.vertices).unwrap().is_valid());
        let c = construct_max_clique(&diag(&f3, &[1, 1]), Elem(0)).unwrap();
        assert_eq!(c.len(), 1);
    }
}
