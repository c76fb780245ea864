//! The test form `gamma_{a,n}`: `q(e_i) = a` and polar Gram matrix `a(I + J)`.
//!
//! A clique of `G_{q,a}` through 0 with vertices `x_1..x_k` is the same thing
//! as a family with `q(x_i) = a` and `b(x_i, x_j) = a`, i.e. a copy of
//! `gamma_{a,k}` inside `q`. The clique number is governed by the largest `k`.

use serde::Serialize;

use crate::algebra::{Elem, FiniteRing};
use crate::error::{Error, Result};
use crate::qform::QForm;

/// `gamma_{a,n}` with its determinant and (characteristic 2, even `n`) Arf class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestForm {
    pub a: Elem,
    pub n: usize,
    pub form: QForm,
    /// `det(B) = (n+1) a^n`.
    pub determinant: Elem,
    pub arf: Option<u8>,
}

impl TestForm {
    pub fn is_nondegenerate(&self) -> bool {
        self.form.ring().is_unit(self.determinant)
    }
}

/// Upper-triangular form with `a` on and above the diagonal.
pub fn gamma_form(ring: &FiniteRing, a: Elem, n: usize) -> Result<QForm> {
    let mut upper = vec![ring.zero(); n * n];
    for i in 0..n {
        for j in i..n {
            upper[i * n + j] = a;
        }
    }
    QForm::from_upper(ring, n, upper)
}

pub fn make_gamma(ring: &FiniteRing, a: Elem, n: usize) -> Result<TestForm> {
    if !ring.is_unit(a) {
        return Err(Error::Precondition(format!("{a} is not a unit of {ring}")));
    }
    let form = gamma_form(ring, a, n)?;
    let determinant = form.polar_matrix().determinant(ring);
    let arf = if ring.p() == 2 && ring.is_field() && n.is_multiple_of(2) {
        Some(form.arf()?)
    } else {
        None
    };
    Ok(TestForm {
        a,
        n,
        form,
        determinant,
        arf,
    })
}

/// Arf invariant of `gamma_{a,n}` (`n` even) as an element of the prime field:
/// 1 for `n = 2, 4 mod 8`, 0 for `n = 0, 6 mod 8`. Its class in `F / {x^2 + x}`
/// is the absolute trace.
pub fn gamma_arf_element(n: usize) -> u64 {
    match n % 8 {
        2 | 4 => 1,
        _ => 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingMode {
    /// `gamma_{a,k}` is an orthogonal summand of `q`.
    Subform,
    /// `k` independent vectors with the Gram identities of `gamma_{a,k}`,
    /// without a non-degenerate span (characteristic 2, odd `k`).
    Dominated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmbeddingReport {
    pub k: usize,
    pub mode: EmbeddingMode,
    /// `q` is isometric to `gamma_{a,n}` (over the residue field for `Z/p^k`).
    pub isometric: bool,
    /// Dominated case: some `b` with `q = gamma_{a,n-2} + [a, b]`.
    pub witness_b: Option<Elem>,
}

/// Largest `k` such that `gamma_{a,k}` embeds in `q`.
///
/// `Z/p^k` forms are decided on their residue forms.
pub fn max_embedded_dimension(q: &QForm, a: Elem) -> Result<EmbeddingReport> {
    let ring = q.ring();
    if !ring.is_unit(a) {
        return Err(Error::Precondition(format!("{a} is not a unit of {ring}")));
    }
    let base = q.classification_form()?;
    let field = base.ring().clone();
    let a0 = if ring.is_field() { a } else { ring.residue_map(a) };
    let n = q.dim();
    let p = field.p();
    let gamma = make_gamma(&field, a0, n)?;

    if p == 2 {
        if n % 2 == 1 {
            return Err(Error::Precondition(
                "odd-dimensional forms are degenerate in characteristic 2".into(),
            ));
        }
        let isometric = base.arf()? == gamma.arf.expect("even dimension");
        if isometric {
            return Ok(EmbeddingReport {
                k: n,
                mode: EmbeddingMode::Subform,
                isometric,
                witness_b: None,
            });
        }
        if n % 4 == 2 {
            let target = base.arf()? ^ field.trace_gf2(Elem(gamma_arf_element(n - 2)));
            let b = field
                .elements()
                .find(|&b| field.trace_gf2(field.mul(a0, b)) == target)
                .expect("trace is onto");
            return Ok(EmbeddingReport {
                k: n - 1,
                mode: EmbeddingMode::Dominated,
                isometric,
                witness_b: Some(b),
            });
        }
        return Ok(EmbeddingReport {
            k: n - 2,
            mode: EmbeddingMode::Subform,
            isometric,
            witness_b: None,
        });
    }

    let isometric = gamma.is_nondegenerate() && base.is_isometric_ff(&gamma.form)?;
    let k = if isometric {
        n
    } else if !(n as u64).is_multiple_of(p) {
        n - 1
    } else {
        n - 2
    };
    Ok(EmbeddingReport {
        k,
        mode: EmbeddingMode::Subform,
        isometric,
        witness_b: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qform::FormSpec;

    fn gf(p: u64, k: u32) -> FiniteRing {
        FiniteRing::field(p, k).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let f5 = gf(5, 1);
        let g = make_gamma(&f5, Elem(1), 2).unwrap();
        assert_eq!(
            g.form.polar_matrix().entries,
            vec![vec![Elem(2), Elem(1)], vec![Elem(1), Elem(2)]]
        );
        assert_eq!(g.determinant, Elem(3));
        assert_eq!(g.form.eval(&[Elem(1), Elem(0)]), Elem(1));

        let f2 = gf(2, 1);
        let g = make_gamma(&f2, Elem(1), 2).unwrap();
        assert_eq!(g.form, QForm::binary(&f2, Elem(1), Elem(1)));
        assert_eq!(g.arf, Some(1));
        assert_eq!(make_gamma(&f2, Elem(1), 8).unwrap().arf, Some(0));
        assert!(matches!(make_gamma(&f5, Elem(0), 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn gamma_nondegenerate_iff_n_plus_one_unit() {
        let f3 = gf(3, 1);
        assert!(!make_gamma(&f3, Elem(1), 2).unwrap().is_nondegenerate());
        assert!(make_gamma(&f3, Elem(1), 3).unwrap().is_nondegenerate());
        let z9 = FiniteRing::residue(3, 2).unwrap();
        assert!(!make_gamma(&z9, Elem(1), 5).unwrap().is_nondegenerate());
        assert!(make_gamma(&z9, Elem(4), 4).unwrap().is_nondegenerate());
    }

    #[test]
    fn gamma_scales() {
        for ring in [gf(3, 1), gf(5, 1), gf(2, 2), gf(7, 1)] {
            for a in ring.elements().skip(1) {
                for n in 1..=4 {
                    let lhs = gamma_form(&ring, a, n).unwrap();
                    let rhs = gamma_form(&ring, ring.one(), n).unwrap().scale(a);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn embedding_examples() {
        let f5 = gf(5, 1);
        let q = QForm::new(&f5, &FormSpec::Diagonal(vec![1, 1, 2])).unwrap();
        let r = max_embedded_dimension(&q, Elem(1)).unwrap();
        assert_eq!((r.k, r.mode, r.isometric), (3, EmbeddingMode::Subform, true));

        let f3 = gf(3, 1);
        let q = QForm::new(&f3, &FormSpec::Diagonal(vec![1, 1, 1, 1, 2])).unwrap();
        let r = max_embedded_dimension(&q, Elem(1)).unwrap();
        assert_eq!((r.k, r.isometric), (4, false));

        let f2 = gf(2, 1);
        let r = max_embedded_dimension(&QForm::hyperbolic_plane(&f2), Elem(1)).unwrap();
        assert_eq!((r.k, r.mode), (1, EmbeddingMode::Dominated));
        let b = r.witness_b.unwrap();
        assert!(QForm::binary(&f2, Elem(1), b)
            .is_isometric_ff(&QForm::hyperbolic_plane(&f2))
            .unwrap());
    }

    #[test]
    fn dominated_witness_completes_the_test_form() {
        for ring in [gf(2, 1), gf(2, 2), gf(2, 3)] {
            for arf_q in 0..2u8 {
                let h = QForm::hyperbolic_plane(&ring);
                let mut q = if arf_q == 0 {
                    h.clone()
                } else {
                    let c = ring.elements().find(|&c| ring.trace_gf2(c) == 1).unwrap();
                    QForm::binary(&ring, ring.one(), c)
                };
                q = q.orthogonal_sum(&h).unwrap().orthogonal_sum(&h).unwrap();
                for a in ring.elements().skip(1) {
                    let r = max_embedded_dimension(&q, a).unwrap();
                    if r.isometric {
                        assert_eq!(r.k, 6);
                        continue;
                    }
                    assert_eq!(r.k, 5);
                    let g = gamma_form(&ring, a, 4).unwrap();
                    let completed = g
                        .orthogonal_sum(&QForm::binary(&ring, a, r.witness_b.unwrap()))
                        .unwrap();
                    assert!(completed.is_isometric_ff(&q).unwrap());
                }
            }
        }
    }

    #[test]
    fn residue_forms_decide_embedding() {
        let z9 = FiniteRing::residue(3, 2).unwrap();
        let q = QForm::new(&z9, &FormSpec::Diagonal(vec![1])).unwrap();
        assert!(max_embedded_dimension(&q, Elem(7)).unwrap().isometric);
        assert!(!max_embedded_dimension(&q, Elem(2)).unwrap().isometric);
        assert!(matches!(
            max_embedded_dimension(&q, Elem(3)),
            Err(Error::Precondition(_))
        ));
    }
}
