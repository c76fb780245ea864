//! Python module `qfclique`.
//!
//! Rings, forms and scalars use the command-line grammar: `"gf:5"`, `"zmod:3^2"`,
//! `"diag:1,1,2"`, `"upper:[[0,1],[0,0]]"`, scalars as ints or `"a/b"` strings.
//! Structured results come back as dicts with the same keys as the JSON output,
//! except that big integers are Python ints.

use num::BigRational;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;

use qfclique::algebra::{Elem, Place, Ring};
use qfclique::charzero::{self, RationalForm};
use qfclique::oracle::{self, GraphMode, OracleOptions};
use qfclique::qform::QForm;
use qfclique::{cli, cliques, construct, verify, Error};

create_exception!(qfclique, QfcliqueError, PyException);
create_exception!(qfclique, ParseError, QfcliqueError);
create_exception!(qfclique, PreconditionError, QfcliqueError);
create_exception!(qfclique, CapExceededError, QfcliqueError);
create_exception!(qfclique, InternalError, QfcliqueError);

fn py_err(e: Error) -> PyErr {
    let msg = e.to_string();
    match cli::exit_code(&e) {
        cli::EXIT_PARSE => ParseError::new_err(msg),
        cli::EXIT_CAP => CapExceededError::new_err(msg),
        cli::EXIT_MISMATCH => InternalError::new_err(msg),
        _ => PreconditionError::new_err(msg),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for qfclique::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Goes through JSON so dict keys match the command-line output.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| InternalError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn scalar_text(a: &Bound<'_, PyAny>) -> PyResult<String> {
    Ok(a.str()?.to_string())
}

fn parse_place(place: &Bound<'_, PyAny>) -> PyResult<Place> {
    if let Ok(p) = place.extract::<u64>() {
        if !qfclique::algebra::is_prime(p) {
            return Err(py_err(Error::NotPrime(p)));
        }
        return Ok(Place::Prime(p));
    }
    match place.str()?.to_string().as_str() {
        "inf" | "infinity" | "r" => Ok(Place::Infinity),
        other => Err(ParseError::new_err(format!(
            "unknown place {other:?}; use a prime or \"inf\""
        ))),
    }
}

/// A quadratic form over a finite field or `Z/p^k`.
#[pyclass(name = "QuadraticForm", module = "qfclique", frozen)]
struct PyQForm {
    inner: QForm,
    spec: String,
}

#[pymethods]
impl PyQForm {
    #[new]
    fn new(ring: &str, form: &str) -> PyResult<Self> {
        let Ring::Finite(r) = cli::parse_ring(ring).py()? else {
            return Err(PreconditionError::new_err(format!(
                "{ring} is not finite; use RationalForm for q, qp:p and r"
            )));
        };
        let spec = cli::parse_form(form).py()?;
        Ok(PyQForm {
            inner: QForm::new(&r, &spec).py()?,
            spec: form.to_string(),
        })
    }

    #[getter]
    fn ring(&self) -> String {
        self.inner.ring().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __repr__(&self) -> String {
        format!("QuadraticForm({:?}, {:?})", self.ring(), self.spec)
    }

    fn scalar(&self, a: &Bound<'_, PyAny>) -> PyResult<u64> {
        Ok(self.elem(a)?.0)
    }

    /// `q(x)`, entries as ring literals.
    fn evaluate(&self, x: Vec<i64>) -> PyResult<u64> {
        let v = self.vector(&x)?;
        Ok(self.inner.evaluate(&v).py()?.0)
    }

    fn polar(&self, x: Vec<i64>, y: Vec<i64>) -> PyResult<u64> {
        let (x, y) = (self.vector(&x)?, self.vector(&y)?);
        Ok(self.inner.polar(&x, &y).0)
    }

    fn is_nondegenerate(&self) -> bool {
        self.inner.is_nondegenerate()
    }

    fn invariants<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.invariants_ff().py()?)
    }

    fn witt_index(&self) -> PyResult<usize> {
        self.inner.witt_index_ff().py()
    }

    fn is_isometric(&self, other: &PyQForm) -> PyResult<bool> {
        self.inner.is_isometric_ff(&other.inner).py()
    }
}

impl PyQForm {
    fn elem(&self, a: &Bound<'_, PyAny>) -> PyResult<Elem> {
        let x = cli::parse_scalar(&scalar_text(a)?).py()?;
        cli::scalar_in_ring(self.inner.ring(), &x).py()
    }

    fn vector(&self, x: &[i64]) -> PyResult<Vec<Elem>> {
        let ring = self.inner.ring();
        x.iter().map(|&c| ring.from_literal(c).py()).collect()
    }
}

/// Diagonal form over the rationals, `<a_1, ..., a_n>`.
#[pyclass(name = "RationalForm", module = "qfclique", frozen)]
struct PyRationalForm {
    inner: RationalForm,
}

#[pymethods]
impl PyRationalForm {
    #[new]
    fn new(entries: Vec<i64>) -> PyResult<Self> {
        Ok(PyRationalForm {
            inner: RationalForm::new(&entries).py()?,
        })
    }

    #[staticmethod]
    fn sum_of_squares(n: usize) -> PyResult<Self> {
        Ok(PyRationalForm {
            inner: RationalForm::sum_of_squares(n).py()?,
        })
    }

    #[getter]
    fn entries(&self) -> Vec<i64> {
        self.inner.entries().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __repr__(&self) -> String {
        format!("RationalForm({:?})", self.inner.entries())
    }

    fn signature(&self) -> (usize, usize) {
        let s = self.inner.signature();
        (s.plus, s.minus)
    }

    fn det_class(&self) -> i64 {
        self.inner.det_class()
    }

    fn hasse_invariant(&self, place: &Bound<'_, PyAny>) -> PyResult<i8> {
        Ok(self.inner.hasse_invariant(parse_place(place)?))
    }

    fn witt_index(&self, place: &Bound<'_, PyAny>) -> PyResult<usize> {
        charzero::local_witt_index(&self.inner, parse_place(place)?).py()
    }

    fn is_isotropic(&self) -> PyResult<bool> {
        charzero::is_isotropic(&self.inner).py()
    }
}

fn rational(a: &Bound<'_, PyAny>) -> PyResult<BigRational> {
    cli::parse_scalar(&scalar_text(a)?).py()
}

/// Clique number with its case.
#[pyfunction]
fn clique_number<'py>(py: Python<'py>, q: &PyQForm, a: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &cliques::clique_number(&q.inner, q.elem(a)?).py()?)
}

/// Number of maximum cliques over a finite field.
#[pyfunction]
fn count_max_cliques<'py>(py: Python<'py>, q: &PyQForm, a: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let r = cliques::count_max_cliques(&q.inner, q.elem(a)?).py()?;
    let d = to_py(py, &r)?.cast_into::<PyDict>()?;
    d.set_item("omega_max", r.omega_max.clone())?;
    d.set_item("o_order", r.o_order.clone())?;
    d.set_item("iso_order", r.iso_order.clone())?;
    Ok(d.into_any())
}

/// A maximum clique as rows of ring literals.
#[pyfunction]
fn construct_max_clique(q: &PyQForm, a: &Bound<'_, PyAny>) -> PyResult<Vec<Vec<u64>>> {
    let c = construct::construct_max_clique(&q.inner, q.elem(a)?).py()?;
    Ok(c.vertices.iter().map(|v| v.iter().map(|e| e.0).collect()).collect())
}

#[pyfunction]
fn validate_clique(q: &PyQForm, a: &Bound<'_, PyAny>, vertices: Vec<Vec<i64>>) -> PyResult<bool> {
    let vs = construct::parse_vertices(q.inner.ring(), &vertices).py()?;
    Ok(construct::validate_clique(&q.inner, q.elem(a)?, &vs).py()?.is_valid())
}

/// Brute-force clique number and count.
#[pyfunction]
#[pyo3(signature = (q, a, cap = oracle::DEFAULT_CAP))]
fn brute_force<'py>(py: Python<'py>, q: &PyQForm, a: &Bound<'py, PyAny>, cap: u64) -> PyResult<Bound<'py, PyAny>> {
    let opts = OracleOptions {
        cap,
        ..OracleOptions::default()
    };
    let elem = q.elem(a)?;
    let r = py.detach(|| oracle::oracle(&q.inner, elem, opts)).py()?;
    to_py(py, &r)
}

/// Edge list of the representation graph as pairs of canonical vector indices;
/// `mode` is `"full"` or `"reduced"`.
#[pyfunction]
#[pyo3(signature = (q, a, mode = "full", cap = oracle::DEFAULT_CAP))]
fn graph_edges(q: &PyQForm, a: &Bound<'_, PyAny>, mode: &str, cap: u64) -> PyResult<Vec<(u64, u64)>> {
    let mode = match mode {
        "full" => GraphMode::Full,
        "reduced" => GraphMode::Reduced,
        other => return Err(ParseError::new_err(format!("unknown graph mode {other:?}"))),
    };
    let g = oracle::build_graph(&q.inner, q.elem(a)?, mode, cap).py()?;
    let mut edges = Vec::with_capacity(g.edge_count());
    for (i, row) in g.adjacency.iter().enumerate() {
        edges.extend(row.iter().filter(|&j| j > i).map(|j| (g.vertices[i], g.vertices[j])));
    }
    Ok(edges)
}

/// Formula against oracle on one instance.
#[pyfunction]
fn verify_instance<'py>(py: Python<'py>, q: &PyQForm, a: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let elem = q.elem(a)?;
    let r = py
        .detach(|| verify::verify_instance(&q.inner, elem, OracleOptions::default()))
        .py()?;
    to_py(py, &r)
}

#[pyfunction]
fn run_suite<'py>(py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyAny>> {
    let suite: verify::Suite = name.parse().py()?;
    let r = py.detach(|| verify::run_suite(suite, OracleOptions::default())).py()?;
    to_py(py, &r)
}

/// Clique number over Q with the blocking certificate.
#[pyfunction]
fn rational_omega<'py>(py: Python<'py>, q: &PyRationalForm, a: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &charzero::rational_omega(&q.inner, &rational(a)?).py()?)
}

/// Clique number over the completion at `place` (a prime or `"inf"`).
#[pyfunction]
fn local_omega(q: &PyRationalForm, a: &Bound<'_, PyAny>, place: &Bound<'_, PyAny>) -> PyResult<u64> {
    charzero::local_omega(&q.inner, &rational(a)?, parse_place(place)?).py()
}

#[pyfunction]
fn real_omega(plus: usize, minus: usize, a: &Bound<'_, PyAny>) -> PyResult<u64> {
    charzero::real_omega(charzero::Signature { plus, minus }, &rational(a)?).py()
}

/// Clique number of `n x <1>` over Q with `a = 1`.
#[pyfunction]
fn sos_fastpath(n: usize) -> PyResult<u64> {
    charzero::sos_fastpath(n).py()
}

/// Runs the command-line front end; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("qfclique".to_string()).chain(args);
    let code = cli::execute(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}

#[pymodule]
#[pyo3(name = "qfclique")]
fn qfclique_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyQForm>()?;
    m.add_class::<PyRationalForm>()?;
    for f in [
        wrap_pyfunction!(clique_number, m)?,
        wrap_pyfunction!(count_max_cliques, m)?,
        wrap_pyfunction!(construct_max_clique, m)?,
        wrap_pyfunction!(validate_clique, m)?,
        wrap_pyfunction!(brute_force, m)?,
        wrap_pyfunction!(graph_edges, m)?,
        wrap_pyfunction!(verify_instance, m)?,
        wrap_pyfunction!(run_suite, m)?,
        wrap_pyfunction!(rational_omega, m)?,
        wrap_pyfunction!(local_omega, m)?,
        wrap_pyfunction!(real_omega, m)?,
        wrap_pyfunction!(sos_fastpath, m)?,
        wrap_pyfunction!(run_cli, m)?,
    ] {
        m.add_function(f)?;
    }
    m.add("QfcliqueError", py.get_type::<QfcliqueError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("PreconditionError", py.get_type::<PreconditionError>())?;
    m.add("CapExceededError", py.get_type::<CapExceededError>())?;
    m.add("InternalError", py.get_type::<InternalError>())?;
    m.add("SUITES", PyList::new(py, verify::Suite::NAMES)?)?;
    Ok(())
}
