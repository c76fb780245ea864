"""Smoke test for the Python bindings. Run with `python python/smoke_test.py` or pytest."""

import json

import qfclique as qc


def test_worked_example():
    q = qc.QuadraticForm("gf:5", "diag:1,1,2")
    r = qc.clique_number(q, 1)
    assert (r["omega"], r["case"], r["k"], r["extra"]) == (5, "E", 3, True)
    c = qc.count_max_cliques(q, 1)
    assert (c["omega_max"], c["o_order"], c["iso_order"]) == (250, 240, 30000)
    clique = qc.construct_max_clique(q, 1)
    assert len(clique) == 5 and qc.validate_clique(q, 1, clique)
    assert qc.validate_clique(q, 1, [[0, 0, 0], [1, 0, 0], [3, 0, 1], [3, 3, 2], [3, 2, 2]])
    o = qc.brute_force(q, 1)
    assert (o["omega"], o["count"]) == (5, 250)
    assert qc.verify_instance(q, 1)["status"] == "match"


def test_forms():
    h = qc.QuadraticForm("gf:3", "upper:[[0,1],[0,0]]")
    assert h.dim == 2 and h.witt_index() == 1 and h.evaluate([1, 1]) == 1
    assert h.polar([1, 0], [0, 1]) == 1
    assert h.is_isometric(qc.QuadraticForm("gf:3", "diag:1,2"))
    assert h.invariants()["hyperbolic"] is True
    assert len(qc.graph_edges(qc.QuadraticForm("gf:3", "diag:1"), 1)) == 3


def test_rationals():
    q = qc.RationalForm([1, 2, 3, -7])
    r = qc.rational_omega(q, 1)
    assert (r["omega"], r["certificate"]["place"]) == (3, "3")
    assert q.signature() == (3, 1) and q.witt_index("inf") == 1
    assert qc.local_omega(q, 1, 3) == 3
    assert qc.real_omega(3, 1, "-1/2") == 2
    assert [qc.sos_fastpath(n) for n in (3, 4, 8)] == [2, 4, 9]
    assert qc.rational_omega(qc.RationalForm.sum_of_squares(8), 1)["omega"] == 9


def test_errors_and_cli():
    for call, exc in [
        (lambda: qc.QuadraticForm("gf:6", "diag:1"), qc.ParseError),
        (lambda: qc.clique_number(qc.QuadraticForm("gf:5", "diag:1,0"), 1), qc.PreconditionError),
        (lambda: qc.clique_number(qc.QuadraticForm("zmod:3^2", "diag:1,1"), 3), qc.PreconditionError),
        (lambda: qc.brute_force(qc.QuadraticForm("gf:5", "diag:1,1,1,1,1,1,1,1,1,1"), 1, cap=100), qc.CapExceededError),
    ]:
        try:
            call()
        except exc:
            pass
        else:
            raise AssertionError(f"expected {exc.__name__}")
    code, out, _ = qc.run_cli(["count", "--ring", "gf:5", "--form", "diag:1,1,2", "--format", "json"])
    assert code == 0 and json.loads(out)["result"]["omega_max"] == "250"
    assert qc.run_suite("sos")["mismatches"] == 0


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print("ok", name)
