import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from torus_superres import lp


def test_simple_max():
    prog = lp.LinearProgram(1)
    prog.set_objective([1.0], "max")
    prog.add_constraint([1.0], "<=", 3.0)
    sol = lp.solve(prog)
    assert sol.status == "optimal" and sol.objective_value == pytest.approx(3.0)


def test_feasibility_only():
    prog = lp.LinearProgram(2)
    prog.add_constraint([1.0, 1.0], "=", 1.0)
    sol = lp.solve(prog)
    assert sol.status in ("optimal", "feasible")
    assert sol.assignment.sum() == pytest.approx(1.0)


def test_infeasible():
    prog = lp.LinearProgram(1)
    prog.add_constraint([1.0], ">=", 2.0)
    prog.add_constraint([1.0], "<=", 1.0)
    assert lp.solve(prog).status == "infeasible"


def test_unbounded_raises():
    prog = lp.LinearProgram(1)
    prog.set_objective([1.0], "max")
    with pytest.raises(lp.LPError):
        lp.solve(prog)


def test_two_point_transport():
    # masses (0.5, 0.5) at 0, 0.5 moved to (0.7, 0.3) at 0.1, 0.6: two candidate plans
    cost = np.array([[0.1, 0.4], [0.4, 0.1]])
    a, b = np.array([0.5, 0.5]), np.array([0.7, 0.3])
    prog = lp.LinearProgram(4)
    prog.set_objective(cost.ravel(), "min")
    prog.add_constraints(sp.kron(sp.eye(2), np.ones((1, 2))), "=", a)
    prog.add_constraints(sp.kron(np.ones((1, 2)), sp.eye(2)), "=", b)
    sol = lp.solve(prog)
    hand = 0.5 * 0.1 + 0.2 * 0.4 + 0.3 * 0.1
    assert sol.objective_value == pytest.approx(hand)


def test_bounds_and_free_variables():
    prog = lp.LinearProgram(2, lower=[-np.inf, -1.0], upper=[np.inf, 2.0])
    prog.set_objective([1.0, 1.0], "min")
    prog.add_constraint([1.0, 0.0], ">=", -5.0)
    sol = lp.solve(prog)
    assert sol.assignment == pytest.approx([-5.0, -1.0])


@given(st.integers(0, 10_000))
def test_strong_duality(seed):
    rng = np.random.default_rng(seed)
    m, n = 4, 6
    A = rng.uniform(0.1, 1.0, size=(m, n))
    b = rng.uniform(1.0, 2.0, size=m)
    c = rng.uniform(0.1, 1.0, size=n)
    primal = lp.LinearProgram(n)
    primal.set_objective(c, "max")
    primal.add_constraints(A, "<=", b)
    dual = lp.LinearProgram(m)
    dual.set_objective(b, "min")
    dual.add_constraints(A.T, ">=", c)
    p, d = lp.solve(primal), lp.solve(dual)
    assert p.objective_value == pytest.approx(d.objective_value, rel=1e-8, abs=1e-9)
    assert np.all(A @ p.assignment <= b + 1e-9)


def test_lp_text_export():
    prog = lp.LinearProgram(2)
    prog.set_objective([1.0, 2.0], "max")
    prog.add_constraint([1.0, 1.0], "<=", 4.0)
    text = prog.to_text()
    assert "Maximize" in text and "x1" in text and "<= 4" in text
