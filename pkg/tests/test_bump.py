from math import ceil, comb

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import Chebyshev

from torus_superres import lp
from torus_superres.bump import (
    UnivariatePoly,
    amplifier,
    amplifier_monomial,
    amplifier_poly,
    build_q,
    check_q,
    choose_k,
    compose,
    eval_bump,
    expectation_under_comb,
    hh_certificate_gap,
    paturi_base,
    ramp,
    ramp_grid,
    regime_constants,
    regime_for_tau,
    remez,
    sandwich_check,
    sin2_mean,
    verify_bump,
)
from torus_superres.torus import DiracComb, point_mass


def amp_sum(k, t):
    return sum(comb(k, j) * t**j * (1 - t) ** (k - j) for j in range(ceil(k / 2), k + 1))


@pytest.fixture(scope="module")
def bump16():
    return build_q(0.25, 0.49, 16, "far")


def test_amplifier_values():
    assert amplifier(1, 0.3) == pytest.approx(0.3)
    assert amplifier(2, 0.5) == pytest.approx(0.75)
    for k in (1, 2, 7, 40):
        assert amplifier(k, 0.0) == 0.0 and amplifier(k, 1.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        amplifier(3, 1.5)


@given(st.integers(1, 60), st.floats(0, 1))
def test_amplifier_matches_binomial_sum(k, t):
    assert amplifier(k, t) == pytest.approx(amp_sum(k, t), abs=1e-12)


@pytest.mark.parametrize("k", [1, 4, 9, 15])
def test_amplifier_representations_agree(k):
    t = np.linspace(0, 1, 33)
    mono = np.polynomial.polynomial.polyval(t, amplifier_monomial(k))
    assert np.allclose(mono, amplifier(k, t), atol=1e-10)
    assert np.allclose(amplifier_poly(k)(t), amplifier(k, t), atol=1e-12)


def test_choose_k():
    assert choose_k(0.4) == 1
    ks = [choose_k(t) for t in (0.3, 0.2, 0.1, 0.05, 1 / 32, 0.01)]
    assert ks == sorted(ks)
    for tau in (0.3, 0.1, 1 / 32):
        k = choose_k(tau)
        assert amp_sum(k, 0.6) >= 1 - tau - 1e-12 and amp_sum(k, 0.4) <= tau + 1e-12
        if k > 1:
            j = k - 1
            assert amp_sum(j, 0.6) < 1 - tau or amp_sum(j, 0.4) > tau


def test_ramp():
    assert ramp(0, 0.5) == 1 and ramp(0.5, 0.5) == 1
    assert ramp(1.5, 0.5) == 0 and ramp(2, 0.5) == 0
    assert ramp(1.0, 0.5) == pytest.approx(0.5)


def _lp_minimax(grid, target, degree, domain):
    """Discrete minimax by linear programming, an independent route to the optimum."""
    lo, hi = domain
    V = np.polynomial.chebyshev.chebvander((2 * grid - (lo + hi)) / (hi - lo), degree)
    nc = degree + 1
    prog = lp.LinearProgram(nc + 1, lower=np.r_[np.full(nc, -np.inf), 0.0])
    prog.set_objective(np.r_[np.zeros(nc), 1.0], "min")
    ones = np.ones((len(grid), 1))
    prog.add_constraints(np.hstack([V, -ones]), "<=", target)
    prog.add_constraints(np.hstack([-V, -ones]), "<=", -target)
    return lp.solve(prog).objective_value


@pytest.mark.parametrize("m,ell,degree", [(2.0, 0.5, 5), (6.0, 1.0, 8), (12.0, 3.0, 10)])
def test_remez_matches_lp_minimax(m, ell, degree):
    grid = ramp_grid(m, ell, 400)
    target = ramp(grid, ell)
    _, err = remez(grid, target, degree, (0.0, m))
    opt = _lp_minimax(grid, target, degree, (0.0, m))
    assert opt - 1e-9 <= err <= opt * (1 + 1e-6) + 1e-9


@given(st.integers(2, 12), st.integers(0, 10**6))
def test_remez_beats_interpolation(degree, seed):
    rng = np.random.default_rng(seed)
    grid = np.sort(rng.uniform(-1, 1, 300))
    target = np.abs(grid - rng.uniform(-0.5, 0.5))
    _, err = remez(grid, target, degree, (-1.0, 1.0))
    interp = Chebyshev.fit(grid, target, degree, domain=[-1, 1])
    assert err <= np.max(np.abs(interp(grid) - target)) + 1e-12


def test_paturi_base_small():
    r, err = paturi_base(2.0, 0.5)
    assert err <= 1 / 3
    x = np.linspace(0, 2.0, 5001)
    p = r(x) / 0.6 - 1 / 3
    assert np.max(np.abs(p - ramp(x, 0.5))) <= 1 / 3 + 1e-6
    assert r(x).min() >= -1e-9 and r(x).max() <= 1 + 1e-9
    with pytest.raises(ValueError):
        paturi_base(2.0, 1.0)


def test_minimized_degree_is_not_larger():
    r1, _ = paturi_base(10.0, 3.0)
    r2, err = paturi_base(10.0, 3.0, minimize=True)
    assert r2.degree <= r1.degree and err <= 1 / 3


def test_compose_matches_pointwise():
    inner = UnivariatePoly.from_monomial([0.1, 0.5, 0.3])
    outer = amplifier_poly(7)
    q = compose(outer, inner)
    x = np.linspace(0, 1, 101)
    assert np.allclose(q(x), amplifier(7, inner(x)), atol=1e-13)
    assert q.degree == 14


def test_monomial_view():
    u = UnivariatePoly.from_monomial([1.0, -2.0, 0.5])
    assert np.allclose(u.coefficients, [1.0, -2.0, 0.5])
    assert u(2.0) == pytest.approx(1 - 4 + 2)


def test_regimes():
    assert regime_for_tau(0.4, 0.49) == "near"
    assert regime_for_tau(0.1, 0.49) == "far"
    for regime in ("near", "far"):
        A, b = regime_constants(0.49, regime)
        assert 0 < b < A


def test_q_properties(bump16):
    B = bump16
    assert B.q(0.0) >= 1 - B.eps / 2
    assert B.q(1.0) <= B.eps / 8
    assert all(c["ok"] for c in B.checks.values())
    assert B.trig_degree == 2 * B.degree
    assert B.k == 85 and B.remez_error <= 1 / 3
    x = np.linspace(0, 1, 20001)
    assert np.allclose(B.q(x), amplifier(B.k, np.clip(B.r(x), 0, 1)), atol=1e-10)


def test_near_regime_builds():
    B = build_q(0.25, 0.49, 16, "near")
    assert all(c["ok"] for c in check_q(B.q, B.eps, B.A, B.b, B.d).values())
    assert B.inner_radius == pytest.approx(0.49)


def test_too_small_dimension():
    with pytest.raises(ValueError):
        build_q(0.25, 0.49, 1, "far")


def test_eval_bump(bump16):
    B = bump16
    d = B.d
    v0 = eval_bump(B, np.zeros(d))
    assert 1 - B.eps / 2 <= v0 <= 1
    assert eval_bump(B, np.full(d, 0.5)) <= B.eps / 8
    far = np.zeros(d)
    far[:4] = 0.5
    assert eval_bump(B, far) <= B.eps / 8
    val, ok = eval_bump(B, np.random.default_rng(0).uniform(size=(100, d)), report=True)
    assert ok and val.shape == (100,)
    assert sin2_mean(np.full(d, 0.5)) == pytest.approx(1.0)


def test_expectation(bump16):
    B = bump16
    d = B.d
    assert expectation_under_comb(B, point_mass(np.zeros(d))) == pytest.approx(eval_bump(B, np.zeros(d)))
    a, b = np.full(d, 0.5), np.r_[np.full(8, 0.5), np.zeros(d - 8)]
    two = DiracComb(np.vstack([a, b]), [0.5, 0.5])
    assert expectation_under_comb(B, two) == pytest.approx((eval_bump(B, a) + eval_bump(B, b)) / 2)
    rng = np.random.default_rng(1)
    D = DiracComb(rng.uniform(size=(30, d)), rng.dirichlet(np.ones(30)))
    assert -1e-9 <= expectation_under_comb(B, D) <= 1 + 1e-9
    with pytest.raises(ValueError):
        expectation_under_comb(B, DiracComb(np.vstack([a, b]), [0.5, -0.5]))


def test_certificate_gap(bump16):
    B = bump16
    d, eps = B.d, B.eps
    D = point_mass(np.zeros(d))
    same = hh_certificate_gap(B, D, D, 1e-9, B.trig_degree)
    assert same["gap"] == 0 and not same["fourier_separation_witnessed"]
    far = np.full(d, 0.5)
    moved = DiracComb(np.vstack([np.zeros(d), far]), [1 - eps, eps])
    count = hh_certificate_gap(B, D, D, 1.0, B.trig_degree)["index_count"]
    rep = hh_certificate_gap(B, D, moved, 1e-3 / float(count), B.trig_degree)
    assert rep["gap"] >= (1 - eps / 2) * eps - eps / 8
    assert rep["fourier_separation_witnessed"]
    loose = hh_certificate_gap(B, D, moved, 1.0, B.trig_degree)
    assert not loose["fourier_separation_witnessed"]
    with pytest.raises(ValueError):
        hh_certificate_gap(B, D, D, 0.1, B.trig_degree - 1)


def test_multivariate_verification(bump16):
    v = verify_bump(bump16, n_points=2000, seed=3)
    assert all(c["ok"] for c in v.values())
    s = sandwich_check(16, bump16.outer_radius, n_points=2000)
    assert s["ok"]
