"""A low-degree trigonometric bump around the origin of the torus.

The bump is ``p(x) = q(sum_i sin^2(pi x_i) / d)`` where ``q`` is a univariate
polynomial that is close to 1 near 0 and close to 0 beyond a threshold. ``q``
is an amplifying polynomial ``a_k`` composed with a base approximant ``r`` of
a piecewise-linear ramp. All polynomials are held in a Chebyshev basis on
their natural interval, which keeps degrees in the thousands well conditioned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, comb

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from scipy.stats import binom

from .fourier import l1_count
from .torus import DiracComb, coordinate_distances, torus_point

BASE_ERROR = 1.0 / 3.0
RANGE_SLACK = 1e-9
FIT_GRID = 4096
VERIFY_GRID = 16384


class BumpVerificationError(RuntimeError):
    pass


class UnivariatePoly:
    """Real polynomial on an interval, stored as a Chebyshev series.

    ``coefficients`` gives monomial coefficients in ascending degree, which is
    only numerically meaningful for modest degree; evaluation never uses it.
    """

    def __init__(self, cheb_coefficients, domain=(0.0, 1.0)):
        c = np.trim_zeros(np.asarray(cheb_coefficients, dtype=float), "b")
        if c.size == 0:
            c = np.zeros(1)
        self.series = Chebyshev(c, domain=list(domain))

    @classmethod
    def from_series(cls, series: Chebyshev) -> UnivariatePoly:
        return cls(series.coef, tuple(series.domain))

    @classmethod
    def from_monomial(cls, coefficients, domain=(0.0, 1.0)) -> UnivariatePoly:
        cheb = Polynomial(coefficients).convert(kind=Chebyshev, domain=list(domain))
        return cls.from_series(cheb)

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.series.domain[0]), float(self.series.domain[1])

    @property
    def degree(self) -> int:
        return len(self.series.coef) - 1

    @property
    def coefficients(self) -> np.ndarray:
        return np.trim_zeros(self.series.convert(kind=Polynomial, domain=[-1, 1],
                                                 window=[-1, 1]).coef, "b")

    def __call__(self, x):
        return self.series(x)

    def __repr__(self):
        return f"UnivariatePoly(degree={self.degree}, domain={self.domain})"


# amplification ---------------------------------------------------------------


def amplifier(k: int, t):
    """Probability that ``k`` coins of bias ``t`` show at least ``k/2`` heads."""
    if k < 1:
        raise ValueError("k must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > 1):
        raise ValueError("t must lie in [0, 1]")
    out = binom.sf(ceil(k / 2) - 1, k, t)
    return float(out) if out.ndim == 0 else out


def amplifier_poly(k: int) -> UnivariatePoly:
    """``a_k`` as an exact degree-``k`` Chebyshev series on [0, 1]."""
    series = Chebyshev.interpolate(lambda t: amplifier(k, np.clip(t, 0, 1)), k, domain=[0, 1])
    return UnivariatePoly.from_series(series)


def amplifier_monomial(k: int) -> np.ndarray:
    """Exact integer-arithmetic monomial coefficients of ``a_k`` (small ``k`` only)."""
    coeffs = [0] * (k + 1)
    for j in range(ceil(k / 2), k + 1):
        # C(k,j) t^j (1-t)^(k-j) = C(k,j) sum_i C(k-j,i) (-1)^i t^(j+i)
        for i in range(k - j + 1):
            coeffs[j + i] += comb(k, j) * comb(k - j, i) * (-1) ** i
    return np.array(coeffs, dtype=float)


def choose_k(tau: float, k_max: int = 10_000) -> int:
    """Smallest ``k`` with ``a_k(3/5) >= 1 - tau`` and ``a_k(2/5) <= tau``."""
    if not 0 < tau < 1:
        raise ValueError("tau must lie in (0, 1)")
    for k in range(1, k_max + 1):
        if amplifier(k, 0.6) >= 1 - tau - 1e-15 and amplifier(k, 0.4) <= tau + 1e-15:
            return k
    raise RuntimeError(f"no k <= {k_max} amplifies to tau={tau}")


# base approximant ------------------------------------------------------------


def ramp(x, ell: float):
    """1 on [0, ell], linear down to 0 on [ell, ell + 1], then 0."""
    return np.clip(ell + 1.0 - np.asarray(x, dtype=float), 0.0, 1.0)


def _cheb_grid(lo: float, hi: float, size: int) -> np.ndarray:
    theta = np.linspace(0.0, np.pi, size)
    return lo + (hi - lo) * (1.0 - np.cos(theta)) / 2.0


def ramp_grid(m: float, ell: float, size: int) -> np.ndarray:
    """Chebyshev-distributed points on [0, m] plus the two kinks of the ramp."""
    return np.unique(np.concatenate([_cheb_grid(0.0, m, size), [ell, ell + 1.0]]))


def _alternants(err: np.ndarray) -> np.ndarray:
    """Index of the largest |err| in every maximal run of constant sign."""
    sign = np.sign(err)
    nz = np.flatnonzero(sign)
    if nz.size == 0:
        return nz
    s = sign[nz]
    breaks = np.flatnonzero(np.diff(s)) + 1
    runs = np.split(nz, breaks)
    return np.array([r[np.argmax(np.abs(err[r]))] for r in runs])


def remez(grid: np.ndarray, target: np.ndarray, degree: int, domain,
          max_iter: int = 100, rtol: float = 1e-9) -> tuple[Chebyshev, float]:
    """Discrete minimax fit of ``target`` on ``grid`` by a degree-``degree`` polynomial.

    Multi-point exchange: each step solves the levelled system on a reference
    of ``degree + 2`` points, then takes the extreme error of every sign run
    as the next reference.
    """
    n = degree + 2
    if grid.size < n:
        raise ValueError("grid is too small for the requested degree")
    lo, hi = domain
    V = np.polynomial.chebyshev.chebvander((2 * grid - (lo + hi)) / (hi - lo), degree)
    ref = np.unique(np.searchsorted(grid, _cheb_grid(lo, hi, n)).clip(0, grid.size - 1))
    while ref.size < n:  # pad a degenerate start with unused grid points
        extra = np.setdiff1d(np.linspace(0, grid.size - 1, 2 * n).astype(int), ref)
        ref = np.unique(np.concatenate([ref, extra[: n - ref.size]]))
    alt = (-1.0) ** np.arange(n)
    best = (None, np.inf)
    for _ in range(max_iter):
        M = np.column_stack([V[ref], alt])
        sol = np.linalg.lstsq(M, target[ref], rcond=None)[0]
        c, level = sol[:-1], abs(sol[-1])
        err = V @ c - target
        worst = float(np.max(np.abs(err)))
        if worst < best[1]:
            best = (c, worst)
        if worst <= level * (1 + rtol) + 1e-15:
            break
        cand = _alternants(err)
        if cand.size >= n:
            gmax = int(np.argmax(np.abs(err)))
            cand = list(cand)
            while len(cand) > n:
                if abs(err[cand[0]]) < abs(err[cand[-1]]) and cand[0] != gmax:
                    cand.pop(0)
                elif cand[-1] != gmax:
                    cand.pop()
                else:
                    cand.pop(0)
            new_ref = np.array(cand)
        else:
            # single-point exchange: swap in the global maximiser, keep alternation
            gmax = int(np.argmax(np.abs(err)))
            pos = np.searchsorted(ref, gmax)
            new_ref = ref.copy()
            if pos < ref.size and ref[pos] == gmax:
                break
            signs = np.sign(err[ref])
            if pos == 0:
                if signs[0] == np.sign(err[gmax]):
                    new_ref[0] = gmax
                else:
                    new_ref = np.concatenate([[gmax], ref[:-1]])
            elif pos == ref.size:
                if signs[-1] == np.sign(err[gmax]):
                    new_ref[-1] = gmax
                else:
                    new_ref = np.concatenate([ref[1:], [gmax]])
            else:
                j = pos - 1 if signs[pos - 1] == np.sign(err[gmax]) else pos
                new_ref[j] = gmax
            new_ref = np.sort(new_ref)
        if np.array_equal(new_ref, ref):
            break
        ref = new_ref
    c, worst = best
    return Chebyshev(c, domain=[lo, hi]), worst


def _ramp_fit(m: float, ell: float, degree: int):
    grid = ramp_grid(m, ell, FIT_GRID)
    series, _ = remez(grid, ramp(grid, ell), degree, (0.0, m))
    vgrid = ramp_grid(m, ell, VERIFY_GRID)
    vgrid = np.unique(np.concatenate([vgrid, np.linspace(0, min(m, ell + 2), 4001)]))
    return series, float(np.max(np.abs(series(vgrid) - ramp(vgrid, ell)))), vgrid


def paturi_base(m: float, ell: float, degree_budget: int | None = None,
                max_degree: int = 4096, minimize: bool = False):
    """Remez fit of the ramp within 1/3, rescaled to ``r = 0.6 (p + 1/3)``.

    The fit starts at ``degree_budget`` (default ``ceil(sqrt(m * ell))``, the
    natural degree scale of the ramp) and doubles until the sup error on the
    verification grid is at most 1/3. With ``minimize=True`` the passing
    degree is then bisected down to the smallest one that still passes.

    Returns ``(r, achieved_error)`` where ``achieved_error`` is the sup error of
    ``p`` on the verification grid.
    """
    if not (m > 0 and 0 <= ell < m / 2):
        raise ValueError("need m > 0 and 0 <= ell < m/2")
    if degree_budget is None:
        degree_budget = max(1, ceil(np.sqrt(m * ell)))
    if degree_budget < 1:
        raise ValueError("degree_budget must be at least 1")

    def passes(deg):
        series, err, vgrid = _ramp_fit(m, ell, deg)
        return err <= BASE_ERROR, series, err, vgrid

    lo, hi = 0, degree_budget
    ok, *fit = passes(hi)
    best_err = fit[1]
    while not ok:
        lo = hi
        hi *= 2
        if hi > max_degree:
            raise BumpVerificationError(
                f"ramp fit needs degree above {max_degree}; best error {best_err:.4f}")
        ok, *fit = passes(hi)
        best_err = min(best_err, fit[1])
    while minimize and hi - lo > 1:
        mid = (lo + hi) // 2
        ok_mid, *fit_mid = passes(mid)
        if ok_mid:
            hi, fit = mid, fit_mid
        else:
            lo = mid
    series, err, vgrid = fit
    r = UnivariatePoly.from_series(0.6 * (series + 1.0 / 3.0))
    rv = r(vgrid)
    if rv.min() < -RANGE_SLACK or rv.max() > 1 + RANGE_SLACK:
        raise BumpVerificationError("base approximant leaves [0, 1] on the verification grid")
    return r, err


# composition -----------------------------------------------------------------


def compose(outer: UnivariatePoly, inner: UnivariatePoly) -> UnivariatePoly:
    """``outer(inner(x))`` by Clenshaw's recurrence on Chebyshev series.

    ``outer`` lives on its own domain; ``inner`` is mapped into that domain's
    window ``[-1, 1]`` before the recurrence.
    """
    lo, hi = outer.domain
    s = (2.0 * inner.series - (lo + hi)) / (hi - lo)
    c = outer.series.coef
    zero = Chebyshev([0.0], domain=inner.series.domain)
    b1, b2 = zero, zero
    for ck in c[:0:-1]:
        b1, b2 = 2.0 * s * b1 - b2 + ck, b1
    return UnivariatePoly.from_series(s * b1 - b2 + c[0])


# the bump --------------------------------------------------------------------


def regime_for_tau(tau: float, eps_dist: float) -> str:
    if not 0 <= tau <= eps_dist:
        raise ValueError("tau must lie in [0, eps_dist]")
    return "near" if tau >= 0.6 * eps_dist else "far"


def regime_constants(eps_dist: float, regime: str) -> tuple[float, float]:
    """``(A, b)`` for the two radius regimes."""
    if regime == "near":
        return (np.pi * eps_dist) ** 2, (3.2**2 - np.pi**2) * eps_dist**2
    if regime == "far":
        return (0.6 * np.pi * eps_dist) ** 2, (4.0 - (0.6 * np.pi) ** 2) * eps_dist**2
    raise ValueError("regime must be 'near' or 'far'")


@dataclass
class BumpPolynomial:
    q: UnivariatePoly
    d: int
    eps: float
    eps_dist: float
    A: float
    b: float
    regime: str
    k: int
    r: UnivariatePoly
    remez_error: float
    checks: dict = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return self.q.degree

    @property
    def trig_degree(self) -> int:
        return 2 * self.q.degree

    @property
    def inner_radius(self) -> float:
        return float(np.sqrt(self.A) / np.pi)

    @property
    def outer_radius(self) -> float:
        return float(np.sqrt(self.A + self.b) / 2)

    def summary(self) -> dict:
        return {
            "d": self.d,
            "eps": self.eps,
            "eps_dist": self.eps_dist,
            "regime": self.regime,
            "A": self.A,
            "b": self.b,
            "k": self.k,
            "deg_r": self.r.degree,
            "deg_q": self.degree,
            "trig_degree": self.trig_degree,
            "remez_error": self.remez_error,
            "checks": self.checks,
        }


def check_q(q: UnivariatePoly, eps: float, A: float, b: float, d: int,
            size: int = FIT_GRID) -> dict:
    """Grid check of the three univariate properties; returns worst values."""
    near_hi, far_lo = A / d, (A + b) / d
    x = np.unique(np.concatenate([
        np.linspace(0.0, 1.0, size),
        np.linspace(0.0, near_hi, size // 4),
        np.linspace(far_lo, min(1.0, far_lo + 4 * b / d), size // 4),
        [near_hi, far_lo],
    ]))
    v = q(x)
    near = v[x <= near_hi]
    far = v[x >= far_lo]
    return {
        "range": {"min": float(v.min()), "max": float(v.max()),
                  "ok": bool(v.min() >= -RANGE_SLACK and v.max() <= 1 + RANGE_SLACK)},
        "near": {"min": float(near.min()), "bound": 1 - eps / 2,
                 "ok": bool(near.min() >= 1 - eps / 2)},
        "far": {"max": float(far.max()), "bound": eps / 8,
                "ok": bool(far.max() <= eps / 8)},
    }


def build_q(eps: float, eps_dist: float, d: int, regime: str = "far",
            degree_budget: int | None = None, verify: bool = True,
            minimize: bool = False) -> BumpPolynomial:
    """Build ``q = a_k(r)`` for the given regime.

    The ramp lives on ``y = x d / b``: then ``[0, A/d]`` maps to ``[0, A/b]``
    and ``[(A+b)/d, 1]`` to ``[A/b + 1, d/b]``, so the ramp parameters are
    ``m = d / b`` and ``ell = A / b``.
    """
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    if not 0 < eps_dist < 1:
        raise ValueError("eps_dist must lie in (0, 1)")
    A, b = regime_constants(eps_dist, regime)
    m, ell = d / b, A / b
    if not ell < m / 2:
        raise ValueError(f"d={d} is too small for this regime (need A < d/2)")
    k = choose_k(eps / 8)
    r_y, err = paturi_base(m, ell, degree_budget, minimize=minimize)
    r = UnivariatePoly(r_y.series.coef, (0.0, 1.0))  # y = m x is affine
    q = compose(amplifier_poly(k), r)
    bump = BumpPolynomial(q, d, eps, eps_dist, A, b, regime, k, r, err)
    if verify:
        bump.checks = check_q(q, eps, A, b, d)
        failed = [name for name, c in bump.checks.items() if not c["ok"]]
        if failed:
            raise BumpVerificationError(f"q fails {failed}: {bump.checks}")
    return bump


def sin2_mean(x) -> np.ndarray:
    """``sum_i sin^2(pi x_i) / d`` for a point or each row of an array."""
    x = np.asarray(x, dtype=float)
    return np.mean(np.sin(np.pi * x) ** 2, axis=-1)


def eval_bump(B: BumpPolynomial, x, report: bool = False):
    """``p(x)`` at a point or each row of an (m, d) array.

    With ``report=True`` also returns whether every value lies in
    ``[-1e-9, 1 + 1e-9]``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != B.d:
        raise ValueError("dimension mismatch")
    v = B.q(sin2_mean(x))
    out = float(v) if np.ndim(v) == 0 else v
    if report:
        return out, bool(np.all((v >= -RANGE_SLACK) & (v <= 1 + RANGE_SLACK)))
    return out


def expectation_under_comb(B: BumpPolynomial, D: DiracComb, center=None) -> float:
    """``E_{x ~ D}[p(x - center)]`` for a distribution ``D``."""
    if D.dim != B.d:
        raise ValueError("dimension mismatch")
    if np.any(D.weights < 0):
        raise ValueError("expectation needs a nonnegative comb")
    pts = D.points if center is None else D.points - torus_point(center)
    return float(np.dot(D.weights, eval_bump(B, pts)))


def hh_certificate_gap(B: BumpPolynomial, D1: DiracComb, D2: DiracComb, kappa: float,
                       degree_T: int, center=None) -> dict:
    """Compare ``E_D1[p] - E_D2[p]`` with what matched coefficients would allow.

    If every coefficient with ``||l||_1 <= degree_T`` agrees within ``kappa``
    then ``|E_D1[p] - E_D2[p]| <= kappa * N`` where ``N`` counts those indices
    (each coefficient of ``p`` has modulus at most 1). A larger gap therefore
    witnesses a coefficient discrepancy above ``kappa``. A heavy-hitter
    violation of size ``eps`` centred at ``center`` forces a gap of at least
    ``eps/4 - eps/8``.
    """
    if degree_T < B.trig_degree:
        raise ValueError(f"degree_T={degree_T} is below the bump's degree {B.trig_degree}")
    e1 = expectation_under_comb(B, D1, center)
    e2 = expectation_under_comb(B, D2, center)
    count = l1_count(B.d, degree_T)
    bound = kappa * float(count)
    gap = e1 - e2
    return {
        "e1": e1,
        "e2": e2,
        "gap": gap,
        "index_count": count,
        "kappa": kappa,
        "kappa_times_count": bound,
        "hh_gap_threshold": B.eps / 4 - B.eps / 8,
        "fourier_separation_witnessed": bool(abs(gap) > bound),
    }


# numeric verification of the multivariate bump -------------------------------


def _ball_points(rng, d: int, radius: float, size: int) -> np.ndarray:
    g = rng.standard_normal((size, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    rad = radius * rng.uniform(size=(size, 1)) ** (1.0 / d)
    return g * rad


def _dist0(x: np.ndarray) -> np.ndarray:
    c = coordinate_distances(x, np.zeros(x.shape[-1]))
    return np.sqrt(np.sum(c * c, axis=-1))


def _far_points(rng, d: int, radius: float, size: int) -> np.ndarray:
    out = []
    while sum(len(o) for o in out) < size:
        x = rng.uniform(size=(4 * size, d))
        out.append(x[_dist0(x) >= radius])
    return np.vstack(out)[:size]


def _sphere_points(rng, d: int, radius: float, size: int) -> np.ndarray:
    """Points with ``d_tor(x, 0) == radius`` (up to rounding), per-axis offsets below 1/2."""
    out = []
    tries = 0
    while sum(len(o) for o in out) < size and tries < 50:
        g = rng.standard_normal((4 * size, d))
        g = radius * g / np.linalg.norm(g, axis=1, keepdims=True)
        out.append(g[np.all(np.abs(g) <= 0.5, axis=1)])
        tries += 1
    pts = np.vstack(out)[:size] if out else np.zeros((0, d))
    if radius <= 0.5:
        axes = np.zeros((2 * d, d))
        axes[np.arange(d), np.arange(d)] = radius
        axes[d + np.arange(d), np.arange(d)] = -radius
        pts = np.vstack([pts, axes])
    return np.mod(pts, 1.0)


def verify_bump(B: BumpPolynomial, n_points: int = 10_000, seed: int = 0) -> dict:
    """Random-point check of range, near-ball lower bound and far tail of ``p``."""
    rng = np.random.Generator(np.random.Philox(seed))
    d = B.d
    tor = rng.uniform(size=(n_points, d))
    v_all = eval_bump(B, tor)
    near = np.mod(_ball_points(rng, d, B.inner_radius, n_points), 1.0)
    near = np.vstack([near, _sphere_points(rng, d, B.inner_radius, 256)])
    near = near[_dist0(near) <= B.inner_radius]
    v_near = eval_bump(B, near)
    far = np.vstack([_far_points(rng, d, B.outer_radius, n_points),
                     _sphere_points(rng, d, B.outer_radius * (1 + 1e-12), 256)])
    far = far[_dist0(far) >= B.outer_radius]
    v_far = eval_bump(B, far)
    return {
        "range": {"points": len(tor), "min": float(v_all.min()), "max": float(v_all.max()),
                  "ok": bool(v_all.min() >= -RANGE_SLACK and v_all.max() <= 1 + RANGE_SLACK)},
        "near": {"points": len(near), "radius": B.inner_radius, "min": float(v_near.min()),
                 "ok": bool(v_near.min() >= 1 - B.eps / 2)},
        "far": {"points": len(far), "radius": B.outer_radius, "max": float(v_far.max()),
                "ok": bool(v_far.max() <= B.eps / 8)},
    }


def sandwich_check(d: int, gamma: float, n_points: int = 10_000, seed: int = 0) -> dict:
    """For points at distance at least ``gamma`` from 0: ``4 gamma^2/d <= sin2_mean <= 1``."""
    rng = np.random.Generator(np.random.Philox(seed))
    x = np.vstack([_far_points(rng, d, gamma, n_points), _sphere_points(rng, d, gamma, 256)])
    x = x[_dist0(x) >= gamma]
    s = sin2_mean(x)
    lower = 4 * gamma**2 / d
    return {"points": len(x), "min": float(s.min()), "max": float(s.max()), "lower": lower,
            "ok": bool(s.min() >= lower * (1 - 1e-12) and s.max() <= 1.0)}


def degree_trend(eps: float, eps_dist: float, dims=(4, 16, 64), regime: str = "far",
                 minimize: bool = False) -> dict:
    """Degrees of ``q`` across dimensions, with successive growth ratios."""
    degs = {d: build_q(eps, eps_dist, d, regime, minimize=minimize).degree for d in dims}
    ds = list(dims)
    ratios = [degs[b] / degs[a] for a, b in zip(ds, ds[1:])]
    return {"degrees": degs, "ratios": ratios}
