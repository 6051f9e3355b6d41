"""Mixtures of product distributions on {-1, 1}^d and their embedding in the torus.

Two mixtures with weights taken from the positive and negative parts of a
polynomial with a high-order root at 1 share almost all low-level Walsh
coefficients but place visibly different mass on the all-ones string.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, comb, e, log, sqrt
from typing import NamedTuple

import numpy as np

from . import lp
from .torus import DiracComb

TABULATION_CAP = 20
BEK_GRID = 2**14


# extremal polynomial ---------------------------------------------------------


@dataclass
class ErdelyiPoly:
    """``A(x) = (1 - x)^k B(x)`` with a large constant term for its coefficient mass."""

    coefficients: np.ndarray
    k: int
    B_coefficients: np.ndarray

    @property
    def d(self) -> int:
        return len(self.coefficients) - 1

    @property
    def a0(self) -> float:
        return float(self.coefficients[0])

    @property
    def ratio(self) -> float:
        """``|a_0| / sum_{j >= 1} |a_j|``."""
        return abs(self.a0) / float(np.sum(np.abs(self.coefficients[1:])))

    def __call__(self, x):
        """Evaluate through the factored form, stable near ``x = 1``."""
        x = np.asarray(x, dtype=float)
        return (1.0 - x) ** self.k * np.polynomial.polynomial.polyval(x, self.B_coefficients)

    def to_dict(self) -> dict:
        return {"coefficients": self.coefficients.tolist(), "k": self.k,
                "B_coefficients": self.B_coefficients.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> ErdelyiPoly:
        return cls(np.asarray(data["coefficients"], dtype=float), int(data["k"]),
                   np.asarray(data["B_coefficients"], dtype=float))


def _root_factor(k: int) -> np.ndarray:
    """Coefficients of ``(1 - x)^k``, ascending."""
    return np.array([comb(k, i) * (-1) ** i for i in range(k + 1)], dtype=float)


def erdelyi_poly(d: int, k: int, tol: float = 1e-10) -> ErdelyiPoly:
    """Maximise ``a_0`` over ``A = (1 - x)^k B`` with ``deg A <= d`` and ``sum |a_j| <= 2``.

    Variables are the ``d - k + 1`` coefficients of ``B`` and one magnitude
    bound ``t_j >= |a_j|`` per coefficient of ``A``. The optimum is rescaled
    so that ``sum |a_j| = 2`` exactly.
    """
    if not 1 <= k <= d:
        raise ValueError("need 1 <= k <= d")
    nb = d - k + 1
    # a = C b with C the banded convolution matrix of (1 - x)^k
    C = np.zeros((d + 1, nb))
    f = _root_factor(k)
    for j in range(nb):
        C[j:j + k + 1, j] = f
    nv = nb + d + 1
    prog = lp.LinearProgram(nv, lower=np.r_[np.full(nb, -np.inf), np.zeros(d + 1)])
    c = np.zeros(nv)
    c[0] = 1.0  # a_0 = b_0
    prog.set_objective(c, "max")
    eye = np.eye(d + 1)
    prog.add_constraints(np.hstack([C, -eye]), "<=", 0.0)
    prog.add_constraints(np.hstack([-C, -eye]), "<=", 0.0)
    prog.add_constraint(np.r_[np.zeros(nb), np.ones(d + 1)], "<=", 2.0)
    sol = lp.solve(prog, tol)
    if sol.status == "infeasible":
        raise lp.LPError("extremal-polynomial program reported infeasible")
    b = sol.assignment[:nb]
    a = C @ b
    scale = 2.0 / np.sum(np.abs(a))
    return ErdelyiPoly(a * scale, k, b * scale)


class BEKCheck(NamedTuple):
    sup: float
    bound: float
    interval_lo: float
    holds: bool


def bek_bound(d: int, k: int) -> float:
    return (d + 1) * (e / 9) ** k


def bek_supnorm_check(P: ErdelyiPoly, interval_lo: float | None = None) -> BEKCheck:
    """Sup of ``|A(x)| / 2`` over ``[interval_lo, 1]`` on a 2^14-point grid.

    ``interval_lo`` defaults to ``1 - k/(9d)``, where the bound
    ``(d + 1)(e/9)^k`` applies.
    """
    if interval_lo is None:
        interval_lo = 1.0 - P.k / (9.0 * P.d)
    if not 0 < interval_lo < 1:
        raise ValueError("interval_lo must lie in (0, 1)")
    x = np.linspace(interval_lo, 1.0, BEK_GRID)
    sup = float(np.max(np.abs(P(x))) / 2.0)
    bound = bek_bound(P.d, P.k)
    return BEKCheck(sup, bound, float(interval_lo), sup <= bound)


# mixtures of product distributions -------------------------------------------


@dataclass
class CubeMixture:
    """Mixture of ``Prod_{t_j}`` with weights ``p_j``, where ``E[x_i] = exp(-t)`` under ``Prod_t``."""

    d: int
    weights: np.ndarray
    rates: np.ndarray
    gamma: float

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.rates = np.asarray(self.rates, dtype=float)
        if self.weights.shape != self.rates.shape:
            raise ValueError("weights and rates differ in length")
        if np.any(self.weights < 0) or abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must form a distribution")
        if np.any(self.rates < 0):
            raise ValueError("rates must be nonnegative")

    @classmethod
    def with_gamma(cls, d: int, weights, gamma: float) -> CubeMixture:
        weights = np.asarray(weights, dtype=float)
        return cls(d, weights, np.arange(weights.size) * gamma, gamma)

    def to_dict(self) -> dict:
        return {"d": self.d, "weights": self.weights.tolist(),
                "rates": self.rates.tolist(), "gamma": self.gamma}

    @classmethod
    def from_dict(cls, data: dict) -> CubeMixture:
        return cls(int(data["d"]), data["weights"], data["rates"], float(data["gamma"]))


def mix_fourier_level(m: CubeMixture, s: int) -> float:
    """Walsh coefficient ``hat P(S)`` for any ``|S| = s``: ``2^-d sum_j p_j exp(-t_j s)``."""
    if not 0 <= s <= m.d:
        raise ValueError("s must lie in [0, d]")
    return float(2.0 ** (-m.d) * np.dot(m.weights, np.exp(-m.rates * s)))


def mix_mass_allones(m: CubeMixture) -> float:
    """Probability of the all-ones string: ``2^-d sum_j p_j (1 + exp(-t_j))^d``."""
    return float(np.dot(m.weights, ((1.0 + np.exp(-m.rates)) / 2.0) ** m.d))


def _popcount(idx: np.ndarray) -> np.ndarray:
    return np.array([bin(int(i)).count("1") for i in idx], dtype=np.int64)


def tabulate_mixture(m: CubeMixture, cap: int = TABULATION_CAP) -> np.ndarray:
    """Probability of every string, indexed so bit ``i`` set means ``x_i = -1``."""
    if m.d > cap:
        raise OverflowError(f"tabulating 2^{m.d} strings exceeds the cap 2^{cap}")
    neg = _popcount(np.arange(2**m.d))
    mu = np.exp(-m.rates)[:, None]
    probs = ((1 + mu) / 2) ** (m.d - neg)[None, :] * ((1 - mu) / 2) ** neg[None, :]
    return m.weights @ probs


def fwht(values) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform, ``out[S] = sum_x v[x] (-1)^{|x & S|}``."""
    a = np.array(values, dtype=float)
    n = a.size
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < n:
        a = a.reshape(-1, 2, h)
        a = np.stack([a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]], axis=1).reshape(n)
        h *= 2
    return a


def walsh_coefficients(table: np.ndarray) -> np.ndarray:
    """``hat P(S) = 2^-d sum_x P(x) chi_S(x)``, indexed by the bitmask of ``S``."""
    return fwht(table) / table.size


@dataclass
class CubePair:
    mu: CubeMixture
    nu: CubeMixture
    poly: ErdelyiPoly
    eps: float

    def __iter__(self):
        return iter((self.mu, self.nu))

    @property
    def d(self) -> int:
        return self.mu.d

    @property
    def mass_gap(self) -> float:
        return mix_mass_allones(self.mu) - mix_mass_allones(self.nu)

    def level_gaps(self, s_max: int | None = None) -> np.ndarray:
        """``2^d |hat P_1(S) - hat P_2(S)|`` for ``|S| = 0 .. s_max``."""
        s_max = self.d if s_max is None else s_max
        return np.array([2.0**self.d * abs(mix_fourier_level(self.mu, s) - mix_fourier_level(self.nu, s))
                         for s in range(s_max + 1)])

    def to_dict(self) -> dict:
        return {"mu": self.mu.to_dict(), "nu": self.nu.to_dict(),
                "poly": self.poly.to_dict(), "eps": self.eps}

    @classmethod
    def from_dict(cls, data: dict) -> CubePair:
        return cls(CubeMixture.from_dict(data["mu"]), CubeMixture.from_dict(data["nu"]),
                   ErdelyiPoly.from_dict(data["poly"]), float(data["eps"]))


def default_k(d: int, eps: float) -> int:
    return min(d, ceil((2.0 / 7.0) * sqrt(d * log(1.0 / (10 * eps)))))


def default_gamma(d: int, eps: float) -> float:
    """``8 ln(1/eps) / d`` (natural log)."""
    return 8.0 * log(1.0 / eps) / d


def default_s_max(d: int, eps: float, c: float = 1.0) -> int:
    return int(np.floor(c * sqrt(d / log(1.0 / eps))))


def in_construction_range(d: int, eps: float) -> bool:
    return 2.0 ** (-d / 3.0) < eps < 1.0 / 170.0


def cube_mixture_pair(d: int, eps: float, k: int | None = None,
                      enforce_range: bool = True) -> CubePair:
    """Mixtures whose weights are the positive and negative parts of ``erdelyi_poly(d, k)``."""
    if enforce_range and not in_construction_range(d, eps):
        raise ValueError(f"need 2^(-d/3) < eps < 1/170 (d={d}, eps={eps})")
    if not 0 < eps < 0.1:
        raise ValueError("eps must lie in (0, 1/10)")
    k = default_k(d, eps) if k is None else int(k)
    poly = erdelyi_poly(d, k)
    a = poly.coefficients
    if abs(a[0]) < 3 * eps:
        raise ValueError(f"|a_0| = {abs(a[0]):.6g} is below 3 eps = {3 * eps:.6g} at k={k}")
    mu = np.where(a >= 0, a, 0.0)
    nu = np.where(a < 0, -a, 0.0)
    # both parts carry mass 1 up to rounding; renormalise to exact distributions
    gamma = default_gamma(d, eps)
    return CubePair(CubeMixture.with_gamma(d, mu / mu.sum(), gamma),
                    CubeMixture.with_gamma(d, nu / nu.sum(), gamma), poly, eps)


def allones_slack(pair: CubePair) -> float:
    """``|(P_1(1^d) - P_2(1^d)) - (mu_0 - nu_0)|``."""
    return abs(pair.mass_gap - (pair.mu.weights[0] - pair.nu.weights[0]))


# embedding into the torus ----------------------------------------------------


def embed_mixture(m: CubeMixture, cap: int = TABULATION_CAP) -> DiracComb:
    """Push a mixture through ``x -> (1 - x)/4``: string ``x`` lands on ``{0, 1/2}^d``."""
    probs = tabulate_mixture(m, cap)
    idx = np.arange(2**m.d)
    bits = (idx[:, None] >> np.arange(m.d)[None, :]) & 1
    return DiracComb(bits * 0.5, probs)


def embed_cube_pair(d: int, pair: CubePair, cap: int = TABULATION_CAP) -> tuple[DiracComb, DiracComb]:
    if d != pair.d:
        raise ValueError("dimension mismatch")
    return embed_mixture(pair.mu, cap), embed_mixture(pair.nu, cap)


def parity_mask(ell) -> int:
    """Bitmask of the coordinates of ``ell`` that are odd."""
    ell = np.ravel(np.asarray(ell, dtype=np.int64))
    return int(np.sum((ell % 2 != 0).astype(np.int64) << np.arange(ell.size)))


def embedded_coefficient(walsh: np.ndarray, ell) -> float:
    """``2^d hat P(Par(l))``, the torus coefficient of the embedded distribution."""
    return float(walsh.size * walsh[parity_mask(ell)])
