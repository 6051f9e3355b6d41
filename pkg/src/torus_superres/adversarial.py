"""Pairs of distributions that agree on Fourier data yet are far apart.

* ``grid_pair``: two interleaved uniform grids with identical low-frequency
  coefficients and large transport distance.
* ``random_separated_pair``: two random point clouds, far from each other and
  with small exponential sums, to be smoothed by Jackson's kernel.
* ``one_dim_pair``: a point mass against a slightly split point mass.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import ceil, floor, sqrt

import numpy as np

from .fourier import FourierTable, LinfBall, comb_fourier_many, enumerate_linf
from .jackson import JacksonKernel
from .torus import DiracComb, grid_comb, pairwise_distances


def grid_pair(d: int, eps: float) -> tuple[DiracComb, DiracComb, int]:
    """Uniform grid of side ``T'`` and its copy shifted by half a cell in every axis."""
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    Tp = floor(sqrt(d) / (2 * eps))
    if Tp == 0:
        raise ValueError("eps is too large for this dimension")
    return grid_comb(d, Tp, 0.0), grid_comb(d, Tp, 1.0 / (2 * Tp)), Tp


def one_dim_pair(eps: float) -> tuple[DiracComb, DiracComb]:
    """``delta_0`` against ``(1 - 2 eps) delta_0 + 2 eps delta_{1/2}``."""
    if not 0 < eps < 0.25:
        raise ValueError("eps must lie in (0, 1/4)")
    D1 = DiracComb([[0.0]], [1.0])
    D2 = DiracComb([[0.0], [0.5]], [1 - 2 * eps, 2 * eps])
    return D1, D2


# random separated pair -------------------------------------------------------


class RetriesExhausted(RuntimeError):
    def __init__(self, message, failures: Counter):
        super().__init__(message)
        self.failures = failures


def default_sizes(d: int, eps: float) -> tuple[int, int, float]:
    """``(M, n, kappa)`` for the infinite-bandlimit lower bound."""
    M = ceil(0.5 * (8 * eps) ** (-0.5 * d))
    n = ceil(4 * sqrt(d) / eps)
    kappa = eps ** (0.249 * d)
    return M, n, kappa


def _exp_sums(points: np.ndarray, ells: np.ndarray) -> np.ndarray:
    M = points.shape[0]
    return comb_fourier_many(DiracComb(points, np.full(M, 1.0 / M)), ells)


@dataclass
class SeparatedPair:
    """Two point clouds and the Jackson degree used to smooth them."""

    x: np.ndarray
    y: np.ndarray
    M: int
    n: int
    kappa: float
    eps: float
    seed: int
    attempts: int
    min_cross_distance: float
    max_exp_sum: float

    @property
    def d(self) -> int:
        return self.x.shape[1]

    @property
    def kernel(self) -> JacksonKernel:
        return JacksonKernel(self.n, self.d)

    def base_combs(self) -> tuple[DiracComb, DiracComb]:
        w = np.full(self.M, 1.0 / self.M)
        return DiracComb(self.x, w), DiracComb(self.y, w)

    def fourier_tables(self, T: int | None = None) -> tuple[FourierTable, FourierTable]:
        """Coefficients of both smoothed distributions on ``||l||_inf <= T`` (default ``2n``)."""
        T = 2 * self.n if T is None else T
        ells = enumerate_linf(self.d, T)
        jac = self.kernel.fourier_many(ells)
        c1, c2 = self.base_combs()
        t1 = FourierTable(self.d, LinfBall(T), ells, jac * comb_fourier_many(c1, ells))
        t2 = FourierTable(self.d, LinfBall(T), ells, jac * comb_fourier_many(c2, ells))
        return t1, t2

    def to_dict(self) -> dict:
        return {
            "x": self.x.tolist(),
            "y": self.y.tolist(),
            "M": self.M,
            "n": self.n,
            "kappa": self.kappa,
            "eps": self.eps,
            "seed": self.seed,
            "attempts": self.attempts,
            "min_cross_distance": self.min_cross_distance,
            "max_exp_sum": self.max_exp_sum,
        }

    @classmethod
    def from_dict(cls, data: dict) -> SeparatedPair:
        data = dict(data)
        d = len(data["x"][0])
        data["x"] = np.asarray(data["x"], dtype=float).reshape(-1, d)
        data["y"] = np.asarray(data["y"], dtype=float).reshape(-1, d)
        return cls(**data)


def check_separated(x: np.ndarray, y: np.ndarray, eps: float, n: int, kappa: float) -> dict:
    """Exhaustive check of the separation and exponential-sum conditions."""
    cross = float(pairwise_distances(x, y).min())
    ells = enumerate_linf(x.shape[1], 2 * n - 1)
    ells = ells[np.any(ells != 0, axis=1)]
    sums = max(float(np.abs(_exp_sums(x, ells)).max()), float(np.abs(_exp_sums(y, ells)).max()))
    return {
        "min_cross_distance": cross,
        "separation_ok": cross > 4 * eps,
        "max_exp_sum": sums,
        "exp_sum_ok": sums < kappa / 2,
    }


def random_separated_pair(d: int, eps: float, seed: int = 0, max_retries: int = 100,
                          M: int | None = None, n: int | None = None,
                          kappa: float | None = None) -> SeparatedPair:
    """Sample ``2M`` uniform points until both conditions hold.

    Condition (i): every cross distance exceeds ``4 eps``. Condition (ii): for
    ``0 < ||l||_inf < 2n`` both empirical exponential sums have modulus below
    ``kappa / 2``. ``M``, ``n`` and ``kappa`` default to the sizes that carry the guarantee.
    """
    M0, n0, k0 = default_sizes(d, eps)
    M = M0 if M is None else int(M)
    n = n0 if n is None else int(n)
    kappa = k0 if kappa is None else float(kappa)
    rng = np.random.Generator(np.random.Philox(seed))
    failures: Counter = Counter()
    for attempt in range(1, max_retries + 1):
        x = rng.uniform(size=(M, d))
        y = rng.uniform(size=(M, d))
        chk = check_separated(x, y, eps, n, kappa)
        if chk["separation_ok"] and chk["exp_sum_ok"]:
            return SeparatedPair(x, y, M, n, kappa, eps, seed, attempt,
                                 chk["min_cross_distance"], chk["max_exp_sum"])
        if not chk["separation_ok"]:
            failures["separation"] += 1
        if not chk["exp_sum_ok"]:
            failures["exp_sum"] += 1
    worst = failures.most_common(1)[0][0]
    raise RetriesExhausted(
        f"no valid pair in {max_retries} draws; most frequent failure: {worst} "
        f"({dict(failures)})", failures)


def lb_infinite_fourier_diff(pair: SeparatedPair, ell) -> complex:
    """``J^(l) * (mean_x e(l.x) - mean_y e(l.y))``: the coefficient gap of the smoothed pair."""
    ell = np.atleast_2d(np.asarray(ell, dtype=np.int64))
    if ell.shape[1] != pair.d:
        raise ValueError("dimension mismatch")
    jac = pair.kernel.fourier_many(ell)[0]
    if jac == 0.0 or not ell.any():
        return 0j
    return complex(jac * (_exp_sums(pair.x, ell)[0] - _exp_sums(pair.y, ell)[0]))


def max_infinite_fourier_diff(pair: SeparatedPair) -> tuple[np.ndarray, float]:
    """Largest coefficient gap over ``0 < ||l||_inf < 2n`` (all other gaps vanish)."""
    ells = enumerate_linf(pair.d, 2 * pair.n - 1)
    ells = ells[np.any(ells != 0, axis=1)]
    jac = pair.kernel.fourier_many(ells)
    gap = np.abs(jac * (_exp_sums(pair.x, ells) - _exp_sums(pair.y, ells)))
    i = int(np.argmax(gap))
    return ells[i], float(gap[i])
