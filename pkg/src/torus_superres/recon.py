"""Reconstruction of a signal from noisy low-frequency Fourier coefficients.

The pipeline smooths the observed table with Jackson's kernel, fits a comb
supported on the grid ``j / K`` by linear programming against the smoothed
table, and renormalizes the fit to a signal of total variation one.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from itertools import product
from math import ceil, log2, sqrt

import numpy as np

from . import lp
from .fourier import FourierTable, LinfBall
from .jackson import JacksonKernel, smooth_table
from .torus import DiracComb

MAX_GRID_CELLS = 2**20
MAX_MATRIX_ENTRIES = 5 * 10**7

_OVERRIDABLE = ("T", "kappa", "n", "K", "delta")


def default_kappa(d: int, eps: float) -> float:
    """Coefficient accuracy that certifies Wasserstein error ``eps``.

    The one-dimensional branch takes ``log`` base 2.
    """
    if d == 1:
        return 0.001 * eps / log2(1.0 / eps)
    return (0.01 * eps / sqrt(d)) ** d


def default_bandlimit(d: int, eps: float) -> int:
    return ceil(6 * sqrt(d) / eps)


@dataclass(frozen=True)
class ReconParams:
    d: int
    eps: float
    T: int
    kappa: float
    n: int
    K: int
    delta: float
    overrides: tuple = field(default=())

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be positive")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.T < 0 or self.kappa < 0 or self.n < 1 or self.K < 1 or self.delta <= 0:
            raise ValueError("inconsistent reconstruction parameters")

    @property
    def within_guarantee_range(self) -> bool:
        return self.eps < 1 / 8

    def to_dict(self) -> dict:
        out = asdict(self)
        out["overrides"] = list(self.overrides)
        out["within_guarantee_range"] = self.within_guarantee_range
        return out

    @classmethod
    def from_dict(cls, data: dict) -> ReconParams:
        data = {k: v for k, v in data.items() if k != "within_guarantee_range"}
        data["overrides"] = tuple(data.get("overrides", ()))
        return cls(**data)


def default_params(d: int, eps: float, **overrides) -> ReconParams:
    """Parameters at the values that carry the guarantee, with any of ``T, kappa, n, K, delta`` replaced.

    ``n`` is the smoothing degree used inside the algorithm, ``ceil(sqrt(d)/eps)``.
    ``K`` and ``delta`` are derived from the *effective* ``n`` and ``kappa``
    unless overridden themselves.
    """
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    unknown = set(overrides) - set(_OVERRIDABLE)
    if unknown:
        raise ValueError(f"unknown override(s): {sorted(unknown)}")
    overrides = {k: v for k, v in overrides.items() if v is not None}
    T = int(overrides.get("T", default_bandlimit(d, eps)))
    kappa = float(overrides.get("kappa", default_kappa(d, eps)))
    n = int(overrides.get("n", ceil(sqrt(d) / eps)))
    K = int(overrides.get("K", ceil(100 * d * (2 * n) ** (d + 1) / kappa)))
    delta = float(overrides.get("delta", kappa / 8))
    return ReconParams(d, float(eps), T, kappa, n, K, delta, tuple(sorted(overrides)))


def certification_n(d: int, eps: float) -> int:
    """Jackson degree used by the coefficient-closeness certificate, ``ceil(T / 2)``."""
    return ceil(default_bandlimit(d, eps) / 2)


def rect_coeff(j, ell, K: int) -> complex:
    """Integral of ``exp(2 pi i l.x)`` over the grid cell ``prod [j_i/K, (j_i+1)/K)``."""
    j = np.ravel(np.asarray(j, dtype=np.int64))
    ell = np.ravel(np.asarray(ell, dtype=np.int64))
    if j.shape != ell.shape:
        raise ValueError("dimension mismatch")
    if np.any(j < 0) or np.any(j >= K):
        raise ValueError("cell index out of range")
    return complex(np.prod([_rect_1d(int(l), np.array([jj]), K)[0] for jj, l in zip(j, ell)]))


def _rect_1d(ell: int, j: np.ndarray, K: int) -> np.ndarray:
    if ell == 0:
        return np.full(j.shape, 1.0 / K, dtype=complex)
    w = 2j * np.pi * ell
    return (np.exp(w * (j + 1) / K) - np.exp(w * j / K)) / w


def grid_cells(d: int, K: int) -> np.ndarray:
    if K**d > MAX_GRID_CELLS:
        raise OverflowError(f"grid of {K}^{d} cells exceeds the cap of {MAX_GRID_CELLS}")
    return np.array(list(product(range(K), repeat=d)), dtype=np.int64).reshape(-1, d)


def cell_matrix(indices: np.ndarray, d: int, K: int) -> np.ndarray:
    """``K^d * c[l, j]`` for every table row ``l`` and grid cell ``j``."""
    cells = grid_cells(d, K)
    if indices.shape[0] * cells.shape[0] > MAX_MATRIX_ENTRIES:
        raise OverflowError("constraint matrix exceeds the entry cap")
    T = int(np.max(np.abs(indices))) if indices.size else 0
    # per-axis lookup: row (l + T) holds the 1-D cell integrals for frequency l
    axis = np.array([_rect_1d(l, np.arange(K), K) for l in range(-T, T + 1)]) * K
    M = np.ones((indices.shape[0], cells.shape[0]), dtype=complex)
    for i in range(d):
        M *= axis[indices[:, i] + T][:, cells[:, i]]
    return M


def certify_closeness(t1: FourierTable, t2: FourierTable, eps: float) -> bool:
    """True when the tables agree within the default ``kappa`` up to the default bandlimit.

    A true answer certifies that the underlying signals are ``eps``-close in
    Wasserstein distance. Tables whose bandlimit is below the one required
    for ``eps`` cannot certify anything and raise.
    """
    if not t1.same_keys(t2):
        raise ValueError("tables are defined on different index sets")
    if t1.index_set.kind != "linf":
        raise ValueError("certification needs tables on an l-infinity ball")
    T = default_bandlimit(t1.dim, eps)
    if t1.index_set.T < T:
        raise ValueError(f"bandlimit {t1.index_set.T} is below the required {T}")
    keep = np.max(np.abs(t1.indices), axis=1) <= T
    diff = np.abs(t1.values[keep] - t2.values[keep])
    return bool(diff.max() <= default_kappa(t1.dim, eps))


@dataclass
class ReconResult:
    comb: DiracComb
    params: ReconParams
    mode: str
    gamma: float
    lp_objective: float | None
    max_residual: float

    def to_dict(self) -> dict:
        return {
            "comb": self.comb.to_dict(),
            "params": self.params.to_dict(),
            "mode": self.mode,
            "gamma": self.gamma,
            "lp_objective": self.lp_objective,
            "max_residual": self.max_residual,
        }


def _check_input(u: FourierTable, p: ReconParams):
    if u.dim != p.d:
        raise ValueError("table dimension differs from params.d")
    if u.index_set != LinfBall(p.T):
        raise ValueError(f"table must be on the l-infinity ball of radius {p.T}")


def reconstruct(u: FourierTable, p: ReconParams, mode: str = "signed") -> ReconResult:
    """Run the smoothing / LP / renormalization pipeline and keep the diagnostics."""
    if mode not in ("signed", "distribution"):
        raise ValueError("mode must be 'signed' or 'distribution'")
    _check_input(u, p)
    smoothed = smooth_table(u, JacksonKernel(p.n, p.d))
    M = cell_matrix(u.indices, p.d, p.K)
    cells = grid_cells(p.d, p.K)
    m = cells.shape[0]
    slack = p.kappa / 4
    A = np.vstack([M.real, M.imag])
    target = np.concatenate([smoothed.values.real, smoothed.values.imag])

    if mode == "signed":
        prog = lp.LinearProgram(2 * m)
        prog.set_objective(np.ones(2 * m), "min")
        split = np.hstack([A, -A])
        prog.add_constraints(split, "<=", target + slack)
        prog.add_constraints(split, ">=", target - slack)
    else:
        prog = lp.LinearProgram(m)
        prog.add_constraints(A, "<=", target + slack)
        prog.add_constraints(A, ">=", target - slack)
        prog.add_constraint(np.ones(m), "=", 1.0)

    sol = lp.solve(prog, p.delta)
    if sol.status == "infeasible":
        raise lp.LPError("no grid comb matches the smoothed coefficients; "
                         "the table is not within kappa/8 of a signal")
    x = sol.assignment
    pts = cells / p.K

    if mode == "signed":
        a = x[:m] - x[m:]
        gamma = float(np.sum(np.abs(a)))
        if gamma > 1 + p.delta:
            raise lp.LPError(f"smallest feasible total variation {gamma:.6g} exceeds 1 + delta")
        if gamma < 1:
            half = (1 - gamma) / 2
            x0 = np.zeros((2, p.d))
            x0[0, 0], x0[1, 0] = 1 / (3 * p.K), 2 / (3 * p.K)
            pts = np.vstack([pts, x0])
            a = np.concatenate([a, [half, -half]])
        else:
            a = a / gamma
        comb = DiracComb(pts, a).nonzero()
    else:
        a = np.clip(x, 0.0, None)
        gamma = float(a.sum())
        if gamma <= 0:
            raise lp.LPError("distribution fit has no positive mass")
        comb = DiracComb(pts, a / gamma).nonzero()
    return ReconResult(comb, p, mode, gamma, sol.objective_value, float(sol.max_residual))


def reconstruct_signed(u: FourierTable, p: ReconParams) -> DiracComb:
    return reconstruct(u, p, "signed").comb


def reconstruct_distribution(u: FourierTable, p: ReconParams) -> DiracComb:
    return reconstruct(u, p, "distribution").comb


def with_overrides(p: ReconParams, **changes) -> ReconParams:
    """Copy of ``p`` with fields replaced and the override record extended."""
    changes = {k: v for k, v in changes.items() if v is not None}
    unknown = set(changes) - set(_OVERRIDABLE)
    if unknown:
        raise ValueError(f"unknown override(s): {sorted(unknown)}")
    return replace(p, **changes, overrides=tuple(sorted(set(p.overrides) | set(changes))))


def random_spikes(d: int, count: int, seed: int = 0, signed: bool = False) -> DiracComb:
    """``count`` uniform spikes with Dirichlet weights; random signs when ``signed``."""
    rng = np.random.Generator(np.random.Philox(seed))
    pts = rng.uniform(size=(count, d))
    w = rng.dirichlet(np.ones(count))
    if signed:
        w = w * rng.choice([-1.0, 1.0], size=count)
    return DiracComb(pts, w)
