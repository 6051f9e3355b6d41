"""Wasserstein and heavy-hitter distances between Dirac combs on the torus."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
import scipy.sparse as sp

from . import lp
from .torus import DiracComb, coordinate_distances, pairwise_distances

NORM_TOL = 1e-9


def _require_normalized(*combs: DiracComb):
    for c in combs:
        if abs(c.total_mass - 1.0) > NORM_TOL:
            raise ValueError(f"comb is not normalized (total mass {c.total_mass!r})")


def _union_support(f: DiracComb, g: DiracComb):
    """Union of supports with the signed difference ``f - g`` on it."""
    diff = DiracComb(
        np.vstack([f.points, g.points]),
        np.concatenate([f.weights, -g.weights]),
    )
    return diff.points, diff.weights


def wasserstein_primal(f: DiracComb, g: DiracComb, tol: float = lp.DEFAULT_TOL) -> float:
    """Optimal transport cost between two nonnegative combs of equal mass."""
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    f, g = f.nonzero(), g.nonzero()
    if np.any(f.weights < 0) or np.any(g.weights < 0):
        raise ValueError("the transport formulation needs nonnegative combs")
    if abs(f.weights.sum() - g.weights.sum()) > NORM_TOL:
        raise ValueError("transport needs equal total masses")
    m, n = len(f), len(g)
    cost = pairwise_distances(f.points, g.points)
    prog = lp.LinearProgram(m * n)
    prog.set_objective(cost.ravel(), "min")
    rows = sp.kron(sp.eye(m), np.ones((1, n)))
    cols = sp.kron(np.ones((1, m)), sp.eye(n))
    prog.add_constraints(rows, "=", f.weights)
    prog.add_constraints(cols, "=", g.weights)
    sol = lp.solve(prog, tol)
    if sol.status == "infeasible":
        raise lp.LPError("transport problem reported infeasible")
    return max(sol.objective_value, 0.0)


def wasserstein_dual(f: DiracComb, g: DiracComb, tol: float = lp.DEFAULT_TOL) -> float:
    """Bounded-Lipschitz dual over the union support, valid for signed combs.

    Maximizes ``sum_i h_i (f - g)_i`` over ``|h_i - h_j| <= d_tor(x_i, x_j)`` and
    ``|h_i| <= sqrt(d)``. This equals the supremum over all 1-Lipschitz
    functions on the torus bounded by sqrt(d): any feasible ``h`` extends via
    McShane, ``H(x) = min_i h_i + d_tor(x, x_i)``, and clamping ``H`` to
    ``[-sqrt(d), sqrt(d)]`` keeps it 1-Lipschitz without changing it on the support.
    """
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    pts, mass = _union_support(f, g)
    k = len(mass)
    if k == 0 or not np.any(mass):
        return 0.0
    dist = pairwise_distances(pts, pts)
    iu, ju = np.triu_indices(k, 1)
    cap = np.sqrt(f.dim)
    prog = lp.LinearProgram(k, lower=np.full(k, -cap), upper=np.full(k, cap))
    prog.set_objective(mass, "max")
    if iu.size:
        rows = np.arange(iu.size)
        D = sp.csr_matrix(
            (np.concatenate([np.ones(iu.size), -np.ones(iu.size)]),
             (np.concatenate([rows, rows]), np.concatenate([iu, ju]))),
            shape=(iu.size, k),
        )
        prog.add_constraints(D, "<=", dist[iu, ju])
        prog.add_constraints(-D, "<=", dist[iu, ju])
    sol = lp.solve(prog, tol)
    return max(sol.objective_value, 0.0)


def wasserstein(f: DiracComb, g: DiracComb, tol: float = lp.DEFAULT_TOL) -> float:
    """Wasserstein distance between normalized combs.

    Distributions go through the primal transport LP; signed combs through
    the bounded-Lipschitz dual.
    """
    _require_normalized(f, g)
    if np.all(f.weights >= 0) and np.all(g.weights >= 0):
        return wasserstein_primal(f, g, tol)
    return wasserstein_dual(f, g, tol)


# heavy-hitter distance -------------------------------------------------------


@dataclass(frozen=True)
class HHParams:
    eps_dist: float
    center_grid: int = 64
    radius_grid: int = 256
    max_centers: int = 10**6

    def __post_init__(self):
        if not 0 < self.eps_dist < 1:
            raise ValueError("eps_dist must lie in (0, 1)")
        if self.center_grid < 1 or self.radius_grid < 1:
            raise ValueError("grid resolutions must be at least 1")


@dataclass
class HHResult:
    lower: float
    upper: float
    witness: dict | None
    exact: bool
    cover_radius: float

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "witness": self.witness,
            "exact": self.exact,
            "cover_radius": self.cover_radius,
        }


def _dists(D: DiracComb, centers: np.ndarray) -> np.ndarray:
    c = coordinate_distances(centers[:, None, :], D.points[None, :, :])
    return np.sqrt(np.sum(c * c, axis=-1))


def _masses(dist: np.ndarray, w: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """``masses[c, r] = sum_j w_j [dist[c, j] <= radii[c, r]]``."""
    order = np.argsort(dist, axis=1, kind="stable")
    ds = np.take_along_axis(dist, order, axis=1)
    cw = np.concatenate([np.zeros((dist.shape[0], 1)), np.cumsum(w[order], axis=1)], axis=1)
    idx = np.empty(radii.shape, dtype=np.int64)
    for c in range(dist.shape[0]):
        idx[c] = np.searchsorted(ds[c], radii[c], side="right")
    return np.take_along_axis(cw, idx, axis=1)


def _best_violation(inner: DiracComb, outer: DiracComb, centers: np.ndarray,
                    eps_dist: float, extra_radii: np.ndarray, shrink: float = 0.0):
    """Largest ``inner(Ball(c, tau + shrink)) - outer(Ball(c, tau + eps_dist - shrink))``.

    For a fixed center the supremum over ``tau in [0, eps_dist]`` is attained at
    ``tau = 0`` or where the inner ball first reaches a support point of
    ``inner``, so those breakpoints (plus ``extra_radii``) are exhaustive.
    """
    din = _dists(inner, centers)
    dout = _dists(outer, centers)
    cand = np.concatenate([np.zeros((len(centers), 1)), din - shrink,
                           np.broadcast_to(extra_radii, (len(centers), extra_radii.size))], axis=1)
    cand = np.where((cand >= 0) & (cand <= eps_dist), cand, 0.0)
    m_in = _masses(din, inner.weights, cand + shrink)
    m_out = _masses(dout, outer.weights, cand + eps_dist - shrink)
    margin = m_in - m_out
    flat = int(np.argmax(margin))
    c, r = divmod(flat, margin.shape[1])
    return float(margin[c, r]), centers[c], float(cand[c, r])


def hh_violation(D1: DiracComb, D2: DiracComb, eps_dist: float, eps: float, x, tau: float) -> bool:
    """Whether ``(x, tau)`` breaks either ball inequality at slack ``eps``."""
    if not 0 <= tau <= eps_dist:
        raise ValueError("tau must lie in [0, eps_dist]")
    from .torus import ball_mass
    a = ball_mass(D1, x, tau) > ball_mass(D2, x, tau + eps_dist) + eps
    b = ball_mass(D2, x, tau) > ball_mass(D1, x, tau + eps_dist) + eps
    return bool(a or b)


def _arc_midpoints(points: np.ndarray) -> np.ndarray:
    """Centers of every arc between two support points of a 1-D comb, both ways round."""
    x = points[:, 0]
    a, b = np.meshgrid(x, x, indexing="ij")
    forward = np.mod(b - a, 1.0)
    return np.mod(a + forward / 2.0, 1.0).reshape(-1, 1)


def hh_distance(D1: DiracComb, D2: DiracComb, params: HHParams) -> HHResult:
    """Certified interval ``lower <= d_HH <= upper`` for two distributions.

    ``lower`` is the best violation over a witness family of centers. In one
    dimension the family contains the midpoint of every arc between support
    points, which is exhaustive, so ``lower == upper``. In higher dimension
    ``upper`` uses a covering argument: every center lies within ``h`` of a grid
    center ``c``, hence ``Ball(x, tau)`` is inside ``Ball(c, tau + h)`` and
    ``Ball(c, tau + eps_dist - h)`` is inside ``Ball(x, tau + eps_dist)``.
    """
    if D1.dim != D2.dim:
        raise ValueError("dimension mismatch")
    D1, D2 = D1.nonzero(), D2.nonzero()
    d = D1.dim
    ed = params.eps_dist
    radii = np.linspace(0.0, ed, params.radius_grid + 1)

    G = params.center_grid
    while G > 1 and G**d > params.max_centers:
        G -= 1
    axis = np.arange(G) / G
    grid = np.array(list(product(axis, repeat=d)), dtype=float).reshape(-1, d)
    h = np.sqrt(d) / (2 * G)

    centers = [D1.points, D2.points, grid]
    if d == 1:
        centers += [_arc_midpoints(D1.points), _arc_midpoints(D2.points)]
    else:
        for D in (D1, D2):
            if len(D) <= 300:
                i, j = np.triu_indices(len(D), 1)
                delta = D.points[j] - D.points[i]
                delta = delta - np.round(delta)
                centers.append(np.mod(D.points[i] + delta / 2.0, 1.0))
    centers = np.unique(np.vstack(centers), axis=0)

    best, witness = 0.0, None
    for name, inner, outer in (("D1>D2", D1, D2), ("D2>D1", D2, D1)):
        for start in range(0, len(centers), 2048):
            val, x, tau = _best_violation(inner, outer, centers[start:start + 2048], ed, radii)
            if val > best:
                best = val
                witness = {"direction": name, "center": x.tolist(), "tau": tau, "margin": val}
    lower = min(max(best, 0.0), 1.0)

    if d == 1:
        return HHResult(lower, lower, witness, True, 0.0)

    upper = 0.0
    if h >= ed / 2:
        upper = 1.0
    else:
        for inner, outer in ((D1, D2), (D2, D1)):
            for start in range(0, len(grid), 2048):
                val, _, _ = _best_violation(inner, outer, grid[start:start + 2048], ed,
                                            radii, shrink=h)
                upper = max(upper, val)
        # tau + h may exceed eps_dist; the breakpoint set above still covers it
        upper = min(max(upper, lower), 1.0)
    return HHResult(lower, upper, witness, False, float(h))


def check_wasserstein_implies_hh(D1: DiracComb, D2: DiracComb, eps_dist: float,
                                 params: HHParams | None = None) -> bool:
    """Small transport cost forces a small heavy-hitter distance.

    The grid upper bound is the heavy-hitter distance at the shrunken scale
    ``eps_dist - 2h``, so the comparison uses ``w / (eps_dist - 2h)``.
    """
    params = params or HHParams(eps_dist)
    w = wasserstein(D1, D2)
    hh = hh_distance(D1, D2, params)
    scale = eps_dist - 2 * hh.cover_radius
    if scale <= 0:
        return hh.upper <= 1.0
    return hh.upper <= w / scale + 1e-9

