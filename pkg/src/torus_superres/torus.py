"""Points, the toroidal metric and discrete signed measures on [0,1)^d."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

NORMALIZATION_TOL = 1e-12


def wrap(coords) -> np.ndarray:
    """Reduce coordinates mod 1 into [0, 1).

    ``x % 1.0`` can round tiny negative inputs up to exactly 1.0, which is
    folded back to 0.
    """
    x = np.mod(np.asarray(coords, dtype=float), 1.0)
    x[x >= 1.0] = 0.0
    return x


def torus_point(coords) -> np.ndarray:
    """A point of the torus as a 1-D float array with entries in [0, 1)."""
    x = wrap(np.atleast_1d(coords))
    if x.ndim != 1:
        raise ValueError("a torus point is a 1-D coordinate vector")
    return x


def coordinate_distances(a, b) -> np.ndarray:
    """Per-coordinate wraparound distances, broadcasting over leading axes."""
    diff = np.abs(wrap(a) - wrap(b))
    return np.minimum(diff, 1.0 - diff)


def toroidal_distance(a, b) -> float:
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum(coordinate_distances(a, b) ** 2)))


def pairwise_distances(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Toroidal distance matrix between point arrays of shape (n, d) and (m, d)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[1] != y.shape[1]:
        raise ValueError("dimension mismatch")
    c = coordinate_distances(x[:, None, :], y[None, :, :])
    return np.sqrt(np.sum(c * c, axis=-1))


@dataclass(frozen=True)
class DiracComb:
    """A finite signed measure ``sum_j w_j delta_{x_j}`` on the d-torus.

    Points are reduced mod 1 and exact duplicates are merged by summing their
    weights, so every comb has a canonical form.

    Parameters
    ----------
    points : array_like, shape (k, d)
    weights : array_like, shape (k,)
    """

    points: np.ndarray
    weights: np.ndarray
    total_mass: float = field(init=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        w = np.asarray(self.weights, dtype=float).ravel()
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] != w.shape[0]:
            raise ValueError("points must have shape (k, d) matching k weights")
        if pts.shape[1] < 1:
            raise ValueError("dimension must be at least 1")
        if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(w)):
            raise ValueError("points and weights must be finite")
        pts = wrap(pts)
        merged: dict[tuple, float] = {}
        for row, wj in zip(map(tuple, pts), w):
            merged[row] = merged.get(row, 0.0) + wj
        if len(merged) < pts.shape[0]:
            keys = list(merged)
            pts = np.array(keys, dtype=float).reshape(len(keys), pts.shape[1])
            w = np.array([merged[k] for k in keys])
        pts.setflags(write=False)
        w = np.array(w, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "total_mass", float(np.sum(np.abs(w))))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.weights.shape[0]

    def is_normalized(self, tol: float = NORMALIZATION_TOL) -> bool:
        return abs(self.total_mass - 1.0) <= tol

    def is_distribution(self, tol: float = NORMALIZATION_TOL) -> bool:
        return self.is_normalized(tol) and bool(np.all(self.weights >= 0))

    def nonzero(self) -> DiracComb:
        """Drop points carrying exactly zero weight."""
        keep = self.weights != 0
        return DiracComb(self.points[keep], self.weights[keep])

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> DiracComb:
        d = int(data["dim"])
        pts = np.asarray(data["points"], dtype=float).reshape(-1, d)
        return cls(pts, data["weights"])


def point_mass(x, weight: float = 1.0) -> DiracComb:
    x = torus_point(x)
    return DiracComb(x[None, :], [weight])


def normalize_comb(c: DiracComb) -> DiracComb:
    if c.total_mass == 0:
        raise ValueError("cannot normalize a comb with all-zero weights")
    return DiracComb(c.points, c.weights / c.total_mass)


def ball_mass(D: DiracComb, center, radius: float) -> float:
    """Signed mass of ``D`` inside the closed toroidal ball ``Ball(center, radius)``."""
    center = torus_point(center)
    if center.shape[0] != D.dim:
        raise ValueError("dimension mismatch")
    dist = np.sqrt(np.sum(coordinate_distances(D.points, center) ** 2, axis=1))
    return float(np.sum(D.weights[dist <= radius]))


def grid_comb(d: int, size: int, offset: float = 0.0) -> DiracComb:
    """Uniform distribution on the shifted grid ``(j/size + offset)`` in every coordinate."""
    if size < 1:
        raise ValueError("grid size must be at least 1")
    axis = (np.arange(size) / size + offset) % 1.0
    pts = np.array(list(product(axis, repeat=d)), dtype=float).reshape(-1, d)
    return DiracComb(pts, np.full(pts.shape[0], 1.0 / size**d))
