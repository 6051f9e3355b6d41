"""Fourier coefficients of Dirac combs on the torus and the noisy measurement model.

Coefficients use the convention ``f^(l) = int f(x) exp(2 pi i l.x) dx`` so a point
mass at ``r`` has coefficient ``exp(2 pi i l.r)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Literal

import numpy as np

from .torus import DiracComb

DEFAULT_INDEX_CAP = 10**7

IndexKind = Literal["linf", "l1"]


@dataclass(frozen=True)
class IndexSet:
    """An l-infinity or l1 ball of integer frequencies around the origin."""

    kind: IndexKind
    T: int

    def __post_init__(self):
        if self.kind not in ("linf", "l1"):
            raise ValueError(f"unknown index set kind {self.kind!r}")
        if self.T < 0:
            raise ValueError("radius must be nonnegative")

    def contains(self, ell: np.ndarray) -> np.ndarray:
        ell = np.atleast_2d(ell)
        if self.kind == "linf":
            return np.max(np.abs(ell), axis=1) <= self.T
        return np.sum(np.abs(ell), axis=1) <= self.T

    def count(self, d: int) -> int:
        return linf_count(d, self.T) if self.kind == "linf" else l1_count(d, self.T)

    def enumerate(self, d: int, cap: int = DEFAULT_INDEX_CAP) -> np.ndarray:
        if self.kind == "linf":
            return enumerate_linf(d, self.T, cap)
        return enumerate_l1(d, self.T, cap)


def LinfBall(T: int) -> IndexSet:
    return IndexSet("linf", int(T))


def L1Ball(T: int) -> IndexSet:
    return IndexSet("l1", int(T))


def linf_count(d: int, T: int) -> int:
    return (2 * T + 1) ** d


def l1_count(d: int, T: int) -> int:
    """Number of integer vectors in Z^d with l1 norm at most T."""
    return sum(2**m * comb(d, m) * comb(T, m) for m in range(min(d, T) + 1))


def _check_cap(count: int, cap: int):
    if count > cap:
        raise OverflowError(f"index set has {count} elements, above the cap of {cap}")


def enumerate_linf(d: int, T: int, cap: int = DEFAULT_INDEX_CAP) -> np.ndarray:
    """All integer vectors with ``max |l_i| <= T`` in lexicographic order, shape (n, d)."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    _check_cap(linf_count(d, T), cap)
    axis = np.arange(-T, T + 1)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)


def enumerate_l1(d: int, T: int, cap: int = DEFAULT_INDEX_CAP) -> np.ndarray:
    """All integer vectors with ``sum |l_i| <= T`` in lexicographic order, shape (n, d)."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    _check_cap(l1_count(d, T), cap)
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], budget: int, remaining: int):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for v in range(-budget, budget + 1):
            prefix.append(v)
            rec(prefix, budget - abs(v), remaining - 1)
            prefix.pop()

    rec([], T, d)
    return np.array(out, dtype=np.int64).reshape(len(out), d)


def comb_fourier(c: DiracComb, ell) -> complex:
    ell = np.asarray(ell, dtype=float).ravel()
    if ell.shape[0] != c.dim:
        raise ValueError("dimension mismatch")
    return complex(np.sum(c.weights * np.exp(2j * np.pi * (c.points @ ell))))


def comb_fourier_many(c: DiracComb, ells: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Coefficients of ``c`` at every row of ``ells`` (direct summation, no FFT)."""
    ells = np.atleast_2d(np.asarray(ells, dtype=float))
    if ells.shape[1] != c.dim:
        raise ValueError("dimension mismatch")
    out = np.empty(ells.shape[0], dtype=complex)
    for start in range(0, ells.shape[0], chunk):
        phase = ells[start:start + chunk] @ c.points.T
        out[start:start + chunk] = np.exp(2j * np.pi * phase) @ c.weights
    return out


class FourierTable:
    """Complex values on a declared ball of integer frequencies.

    ``indices`` is an (n, d) integer array and ``values`` the matching complex
    vector. Lookup by frequency goes through :meth:`__getitem__`.
    """

    def __init__(self, dim: int, index_set: IndexSet, indices, values):
        indices = np.asarray(indices, dtype=np.int64).reshape(-1, dim)
        values = np.asarray(values, dtype=complex).ravel()
        if indices.shape[0] != values.shape[0]:
            raise ValueError("indices and values differ in length")
        if indices.shape[0] and not np.all(index_set.contains(indices)):
            raise ValueError("table has keys outside its declared index set")
        self.dim = int(dim)
        self.index_set = index_set
        self.indices = indices
        self.values = values
        self._pos = {tuple(r): i for i, r in enumerate(indices.tolist())}
        if len(self._pos) != indices.shape[0]:
            raise ValueError("duplicate frequency in table")

    def __len__(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, ell) -> complex:
        return complex(self.values[self._pos[tuple(int(v) for v in np.ravel(ell))]])

    def __contains__(self, ell) -> bool:
        return tuple(int(v) for v in np.ravel(ell)) in self._pos

    def position(self, ell) -> int:
        return self._pos[tuple(int(v) for v in np.ravel(ell))]

    def with_values(self, values) -> FourierTable:
        return FourierTable(self.dim, self.index_set, self.indices, values)

    def conjugate_symmetric(self, tol: float = 1e-10) -> bool:
        """Whether ``value(-l) == conj(value(l))`` wherever both keys exist."""
        for i, row in enumerate(self.indices.tolist()):
            j = self._pos.get(tuple(-v for v in row))
            if j is not None and abs(self.values[j] - np.conj(self.values[i])) > tol:
                return False
        return True

    def same_keys(self, other: FourierTable) -> bool:
        return (
            self.dim == other.dim
            and self.index_set == other.index_set
            and self.indices.shape == other.indices.shape
            and np.array_equal(self.indices, other.indices)
        )

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "index_set": {"type": self.index_set.kind, "T": self.index_set.T},
            "entries": [
                {"l": row, "re": float(v.real), "im": float(v.imag)}
                for row, v in zip(self.indices.tolist(), self.values)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> FourierTable:
        d = int(data["dim"])
        iset = IndexSet(data["index_set"]["type"], int(data["index_set"]["T"]))
        entries = data["entries"]
        idx = np.array([e["l"] for e in entries], dtype=np.int64).reshape(len(entries), d)
        vals = np.array([complex(e["re"], e["im"]) for e in entries])
        return cls(d, iset, idx, vals)


def table_of(c: DiracComb, index_set: IndexSet, cap: int = DEFAULT_INDEX_CAP) -> FourierTable:
    if len(c) == 0:
        raise ValueError("the empty comb has no meaningful Fourier table")
    idx = index_set.enumerate(c.dim, cap)
    return FourierTable(c.dim, index_set, idx, comb_fourier_many(c, idx))


def _positive_half(ell: np.ndarray) -> bool:
    """Lexicographically positive frequency (first nonzero entry > 0)."""
    nz = np.flatnonzero(ell)
    return bool(nz.size) and ell[nz[0]] > 0


def perturb(
    table: FourierTable,
    kappa: float,
    mode: str = "worst_case_sign",
    seed: int | None = None,
) -> FourierTable:
    """Move every coefficient by a complex offset of modulus at most ``kappa``.

    ``worst_case_sign`` pushes each value radially outward by ``kappa`` (``+kappa``
    at zero), ``uniform_disk`` draws offsets uniformly from the disk and
    ``none`` returns a copy. Offsets at ``-l`` are the conjugates of those at
    ``l`` so real-signal tables stay conjugate symmetric.
    """
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    vals = table.values.copy()
    if mode == "none" or kappa == 0:
        return table.with_values(vals)
    if mode == "worst_case_sign":
        mag = np.abs(vals)
        unit = np.where(mag > 0, vals / np.where(mag > 0, mag, 1.0), 1.0)
        return table.with_values(vals + kappa * unit)
    if mode != "uniform_disk":
        raise ValueError(f"unknown noise mode {mode!r}")

    rng = np.random.Generator(np.random.Philox(seed))
    offsets = np.zeros(len(table), dtype=complex)
    done = np.zeros(len(table), dtype=bool)
    for i, row in enumerate(table.indices):
        if done[i]:
            continue
        j = table._pos.get(tuple(-row))
        if not row.any():
            offsets[i] = kappa * rng.uniform(-1.0, 1.0)
        else:
            r = kappa * np.sqrt(rng.uniform())
            offsets[i] = r * np.exp(2j * np.pi * rng.uniform())
            if j is not None:
                if not _positive_half(row):
                    offsets[i] = np.conj(offsets[i])
                offsets[j] = np.conj(offsets[i])
                done[j] = True
        done[i] = True
    return table.with_values(vals + offsets)


def max_coeff_diff(t1: FourierTable, t2: FourierTable) -> tuple[np.ndarray, float]:
    """Frequency and size of the largest coefficient discrepancy.

    Ties go to the frequency of smallest sup-norm, then the lexicographically
    smallest one, so identical tables report the zero frequency.
    """
    if not t1.same_keys(t2):
        raise ValueError("tables are defined on different index sets")
    diff = np.abs(t1.values - t2.values)
    best = float(diff.max())
    keys = np.vstack([t1.indices.T[::-1], np.abs(t1.indices).max(axis=1, initial=0)])
    order = np.lexsort(keys)
    hits = order[diff[order] == best]
    return t1.indices[hits[0]].copy(), best
