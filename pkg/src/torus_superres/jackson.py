"""Jackson's kernel on the d-torus.

``J_n(x) = alpha_n sin^4(pi n x) / sin^4(pi x)`` with ``alpha_n = 3 / (n (2n^2 + 1))``
is a probability density on [0, 1) whose Fourier coefficients vanish for
``|l| >= 2n - 1``. The d-dimensional kernel is the product over coordinates.
"""

from __future__ import annotations

from functools import cached_property
from math import comb

import numpy as np

from .torus import torus_point, wrap

_SERIES_CUTOFF = 1e-9
CDF_GRID = 2**16


def _binom3(a: int) -> int:
    return comb(a, 3) if a >= 3 else 0


class JacksonKernel:
    """Jackson's kernel ``J_{d,n}``.

    >>> k = JacksonKernel(2)
    >>> round(k.eval_1d(0.25), 12)
    0.666666666667
    """

    def __init__(self, n: int, d: int = 1):
        if n < 1 or d < 1:
            raise ValueError("n and d must be positive")
        self.n = int(n)
        self.d = int(d)
        self.alpha_n = 3.0 / (self.n * (2 * self.n**2 + 1))

    def __repr__(self):
        return f"JacksonKernel(n={self.n}, d={self.d})"

    def eval_1d(self, x):
        """Kernel value at ``x``; the removable singularity at 0 uses a series."""
        x = np.asarray(x, dtype=float)
        n = self.n
        xr = np.mod(x, 1.0)
        t = np.minimum(xr, 1.0 - xr)  # J_n is even and 1-periodic
        s = np.sin(np.pi * t)
        near = np.abs(s) < _SERIES_CUTOFF
        safe = np.where(near, 1.0, s)
        out = self.alpha_n * (np.sin(np.pi * n * t) / safe) ** 4
        # sin(n u)/sin(u) = n (1 - (n^2 - 1) u^2 / 6 + O(u^4))
        u2 = (np.pi * t) ** 2
        series = self.alpha_n * n**4 * (1.0 - (n * n - 1) * u2 / 6.0) ** 4
        out = np.where(near, series, out)
        return float(out) if out.ndim == 0 else out

    def eval_nd(self, x):
        """Product kernel at a point (shape (d,)) or at each row of an (m, d) array."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise ValueError("dimension mismatch")
        vals = np.prod(self.eval_1d(x), axis=-1)
        return float(vals) if np.ndim(vals) == 0 else vals

    def fourier_1d(self, ell: int) -> float:
        """Closed-form Fourier coefficient, even in ``ell``."""
        n = self.n
        ell = abs(int(ell))
        if ell <= n - 2:
            count = _binom3(2 * n + 1 - ell) - 4 * _binom3(n + 1 - ell)
        elif ell <= 2 * n - 2:
            count = _binom3(2 * n + 1 - ell)
        else:
            return 0.0
        if ell == 0:
            return 1.0
        return self.alpha_n * count

    @cached_property
    def _fourier_lookup(self) -> np.ndarray:
        return np.array([self.fourier_1d(l) for l in range(2 * self.n)])

    def fourier_nd(self, ell) -> float:
        ell = np.ravel(np.asarray(ell, dtype=np.int64))
        if ell.shape[0] != self.d:
            raise ValueError("dimension mismatch")
        return float(self.fourier_many(ell[None, :])[0])

    def fourier_many(self, ells) -> np.ndarray:
        """Coefficients at every row of an (m, d) integer array."""
        ells = np.abs(np.atleast_2d(np.asarray(ells, dtype=np.int64)))
        if ells.shape[1] != self.d:
            raise ValueError("dimension mismatch")
        table = self._fourier_lookup
        inside = ells < table.shape[0]
        factors = np.where(inside, table[np.minimum(ells, table.shape[0] - 1)], 0.0)
        return np.prod(factors, axis=1)

    @property
    def lipschitz_bound(self) -> float:
        n, d = self.n, self.d
        return 3 * np.pi * n**2 * (1.5 * n) ** (d - 1) * np.sqrt(d)

    @cached_property
    def cdf_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Numeric CDF of ``J_n`` on a uniform grid of [0, 1]."""
        grid = np.linspace(0.0, 1.0, CDF_GRID + 1)
        pdf = self.eval_1d(grid)
        steps = 0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid)
        cdf = np.concatenate([[0.0], np.cumsum(steps)])
        cdf /= cdf[-1]
        return grid, cdf

    def sample(self, size: int | None = None, seed=None) -> np.ndarray:
        """Draw points from ``J_{d,n}`` by per-coordinate inverse-CDF sampling.

        ``seed`` may be an int or a :class:`numpy.random.Generator`; the
        generator stays owned by the caller.
        """
        rng = seed if isinstance(seed, np.random.Generator) else np.random.Generator(np.random.Philox(seed))
        shape = (self.d,) if size is None else (size, self.d)
        u = rng.uniform(size=shape)
        grid, cdf = self.cdf_table
        x = np.interp(u, cdf, grid)
        return torus_point(x) if size is None else wrap(x)


def smooth_table(u, kernel: JacksonKernel):
    """Multiply every coefficient of ``u`` by the kernel's Fourier coefficient."""
    if u.index_set.kind != "linf":
        raise ValueError("smoothing expects a table on an l-infinity ball")
    if u.dim != kernel.d:
        raise ValueError("dimension mismatch")
    return u.with_values(u.values * kernel.fourier_many(u.indices))
