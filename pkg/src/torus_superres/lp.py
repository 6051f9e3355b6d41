"""Dense/sparse linear programs with bounded variables.

The solver backend is HiGHS' dual simplex via :func:`scipy.optimize.linprog`,
which is deterministic for identical input. Every returned assignment is
re-checked against the original constraints; a solution whose residuals
exceed ``tol`` raises :class:`LPError` instead of being reported as optimal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

DEFAULT_TOL = 1e-9

_RELATIONS = ("<=", "=", ">=")


class LPError(RuntimeError):
    """Numerical failure or an unbounded problem."""


@dataclass
class Solution:
    status: str  # "optimal" | "feasible" | "infeasible"
    assignment: np.ndarray | None = None
    objective_value: float | None = None
    max_residual: float | None = None


@dataclass
class LinearProgram:
    """``sense c.x`` subject to row constraints and per-variable bounds.

    Constraints are stored as a coefficient matrix with one relation and one
    right-hand side per row. Bounds default to ``[0, inf)``.
    """

    num_vars: int
    objective: np.ndarray | None = None
    sense: str = "min"
    rows: list = field(default_factory=list)
    relations: list = field(default_factory=list)
    rhs: list = field(default_factory=list)
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        if self.lower is None:
            self.lower = np.zeros(self.num_vars)
        if self.upper is None:
            self.upper = np.full(self.num_vars, np.inf)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.objective is not None:
            self.set_objective(self.objective, self.sense)

    def set_objective(self, c, sense: str = "min"):
        c = np.asarray(c, dtype=float).ravel()
        if c.shape[0] != self.num_vars:
            raise ValueError("objective length differs from num_vars")
        if sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        self.objective = c
        self.sense = sense

    def set_bounds(self, lower=None, upper=None):
        if lower is not None:
            self.lower = np.broadcast_to(np.asarray(lower, dtype=float), (self.num_vars,)).copy()
        if upper is not None:
            self.upper = np.broadcast_to(np.asarray(upper, dtype=float), (self.num_vars,)).copy()

    def add_constraints(self, A, relation: str, b):
        """Append rows ``A x (relation) b``; ``A`` may be dense or scipy-sparse."""
        if relation not in _RELATIONS:
            raise ValueError(f"relation must be one of {_RELATIONS}")
        A = sp.csr_matrix(np.atleast_2d(A) if not sp.issparse(A) else A)
        b = np.broadcast_to(np.asarray(b, dtype=float), (A.shape[0],))
        if A.shape[1] != self.num_vars:
            raise ValueError("constraint width differs from num_vars")
        if not np.all(np.isfinite(b)):
            raise ValueError("right-hand sides must be finite")
        self.rows.append(A)
        self.relations.extend([relation] * A.shape[0])
        self.rhs.extend(b.tolist())

    def add_constraint(self, coeffs, relation: str, rhs: float):
        self.add_constraints(np.asarray(coeffs, dtype=float)[None, :], relation, [rhs])

    @property
    def matrix(self) -> sp.csr_matrix:
        if not self.rows:
            return sp.csr_matrix((0, self.num_vars))
        return sp.vstack(self.rows, format="csr")

    def residuals(self, x) -> np.ndarray:
        """Nonnegative violation of every row and bound at ``x``."""
        x = np.asarray(x, dtype=float)
        A = self.matrix
        rel = np.array(self.relations)
        b = np.array(self.rhs, dtype=float)
        ax = A @ x if A.shape[0] else np.zeros(0)
        row = np.where(
            rel == "<=", np.maximum(ax - b, 0.0),
            np.where(rel == ">=", np.maximum(b - ax, 0.0), np.abs(ax - b)),
        )
        lo = np.where(np.isfinite(self.lower), np.maximum(self.lower - x, 0.0), 0.0)
        hi = np.where(np.isfinite(self.upper), np.maximum(x - self.upper, 0.0), 0.0)
        return np.concatenate([row, lo, hi])

    def to_text(self) -> str:
        """Dump in CPLEX LP text format for cross-checking with external solvers."""
        def term_list(coeffs):
            parts = [f"{'+' if v >= 0 else '-'} {abs(v):.17g} x{j}" for j, v in coeffs if v != 0]
            return " ".join(parts) if parts else "0 x0"

        lines = ["Maximize" if self.sense == "max" else "Minimize"]
        c = self.objective if self.objective is not None else np.zeros(self.num_vars)
        lines.append(" obj: " + term_list(enumerate(c)))
        lines.append("Subject To")
        A = self.matrix.tocsr()
        for i in range(A.shape[0]):
            lo, hi = A.indptr[i], A.indptr[i + 1]
            terms = term_list(zip(A.indices[lo:hi], A.data[lo:hi]))
            lines.append(f" c{i}: {terms} {self.relations[i]} {self.rhs[i]:.17g}")
        lines.append("Bounds")
        for j in range(self.num_vars):
            lo, hi = self.lower[j], self.upper[j]
            lo_s = "-inf" if not np.isfinite(lo) else f"{lo:.17g}"
            hi_s = "+inf" if not np.isfinite(hi) else f"{hi:.17g}"
            lines.append(f" {lo_s} <= x{j} <= {hi_s}")
        lines.append("End")
        return "\n".join(lines) + "\n"


def solve(lp: LinearProgram, tol: float = DEFAULT_TOL) -> Solution:
    if tol <= 0:
        raise ValueError("tol must be positive")
    A = lp.matrix
    rel = np.array(lp.relations)
    b = np.array(lp.rhs, dtype=float)
    ub_mask = rel != "="
    sign = np.where(rel == ">=", -1.0, 1.0)[ub_mask]
    A_ub = sp.diags(sign) @ A[np.flatnonzero(ub_mask)] if ub_mask.any() else None
    b_ub = sign * b[ub_mask] if ub_mask.any() else None
    eq = np.flatnonzero(~ub_mask)
    A_eq = A[eq] if eq.size else None
    b_eq = b[eq] if eq.size else None

    c = np.zeros(lp.num_vars) if lp.objective is None else lp.objective
    if lp.sense == "max":
        c = -c
    bounds = np.column_stack([
        np.where(np.isfinite(lp.lower), lp.lower, -np.inf),
        np.where(np.isfinite(lp.upper), lp.upper, np.inf),
    ])
    bounds = [(None if not np.isfinite(lo) else lo, None if not np.isfinite(hi) else hi) for lo, hi in bounds]

    feas_tol = min(1e-7, max(tol, 1e-10))
    res = None
    for attempt_tol in (feas_tol, 1e-10):
        res = linprog(
            c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds,
            method="highs-ds",
            options={"primal_feasibility_tolerance": attempt_tol,
                     "dual_feasibility_tolerance": attempt_tol, "presolve": True},
        )
        if res.status == 2:
            return Solution("infeasible")
        if res.status == 3:
            raise LPError("problem is unbounded")
        if res.status != 0:
            raise LPError(f"solver failed: {res.message}")
        worst = float(np.max(lp.residuals(res.x), initial=0.0))
        if worst <= tol:
            value = None
            if lp.objective is not None:
                value = float(lp.objective @ res.x)
            status = "optimal" if lp.objective is not None else "feasible"
            return Solution(status, np.array(res.x), value, worst)
    raise LPError(f"residual {worst:.3g} exceeds tolerance {tol:.3g}")
