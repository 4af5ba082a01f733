"""Dense primal simplex and a lazy-constraint (cutting-plane) driver.

Problems have the form ``max c.x  s.t.  A x <= b,  0 <= x <= U``.  The
solver is a two-phase tableau simplex using Bland's rule, which cannot
cycle; the pricing LPs in this package are small (tens of rows).
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

TOL = 1e-9


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    """``coeffs . x <= bound``."""

    coeffs: np.ndarray
    bound: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))
        object.__setattr__(self, "bound", float(self.bound))

    def violation(self, x: np.ndarray) -> float:
        return float(self.coeffs @ x - self.bound)


@dataclass(frozen=True)
class LinearProgram:
    objective: np.ndarray
    constraints: tuple[Constraint, ...] = ()
    upper: Optional[Union[float, np.ndarray]] = None

    def __post_init__(self) -> None:
        c = np.asarray(self.objective, dtype=float)
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for k, con in enumerate(self.constraints):
            if con.coeffs.shape != c.shape:
                raise ValueError(f"constraint {k} has {con.coeffs.shape[0]} coefficients, "
                                 f"expected {c.shape[0]}")
            if not np.isfinite(con.bound):
                raise ValueError(f"constraint {k} has a non-finite bound")
        if self.upper is not None:
            u = np.broadcast_to(np.asarray(self.upper, dtype=float), c.shape).copy()
            object.__setattr__(self, "upper", u)

    @property
    def num_vars(self) -> int:
        return self.objective.shape[0]

    def with_constraints(self, extra: Iterable[Constraint]) -> "LinearProgram":
        return LinearProgram(self.objective, self.constraints + tuple(extra), self.upper)


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    x: np.ndarray = field(default_factory=lambda: np.zeros(0))
    objective_value: float = float("nan")

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class NonConvergentSeparation(RuntimeError):
    """Raised when the lazy driver exceeds its cut budget."""

    def __init__(self, message: str, last: LpSolution):
        super().__init__(message)
        self.last = last


def _pivot(T: np.ndarray, basis: list[int], row: int, col: int) -> None:
    T[row] /= T[row, col]
    colv = T[:, col].copy()
    colv[row] = 0.0
    T -= np.outer(colv, T[row])
    basis[row] = col


def _simplex(T: np.ndarray, basis: list[int], ncols: int) -> bool:
    """Optimize tableau ``T`` in place over its first ``ncols`` columns.

    The last row holds reduced costs (negative = improving), the last column
    the right-hand side.  Returns False when unbounded.

    Entering columns follow Dantzig's rule until a pivot is degenerate, then
    Bland's rule until the objective moves again; a cycle consists only of
    degenerate pivots, so it would have to run entirely under Bland's rule,
    which cannot cycle.
    """
    m = T.shape[0] - 1
    bland = False
    while True:
        reduced = T[-1, :ncols]
        improving = np.flatnonzero(reduced < -TOL)
        if improving.size == 0:
            return True
        col = int(improving[0] if bland else improving[np.argmin(reduced[improving])])
        column = T[:m, col]
        rows = np.flatnonzero(column > TOL)
        if rows.size == 0:
            return False
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + TOL * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        bland = best <= TOL
        _pivot(T, basis, row, col)


def solve(lp: LinearProgram) -> LpSolution:
    """Maximize ``lp``; deterministic for a fixed input."""
    n = lp.num_vars
    rows = [con.coeffs for con in lp.constraints]
    rhs = [con.bound for con in lp.constraints]
    if lp.upper is not None:
        for j in range(n):
            if np.isfinite(lp.upper[j]):
                e = np.zeros(n)
                e[j] = 1.0
                rows.append(e)
                rhs.append(lp.upper[j])
    k = len(rows)
    A = np.array(rows, dtype=float).reshape(k, n)
    b = np.array(rhs, dtype=float)
    neg = np.flatnonzero(b < 0)
    n_art = neg.size

    # columns: x (n) | slacks (k) | artificials (n_art) | rhs
    T = np.zeros((k + 1, n + k + n_art + 1))
    T[:k, :n] = A
    T[:k, n:n + k] = np.eye(k)
    T[:k, -1] = b
    basis = list(range(n, n + k))
    for a, r in enumerate(neg):
        T[r, :-1] *= -1.0
        T[r, -1] *= -1.0
        T[r, n + k + a] = 1.0
        basis[r] = n + k + a

    if n_art:
        # phase 1: maximize -sum(artificials)
        T[-1, n + k:n + k + n_art] = 1.0
        for r in neg:
            T[-1] -= T[r]
        _simplex(T, basis, n + k + n_art)
        if T[-1, -1] < -TOL * max(1.0, np.abs(b).max()):
            return LpSolution(LpStatus.INFEASIBLE)
        for r in range(k):
            if basis[r] >= n + k:
                nz = np.flatnonzero(np.abs(T[r, :n + k]) > TOL)
                if nz.size:
                    _pivot(T, basis, r, int(nz[0]))
        T = np.delete(T, np.s_[n + k:n + k + n_art], axis=1)
        keep = [r for r in range(k) if basis[r] < n + k]
        T = np.vstack([T[keep], T[-1:]])
        basis = [basis[r] for r in keep]

    c = lp.objective
    T[-1, :] = 0.0
    T[-1, :n] = -c
    for r, j in enumerate(basis):
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[r]
    if not _simplex(T, basis, n + k):
        return LpSolution(LpStatus.UNBOUNDED)

    x = np.zeros(n + k)
    for r, j in enumerate(basis):
        x[j] = T[r, -1]
    x = np.maximum(x[:n], 0.0)
    if lp.upper is not None:
        x = np.minimum(x, lp.upper)
    return LpSolution(LpStatus.OPTIMAL, x, float(c @ x))


SeparationResult = Union[None, Constraint, Sequence[Constraint]]


def solve_lazy(base: LinearProgram,
               separate: Callable[[np.ndarray], SeparationResult],
               max_cuts: int = 1000) -> LpSolution:
    """Solve ``base`` plus every constraint ``separate`` can generate.

    ``separate(x)`` returns the constraint(s) violated by ``x`` or ``None``.
    Each violated constraint is added and the LP re-solved from scratch until
    the separation routine is satisfied.
    """
    lp = base
    generated = 0
    while True:
        sol = solve(lp)
        if not sol.optimal:
            return sol
        found = separate(sol.x)
        if found is None:
            return sol
        cuts = [found] if isinstance(found, Constraint) else list(found)
        if not cuts:
            return sol
        generated += len(cuts)
        if generated > max_cuts:
            raise NonConvergentSeparation(
                f"separation did not converge after {generated} cuts", sol)
        logger.debug("adding %d cuts (total %d)", len(cuts), generated)
        lp = lp.with_constraints(cuts)
