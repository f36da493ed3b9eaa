"""Small dense linear programming: minimize c.x subject to A.x = b, x >= 0.

Sized for the structural-mobility problem (9 variables, 6 equality
constraints, one of them redundant) but written generically so it can be
checked against brute-force vertex enumeration. Two-phase simplex with
Bland's anti-cycling rule; the pivot loop itself lives in _kernels so the
compiled and pure backends share this driver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels

__all__ = ["LinearProgram", "LpSolution", "solve_lp"]

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9
MAX_ITER = 10_000


@dataclass
class LinearProgram:
    """min objective . x  subject to  a_eq . x = b_eq  and  x >= 0."""

    objective: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    var_count: int = field(init=False)

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.a_eq = np.atleast_2d(np.asarray(self.a_eq, dtype=float))
        self.b_eq = np.atleast_1d(np.asarray(self.b_eq, dtype=float))
        self.var_count = self.objective.shape[0]
        if self.objective.ndim != 1 or self.var_count < 1:
            raise ValueError("objective must be a nonempty vector")
        if self.a_eq.shape != (self.b_eq.shape[0], self.var_count):
            raise ValueError(
                f"constraint shapes inconsistent: A is {self.a_eq.shape}, "
                f"b has {self.b_eq.shape[0]} rows, {self.var_count} variables"
            )
        if not (np.all(np.isfinite(self.a_eq)) and np.all(np.isfinite(self.b_eq))
                and np.all(np.isfinite(self.objective))):
            raise ValueError("LP data must be finite")


@dataclass
class LpSolution:
    """Solver outcome; x and objective_value are None unless status is optimal."""

    x: np.ndarray | None
    objective_value: float | None
    status: str  # "optimal" | "infeasible" | "unbounded"


def _pivot(tableau: np.ndarray, basis: np.ndarray, leave: int, enter: int) -> None:
    # Same arithmetic as the kernel pivot: normalize the pivot row, then
    # eliminate the entering column from every other row (objective included).
    tableau[leave, :] /= tableau[leave, enter]
    pivrow = tableau[leave, :]
    for i in range(tableau.shape[0]):
        if i == leave:
            continue
        f = tableau[i, enter]
        if f != 0.0:
            tableau[i, :] -= f * pivrow
    basis[leave] = enter


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Two-phase dense simplex with Bland's rule.

    Deterministic: identical inputs walk identical pivot sequences, so the
    returned vertex is bit-stable. Optimal solutions satisfy the constraints
    to about 1e-9 and carry at most rounding-level negative components.
    """
    n = lp.var_count
    a = lp.a_eq.copy()
    b = lp.b_eq.copy()
    m = b.shape[0]

    # Artificials need b >= 0; flip rows where it is negative.
    neg = b < 0
    a[neg] *= -1.0
    b[neg] *= -1.0

    # Phase 1: minimize the sum of artificial variables. Tableau columns are
    # [structural | artificial | rhs]; the reduced-cost row starts at
    # -colsum(A) over structural columns and the rhs cell holds minus the
    # phase objective, i.e. -sum(b).
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = a
    tab[:m, n:n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[m, :n] = -a.sum(axis=0)
    tab[m, -1] = -b.sum()
    basis = np.arange(n, n + m, dtype=np.int64)

    code = _kernels.simplex_iterate(tab, basis, n, PIVOT_TOL, MAX_ITER)
    if code == 2:
        raise RuntimeError("simplex iteration cap hit in phase 1")
    if -tab[m, -1] > FEAS_TOL:
        return LpSolution(None, None, "infeasible")

    # Drive artificials stuck at zero level out of the basis; a row with no
    # structural pivot candidate is a redundant constraint and gets dropped.
    drop = []
    for i in range(m):
        if basis[i] < n:
            continue
        cand = -1
        for j in range(n):
            if abs(tab[i, j]) > PIVOT_TOL:
                cand = j
                break
        if cand < 0:
            drop.append(i)
        else:
            _pivot(tab, basis, i, cand)
    if drop:
        keep = [i for i in range(m) if i not in drop]
        tab = tab[keep + [m], :]
        basis = basis[keep]
        m = len(keep)

    # Phase 2: strip artificial columns and rebuild reduced costs for the
    # real objective from the current (all-structural) basis.
    c = lp.objective
    tab2 = np.zeros((m + 1, n + 1))
    tab2[:m, :n] = tab[:m, :n]
    tab2[:m, -1] = tab[:m, -1]
    cb = c[basis]
    tab2[m, :n] = c - cb @ tab2[:m, :n]
    tab2[m, -1] = -(cb @ tab2[:m, -1])

    code = _kernels.simplex_iterate(tab2, basis, n, PIVOT_TOL, MAX_ITER)
    if code == 2:
        raise RuntimeError("simplex iteration cap hit in phase 2")
    if code == 1:
        return LpSolution(None, None, "unbounded")

    x = np.zeros(n)
    x[basis] = tab2[:m, -1]
    return LpSolution(x, float(c @ x), "optimal")
