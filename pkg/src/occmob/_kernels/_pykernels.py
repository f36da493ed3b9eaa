"""Pure-numpy reference implementation of the hot kernels.

Every arithmetic step mirrors the compiled version operation for operation
(multiply then add/subtract, never fused), so the two backends agree bit for
bit. Keep the two files in sync when touching either.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def simplex_iterate(tableau, basis, n_cols, tol, max_iter):
    """Pivot a simplex tableau in place until optimal, unbounded, or capped.

    Layout: rows 0..m-1 are constraints, row m is the reduced-cost row, the
    last column is the right-hand side (so tableau[m, -1] is minus the
    current objective). basis holds the variable index basic in each
    constraint row and is updated in place. Entering candidates are columns
    0..n_cols-1; Bland's rule picks the lowest index with reduced cost below
    -tol, and the leaving row minimizes the ratio with ties broken by lowest
    basic variable index.

    Returns 0 when optimal, 1 when unbounded, 2 when max_iter was hit.
    """
    m = tableau.shape[0] - 1
    rhs = tableau.shape[1] - 1
    for _ in range(max_iter):
        enter = -1
        for j in range(n_cols):
            if tableau[m, j] < -tol:
                enter = j
                break
        if enter < 0:
            return 0
        leave = -1
        best = 0.0
        for i in range(m):
            a = tableau[i, enter]
            if a > tol:
                ratio = tableau[i, rhs] / a
                if leave < 0 or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave = i
                    best = ratio
        if leave < 0:
            return 1
        piv = tableau[leave, enter]
        tableau[leave, :] /= piv
        pivrow = tableau[leave, :]
        for i in range(m + 1):
            if i == leave:
                continue
            f = tableau[i, enter]
            if f != 0.0:
                tableau[i, :] -= f * pivrow
        basis[leave] = enter
    return 2


def tally_transitions(u, fathers, lo, span, cut_mid, cut_up):
    """Count father->child class transitions for a batch of agents.

    Agent i has a father in class fathers[i] and endowment
    lo[f] + u[i] * span[f]; the child's class is the number of thresholds
    (cut_mid, cut_up) at or below the endowment. Returns a 3x3 int64 count
    matrix with father class on rows.
    """
    theta = lo[fathers] + u * span[fathers]
    child = (theta >= cut_mid).astype(np.int64) + (theta >= cut_up)
    counts = np.bincount(fathers * 3 + child, minlength=9)
    return counts.reshape(3, 3).astype(np.int64, copy=False)
