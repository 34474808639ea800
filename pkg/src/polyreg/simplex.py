"""Dense two-phase primal simplex with Bland's anti-cycling rule.

Solves linear programs in standard form

    minimize    c @ x
    subject to  A @ x = b,  x >= 0.

The tableau is kept dense, which is exact and fast enough at desk scale
(tens of constraints, a few thousand columns). Bland's rule (always pick
the lowest-index candidate) guarantees termination.
"""

import numpy as np

FEAS_TOL = 1e-9
OPT_TOL = 1e-9


class SimplexError(Exception):
    pass


class InfeasibleError(SimplexError):
    pass


class UnboundedError(SimplexError):
    pass


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    piv = T[row]
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            T[i] -= T[i, col] * piv
    basis[row] = col


def _run_simplex(T, basis, c, opt_tol, max_iter):
    """Iterate Bland pivots on canonical tableau T (m x (n+1)) until optimal."""
    m, n1 = T.shape
    n = n1 - 1
    for _ in range(max_iter):
        # reduced costs: c_j - c_B @ T[:, j]
        cb = c[basis]
        reduced = c[:n] - cb @ T[:, :n]
        # Bland: entering = lowest index with negative reduced cost
        candidates = np.flatnonzero(reduced < -opt_tol)
        if candidates.size == 0:
            return
        col = int(candidates[0])
        pos = T[:, col] > FEAS_TOL
        if not np.any(pos):
            raise UnboundedError("LP is unbounded along column %d" % col)
        rows = np.flatnonzero(pos)
        ratios = T[rows, n] / T[rows, col]
        rmin = ratios.min()
        # Bland tie-break: among minimal ratios, leave the lowest basis index
        tied = rows[ratios <= rmin + FEAS_TOL]
        row = int(tied[np.argmin(basis[tied])])
        _pivot(T, basis, row, col)
    raise SimplexError("simplex did not terminate in %d pivots" % max_iter)


def solve_lp(c, A, b, opt_tol=OPT_TOL, max_iter=None):
    """Solve min c@x s.t. A@x = b, x >= 0. Returns (x, value).

    Raises InfeasibleError / UnboundedError.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    if max_iter is None:
        max_iter = 50 * (m + n + 10)

    A = A.copy()
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # phase 1: artificial basis
    T = np.empty((m, n + m + 1))
    T[:, :n] = A
    T[:, n:n + m] = np.eye(m)
    T[:, -1] = b
    basis = np.arange(n, n + m)
    c1 = np.zeros(n + m)
    c1[n:] = 1.0
    _run_simplex(T, basis, c1, opt_tol, max_iter)
    phase1 = float(c1[basis] @ T[:, -1])
    if phase1 > FEAS_TOL * max(1.0, np.abs(b).max()):
        raise InfeasibleError("phase-1 objective %.3e > 0" % phase1)

    # drive remaining artificials out of the basis
    keep_rows = np.ones(m, dtype=bool)
    for i in range(m):
        if basis[i] >= n:
            cols = np.flatnonzero(np.abs(T[i, :n]) > FEAS_TOL)
            if cols.size:
                _pivot(T, basis, i, int(cols[0]))
            else:
                keep_rows[i] = False  # redundant constraint
    if not keep_rows.all():
        T = T[keep_rows]
        basis = basis[keep_rows]

    # phase 2 on original columns
    T2 = np.empty((T.shape[0], n + 1))
    T2[:, :n] = T[:, :n]
    T2[:, -1] = T[:, -1]
    _run_simplex(T2, basis, c, opt_tol, max_iter)

    x = np.zeros(n)
    x[basis] = T2[:, -1]
    return x, float(c @ x)


def lp_feasible(A, b, tol=FEAS_TOL):
    """Check feasibility of {A@x = b, x >= 0}. Returns (feasible, x_or_None)."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    try:
        x, _ = solve_lp(np.zeros(n), A, b)
    except InfeasibleError:
        return False, None
    if np.max(np.abs(A @ x - b)) > max(tol, tol * max(1.0, np.abs(b).max())):
        return False, None
    return True, x
