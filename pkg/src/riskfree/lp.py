"""Small dense linear programming via a two-phase tableau simplex.

Intended for desk-scale problems (hundreds of rows at most).  Bland's rule
is used throughout, so the iteration terminates without cycling.  All data
are dense numpy arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import LPError

_TOL = 1e-9


def _pivot(T: np.ndarray, basis: list[int], row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]
    basis[row] = col


def _iterate(T: np.ndarray, basis: list[int], allowed: np.ndarray, max_iter: int) -> None:
    """Run simplex iterations on tableau T (objective in the last row)."""
    n_rows = T.shape[0] - 1
    for _ in range(max_iter):
        enter = -1
        for j in range(T.shape[1] - 1):
            if allowed[j] and T[-1, j] < -_TOL:
                enter = j
                break
        if enter < 0:
            return
        col = T[:n_rows, enter]
        pos = col > _TOL
        if not np.any(pos):
            raise LPError("unbounded linear program")
        ratios = np.full(n_rows, np.inf)
        ratios[pos] = T[:n_rows, -1][pos] / col[pos]
        best = ratios.min()
        candidates = np.nonzero(ratios <= best + 1e-12)[0]
        row = int(min(candidates, key=lambda r: basis[r]))
        _pivot(T, basis, row, enter)
    raise LPError("simplex iteration limit exceeded")


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None) -> tuple[np.ndarray, float]:
    """Minimize c @ x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0.

    Returns (x, objective).  Raises :class:`LPError` on infeasible or
    unbounded problems.
    """
    c = np.asarray(c, dtype=float).ravel()
    n = c.size
    rows: list[np.ndarray] = []
    rhs: list[float] = []
    slack_rows: list[int] = []
    if A_ub is not None:
        A_ub = np.asarray(A_ub, dtype=float).reshape(-1, n)
        b_ub = np.asarray(b_ub, dtype=float).ravel()
        for i in range(A_ub.shape[0]):
            rows.append(A_ub[i])
            rhs.append(float(b_ub[i]))
            slack_rows.append(i)
    if A_eq is not None:
        A_eq = np.asarray(A_eq, dtype=float).reshape(-1, n)
        b_eq = np.asarray(b_eq, dtype=float).ravel()
        for i in range(A_eq.shape[0]):
            rows.append(A_eq[i])
            rhs.append(float(b_eq[i]))
    if not rows:
        if np.any(c < 0):
            raise LPError("unbounded linear program")
        return np.zeros(n), 0.0

    m_rows = len(rows)
    n_slack = len(slack_rows)
    A = np.zeros((m_rows, n + n_slack))
    b = np.array(rhs)
    for k, i in enumerate(slack_rows):
        A[i, n + k] = 1.0
    for i, row in enumerate(rows):
        A[i, :n] = row
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # A row is born basic when its slack column survived with coefficient +1.
    basis = [-1] * m_rows
    needs_art = []
    for i in range(m_rows):
        if i < n_slack and not neg[i]:
            basis[i] = n + i
        else:
            needs_art.append(i)

    n_art = len(needs_art)
    width = n + n_slack + n_art
    T = np.zeros((m_rows + 1, width + 1))
    T[:m_rows, : n + n_slack] = A
    T[:m_rows, -1] = b
    for k, i in enumerate(needs_art):
        T[i, n + n_slack + k] = 1.0
        basis[i] = n + n_slack + k

    allowed = np.ones(width, dtype=bool)

    if n_art:
        # Phase 1: minimize the sum of artificials.
        T[-1, n + n_slack : n + n_slack + n_art] = 1.0
        for i in needs_art:
            T[-1] -= T[i]
        _iterate(T, basis, allowed, max_iter=50 * (m_rows + width))
        if T[-1, -1] < -1e-7:
            raise LPError("infeasible linear program")
        # Drive any leftover artificial out of the basis.
        for i in range(m_rows):
            if basis[i] >= n + n_slack:
                pivot_col = -1
                for j in range(n + n_slack):
                    if abs(T[i, j]) > _TOL:
                        pivot_col = j
                        break
                if pivot_col >= 0:
                    _pivot(T, basis, i, pivot_col)
        allowed[n + n_slack :] = False

    # Phase 2: the real objective.
    T[-1, :] = 0.0
    T[-1, :n] = c
    for i in range(m_rows):
        if basis[i] < width and T[-1, basis[i]] != 0.0:
            T[-1] -= T[-1, basis[i]] * T[i]
    _iterate(T, basis, allowed, max_iter=50 * (m_rows + width))

    x = np.zeros(width)
    for i in range(m_rows):
        if basis[i] < width:
            x[basis[i]] = T[i, -1]
    return x[:n], float(c @ x[:n])
