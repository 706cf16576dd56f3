"""Small dense linear-programming feasibility via two-phase simplex.

Solves: find x >= 0 with A x = b (A is m x n, m small). Phase one minimises
the sum of artificial variables with Bland's rule, which terminates without
cycling. Inputs of this size (a handful of friction-cone edge coefficients
against a 3-row wrench balance) need no factorisation machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_EPS = 1e-10


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    x: np.ndarray | None = None
    residual: float = 0.0  # phase-one objective at termination


def solve_feasibility(A, b, max_iters: int = 500) -> FeasibilityResult:
    """Find x >= 0 with A x = b, or report infeasibility.

    `residual` is the minimal attainable sum of artificials; it is ~0 for
    feasible systems and measures the infeasibility gap otherwise.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    if A.ndim != 2:
        raise ValueError("A must be 2-D")
    m, n = A.shape
    if b.shape != (m,):
        raise ValueError("b shape mismatch")
    if n == 0:
        ok = bool(np.all(np.abs(b) <= 1e-9))
        return FeasibilityResult(ok, np.zeros(0) if ok else None, float(np.abs(b).sum()))

    A = A.copy()
    neg = b < 0.0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # Tableau: [A | I_m | b]; artificials start basic.
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(n, n + m))
    # Objective row: minimise sum of artificials, expressed in reduced costs.
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()

    scale = max(1.0, float(np.abs(b).max()))
    for _ in range(max_iters):
        # Bland: smallest-index column with negative reduced cost.
        col = -1
        for j in range(n + m):
            if T[m, j] < -_EPS * scale:
                col = j
                break
        if col < 0:
            break
        # Ratio test, ties by smallest basis index (Bland).
        row, best = -1, (np.inf, np.inf)
        for i in range(m):
            a = T[i, col]
            if a > _EPS:
                cand = (T[i, -1] / a, basis[i])
                if cand < best:
                    best, row = cand, i
        if row < 0:
            break  # unbounded phase-one column: cannot happen, but stay safe
        _pivot(T, row, col)
        basis[row] = col

    residual = -T[m, -1]
    if residual > 1e-7 * scale:
        return FeasibilityResult(False, None, float(residual))

    x = np.zeros(n)
    for i, j in enumerate(basis):
        if j < n:
            x[j] = max(0.0, T[i, -1])
    return FeasibilityResult(True, x, float(max(0.0, residual)))


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]
