"""Dense bounded-variable simplex solver.

Solves

    minimize    c . x
    subject to  A x = b,   lower <= x <= upper

with a two-phase method.  Pivoting uses Bland's rule throughout, which
guarantees termination and makes every solve reproducible bit for bit.
The solver targets the tiny dense programs generated by zonotope
membership and fiber queries (a handful of equality constraints, a few
dozen box-bounded variables); no effort is spent on sparsity or scaling.
Lower bounds must be finite, upper bounds may be ``+inf``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MathError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class LpResult:
    status: str
    x: np.ndarray | None
    objective: float


def _run_simplex(c, A, b, lower, upper, in_basis, at_upper, tol, max_iter):
    """Iterate the bounded simplex from a given basic solution.

    Mutates ``in_basis``/``at_upper`` in place and returns the final
    variable values, or raises on iteration overrun / singular basis.
    """
    m, n = A.shape
    for _ in range(max_iter):
        basis = np.flatnonzero(in_basis)
        nonbasic = np.flatnonzero(~in_basis)
        if basis.size != m:
            raise MathError("simplex basis lost rank bookkeeping")
        B = A[:, basis]
        x_nb = np.where(at_upper[nonbasic], upper[nonbasic], lower[nonbasic])
        try:
            x_b = np.linalg.solve(B, b - A[:, nonbasic] @ x_nb)
            y = np.linalg.solve(B.T, c[basis])
        except np.linalg.LinAlgError as exc:
            raise MathError("singular simplex basis") from exc

        reduced = c[nonbasic] - A[:, nonbasic].T @ y
        entering = -1
        for pos, j in enumerate(nonbasic):
            d_j = reduced[pos]
            if not at_upper[j] and d_j < -tol:
                entering = j
                break
            if at_upper[j] and d_j > tol:
                entering = j
                break
        if entering < 0:
            x = np.empty(n)
            x[nonbasic] = x_nb
            x[basis] = x_b
            return x

        sigma = -1.0 if at_upper[entering] else 1.0
        w = np.linalg.solve(B, A[:, entering])

        # Largest step for the entering variable before some basic
        # variable (or the entering variable itself) hits a bound.
        step = upper[entering] - lower[entering]
        leaving_pos = -1
        leaving_to_upper = False
        for pos in range(m):
            coef = sigma * w[pos]
            i = basis[pos]
            if coef > tol:
                ratio = (x_b[pos] - lower[i]) / coef
                hits_upper = False
            elif coef < -tol:
                ratio = (x_b[pos] - upper[i]) / coef
                hits_upper = True
            else:
                continue
            ratio = max(ratio, 0.0)
            if ratio < step - tol or (
                ratio < step + tol
                and leaving_pos >= 0
                and i < basis[leaving_pos]
            ):
                step = ratio
                leaving_pos = pos
                leaving_to_upper = hits_upper

        if leaving_pos < 0:
            if not np.isfinite(step):
                return None  # unbounded direction
            at_upper[entering] = not at_upper[entering]  # bound flip
            continue

        leaving = basis[leaving_pos]
        in_basis[leaving] = False
        at_upper[leaving] = leaving_to_upper
        in_basis[entering] = True
        at_upper[entering] = False
    raise MathError("simplex iteration limit exceeded")


def solve_lp(c, A, b, lower, upper, *, tol=DEFAULT_TOL, max_iter=None):
    """Minimize ``c . x`` subject to ``A x = b`` and box bounds.

    Returns an :class:`LpResult` whose status is one of ``optimal``,
    ``infeasible`` or ``unbounded``.  Feasibility is decided by a
    phase-1 artificial objective driven below ``tol``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    m, n = A.shape
    lower = np.broadcast_to(np.asarray(lower, dtype=float), (n,)).copy()
    upper = np.broadcast_to(np.asarray(upper, dtype=float), (n,)).copy()
    if b.size != m or c.size != n:
        raise ValueError("inconsistent LP shapes")
    if not np.all(np.isfinite(lower)):
        raise ValueError("lower bounds must be finite")
    if np.any(lower > upper):
        return LpResult(INFEASIBLE, None, np.inf)
    if max_iter is None:
        max_iter = 100 * (n + m + 10)

    # Phase 1: start all structural variables at their lower bound and
    # absorb the residual into signed artificial variables.
    residual = b - A @ lower
    signs = np.where(residual >= 0.0, 1.0, -1.0)
    A1 = np.hstack([A, np.diag(signs)])
    lower1 = np.concatenate([lower, np.zeros(m)])
    upper1 = np.concatenate([upper, np.full(m, np.inf)])
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    in_basis = np.zeros(n + m, dtype=bool)
    in_basis[n:] = True
    at_upper = np.zeros(n + m, dtype=bool)

    x1 = _run_simplex(c1, A1, b, lower1, upper1, in_basis, at_upper, tol, max_iter)
    if x1 is None or float(x1[n:].sum()) > tol:
        return LpResult(INFEASIBLE, None, np.inf)

    # Phase 2: pin artificials at zero and optimize the real objective.
    upper1[n:] = 0.0
    c2 = np.concatenate([c, np.zeros(m)])
    x2 = _run_simplex(c2, A1, b, lower1, upper1, in_basis, at_upper, tol, max_iter)
    if x2 is None:
        return LpResult(UNBOUNDED, None, -np.inf)
    x = x2[:n]
    return LpResult(OPTIMAL, x, float(c @ x))


def feasible(A, b, lower, upper, *, tol=DEFAULT_TOL):
    """True iff ``{x : A x = b, lower <= x <= upper}`` is nonempty.

    A point counts as feasible when the phase-1 artificial objective
    (the l1 norm of the equality residual) can be driven to ``tol``.
    """
    n = np.atleast_2d(np.asarray(A, dtype=float)).shape[1]
    result = solve_lp(np.zeros(n), A, b, lower, upper, tol=tol)
    return result.status == OPTIMAL
