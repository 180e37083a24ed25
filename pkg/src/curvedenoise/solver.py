"""Least squares with linear equality constraints and box bounds.

``solve_bounded`` minimizes ``||H x - y||^2`` subject to ``C x = b`` and
``lo <= x <= hi`` by repeated equality-constrained solves: every variable
that lands outside its box is pinned to the violated bound, its column is
moved to the right-hand sides, and the remaining variables are solved
again.  Pinned variables are never released, so the loop ends after at
most ``n`` rounds.  This is a heuristic and not an exact active-set
method.  When it pins every variable while the equality could still be
met inside the box, a feasible point is recovered and refined by a small
primal active-set loop instead of dropping the equality.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

REG_EPS = 1e-12


class SolverError(ArithmeticError):
    """Raised when the equality-constrained system cannot be solved."""


@dataclass(frozen=True)
class LinearSystem:
    """One local problem: angle rows ``H, y``, balance rows ``C, b``, box."""

    H: np.ndarray
    y: np.ndarray
    C: np.ndarray
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        n = len(self.lo)
        H = np.asarray(self.H, dtype=float).reshape(-1, n)
        C = np.asarray(self.C, dtype=float).reshape(-1, n)
        for name, val in (("H", H), ("y", np.asarray(self.y, float).reshape(-1)),
                          ("C", C), ("b", np.asarray(self.b, float).reshape(-1)),
                          ("lo", np.asarray(self.lo, float)), ("hi", np.asarray(self.hi, float))):
            object.__setattr__(self, name, val)
        if len(self.y) != len(H) or len(self.b) != len(C) or len(self.hi) != n:
            raise ValueError("inconsistent LinearSystem dimensions")
        if not (np.all(self.lo <= 0) and np.all(self.hi >= 0)):
            raise ValueError("bounds must satisfy lo <= 0 <= hi")

    @property
    def n(self) -> int:
        return len(self.lo)


@dataclass
class SolveResult:
    x: np.ndarray
    clamped: Dict[int, float] = field(default_factory=dict)
    equality_residual: float = 0.0
    objective: float = 0.0
    iterations: int = 0
    kept_equality: bool = True


def lagrange_closed_form(H, y, C, b, eps: float = REG_EPS) -> np.ndarray:
    """Closed-form constrained least squares through Lagrange multipliers.

    ``A = H^T H + eps * trace(H^T H) / n * I`` and
    ``x = A^-1 (H^T y - C^T (C A^-1 C^T)^-1 (C A^-1 H^T y - b))``.
    Good for well-conditioned problems; ``solve_equality_ls`` is the robust
    route.
    """
    H, C = np.atleast_2d(H), np.asarray(C, float)
    n = H.shape[1]
    A = H.T @ H
    A = A + eps * np.trace(A) / n * np.eye(n)
    Ai_Hy = np.linalg.solve(A, H.T @ y)
    if C.size == 0:
        return Ai_Hy
    C = C.reshape(-1, n)
    Ai_Ct = np.linalg.solve(A, C.T)
    lam = np.linalg.solve(C @ Ai_Ct, C @ Ai_Hy - np.asarray(b, float).reshape(-1))
    return Ai_Hy - Ai_Ct @ lam


def solve_equality_ls(H, y, C, b) -> np.ndarray:
    """Minimize ``||H x - y||`` subject to ``C x = b``.

    Uses the null space of ``C``: a particular solution of the constraint
    plus the least-squares correction inside ``null(C)``.  Where the
    objective leaves directions undetermined the minimum-norm solution is
    returned, which is the limit of the regularized closed form as the
    regularization goes to zero.
    """
    H = np.asarray(H, dtype=float)
    if H.ndim != 2:
        raise ValueError("H must be a 2D array (use shape (0, n) for no rows)")
    n = H.shape[1]
    y = np.asarray(y, dtype=float).reshape(-1)
    C = np.asarray(C, dtype=float).reshape(-1, n)
    b = np.asarray(b, dtype=float).reshape(-1)
    if not (np.all(np.isfinite(H)) and np.all(np.isfinite(y))
            and np.all(np.isfinite(C)) and np.all(np.isfinite(b))):
        raise SolverError("non-finite entries in the linear system")
    if len(C) == 0:
        if len(H) == 0:
            return np.zeros(n)
        return np.linalg.lstsq(H, y, rcond=None)[0]
    if len(C) > n:
        raise SolverError(f"{len(C)} equality rows for {n} unknowns")
    U, s, Vt = np.linalg.svd(C)
    tol = max(C.shape) * np.finfo(float).eps * (s[0] if len(s) else 0.0)
    rank = int(np.count_nonzero(s > tol))
    if rank < len(C):
        cond = np.inf if rank == 0 or s[-1] == 0 else s[0] / s[-1]
        raise SolverError(f"equality rows are rank deficient (condition estimate {cond:.3g})")
    x0 = Vt[:rank].T @ ((U[:, :rank].T @ b) / s[:rank])
    N = Vt[rank:].T
    if N.shape[1] == 0 or len(H) == 0:
        return x0
    z = np.linalg.lstsq(H @ N, y - H @ x0, rcond=None)[0]
    return x0 + N @ z


def solve_bounded(system: LinearSystem, max_rounds: Optional[int] = None) -> SolveResult:
    """Clamp-and-resolve loop over :func:`solve_equality_ls`.

    All out-of-bound variables are pinned at once in each round.  The
    equality rows are dropped when no free variable is left to satisfy
    them or their free part vanishes; ``kept_equality`` reports this.
    """
    H, y, C, b, lo, hi = system.H, system.y, system.C, system.b, system.lo, system.hi
    n = system.n
    x = np.zeros(n)
    fixed = np.zeros(n, dtype=bool)
    clamped: Dict[int, float] = {}
    kept = True
    rounds = 0
    max_rounds = n + 1 if max_rounds is None else max_rounds
    while rounds < max_rounds:
        free = np.flatnonzero(~fixed)
        if free.size == 0:
            break
        rounds += 1
        y_f = y - H[:, fixed] @ x[fixed]
        b_f = b - C[:, fixed] @ x[fixed]
        C_f = C[:, free]
        use_eq = len(C) > 0 and free.size >= len(C) and np.linalg.norm(C_f) > 0
        if use_eq:
            try:
                x_f = solve_equality_ls(H[:, free], y_f, C_f, b_f)
            except SolverError:
                use_eq = False
        if not use_eq:
            x_f = solve_equality_ls(H[:, free], y_f, np.zeros((0, free.size)), [])
        kept = use_eq
        below = x_f < lo[free]
        above = x_f > hi[free]
        x[free] = x_f
        if not (below.any() or above.any()):
            break
        for j in free[below]:
            x[j] = lo[j]
            clamped[int(j)] = float(lo[j])
        for j in free[above]:
            x[j] = hi[j]
            clamped[int(j)] = float(hi[j])
        fixed[free[below | above]] = True
    if fixed.all() and len(C):
        kept = False
    x = np.clip(x, lo, hi)
    if not kept and len(C) == 1 and _attainable(C[0], b[0], lo, hi):
        x = _active_set(H, y, C[0], b[0], lo, hi, _box_projection(x, C[0], b[0], lo, hi))
        clamped = {int(j): float(x[j]) for j in np.flatnonzero((x == lo) | (x == hi))}
        kept = True
    r = H @ x - y
    eq = float(np.linalg.norm(C @ x - b)) if len(C) else 0.0
    return SolveResult(x, clamped, eq, float(r @ r), rounds, bool(kept))


def _attainable(c, b, lo, hi) -> bool:
    lo_val = float(np.sum(np.minimum(c * lo, c * hi)))
    hi_val = float(np.sum(np.maximum(c * lo, c * hi)))
    return lo_val <= b <= hi_val and np.any(c != 0)


def _box_projection(x, c, b, lo, hi):
    """Closest point to ``x`` on ``c . z = b`` inside the box.

    ``c . clip(x + t c)`` is nondecreasing in ``t``, so ``t`` is found by
    bisection; the last free coordinate then absorbs the rounding.
    """
    def at(t):
        return np.clip(x + t * c, lo, hi)

    span = float(np.max(hi - lo)) / float(np.min(np.abs(c[c != 0]))) + 1.0
    t_lo, t_hi = -span, span
    for _ in range(200):
        mid = 0.5 * (t_lo + t_hi)
        if c @ at(mid) < b:
            t_lo = mid
        else:
            t_hi = mid
    z = at(0.5 * (t_lo + t_hi))
    inner = np.flatnonzero((z > lo) & (z < hi) & (c != 0))
    if inner.size:
        j = inner[np.argmax(np.abs(c[inner]))]
        z[j] = np.clip(z[j] + (b - c @ z) / c[j], lo[j], hi[j])
    return z


def _active_set(H, y, c, b, lo, hi, x, max_iter=None):
    """Primal active-set iterations for one equality row, from a feasible ``x``."""
    n = len(x)
    at_bound = (x <= lo) | (x >= hi)
    max_iter = 20 * (n + 1) if max_iter is None else max_iter
    for _ in range(max_iter):
        free = np.flatnonzero(~at_bound)
        r = H @ x - y
        p = np.zeros(n)
        if free.size:
            cf = c[free][None, :]
            rows = cf if np.linalg.norm(cf) > 0 else np.zeros((0, free.size))
            try:
                p[free] = solve_equality_ls(H[:, free], -r, rows, np.zeros(len(rows)))
            except SolverError:
                p[free] = solve_equality_ls(H[:, free], -r, np.zeros((0, free.size)), [])
        if np.linalg.norm(p) <= 1e-14 * (1.0 + np.linalg.norm(x)):
            g = H.T @ r
            lam = 0.0
            if free.size and np.any(c[free] != 0):
                lam = float(np.linalg.lstsq(c[free][:, None], -g[free], rcond=None)[0][0])
            mu = g + lam * c
            # positive mu at a lower bound and negative mu at an upper bound are optimal
            wrong = np.where(at_bound & (x <= lo), -mu, 0.0) + np.where(at_bound & (x >= hi), mu, 0.0)
            j = int(np.argmax(wrong))
            if wrong[j] <= 1e-12 * (1.0 + float(np.max(np.abs(g)))):
                return x
            at_bound[j] = False
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            room = np.where(p > 0, (hi - x) / p, np.where(p < 0, (lo - x) / p, np.inf))
        room[at_bound] = np.inf
        k = int(np.argmin(room))
        step = min(1.0, float(room[k]))
        x = np.clip(x + step * p, lo, hi)
        if step < 1.0:
            x[k] = hi[k] if p[k] > 0 else lo[k]
            at_bound[k] = True
    return x
