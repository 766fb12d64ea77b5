"""Dense two-phase revised simplex with deterministic anti-cycling pivoting.

Problems are stated as maximization over variables with lower bound 0 or
-inf, equality rows, and <= inequality rows.  Internally everything is
reduced to standard form min c.x, Ax = b, x >= 0; free variables split into
positive and negative parts, inequalities get slacks, and phase 1 uses
artificial columns.  Entering-variable selection is Dantzig's rule with
smallest-index tie-breaks, switching permanently to Bland's rule after a
run of degenerate pivots, which guarantees termination.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_NEG_INF = float("-inf")


class LpError(ValueError):
    """Malformed linear program."""


@dataclass
class LpProblem:
    """maximize objective.x  s.t.  eq rows ==, ineq rows <=, bounds 0/-inf."""

    objective: np.ndarray
    eq: list[tuple[np.ndarray, float]] = field(default_factory=list)
    ineq: list[tuple[np.ndarray, float]] = field(default_factory=list)
    lower_bounds: np.ndarray | None = None  # 0.0 or -inf per variable

    def __post_init__(self) -> None:
        self.objective = np.asarray(self.objective, dtype=float)
        nvar = self.objective.size
        self.eq = [(np.asarray(r, dtype=float), float(b)) for r, b in self.eq]
        self.ineq = [(np.asarray(r, dtype=float), float(b)) for r, b in self.ineq]
        if self.lower_bounds is None:
            self.lower_bounds = np.zeros(nvar)
        self.lower_bounds = np.asarray(self.lower_bounds, dtype=float)
        if self.lower_bounds.size != nvar:
            raise LpError("lower_bounds length mismatch")
        for r, _ in self.eq + self.ineq:
            if r.size != nvar:
                raise LpError("constraint row length mismatch")
            if not np.all(np.isfinite(r)):
                raise LpError("non-finite constraint coefficient")
        if not np.all(np.isfinite(self.objective)):
            raise LpError("non-finite objective coefficient")

    @property
    def nvar(self) -> int:
        return self.objective.size


@dataclass
class LpSolution:
    status: str  # optimal | infeasible | unbounded
    value: float
    primal: np.ndarray | None
    dual_eq: np.ndarray | None
    dual_ineq: np.ndarray | None
    feasibility_residual: float = 0.0
    compl_slack_residual: float = 0.0
    iterations: int = 0


class _Tableau:
    """Standard form min c.x, Ax=b (b>=0), x>=0 solved by revised simplex."""

    def __init__(self, a: np.ndarray, b: np.ndarray, tol: float):
        self.a = a
        self.b = b
        self.m, self.n = a.shape
        self.tol = tol
        self.basis: list[int] = []
        self.binv = np.eye(self.m)
        self.iterations = 0

    def refactorize(self) -> None:
        self.binv = np.linalg.inv(self.a[:, self.basis])

    def xb(self) -> np.ndarray:
        return self.binv @ self.b

    def run(self, c: np.ndarray, max_iter: int) -> str:
        """Minimize c.x from the current basis; returns 'optimal' or 'unbounded'."""
        bland = False
        degenerate_run = 0
        since_refactor = 0
        while True:
            if self.iterations >= max_iter:
                raise LpError("simplex iteration cap exceeded (assembly bug?)")
            self.iterations += 1
            since_refactor += 1
            if since_refactor >= 200:
                self.refactorize()
                since_refactor = 0
            y = c[self.basis] @ self.binv
            reduced = c - y @ self.a
            reduced[self.basis] = 0.0
            candidates = np.nonzero(reduced < -self.tol)[0]
            if candidates.size == 0:
                return "optimal"
            if bland:
                enter = int(candidates[0])
            else:
                enter = int(candidates[np.argmin(reduced[candidates])])
            d = self.binv @ self.a[:, enter]
            xb = self.xb()
            rows = np.nonzero(d > self.tol)[0]
            if rows.size == 0:
                return "unbounded"
            ratios = xb[rows] / d[rows]
            theta = ratios.min()
            tied = rows[ratios <= theta + self.tol]
            # smallest basis column index among ties (Bland-compatible)
            leave_row = int(tied[np.argmin([self.basis[r] for r in tied])])
            if theta <= self.tol:
                degenerate_run += 1
                if degenerate_run >= 40:
                    bland = True
            else:
                degenerate_run = 0
            self._pivot(enter, leave_row, d)

    def _pivot(self, enter: int, row: int, d: np.ndarray) -> None:
        self.basis[row] = enter
        piv = d[row]
        self.binv[row] /= piv
        other = np.arange(self.m) != row
        self.binv[other] -= np.outer(d[other], self.binv[row])


def lp_solve(problem: LpProblem, tol: float = 1e-9, max_iter: int | None = None) -> LpSolution:
    """Solve an LpProblem; statuses optimal/infeasible/unbounded, never raises on degeneracy."""
    if tol <= 0:
        raise LpError("tol must be positive")
    nvar = problem.nvar
    free = np.isinf(problem.lower_bounds)
    if np.any(~free & (problem.lower_bounds != 0.0)):
        raise LpError("lower bounds must be 0 or -inf")

    # column layout: [x_j (all vars)] + [x_j^- for free j] + [slacks]
    neg_col = {}
    ncols = nvar
    for j in np.nonzero(free)[0]:
        neg_col[int(j)] = ncols
        ncols += 1
    n_ineq = len(problem.ineq)
    slack0 = ncols
    ncols += n_ineq

    m = len(problem.eq) + n_ineq
    if m == 0:
        # no constraints: optimum is 0 unless some objective direction escapes
        direction = problem.objective.copy()
        improving = (direction > 0) | (free & (direction != 0))
        if np.any(improving):
            return LpSolution("unbounded", float("inf"), None, None, None)
        x = np.zeros(nvar)
        return LpSolution("optimal", 0.0, x, np.zeros(0), np.zeros(0))

    a = np.zeros((m, ncols))
    b = np.zeros(m)
    for i, (row, rhs) in enumerate(problem.eq):
        a[i, :nvar] = row
        b[i] = rhs
    for k, (row, rhs) in enumerate(problem.ineq):
        i = len(problem.eq) + k
        a[i, :nvar] = row
        b[i] = rhs
        a[i, slack0 + k] = 1.0
    for j, col in neg_col.items():
        a[:, col] = -a[:, j]

    flip = np.where(b < 0, -1.0, 1.0)
    a *= flip[:, None]
    b *= flip

    c_min = np.zeros(ncols)
    c_min[:nvar] = -problem.objective
    for j, col in neg_col.items():
        c_min[col] = problem.objective[j]

    # phase 1
    full = np.hstack([a, np.eye(m)])
    tab = _Tableau(full, b, tol)
    tab.basis = list(range(ncols, ncols + m))
    c1 = np.zeros(ncols + m)
    c1[ncols:] = 1.0
    cap = max_iter or 200 * (m + ncols + 10)
    status = tab.run(c1, cap)
    assert status == "optimal"  # phase-1 objective is bounded below by 0
    if c1[tab.basis] @ tab.xb() > np.sqrt(tol):
        return LpSolution("infeasible", float("nan"), None, None, None,
                          iterations=tab.iterations)

    # drive leftover artificials out of the basis; drop redundant rows
    keep_rows = list(range(m))
    for row in range(m):
        if tab.basis[row] >= ncols:
            tableau_row = tab.binv[row] @ tab.a[:, :ncols]
            pivots = np.nonzero(np.abs(tableau_row) > np.sqrt(tol))[0]
            if pivots.size:
                enter = int(pivots[0])
                d = tab.binv @ tab.a[:, enter]
                tab._pivot(enter, row, d)
            else:
                keep_rows.remove(row)
    rows = np.array(keep_rows, dtype=int)
    basis = [tab.basis[r] for r in keep_rows]
    phase1_iters = tab.iterations
    tab = _Tableau(a[rows], b[rows], tol)
    tab.basis = basis
    tab.iterations = phase1_iters
    tab.refactorize()
    flip_kept = flip[rows]

    # phase 2
    status = tab.run(c_min, cap)
    if status == "unbounded":
        return LpSolution("unbounded", float("inf"), None, None, None,
                          iterations=tab.iterations)
    tab.refactorize()

    xfull = np.zeros(ncols)
    xb = tab.xb()
    for row, col in enumerate(tab.basis):
        xfull[col] = xb[row]
    x = xfull[:nvar].copy()
    for j, col in neg_col.items():
        x[j] -= xfull[col]
    value = float(problem.objective @ x)

    y = c_min[tab.basis] @ tab.binv
    dual_full = np.zeros(m)  # zero multipliers on dropped redundant rows
    for new, orig in enumerate(keep_rows):
        dual_full[orig] = -flip_kept[new] * y[new]
    n_eq = len(problem.eq)
    dual_eq = dual_full[:n_eq]
    dual_ineq = dual_full[n_eq:]

    feas = 0.0
    for row, rhs in problem.eq:
        feas = max(feas, abs(float(row @ x) - rhs))
    slack_viol = []
    for row, rhs in problem.ineq:
        s = rhs - float(row @ x)
        feas = max(feas, max(0.0, -s))
        slack_viol.append(s)
    comp = 0.0
    for k, s in enumerate(slack_viol):
        comp = max(comp, abs(dual_ineq[k] * s))
    red = problem.objective - (
        np.array([r for r, _ in problem.eq]).T @ dual_eq if n_eq else 0.0
    ) - (np.array([r for r, _ in problem.ineq]).T @ dual_ineq if n_ineq else 0.0)
    comp = max(comp, float(np.max(np.abs(red * x))) if nvar else 0.0)

    return LpSolution("optimal", value, x, dual_eq, dual_ineq,
                      feasibility_residual=feas, compl_slack_residual=comp,
                      iterations=tab.iterations)
