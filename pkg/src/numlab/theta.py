"""Lovasz theta: LP path for circulant graphs, first-order SDP path in general.

Circulant graphs have circulant adjacency matrices, diagonalized by the DFT,
so theta becomes a linear program.  Four equivalent formulations are
assembled (primal/dual in the vertex 'time' domain and the transformed
'frequency' domain).  Under the symmetry x_k = x_{n-k} the imaginary parts
of the DFT rows cancel, so every constraint is assembled from real cosine
rows, and variables are folded to indices 0..floor(n/2).

The general-graph path solves the standard theta SDP
    max <J, X>  s.t.  Tr X = 1, X_ij = 0 on edges, X PSD
by an alternating-direction augmented-Lagrangian scheme whose per-iteration
cost is one dense symmetric eigendecomposition.  Both sides of the reported
bracket are exact certificates: any symmetric matrix with ones on the
diagonal and non-edges upper-bounds theta through its top eigenvalue, and
any feasible X lower-bounds it through <J, X>.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .graphs import CirculantSpec, Graph, GraphError, complement, small_invariants
from .simplex import LpProblem, LpSolution, lp_solve

LP_FORMULATIONS = ("time-primal", "time-dual", "freq-primal", "freq-dual")
MAX_CIRCULANT_N = 100_000
MAX_SDP_N = 200


class ThetaError(RuntimeError):
    """Solver failure that indicates an assembly bug, not a bad input."""


@dataclass
class ThetaResult:
    value: float
    gap: float
    method: str
    n: int
    primal_witness: np.ndarray | None = None
    dual_certificate: dict[str, Any] = field(default_factory=dict)
    wallclock_ms: float = 0.0
    converged: bool = True
    conn: tuple[int, ...] | None = None
    edges_hash: str | None = None

    def __post_init__(self) -> None:
        if self.gap < 0:
            raise ThetaError("negative duality gap")

    def to_json(self) -> dict[str, Any]:
        out = {
            "value": self.value,
            "gap": self.gap,
            "method": self.method,
            "n": self.n,
            "wallclock_ms": self.wallclock_ms,
        }
        if self.conn is not None:
            out["conn"] = list(self.conn)
        if self.edges_hash is not None:
            out["edges_hash"] = self.edges_hash
        return out


def _fold_multiplicity(n: int) -> np.ndarray:
    """Orbit sizes of k ~ n-k on 0..floor(n/2)."""
    h = n // 2
    k = np.arange(h + 1)
    mult = np.full(h + 1, 2.0)
    mult[0] = 1.0
    if n % 2 == 0:
        mult[h] = 1.0
    return mult


def _cos_row(n: int, j: int) -> np.ndarray:
    k = np.arange(n // 2 + 1)
    return np.cos(2.0 * np.pi * j * k / n)


def _unfold(folded: np.ndarray, n: int) -> np.ndarray:
    full = np.zeros(n)
    h = n // 2
    full[: h + 1] = folded
    for k in range(1, (n - 1) // 2 + 1):
        full[n - k] = folded[k]
    return full


def theta_circulant(spec: CirculantSpec, formulation: str = "freq-primal") -> ThetaResult:
    """Theta of a circulant graph by the selected LP formulation."""
    if formulation not in LP_FORMULATIONS:
        raise ValueError(f"unknown formulation {formulation!r}")
    if spec.n > MAX_CIRCULANT_N:
        raise GraphError(f"circulant size {spec.n} exceeds cap {MAX_CIRCULANT_N}")
    t0 = time.perf_counter()
    n = spec.n
    h = n // 2
    mult = _fold_multiplicity(n)
    conn = sorted(spec.conn)
    conn_bar = sorted(set(range(1, h + 1)) - set(conn))

    value, solution, witness, dual_match = _assemble_and_solve(
        n, h, mult, conn, conn_bar, formulation
    )
    if solution is not None and solution.status != "optimal":
        raise ThetaError(
            f"{formulation} LP returned {solution.status}; theta LPs are always "
            "feasible and bounded, so the assembly is broken"
        )

    if solution is not None:
        gap = dual_match + solution.feasibility_residual + solution.compl_slack_residual
        dual_cert = {
            "dual_eq": None if solution.dual_eq is None else solution.dual_eq.tolist(),
            "dual_ineq": None if solution.dual_ineq is None else solution.dual_ineq.tolist(),
        }
    else:
        gap = 0.0
        dual_cert = {}

    return ThetaResult(
        value=value,
        gap=gap,
        method=f"lp-{formulation}",
        n=n,
        primal_witness=witness,
        dual_certificate=dual_cert,
        wallclock_ms=(time.perf_counter() - t0) * 1e3,
        conn=tuple(conn),
    )


def _dual_gap(sol: LpSolution, prob: LpProblem) -> float:
    """|primal - dual objective| at the reported multipliers (strong duality)."""
    dv = 0.0
    if sol.dual_eq is not None and sol.dual_eq.size:
        dv += float(sol.dual_eq @ np.array([b for _, b in prob.eq]))
    if sol.dual_ineq is not None and sol.dual_ineq.size:
        dv += float(sol.dual_ineq @ np.array([b for _, b in prob.ineq]))
    return abs(sol.value - dv)


def _assemble_and_solve(n, h, mult, conn, conn_bar, formulation):
    """Returns (theta value, LpSolution or None, unfolded witness, dual gap)."""
    if formulation == "freq-primal":
        # max n*y_0 s.t. sum y = 1, y >= 0, <y, cos row s> = 0 on edge shifts
        obj = np.zeros(h + 1)
        obj[0] = n
        eq = [(mult.copy(), 1.0)]
        for s in conn:
            eq.append((mult * _cos_row(n, s), 0.0))
        prob = LpProblem(obj, eq=eq)
        sol = lp_solve(prob)
        if sol.status != "optimal":
            return np.nan, sol, None, np.inf
        return float(sol.value), sol, _unfold(sol.primal, n), _dual_gap(sol, prob)

    if formulation == "time-primal":
        # max sum x, x_0 = 1, x zero on edge shifts, transform nonnegative
        free = conn_bar
        if not free:
            x = np.zeros(h + 1)
            x[0] = 1.0
            return 1.0, None, _unfold(x, n), 0.0
        obj = np.array([mult[k] for k in free])
        ineq = []
        for j in range(h + 1):
            row = -np.array([mult[k] * np.cos(2 * np.pi * j * k / n) for k in free])
            ineq.append((row, 1.0))  # transform entry >= -x_0 contribution
        lbs = np.full(len(free), -np.inf)
        prob = LpProblem(obj, ineq=ineq, lower_bounds=lbs)
        sol = lp_solve(prob)
        if sol.status != "optimal":
            return np.nan, sol, None, np.inf
        x = np.zeros(h + 1)
        x[0] = 1.0
        for idx, k in enumerate(free):
            x[k] = sol.primal[idx]
        return 1.0 + float(sol.value), sol, _unfold(x, n), _dual_gap(sol, prob)

    if formulation == "time-dual":
        # min 1 + sum z, z >= 0, <z, cos row s> = -1 on complement shifts
        obj = -mult  # maximize -(sum)
        eq = [(mult * _cos_row(n, s), -1.0) for s in conn_bar]
        prob = LpProblem(obj, eq=eq)
        sol = lp_solve(prob)
        if sol.status != "optimal":
            return np.nan, sol, None, np.inf
        return 1.0 - float(sol.value), sol, _unfold(sol.primal, n), _dual_gap(sol, prob)

    # freq-dual: min 1 + n*t_0, t fixed at -1/n on complement shifts,
    # t_0 and edge-shift entries free, transform nonnegative
    free = [0] + conn
    obj = np.zeros(len(free))
    obj[0] = -float(n)  # maximize -n*t_0
    ineq = []
    for j in range(h + 1):
        row = -np.array([mult[k] * np.cos(2 * np.pi * j * k / n) for k in free])
        const = sum(
            mult[s] * np.cos(2 * np.pi * j * s / n) * (-1.0 / n) for s in conn_bar
        )
        ineq.append((row, const))
    lbs = np.full(len(free), -np.inf)
    prob = LpProblem(obj, ineq=ineq, lower_bounds=lbs)
    sol = lp_solve(prob)
    if sol.status != "optimal":
        return np.nan, sol, None, np.inf
    t = np.full(h + 1, -1.0 / n)
    t[0] = sol.primal[0]
    for idx, k in enumerate(conn):
        t[k] = sol.primal[idx + 1]
    return 1.0 - float(sol.value), sol, _unfold(t, n), _dual_gap(sol, prob)


def theta_circulant_bracket(spec: CirculantSpec) -> ThetaResult:
    """Cross-formulation bracket: run a primal and a dual formulation."""
    a = theta_circulant(spec, "freq-primal")
    b = theta_circulant(spec, "freq-dual")
    lo, hi = min(a.value, b.value), max(a.value, b.value)
    return ThetaResult(
        value=0.5 * (lo + hi),
        gap=0.5 * (hi - lo),
        method="lp-bracket",
        n=spec.n,
        primal_witness=a.primal_witness,
        dual_certificate={"freq_dual_value": b.value},
        wallclock_ms=a.wallclock_ms + b.wallclock_ms,
        conn=tuple(sorted(spec.conn)),
    )


# --- SDP path ---------------------------------------------------------------


def _edge_arrays(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    edges = g.edges()
    ei = np.fromiter((e[0] for e in edges), dtype=int, count=len(edges))
    ej = np.fromiter((e[1] for e in edges), dtype=int, count=len(edges))
    return ei, ej


def _certified_bracket(n, ei, ej, ye, x):
    """Exact two-sided bracket from current iterates."""
    b = np.ones((n, n))
    if ei.size:
        b[ei, ej] += ye
        b[ej, ei] += ye
    upper = float(np.linalg.eigvalsh(b)[-1])

    xf = 0.5 * (x + x.T)
    if ei.size:
        xf[ei, ej] = 0.0
        xf[ej, ei] = 0.0
    w = np.linalg.eigvalsh(xf)
    shift = max(0.0, -float(w[0]))
    tr = float(np.trace(xf))
    denom = tr + shift * n
    if denom <= 0:
        lower = 1.0  # X = I/n fallback is always feasible
    else:
        lower = (float(xf.sum()) + shift * n) / denom
    lower = max(lower, 1.0)
    return lower, upper


def theta_sdp(g: Graph, tol: float = 1e-6, rel_tol: float = 1e-4,
              max_iter: int = 60_000) -> ThetaResult:
    """Theta of a general graph with a certified bracket (value +- gap).

    Stops once the bracket half-width is below max(tol, rel_tol * value);
    the default rel_tol matches the documented gap contract, callers may
    tighten it.
    """
    if g.n > MAX_SDP_N:
        raise GraphError(f"SDP path capped at {MAX_SDP_N} vertices")
    if g.n == 0:
        raise GraphError("empty vertex set")
    if tol < 1e-6:
        raise ValueError("tol must be >= 1e-6")
    t0 = time.perf_counter()
    n = g.n
    ei, ej = _edge_arrays(g)
    m = ei.size

    if m == n * (n - 1) // 2:  # complete graph: only diagonal X feasible
        x = np.eye(n)
        return ThetaResult(1.0, 0.0, "sdp", n, primal_witness=x / n,
                           dual_certificate={"edge_duals": np.full(m, -1.0).tolist()},
                           wallclock_ms=(time.perf_counter() - t0) * 1e3,
                           edges_hash=_edges_hash(ei, ej))

    c = -np.ones((n, n))
    x = np.eye(n) / n
    s = np.zeros((n, n))
    mu = 1.0
    ye = np.zeros(m)
    best = (1.0, float(n))
    converged = False
    check_every = 50

    for it in range(1, max_iter + 1):
        sc = s - c
        y0 = (mu * (1.0 - np.trace(x)) - np.trace(sc)) / n
        if m:
            ye = (mu * (-2.0 * x[ei, ej]) - 2.0 * sc[ei, ej]) / 2.0
        ay = np.diag(np.full(n, y0))
        if m:
            ay[ei, ej] += ye
            ay[ej, ei] += ye
        w = c - ay - mu * x
        w = 0.5 * (w + w.T)
        lam, q = np.linalg.eigh(w)
        pos = lam > 0
        s = (q[:, pos] * lam[pos]) @ q[:, pos].T
        x = (s - w) / mu
        x = 0.5 * (x + x.T)

        if it % check_every == 0 or it == max_iter:
            lower, upper = _certified_bracket(n, ei, ej, ye, x)
            if upper - lower < best[1] - best[0]:
                best = (lower, upper)
            mid = 0.5 * (best[0] + best[1])
            half = 0.5 * (best[1] - best[0])
            if half <= max(tol, rel_tol * mid):
                converged = True
                break
            pres = np.sqrt(
                (np.trace(x) - 1.0) ** 2
                + (np.sum((2.0 * x[ei, ej]) ** 2) if m else 0.0)
            ) / 2.0
            dres = np.linalg.norm(ay + s - c) / (1.0 + n)
            if pres > 10 * dres:
                mu = min(mu * 1.6, 1e6)
            elif dres > 10 * pres:
                mu = max(mu / 1.6, 1e-6)

    lower, upper = best
    xf = 0.5 * (x + x.T)
    if m:
        xf[ei, ej] = 0.0
        xf[ej, ei] = 0.0
    wmin = float(np.linalg.eigvalsh(xf)[0])
    if wmin < 0:
        xf = xf + (-wmin + 1e-15) * np.eye(n)
    xf /= np.trace(xf)

    return ThetaResult(
        value=0.5 * (lower + upper),
        gap=0.5 * (upper - lower),
        method="sdp",
        n=n,
        primal_witness=xf,
        dual_certificate={"edge_duals": ye.tolist()},
        wallclock_ms=(time.perf_counter() - t0) * 1e3,
        converged=converged,
        edges_hash=_edges_hash(ei, ej),
    )


def _edges_hash(ei: np.ndarray, ej: np.ndarray) -> str:
    payload = ",".join(f"{a}-{b}" for a, b in zip(ei.tolist(), ej.tolist()))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


# --- reports ----------------------------------------------------------------


@dataclass
class SandwichReport:
    clique: int
    theta_complement: float
    chromatic: int


def sandwich_report(g: Graph, tol: float = 1e-4) -> SandwichReport:
    """(clique, theta of complement, chromatic); checks the sandwich ordering."""
    if g.n > 32:
        raise GraphError("sandwich report needs exact invariants (n <= 32)")
    inv = small_invariants(g)
    th = theta_sdp(complement(g), tol=1e-6, rel_tol=1e-6).value
    if not (inv.clique <= th + tol and th <= inv.chromatic + tol):
        raise ThetaError(
            f"sandwich violated: clique={inv.clique} theta(comp)={th} "
            f"chromatic={inv.chromatic}"
        )
    return SandwichReport(inv.clique, th, inv.chromatic)


def product_identity_check(spec: CirculantSpec) -> tuple[float, float, float]:
    """theta(G) * theta(complement G) for a circulant graph (equals n for
    vertex-transitive graphs)."""
    if spec.n > 2000:
        raise GraphError("product identity LP path capped at n=2000")
    a = theta_circulant(spec, "freq-primal")
    b = theta_circulant(spec.complement(), "freq-primal")
    return a.value, b.value, a.value * b.value


def serialize_result(res: ThetaResult) -> str:
    return json.dumps(res.to_json(), sort_keys=True)
