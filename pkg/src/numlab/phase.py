"""Real phase-retrieval stability: exact stability constant and injectivity.

The measurement map x -> |Ax| (signs lost) is injective exactly when every
bipartition of the rows of A has one side of full column rank (the
complement property).  The quantitative version is the stability constant:
the smallest M-th singular value of A restricted to a row subset whose
complement is rank deficient.  Both are computed exactly by subset
enumeration at small N; a certified fast path covers the Gaussian decay
sweep at larger sizes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any

import numpy as np

from .seeds import derived_rng

log = logging.getLogger(__name__)

EXHAUSTIVE_CAP = 24
RANK_TOL = 1e-10
ZERO_SIGMA = 1e-12


class PhaseError(ValueError):
    pass


@dataclass
class StabilityResult:
    """Minimum sigma_M over row subsets with rank-deficient complement."""

    value: float
    argmin_subset: tuple[int, ...]
    rank_deficient_complement: bool


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise PhaseError("measurement matrix must be 2-d and nonempty")
    if not np.all(np.isfinite(a)):
        raise PhaseError("non-finite entries")
    return a


def _subset_tables(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-mask rank and sigma_M of the row subset, over all 2^N masks."""
    n, m = a.shape
    ranks = np.zeros(1 << n, dtype=np.int8)
    sig = np.zeros(1 << n)
    scale = max(np.linalg.norm(a), 1.0)
    for size in range(1, n + 1):
        combos = np.array(list(combinations(range(n), size)), dtype=int)
        rows = a[combos]  # (ncomb, size, m)
        gram = np.einsum("csm,csl->cml", rows, rows)
        lam = np.clip(np.linalg.eigvalsh(gram), 0.0, None)
        mask_vals = np.sum(1 << combos, axis=1)
        ranks[mask_vals] = np.sum(lam > (RANK_TOL * scale) ** 2, axis=1)
        sig[mask_vals] = np.sqrt(lam[:, 0])
    return ranks, sig


def stability_constant(a) -> StabilityResult:
    """Exact stability constant by exhaustive subset enumeration (N <= 24)."""
    a = _as_matrix(a)
    n, m = a.shape
    if n > EXHAUSTIVE_CAP:
        raise PhaseError(f"exhaustive path capped at N={EXHAUSTIVE_CAP}")
    ranks, sig = _subset_tables(a)
    full = (1 << n) - 1
    comps = np.nonzero(ranks < m)[0]
    s_masks = full ^ comps
    pick = int(np.argmin(sig[s_masks]))
    best_mask = int(s_masks[pick])
    subset = tuple(i for i in range(n) if best_mask >> i & 1)
    return StabilityResult(
        value=float(sig[best_mask]),
        argmin_subset=subset,
        rank_deficient_complement=int(ranks[full ^ best_mask]) < m,
    )


def complement_property(a) -> tuple[bool, tuple[tuple[int, ...], tuple[int, ...]] | None]:
    """True iff every row bipartition has one side of full column rank.

    Returns a violating bipartition as witness when false.
    """
    a = _as_matrix(a)
    n, m = a.shape
    if n > EXHAUSTIVE_CAP:
        raise PhaseError(f"exhaustive path capped at N={EXHAUSTIVE_CAP}")
    ranks, _ = _subset_tables(a)
    full = (1 << n) - 1
    # each bipartition checked once: row 0 pinned to the second side
    masks = np.arange(0, 1 << n, 2)
    bad = np.nonzero((ranks[masks] < m) & (ranks[full ^ masks] < m))[0]
    if bad.size:
        mask = int(masks[bad[0]])
        side_a = tuple(i for i in range(n) if mask >> i & 1)
        side_b = tuple(i for i in range(n) if not mask >> i & 1)
        return False, (side_a, side_b)
    return True, None


def is_injective(a) -> bool:
    """Real phase-retrieval injectivity (complement property, cross-validated)."""
    a = _as_matrix(a)
    holds, _ = complement_property(a)
    positive = stability_constant(a).value > ZERO_SIGMA
    if holds != positive:
        raise RuntimeError(
            "complement property and stability constant disagree; "
            "input sits on a numerical rank boundary"
        )
    return holds


# --- certified generic fast path --------------------------------------------


def _batched_sigma_min(a: np.ndarray, combos: np.ndarray) -> np.ndarray:
    rows = a[combos]
    gram = np.einsum("csm,csl->cml", rows, rows)
    lam = np.linalg.eigvalsh(gram)[:, 0]
    return np.sqrt(np.clip(lam, 0.0, None))


def stability_constant_generic(a) -> StabilityResult:
    """Fast path: assumes (and certifies) that every M-row subset spans.

    Under the certificate the only rank-deficient complements are the subsets
    of fewer than M rows, and removing rows only shrinks sigma_M, so the
    minimum is attained with a complement of exactly M-1 rows.
    """
    a = _as_matrix(a)
    n, m = a.shape
    if n < m:
        raise PhaseError("need at least M rows")
    scale = max(np.max(np.abs(a)), 1.0)
    comp_combos = np.array(list(combinations(range(n), m - 1)), dtype=int).reshape(-1, m - 1)
    all_rows = np.arange(n)
    kept = np.array([np.setdiff1d(all_rows, c, assume_unique=True) for c in comp_combos])
    sig = _batched_sigma_min(a, kept)

    if n == 2 * m - 1:
        spans = sig  # kept sets are exactly the M-row subsets
    else:
        m_combos = np.array(list(combinations(range(n), m)), dtype=int)
        spans = _batched_sigma_min(a, m_combos)
    if spans.size and np.min(spans) <= RANK_TOL * scale:
        raise PhaseError("genericity certificate failed: some M rows do not span")

    idx = int(np.argmin(sig))
    return StabilityResult(
        value=float(sig[idx]),
        argmin_subset=tuple(int(i) for i in kept[idx]),
        rank_deficient_complement=True,
    )


# --- Gaussian decay sweep ----------------------------------------------------


@dataclass
class SweepResult:
    M: list[int]
    mean_omega: list[float]
    median_omega: list[float]
    logmean_omega: list[float]
    beta_hat: float
    fit_residual: float
    beta_hat_normalized: float
    trials: int
    seed: int
    samples: list[dict[str, Any]] = field(default_factory=list)
    resample_incidents: int = 0

    def to_json(self) -> dict[str, Any]:
        return {
            "M": self.M,
            "mean_omega": self.mean_omega,
            "median_omega": self.median_omega,
            "logmean_omega": self.logmean_omega,
            "beta_hat": self.beta_hat,
            "fit_residual": self.fit_residual,
            "beta_hat_normalized": self.beta_hat_normalized,
            "trials": self.trials,
            "seed": self.seed,
        }


def _fit_log_decay(ms: np.ndarray, means: np.ndarray) -> tuple[float, float]:
    """OLS of log(mean) on M; returns (beta_hat, rms residual)."""
    y = np.log(means)
    coef = np.polyfit(ms, y, 1)
    resid = y - np.polyval(coef, ms)
    return float(np.exp(coef[0])), float(np.sqrt(np.mean(resid**2)))


def stability_gaussian_sweep(m_range, trials: int, seed: int,
                             keep_samples: bool = True) -> SweepResult:
    """Decay of the stability constant for iid Gaussian (2M-1) x M matrices."""
    ms = sorted(int(m) for m in m_range)
    if not ms or ms[0] < 2 or ms[-1] > 12:
        raise PhaseError("M range must lie within [2, 12]")
    if trials < 50:
        raise PhaseError("need at least 50 trials")
    means, medians, logmeans = [], [], []
    norm_means = []
    samples = []
    incidents = 0
    for m in ms:
        vals = np.zeros(trials)
        norm_vals = np.zeros(trials)
        for t in range(trials):
            attempt = 0
            while True:
                label = f"phase/M{m}/trial{t}" + (f"/retry{attempt}" if attempt else "")
                a = derived_rng(seed, label).normal(size=(2 * m - 1, m))
                try:
                    res = stability_constant_generic(a)
                    break
                except PhaseError:
                    incidents += 1
                    attempt += 1
                    log.warning("genericity certificate failed (M=%d trial=%d); resampling", m, t)
            vals[t] = res.value
            norm_vals[t] = res.value / np.max(np.linalg.norm(a, axis=1))
            if keep_samples:
                samples.append({"M": m, "trial": t, "omega": float(res.value)})
        means.append(float(np.mean(vals)))
        medians.append(float(np.median(vals)))
        logmeans.append(float(np.mean(np.log(vals))))
        norm_means.append(float(np.mean(norm_vals)))
    beta, resid = _fit_log_decay(np.array(ms, dtype=float), np.array(means))
    beta_norm, _ = _fit_log_decay(np.array(ms, dtype=float), np.array(norm_means))
    return SweepResult(
        M=ms, mean_omega=means, median_omega=medians, logmean_omega=logmeans,
        beta_hat=beta, fit_residual=resid, beta_hat_normalized=beta_norm,
        trials=trials, seed=seed, samples=samples, resample_incidents=incidents,
    )
