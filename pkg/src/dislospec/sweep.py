"""Parameter sweeps in lam, basis convergence studies and avoided crossings.

Levels are labelled adiabatically: index r is the r-th lowest eigenvalue of
the m-block at each lam.  Because same-m levels never cross, index r is
continuously connected to the r-th flat-space level, which supplies the
multiplet labels of a crossing.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .errors import DislospecError
from .model import ModelParams, QuantumLabel, exact_levels
from .optimize import OptimizeConfig, optimize_b

__all__ = [
    "SpectrumRecord",
    "CrossingReport",
    "worker_count",
    "solve_point",
    "sweep",
    "detect_crossings",
    "converge",
    "lambda_grid",
    "continuity_violations",
    "DEGENERACY_TOL",
]

DEGENERACY_TOL = 1e-9
DEGENERATE_GAP = 1e-10


@dataclass
class SpectrumRecord:
    lam: float
    m: int
    energies: np.ndarray
    b_opt: float
    M: int
    N: int
    truncation_error: np.ndarray | None = None
    converged: bool = False
    warning: bool = False
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class CrossingReport:
    m: int
    lower_level: int
    upper_level: int
    lambda_star: float
    gap: float
    multiplet_origin: tuple[QuantumLabel, QuantumLabel] | None = None
    status: str = "avoided"

    def to_json(self) -> dict:
        origin = None
        if self.multiplet_origin is not None:
            origin = [str(lbl) for lbl in self.multiplet_origin]
        return {
            "m": self.m,
            "lower_level": self.lower_level,
            "upper_level": self.upper_level,
            "lambda_star": self.lambda_star,
            "gap": self.gap,
            "multiplet_origin": origin,
            "status": self.status,
        }


def worker_count() -> int:
    """Worker cap from DISLOSPEC_THREADS (0 or unset = one per CPU)."""
    raw = os.environ.get("DISLOSPEC_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("DISLOSPEC_THREADS must be >= 0")
    if n == 0:
        n = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)
    return max(1, n)


def lambda_grid(start: float, stop: float, step: float) -> np.ndarray:
    """start + i*step for every i that stays within stop (+ half a step)."""
    if step <= 0:
        raise ValueError("step must be positive")
    count = int(math.floor((stop - start) / step + 0.5)) + 1
    if count < 1:
        raise ValueError(f"empty grid {start}:{stop}:{step}")
    return start + step * np.arange(count)


def solve_point(lam: float, m: int, R: int, M: int, N: int, cfg: OptimizeConfig = OptimizeConfig()) -> SpectrumRecord:
    """Optimise b at one lam and keep the R lowest levels."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = optimize_b(ModelParams(lam, m), M, N, cfg)
        E = res.solution.energies
        if len(E) < R:
            raise DislospecError(f"only {len(E)} levels retained, {R} requested")
        return SpectrumRecord(float(lam), m, E[:R].copy(), res.b_opt, M, N, warning=res.warning)
    except (DislospecError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return SpectrumRecord(float(lam), m, np.full(R, np.nan), float("nan"), M, N, error=str(exc))


def _map(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def sweep(
    m: int,
    grid,
    R: int,
    M: int,
    N: int,
    cfg: OptimizeConfig = OptimizeConfig(),
    *,
    conv_tol: float = 1e-3,
    estimate_error: bool = True,
    workers: int | None = None,
) -> list[SpectrumRecord]:
    """One record per grid point, in grid order.

    Truncation errors are estimated at the two ends and the middle of the
    grid by re-solving with (M+2, N+2); every record takes the estimate from
    the nearest probe.  A record is converged when all its estimated errors
    are below ``conv_tol``.
    """
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly ascending")
    if workers is None:
        workers = worker_count()
    records = _map(partial(solve_point, m=m, R=R, M=M, N=N, cfg=cfg), list(grid), workers)

    if estimate_error and len(grid):
        probes = sorted({0, len(grid) // 2, len(grid) - 1})
        bigger = _map(partial(solve_point, m=m, R=R, M=M + 2, N=N + 2, cfg=cfg), [grid[i] for i in probes], workers)
        errs = {}
        for i, rec in zip(probes, bigger):
            base = records[i]
            if rec.failed or base.failed:
                errs[i] = np.full(R, np.inf)
            else:
                errs[i] = np.abs(base.energies - rec.energies)
        probe_lams = grid[probes]
        for rec in records:
            nearest = probes[int(np.argmin(np.abs(probe_lams - rec.lam)))]
            rec.truncation_error = errs[nearest]
            rec.converged = (not rec.failed) and bool(np.all(errs[nearest] < conv_tol))
    return records


def _golden_min(f, a: float, c: float, tol: float):
    """Golden-section search for a minimum of f on [a, c] down to width tol."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = c - invphi * (c - a)
    x2 = a + invphi * (c - a)
    f1, f2 = f(x1), f(x2)
    while c - a > tol:
        if f1 <= f2:
            c, x2, f2 = x2, x1, f1
            x1 = c - invphi * (c - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (c - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _interior_minima(g: np.ndarray) -> list[int]:
    out = []
    for i in range(1, len(g) - 1):
        if g[i] < g[i - 1] and g[i] <= g[i + 1]:
            out.append(i)
    return out


def detect_crossings(
    records: list[SpectrumRecord],
    refine_tol: float = 1e-5,
    cfg: OptimizeConfig = OptimizeConfig(),
    levels: list[int] | None = None,
) -> list[CrossingReport]:
    """Locate and refine interior minima of every adjacent gap.

    ``levels`` restricts the search to pairs (r, r+1) with r in the list.
    """
    recs = [r for r in records if not r.failed]
    if not recs:
        return []
    m = recs[0].m
    if any(r.m != m for r in recs):
        raise ValueError("records must share m")
    R = len(recs[0].energies)
    if any(len(r.energies) != R for r in recs):
        raise ValueError("records must have equal level counts")
    M, N = recs[0].M, recs[0].N
    lams = np.array([r.lam for r in recs])
    E = np.array([r.energies for r in recs])
    labels = [lbl for _, lbl in exact_levels(m, R)]

    reports = []
    pairs = range(R - 1) if levels is None else [r for r in levels if 0 <= r < R - 1]
    for r in pairs:
        g = E[:, r + 1] - E[:, r]
        for i in _interior_minima(g):

            def gap_at(lam, r=r):
                rec = solve_point(lam, m, r + 2, M, N, cfg)
                if rec.failed:
                    return math.inf
                return rec.energies[r + 1] - rec.energies[r]

            lam_star, gap = _golden_min(gap_at, lams[i - 1], lams[i + 1], refine_tol)
            if gap > g[i]:
                lam_star, gap = lams[i], g[i]
            status = "avoided" if gap > DEGENERATE_GAP else "numerically degenerate - increase basis"
            reports.append(
                CrossingReport(m, r, r + 1, float(lam_star), float(gap), (labels[r], labels[r + 1]), status)
            )
    reports.sort(key=lambda c: (c.lambda_star, c.lower_level))
    return reports


def converge(
    m: int,
    lam: float,
    R: int,
    tol: float,
    *,
    start: int = 4,
    step: int = 2,
    max_size: int = 20,
    cfg: OptimizeConfig = OptimizeConfig(),
) -> SpectrumRecord:
    """Grow M = N until all R levels move by less than ``tol``.

    Stops early once canonical orthogonalization has to drop more overlap
    directions than at the previous size (numerical dependence limit).
    ``truncation_error`` holds the last per-level change.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    prev = None
    prev_discarded = None
    size = start
    while size <= max_size:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = optimize_b(ModelParams(lam, m), size, size, cfg)
        E = res.solution.energies[:R]
        rec = SpectrumRecord(float(lam), m, E.copy(), res.b_opt, size, size, warning=res.warning)
        if prev is not None and len(E) == R and len(prev.energies) == R:
            delta = np.abs(E - prev.energies)
            rec.truncation_error = delta
            if np.all(delta < tol):
                rec.converged = True
                return rec
            if prev_discarded is not None and res.solution.discarded > prev_discarded and prev_discarded > 0:
                return rec
        prev, prev_discarded = rec, res.solution.discarded
        size += step
    return prev


def continuity_violations(
    records: list[SpectrumRecord], factor: float = 10.0, floor: float = 1e-6, window: int = 2
) -> list[tuple[int, int]]:
    """(grid index, level) pairs whose step exceeds ``factor`` times the local slope.

    The local slope is the median step size over up to ``window`` steps on
    either side; the median keeps a single outlying point (which spoils two
    adjacent steps) from masking itself.
    """
    E = np.array([r.energies for r in records])
    d = np.abs(np.diff(E, axis=0))
    bad = []
    for i in range(d.shape[0]):
        nb = [j for j in range(i - window, i + window + 1) if j != i and 0 <= j < d.shape[0]]
        if not nb:
            continue
        ref = np.median(d[nb], axis=0)
        for lvl in np.flatnonzero(d[i] > factor * ref + floor):
            bad.append((i, int(lvl)))
    return bad
