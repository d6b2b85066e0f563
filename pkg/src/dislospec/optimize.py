"""Choice of the nonlinear basis parameters.

The radial exponent is slaved to the axial width, s = sqrt(b lam**2 + m**2),
and b is found by golden-section search on the chosen variational objective.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from .assembly import BasisSpec, assemble
from .errors import InvalidParameterError
from .gevp import EigenSolution, solve_pencil
from .model import ModelParams, solve_simple_ansatz

__all__ = [
    "Objective",
    "OptimizeConfig",
    "OptimizeResult",
    "fix_s",
    "solve_at",
    "optimize_b",
    "B_MIN",
    "B_MAX",
]

B_MIN = 1e-6
B_MAX = 2.0


class Objective(str, Enum):
    LOWEST = "lowest-eigenvalue"
    SUM_LOWEST = "sum-of-lowest-K"
    TARGET_LEVEL = "target-level-r"


@dataclass(frozen=True)
class OptimizeConfig:
    objective: Objective = Objective.LOWEST
    b_tolerance: float = 1e-8
    max_iterations: int = 200
    K: int = 1
    r: int = 0

    def __post_init__(self):
        object.__setattr__(self, "objective", Objective(self.objective))
        if self.K < 1 or self.r < 0:
            raise InvalidParameterError("K must be >= 1 and r >= 0")

    def evaluate(self, energies: np.ndarray) -> float:
        if self.objective is Objective.LOWEST:
            return float(energies[0])
        if self.objective is Objective.SUM_LOWEST:
            return float(np.sum(energies[: self.K]))
        return float(energies[self.r])


@dataclass(frozen=True)
class OptimizeResult:
    b_opt: float
    solution: EigenSolution
    spec: BasisSpec
    objective_value: float
    seed_value: float
    warning: bool = False


def fix_s(params: ModelParams, b: float) -> float:
    return math.sqrt(b * params.lam**2 + params.m**2)


def solve_at(params: ModelParams, M: int, N: int, b: float) -> tuple[BasisSpec, EigenSolution]:
    spec = BasisSpec(M, N, fix_s(params, b), b)
    return spec, solve_pencil(assemble(spec, params))


def _bracket(f, seed: float, lo: float, hi: float, factor: float = 1.5, max_steps: int = 60):
    """Geometric expansion from ``seed`` until f rises on both sides.

    Returns (a, b, c) with f(b) below both ends, or None if a range
    boundary was reached first.
    """
    b = seed
    fb = f(b)
    a, c = max(lo, b / factor), min(hi, b * factor)
    fa, fc = f(a), f(c)
    for _ in range(max_steps):
        if fa > fb and fc > fb:
            return a, b, c
        if fa <= fb and fa <= fc:
            if a <= lo:
                return None
            c, fc, b, fb = b, fb, a, fa
            a = max(lo, a / factor)
            fa = f(a)
        else:
            if c >= hi:
                return None
            a, fa, b, fb = b, fb, c, fc
            c = min(hi, c * factor)
            fc = f(c)
    return None


def optimize_b(params: ModelParams, M: int, N: int, cfg: OptimizeConfig = OptimizeConfig()) -> OptimizeResult:
    """Minimise the configured objective over b in (B_MIN, B_MAX].

    Flat space is short-circuited to b = 1/2: the basis then contains the
    exact eigenfunctions, which minimises every objective at once.
    """
    if M < 1 or N < 1:
        raise InvalidParameterError("M and N must be positive")
    params_c = params.canonical()
    cache: dict[float, tuple[BasisSpec, EigenSolution]] = {}

    def trial(b):
        if b not in cache:
            cache[b] = solve_at(params_c, M, N, b)
        return cfg.evaluate(cache[b][1].energies)

    seed = solve_simple_ansatz(params_c).b
    seed_value = trial(seed)
    if params_c.lam == 0.0:
        spec, sol = cache[seed]
        return OptimizeResult(seed, sol, spec, seed_value, seed_value)

    warn = False
    br = _bracket(trial, seed, B_MIN, B_MAX)
    if br is None:
        warn = True
        b_best = min(cache, key=lambda b: trial(b))
        warnings.warn(f"b-objective not bracketed in ({B_MIN}, {B_MAX}] for {params}; using best trial b={b_best}")
    else:
        res = minimize_scalar(
            trial,
            bracket=br,
            method="golden",
            options={"xtol": cfg.b_tolerance, "maxiter": cfg.max_iterations},
        )
        b_best = min(cache, key=lambda b: trial(b))
        if not res.success:
            warn = True
    spec, sol = cache[b_best]
    return OptimizeResult(b_best, sol, spec, trial(b_best), seed_value, warn)
