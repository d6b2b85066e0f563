"""Model parameters, quantum labels, exact flat-space spectrum and the
one-function variational estimate.

Units: lengths in L = sqrt(hbar/(m omega)), energies as E' = 2 m L^2 E / hbar^2,
so the flat-space oscillator levels are the odd integers 4n + 2k + 2|m| + 3.
``lam`` is the torsion length eta measured in units of L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidLabelError, NumericalError

__all__ = [
    "ModelParams",
    "QuantumLabel",
    "SimpleAnsatz",
    "exact_energy",
    "multiplet_members",
    "degeneracy",
    "exact_levels",
    "ansatz_root_residual",
    "ansatz_energy",
    "solve_simple_ansatz",
]


@dataclass(frozen=True)
class ModelParams:
    """One m-block of the dislocated oscillator.

    Energies depend only on ``lam**2`` and ``m**2``; :meth:`canonical`
    maps to the representative with both nonnegative.
    """

    lam: float
    m: int

    def __post_init__(self):
        if not math.isfinite(self.lam):
            raise ValueError(f"lam must be finite, got {self.lam!r}")
        if int(self.m) != self.m:
            raise ValueError(f"m must be an integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "lam", float(self.lam))

    def canonical(self) -> "ModelParams":
        return ModelParams(abs(self.lam), abs(self.m))


@dataclass(frozen=True)
class QuantumLabel:
    n: int
    k: int
    m: int

    def __str__(self):
        return f"({self.n},{self.k},{self.m})"


@dataclass(frozen=True)
class SimpleAnsatz:
    """Optimal parameters of rho**s exp(-rho**2/2 - b z**2) and its energy."""

    s: float
    b: float
    W: float


def exact_energy(label: QuantumLabel) -> int:
    if label.n < 0 or label.k < 0:
        raise InvalidLabelError(f"n and k must be nonnegative, got {label}")
    return 4 * label.n + 2 * label.k + 2 * abs(label.m) + 3


def multiplet_members(E0: int, m_abs: int) -> list[tuple[int, int]]:
    """All (n, k) with 4n + 2k + 2*m_abs + 3 == E0, largest n first."""
    rest = E0 - 2 * abs(m_abs) - 3
    if rest < 0 or rest % 2:
        return []
    return [(n, (rest - 4 * n) // 2) for n in range(rest // 4, -1, -1)]


def degeneracy(E0: int) -> int:
    """Number of (n, k, m) triples on the flat-space shell E0, by enumeration."""
    if E0 < 3:
        return 0
    count = 0
    for m in range(-(E0 // 2), E0 // 2 + 1):
        count += len(multiplet_members(E0, abs(m)))
    return count


def exact_levels(m: int, count: int) -> list[tuple[int, QuantumLabel]]:
    """Lowest ``count`` flat-space levels of the m-block with their labels.

    Within a multiplet the labels follow :func:`multiplet_members` order.
    """
    out: list[tuple[int, QuantumLabel]] = []
    E0 = 2 * abs(m) + 3
    while len(out) < count:
        for n, k in multiplet_members(E0, abs(m)):
            out.append((E0, QuantumLabel(n, k, m)))
        E0 += 2
    return out[:count]


def ansatz_root_residual(b: float, lam: float, m: int) -> float:
    """Stationarity condition in b after eliminating s."""
    return (4 * b * b - 1) * math.sqrt(b * lam * lam + m * m) + 4 * b * b * lam * lam


def ansatz_energy(b: float, lam: float, m: int) -> float:
    s = math.sqrt(b * lam * lam + m * m)
    return (8 * b * s + 4 * b * b + 8 * b + 1) / (4 * b)


def solve_simple_ansatz(params: ModelParams, *, eps: float = 1e-10, btol: float = 1e-14) -> SimpleAnsatz:
    """Minimise the Rayleigh quotient of the single trial function.

    The residual is negative near b = 0 and nonnegative at b = 1/2; the root
    is found by bisection on (eps, 1/2].
    """
    lam, m = abs(params.lam), abs(params.m)
    if lam == 0.0:
        return SimpleAnsatz(s=float(m), b=0.5, W=2.0 * m + 3.0)

    lo, hi = eps, 0.5
    f_lo, f_hi = ansatz_root_residual(lo, lam, m), ansatz_root_residual(hi, lam, m)
    if f_hi == 0.0:
        # lam**2 underflows
        return SimpleAnsatz(s=math.sqrt(hi * lam * lam + m * m), b=hi, W=ansatz_energy(hi, lam, m))
    if not (f_lo < 0.0 <= f_hi):
        raise NumericalError(
            f"root of the b-condition not bracketed: f({lo})={f_lo}, f({hi})={f_hi}"
        )
    while hi - lo > btol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if ansatz_root_residual(mid, lam, m) < 0.0:
            lo = mid
        else:
            hi = mid
    # pick the endpoint with the smaller residual
    b = lo if abs(ansatz_root_residual(lo, lam, m)) < abs(ansatz_root_residual(hi, lam, m)) else hi
    s = math.sqrt(b * lam * lam + m * m)
    return SimpleAnsatz(s=s, b=b, W=ansatz_energy(b, lam, m))
