"""Gaussian moment integrals and a quadrature oracle.

All matrix elements of the monomial-Gaussian basis reduce to

    R(p) = int_0^inf   rho**p exp(-rho**2)    drho = Gamma((p+1)/2) / 2
    Z(q) = int_-inf^inf z**q  exp(-2 b z**2)  dz

R is evaluated through log-Gamma so large orders do not overflow.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import DivergentIntegralError, InvalidParameterError, OracleError

__all__ = [
    "radial_integral",
    "axial_integral",
    "radial_moments",
    "axial_moments",
    "quadrature_oracle",
    "quadrature_oracle_2d",
    "RADIAL_CUTOFF",
]

# exp(-12**2) ~ 3e-63
RADIAL_CUTOFF = 12.0


def radial_integral(p: float) -> float:
    if not p > -1.0:
        raise DivergentIntegralError(f"radial moment diverges for p={p} <= -1")
    return 0.5 * math.exp(math.lgamma(0.5 * (p + 1.0)))


def axial_integral(q: int, b: float) -> float:
    if not b > 0.0:
        raise InvalidParameterError(f"axial width b must be positive, got {b}")
    if q < 0:
        raise DivergentIntegralError(f"axial moment diverges for q={q} < 0")
    if q % 2:
        return 0.0
    h = 0.5 * (q + 1)
    return math.exp(math.lgamma(h) - h * math.log(2.0 * b))


def radial_moments(offset: float, count: int) -> np.ndarray:
    """R(offset + k) for k = 0..count-1; entries with p <= -1 are NaN."""
    p = offset + np.arange(count, dtype=float)
    out = np.full(count, np.nan)
    ok = p > -1.0
    out[ok] = 0.5 * np.exp(gammaln(0.5 * (p[ok] + 1.0)))
    return out


def axial_moments(b: float, count: int) -> np.ndarray:
    """Z(q) for q = 0..count-1."""
    if not b > 0.0:
        raise InvalidParameterError(f"axial width b must be positive, got {b}")
    q = np.arange(count)
    h = 0.5 * (q + 1.0)
    out = np.exp(gammaln(h) - h * math.log(2.0 * b))
    out[q % 2 == 1] = 0.0
    return out


def quadrature_oracle(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    epsrel: float = 1e-12,
    epsabs: float = 0.0,
    limit: int = 200,
    budget: int = 3,
) -> float:
    """Adaptive Gauss-Kronrod integration of ``f`` over ``(lo, hi)``.

    The subdivision limit is doubled up to ``budget`` times until the
    estimated error is below 1e-10 relative (or ``epsabs`` absolute).
    """
    estimates = []
    for _ in range(budget):
        val, err, *_ = integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1)
        estimates.append(val)
        if err <= max(1e-10 * abs(val), epsabs) or (val == 0.0 and err < 1e-300):
            return val
        limit *= 2
    raise OracleError(
        f"quadrature did not reach 1e-10 relative accuracy on ({lo}, {hi})",
        estimates=estimates[-2:],
    )


def quadrature_oracle_2d(
    f: Callable[[float, float], float],
    rho_range: tuple[float, float],
    z_range: tuple[float, float],
    *,
    epsrel: float = 1e-11,
    inner_epsabs: float = 1e-13,
) -> float:
    """Nested adaptive quadrature of ``f(rho, z)`` over a rectangle.

    ``rho`` is the outer variable.  Inner z-integrals may pass through zero
    as rho varies, so they also accept an absolute error ``inner_epsabs``.
    """

    def inner(rho):
        return quadrature_oracle(lambda z: f(rho, z), *z_range, epsrel=epsrel, epsabs=inner_epsabs)

    return quadrature_oracle(inner, *rho_range, epsrel=epsrel)
