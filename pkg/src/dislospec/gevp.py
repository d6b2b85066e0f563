"""Generalized Hermitian eigenproblem H c = E S c for a nonorthogonal basis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .assembly import MatrixPair
from .errors import DegenerateBasisError, InvalidParameterError

__all__ = ["EigenSolution", "solve_pencil", "CONDITION_LIMIT", "DISCARD_THRESHOLD"]

CONDITION_LIMIT = 1e12
DISCARD_THRESHOLD = 1e-12


@dataclass(frozen=True)
class EigenSolution:
    """Ascending energies with S-orthonormal coefficient columns.

    ``overlap_condition`` is measured on the unit-diagonal (Jacobi scaled)
    overlap, i.e. after normalising every basis function.
    ``discarded`` counts overlap directions dropped by canonical
    orthogonalization; it is 0 when the Cholesky route was taken.
    """

    energies: np.ndarray
    coefficients: np.ndarray
    overlap_condition: float
    discarded: int
    method: str
    scale: np.ndarray | None = None
    retained: np.ndarray | None = None

    def residuals(self, pair: MatrixPair) -> np.ndarray:
        """||H c - E S c|| / ||H c|| per pair.

        Evaluated with normalised basis functions and, after canonical
        orthogonalization, projected on the retained overlap subspace.
        """
        d = np.ones(pair.dim) if self.scale is None else self.scale
        Hn = pair.H * d[:, None] * d[None, :]
        Sn = pair.S * d[:, None] * d[None, :]
        Cn = self.coefficients / d[:, None]
        Hc, Sc = Hn @ Cn, Sn @ Cn
        res = Hc - Sc * self.energies[None, :]
        if self.retained is not None:
            P = self.retained.conj().T
            res, Hc = P @ res, P @ Hc
        return np.linalg.norm(res, axis=0) / np.linalg.norm(Hc, axis=0)


def _fix_phase(C: np.ndarray) -> np.ndarray:
    # first coordinate with non-negligible modulus made real positive
    C = C.copy()
    for col in range(C.shape[1]):
        v = C[:, col]
        idx = np.flatnonzero(np.abs(v) > 1e-8 * np.abs(v).max())[0]
        C[:, col] = v * (abs(v[idx]) / v[idx])
    return C


def solve_pencil(pair: MatrixPair) -> EigenSolution:
    H, S = pair.H, pair.S
    if H.shape != S.shape:
        raise InvalidParameterError(f"dimension mismatch: H {H.shape} vs S {S.shape}")

    d = np.diag(S).real
    if np.any(d <= 0):
        raise DegenerateBasisError("overlap has a nonpositive diagonal entry")
    scale = 1.0 / np.sqrt(d)
    Sn = S * scale[:, None] * scale[None, :]
    Hn = H * scale[:, None] * scale[None, :]

    s_eval, s_evec = np.linalg.eigh(Sn)
    s_max = s_eval[-1]
    if s_max <= 0:
        raise DegenerateBasisError("overlap has no positive eigenvalue")
    cond = s_max / s_eval[0] if s_eval[0] > 0 else np.inf

    if cond <= CONDITION_LIMIT:
        try:
            L = np.linalg.cholesky(Sn)
        except np.linalg.LinAlgError:
            L = None
        if L is not None:
            A = sla.solve_triangular(L, Hn, lower=True)
            A = sla.solve_triangular(L, A.conj().T, lower=True).conj().T
            A = 0.5 * (A + A.conj().T)
            E, Y = np.linalg.eigh(A)
            X = sla.solve_triangular(L.conj().T, Y, lower=False)
            C = _fix_phase(X * scale[:, None])
            return EigenSolution(E, C, float(cond), 0, "cholesky", scale)

    keep = s_eval > DISCARD_THRESHOLD * s_max
    if not keep.any():
        raise DegenerateBasisError("all overlap eigenvalues below threshold")
    V = s_evec[:, keep]
    U = V / np.sqrt(s_eval[keep])[None, :]
    A = U.conj().T @ Hn @ U
    A = 0.5 * (A + A.conj().T)
    E, Y = np.linalg.eigh(A)
    C = _fix_phase((U @ Y) * scale[:, None])
    return EigenSolution(E, C, float(cond), int((~keep).sum()), "canonical", scale, V)
