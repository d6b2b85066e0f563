"""Finite-difference eigensolver for the reduced (rho, z) equation.

Cell-centred radial grid rho_p = (p + 1/2) h_rho, which keeps every node off
the axis; the flux through rho = 0 vanishes identically.  Dirichlet walls sit
at rho = rho_max and z = +-z_max.  The discrete operator A is self-adjoint in
the rho-weighted inner product; we diagonalise W^(1/2) A W^(-1/2) with
W = diag(rho_p), which is Hermitian in the plain inner product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .errors import ConvergenceError, InvalidParameterError
from .model import ModelParams

__all__ = ["GridSpec", "fd_operator", "fd_lowest", "richardson"]


@dataclass(frozen=True)
class GridSpec:
    rho_max: float = 7.0
    z_max: float = 7.0
    n_rho: int = 200
    n_z: int = 200

    def __post_init__(self):
        if not (self.rho_max > 0 and self.z_max > 0):
            raise InvalidParameterError("box sizes must be positive")
        if self.n_rho < 2 or self.n_z < 2:
            raise InvalidParameterError("need at least two interior points per direction")

    @property
    def h_rho(self) -> float:
        return self.rho_max / self.n_rho

    @property
    def h_z(self) -> float:
        return 2 * self.z_max / (self.n_z + 1)

    def rho(self) -> np.ndarray:
        return (np.arange(self.n_rho) + 0.5) * self.h_rho

    def z(self) -> np.ndarray:
        return -self.z_max + (np.arange(self.n_z) + 1) * self.h_z


def fd_operator(params: ModelParams, grid: GridSpec) -> sp.csr_matrix:
    """Symmetrised discrete operator; unknowns ordered as p * n_z + q."""
    lam, m = params.lam, params.m
    h, hz = grid.h_rho, grid.h_z
    rho, z = grid.rho(), grid.z()
    nr, nz = grid.n_rho, grid.n_z

    # radial: -(1/rho_p) [rho_{p+1/2}(F_{p+1}-F_p) - rho_{p-1/2}(F_p-F_{p-1})] / h^2
    face = np.arange(nr + 1) * h  # rho_{p-1/2} for p = 0..nr
    diag = (face[:-1] + face[1:]) / (rho * h * h)
    # after sqrt(rho) similarity the off-diagonals become symmetric
    off = -face[1:-1] / (np.sqrt(rho[:-1] * rho[1:]) * h * h)
    T_rho = sp.diags([off, diag, off], [-1, 0, 1], format="csr")

    ones = np.ones(nz)
    D2 = sp.diags([-ones[1:], 2 * ones, -ones[1:]], [-1, 0, 1]) / hz**2  # -d_z^2
    D1 = sp.diags([-ones[1:], ones[1:]], [-1, 1]) / (2 * hz)  # d_z

    I_rho, I_z = sp.identity(nr), sp.identity(nz)
    inv2 = sp.diags(1.0 / rho**2)
    op = (
        sp.kron(T_rho, I_z)
        + sp.kron(I_rho + lam * lam * inv2, D2)
        + sp.kron((2j * m * lam) * inv2, D1)
        + sp.kron(sp.diags(m * m / rho**2 + rho**2), I_z)
        + sp.kron(I_rho, sp.diags(z**2))
    )
    op = op.tocsr()
    if m * lam == 0:
        op = op.real.tocsr()
    return 0.5 * (op + op.conj().T)


def fd_lowest(params: ModelParams, grid: GridSpec = GridSpec(), R: int = 1, *, tol: float = 1e-8) -> np.ndarray:
    """R lowest eigenvalues by shift-invert Lanczos about zero.

    The operator is positive, so the eigenvalues nearest zero are the lowest.
    """
    A = fd_operator(params, grid)
    k = max(R, 1)
    try:
        vals, vecs = eigsh(A, k=k, sigma=0.0, which="LM", tol=1e-12)
    except ArpackNoConvergence as exc:
        raise ConvergenceError("ARPACK did not converge", history=list(exc.eigenvalues)) from exc
    order = np.argsort(vals.real)
    vals, vecs = vals.real[order], vecs[:, order]
    res = np.linalg.norm(A @ vecs - vecs * vals[None, :], axis=0) / np.abs(vals)
    if np.any(res > tol):
        raise ConvergenceError(f"eigenpair residuals {res} exceed {tol}", history=list(res))
    return vals[:R]


def richardson(coarse: np.ndarray, fine: np.ndarray, ratio: float = 2.0, order: int = 2) -> np.ndarray:
    """Extrapolate two grid results assuming error ~ h**order."""
    f = ratio**order
    return (f * np.asarray(fine) - np.asarray(coarse)) / (f - 1.0)
