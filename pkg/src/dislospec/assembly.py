"""Overlap and Hamiltonian matrices in the monomial-Gaussian basis.

Basis functions are

    chi_ij(rho, z) = rho**(i + s) * z**j * exp(-rho**2/2 - b z**2),
    i = 0..M-1, j = 0..N-1,

flattened row-major: the pair (i, j) sits at index ``i * N + j``.
Inner products use the measure rho drho dz; the constant 2 pi from the
azimuthal integral is dropped everywhere since it cancels in every
Rayleigh quotient.

The reduced operator acting on F(rho, z) is

    -(1/rho) d_rho rho d_rho - (1 + lam**2/rho**2) d_z**2
    + (2 i m lam / rho**2) d_z + m**2/rho**2 + rho**2 + z**2
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError, SingularBasisError
from .integrals import axial_integral, axial_moments, radial_integral, radial_moments
from .model import ModelParams

__all__ = [
    "BasisSpec",
    "MatrixPair",
    "overlap_entry",
    "hamiltonian_entry",
    "assemble",
    "flat_index",
    "dump_matrices",
    "load_matrices",
]


@dataclass(frozen=True)
class BasisSpec:
    M: int
    N: int
    s: float
    b: float

    def __post_init__(self):
        if self.M < 1 or self.N < 1:
            raise InvalidParameterError(f"M and N must be positive, got M={self.M}, N={self.N}")
        if not self.s >= 0.0:
            raise InvalidParameterError(f"s must be nonnegative, got {self.s}")
        if not self.b > 0.0:
            raise InvalidParameterError(f"b must be positive, got {self.b}")

    @property
    def dim(self) -> int:
        return self.M * self.N


def flat_index(i: int, j: int, N: int) -> int:
    return i * N + j


@dataclass(frozen=True)
class MatrixPair:
    """Hamiltonian H (complex Hermitian) and overlap S (real symmetric).

    ``asymmetry`` is max|H - H^dagger| / max|H| before symmetrisation.
    """

    H: np.ndarray
    S: np.ndarray
    spec: BasisSpec | None = None
    params: ModelParams | None = None
    asymmetry: float = 0.0

    def __post_init__(self):
        if self.H.shape != self.S.shape or self.H.ndim != 2 or self.H.shape[0] != self.H.shape[1]:
            raise InvalidParameterError(f"H {self.H.shape} and S {self.S.shape} must be equal square shapes")
        for a in (self.H, self.S):
            a.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.S.shape[0]


def _check_bounds(spec: BasisSpec, *idx):
    i, j, ip, jp = idx
    if not (0 <= i < spec.M and 0 <= ip < spec.M and 0 <= j < spec.N and 0 <= jp < spec.N):
        raise IndexError(f"basis index {(i, j, ip, jp)} out of range for M={spec.M}, N={spec.N}")


def overlap_entry(i: int, j: int, ip: int, jp: int, spec: BasisSpec) -> float:
    _check_bounds(spec, i, j, ip, jp)
    if (j + jp) % 2:
        return 0.0
    return radial_integral(i + ip + 2 * spec.s + 1) * axial_integral(j + jp, spec.b)


def hamiltonian_entry(i: int, j: int, ip: int, jp: int, spec: BasisSpec, params: ModelParams) -> complex:
    """<chi_ij | H | chi_i'j'> as a sum of radial x axial moments.

    Terms with a vanishing scalar prefactor are skipped before their moment
    is evaluated, so R(2s - 1) is never touched when s = 0 and lam = m = 0.
    """
    _check_bounds(spec, i, j, ip, jp)
    s, b = spec.s, spec.b
    lam, m = params.lam, params.m
    a = ip + s
    P = i + ip + 2 * s + 1
    q = j + jp

    def R(p):
        if p <= -1.0:
            raise SingularBasisError(
                f"divergent radial moment R({p}) with nonzero prefactor; "
                f"s={s} is inconsistent with lam={lam}, m={m}"
            )
        return radial_integral(p)

    def Z(n):
        return axial_integral(n, b) if n >= 0 else 0.0

    terms = []  # (coefficient, radial power, axial power)
    # -(1/rho) d_rho rho d_rho
    terms += [(-a * a, P - 2, q), (2 * a + 2, P, q), (-1.0, P + 2, q)]
    # -d_z^2 and -(lam^2/rho^2) d_z^2
    zc = [(-jp * (jp - 1), q - 2), (2 * b * (2 * jp + 1), q), (-4 * b * b, q + 2)]
    terms += [(c, P, n) for c, n in zc]
    terms += [(lam * lam * c, P - 2, n) for c, n in zc]
    # (2 i m lam / rho^2) d_z
    terms += [(2j * m * lam * jp, P - 2, q - 1), (2j * m * lam * (-2 * b), P - 2, q + 1)]
    # m^2/rho^2 + rho^2 + z^2
    terms += [(m * m, P - 2, q), (1.0, P + 2, q), (1.0, P, q + 2)]

    total = 0j
    for coef, p, n in terms:
        if coef == 0 or n < 0 or n % 2:
            continue
        total += coef * R(p) * Z(n)
    return complex(total)


def assemble(spec: BasisSpec, params: ModelParams) -> MatrixPair:
    """Build the full (H, S) pencil with Kronecker products of 1-D moment tables."""
    M, N, s, b = spec.M, spec.N, spec.s, spec.b
    lam, m = params.lam, params.m

    # Rk[k] = R(k + 2s - 1); radial pair (i, i') uses k = i + i' (+2, +4)
    Rk = radial_moments(2 * s - 1, 2 * M + 3)
    Zq = axial_moments(b, 2 * N + 1)

    ii = np.arange(M)
    kk = ii[:, None] + ii[None, :]
    Rm, R0, Rp = Rk[kk], Rk[kk + 2], Rk[kk + 4]
    a = (ii + s)[None, :] * np.ones((M, 1))

    a2Rm = np.where(a == 0.0, 0.0, a * a * Rm)
    if np.isnan(a2Rm).any():
        raise SingularBasisError(f"divergent radial moment in kinetic term; s={s}")
    rad_kin = -a2Rm + (2 * a + 2) * R0 - Rp

    jj = np.arange(N)
    qq = jj[:, None] + jj[None, :]
    jp = jj[None, :] * np.ones((N, 1), dtype=int)

    def Zs(shift):
        idx = qq + shift
        return np.where(idx >= 0, Zq[np.clip(idx, 0, None)], 0.0)

    Z0, Z2 = Zs(0), Zs(2)
    ax_kin = -jp * (jp - 1) * Zs(-2) + 2 * b * (2 * jp + 1) * Z0 - 4 * b * b * Z2
    ax_drift = jp * Zs(-1) - 2 * b * Zs(1)

    S = np.kron(R0, Z0)
    H = (
        np.kron(rad_kin, Z0)
        + np.kron(R0, ax_kin)
        + np.kron(Rp, Z0)
        + np.kron(R0, Z2)
    ).astype(complex)

    inv_sq = lam * lam * ax_kin + 1j * (2 * m * lam) * ax_drift + m * m * Z0
    if lam != 0.0 or m != 0:
        if np.isnan(Rm).any():
            raise SingularBasisError(
                f"divergent radial moment R({2 * s - 1}) with nonzero prefactor; "
                f"s={s} is inconsistent with lam={lam}, m={m}"
            )
        H += np.kron(Rm, inv_sq)

    scale = np.abs(H).max()
    asym = float(np.abs(H - H.conj().T).max() / scale) if scale > 0 else 0.0
    H = 0.5 * (H + H.conj().T)
    S = 0.5 * (S + S.T)
    return MatrixPair(H=H, S=S, spec=spec, params=params, asymmetry=asym)


def dump_matrices(pair: MatrixPair, path: str | Path) -> None:
    """Write H then S as text: a header line, then rows of ``re,im`` pairs."""
    spec, params = pair.spec, pair.params
    header = (
        f"{pair.dim} {spec.M} {spec.N} {params.lam!r} {params.m} {spec.s!r} {spec.b!r}"
    )
    lines = [header]
    for mat in (pair.H, pair.S):
        for row in np.asarray(mat, dtype=complex):
            lines.append(" ".join(f"{float(v.real)!r},{float(v.imag)!r}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_matrices(path: str | Path) -> MatrixPair:
    lines = Path(path).read_text().splitlines()
    dim, M, N, lam, m, s, b = lines[0].split()
    dim = int(dim)

    def parse(rows):
        return np.array(
            [[complex(*map(float, tok.split(","))) for tok in row.split()] for row in rows]
        )

    H = parse(lines[1 : 1 + dim])
    S = parse(lines[1 + dim : 1 + 2 * dim]).real.copy()
    spec = BasisSpec(int(M), int(N), float(s), float(b))
    return MatrixPair(H=H, S=S, spec=spec, params=ModelParams(float(lam), int(m)))
