"""Rayleigh-Ritz spectrum of a 3-D harmonic oscillator in a space with a screw dislocation."""

from .assembly import BasisSpec, MatrixPair, assemble, hamiltonian_entry, overlap_entry
from .errors import (
    ConvergenceError,
    DegenerateBasisError,
    DislospecError,
    DivergentIntegralError,
    InvalidLabelError,
    InvalidParameterError,
    NumericalError,
    OracleError,
    SingularBasisError,
)
from .fd_oracle import GridSpec, fd_lowest
from .gevp import EigenSolution, solve_pencil
from .integrals import axial_integral, quadrature_oracle, radial_integral
from .model import (
    ModelParams,
    QuantumLabel,
    SimpleAnsatz,
    degeneracy,
    exact_energy,
    exact_levels,
    multiplet_members,
    solve_simple_ansatz,
)
from .optimize import Objective, OptimizeConfig, fix_s, optimize_b
from .sweep import CrossingReport, SpectrumRecord, converge, detect_crossings, sweep

__version__ = "0.1.0"
