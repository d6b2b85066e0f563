import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from dislospec import (
    InvalidLabelError,
    ModelParams,
    QuantumLabel,
    degeneracy,
    exact_energy,
    multiplet_members,
    solve_simple_ansatz,
)
from dislospec.assembly import BasisSpec, hamiltonian_entry, overlap_entry
from dislospec.model import ansatz_energy, ansatz_root_residual, exact_levels

lams = st.floats(min_value=-6.0, max_value=6.0, allow_nan=False)
ms = st.integers(min_value=-4, max_value=4)


@pytest.mark.parametrize(
    "label, expected",
    [((0, 0, 0), 3), ((1, 0, 2), 11), ((0, 3, 2), 13), ((1, 1, -2), 13)],
)
def test_exact_energy(label, expected):
    assert exact_energy(QuantumLabel(*label)) == expected


@pytest.mark.parametrize("n, k", [(-1, 0), (0, -2)])
def test_exact_energy_rejects_negative(n, k):
    with pytest.raises(InvalidLabelError):
        exact_energy(QuantumLabel(n, k, 0))


@pytest.mark.parametrize(
    "E0, m_abs, expected",
    [
        (11, 2, [(1, 0), (0, 2)]),
        (15, 2, [(2, 0), (1, 2), (0, 4)]),
        (13, 2, [(1, 1), (0, 3)]),
        (3, 0, [(0, 0)]),
        (4, 0, []),
        (5, 2, []),
    ],
)
def test_multiplet_members(E0, m_abs, expected):
    assert multiplet_members(E0, m_abs) == expected


def _brute_degeneracy(E0):
    count = 0
    for n, k, m in itertools.product(range(E0), range(E0), range(-E0, E0 + 1)):
        if 4 * n + 2 * k + 2 * abs(m) + 3 == E0:
            count += 1
    return count


@pytest.mark.parametrize("E0", range(0, 22))
def test_degeneracy_matches_enumeration(E0):
    assert degeneracy(E0) == _brute_degeneracy(E0)


def test_degeneracy_examples():
    assert degeneracy(3) == 1
    assert degeneracy(5) == 3
    assert degeneracy(7) == 6
    assert degeneracy(1) == 0


def test_exact_levels_order():
    levels = exact_levels(0, 6)
    assert [E for E, _ in levels] == [3, 5, 7, 7, 9, 9]
    assert [(l.n, l.k) for _, l in levels][2:4] == [(1, 0), (0, 2)]


@pytest.mark.parametrize(
    "lam, m, b, s, W",
    [(0.0, 0, 0.5, 0.0, 3.0), (0.0, 2, 0.5, 2.0, 7.0), (0.0, -3, 0.5, 3.0, 9.0)],
)
def test_simple_ansatz_flat_space(lam, m, b, s, W):
    a = solve_simple_ansatz(ModelParams(lam, m))
    assert (a.b, a.s, a.W) == (b, s, W)


def test_simple_ansatz_lambda_one():
    a = solve_simple_ansatz(ModelParams(1.0, 0))
    assert a.b == pytest.approx(0.2970, abs=5e-5)
    assert a.W == pytest.approx(4.229, abs=5e-4)


@pytest.mark.parametrize("lam, m", [(1.0, 0), (0.7, 1), (2.5, 2)])
def test_simple_ansatz_against_direct_minimisation(lam, m):
    # oracle: minimise the 1x1 Rayleigh quotient over (s, b) without the closed form
    params = ModelParams(lam, m)

    def quotient(x):
        s, b = x
        if s <= 0.0 or b <= 0.0:
            return 1e9
        spec = BasisSpec(1, 1, s, b)
        return hamiltonian_entry(0, 0, 0, 0, spec, params).real / overlap_entry(0, 0, 0, 0, spec)

    res = minimize(quotient, x0=[abs(m) + 0.5, 0.4], method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    a = solve_simple_ansatz(params)
    assert res.fun == pytest.approx(a.W, abs=1e-9)
    assert res.x[1] == pytest.approx(a.b, abs=1e-4)
    assert res.x[0] == pytest.approx(a.s, abs=1e-4)


def test_simple_ansatz_scan_lambda_one():
    bs = np.linspace(1e-3, 0.5, 200001)
    W = [ansatz_energy(b, 1.0, 0) for b in bs]
    i = int(np.argmin(W))
    a = solve_simple_ansatz(ModelParams(1.0, 0))
    assert abs(bs[i] - a.b) < 1e-5
    assert min(W) >= a.W - 1e-12


@settings(max_examples=200, deadline=None)
@given(lams, ms)
def test_simple_ansatz_invariants(lam, m):
    a = solve_simple_ansatz(ModelParams(lam, m))
    assert abs(ansatz_root_residual(a.b, lam, m)) <= 1e-12
    assert a.s**2 - (a.b * lam**2 + m**2) == pytest.approx(0.0, abs=1e-12 * max(1.0, a.s**2))
    assert 0.0 < a.b <= 0.5
    if lam == 0.0:
        assert a.b == 0.5
    elif abs(lam) > 1e-6:
        assert a.b < 0.5
    for other in (ModelParams(-lam, m), ModelParams(lam, -m), ModelParams(-lam, -m)):
        assert solve_simple_ansatz(other).W == a.W


@pytest.mark.parametrize("m", [0, 1, 2, 5])
def test_simple_ansatz_exact_in_flat_space(m):
    assert solve_simple_ansatz(ModelParams(0.0, m)).W == exact_energy(QuantumLabel(0, 0, m))


@pytest.mark.parametrize("m", [0, 1, 2])
def test_simple_ansatz_nondecreasing_in_lambda(m):
    grid = np.linspace(0.0, 6.0, 301)
    W = np.array([solve_simple_ansatz(ModelParams(x, m)).W for x in grid])
    assert np.all(np.diff(W) >= -1e-12)


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(math.inf, 0)
    with pytest.raises(ValueError):
        ModelParams(0.1, 1.5)
    assert ModelParams(-1.0, -2).canonical() == ModelParams(1.0, 2)
