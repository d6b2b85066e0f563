import numpy as np
import pytest

from dislospec import ModelParams, converge, detect_crossings, optimize_b, sweep
from dislospec.sweep import SpectrumRecord, continuity_violations, lambda_grid, solve_point, worker_count


def test_lambda_grid():
    g = lambda_grid(0.0, 2.0, 0.01)
    assert len(g) == 201 and g[0] == 0.0 and g[-1] == pytest.approx(2.0)
    assert np.array_equal(lambda_grid(0, 5, 0.025), 0.025 * np.arange(201))
    with pytest.raises(ValueError):
        lambda_grid(0, 1, 0)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("DISLOSPEC_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("DISLOSPEC_THREADS", "0")
    assert worker_count() >= 1


@pytest.mark.parametrize("m, R, expected", [(0, 4, [3, 5, 7, 7]), (2, 2, [7, 9])])
def test_flat_space_levels(m, R, expected):
    rec = sweep(m, [0.0], R, 6, 6)[0]
    assert rec.energies == pytest.approx(expected, abs=1e-8)
    assert rec.b_opt == 0.5 and rec.converged


def test_sign_of_m_is_irrelevant():
    grid = [0.3, 0.9]
    a = sweep(2, grid, 4, 4, 4, estimate_error=False)
    b = sweep(-2, grid, 4, 4, 4, estimate_error=False)
    for x, y in zip(a, b):
        assert x.energies == pytest.approx(y.energies, abs=1e-10)


def test_degeneracy_is_lifted():
    # (1,0,0) and (0,2,0) share E0 = 7 at lam = 0
    for rec in sweep(0, [0.1, 0.5, 1.0], 4, 6, 6, estimate_error=False):
        assert rec.energies[3] - rec.energies[2] > 1e-6


def test_records_in_grid_order_with_errors():
    grid = lambda_grid(0.2, 0.6, 0.1)
    recs = sweep(1, grid, 3, 4, 4)
    assert [r.lam for r in recs] == pytest.approx(list(grid))
    for r in recs:
        assert r.truncation_error.shape == (3,) and np.all(np.isfinite(r.truncation_error))
    with pytest.raises(ValueError):
        sweep(1, [0.5, 0.2], 3, 4, 4)


def test_failed_point_is_marked():
    rec = solve_point(1.0, 0, R=10, M=2, N=2)
    assert rec.failed and np.all(np.isnan(rec.energies)) and rec.error


def test_continuity_detector():
    E = np.array([[1.0], [1.01], [1.02], [2.0], [1.04], [1.05]])
    recs = [SpectrumRecord(0.1 * i, 0, e, 0.5, 1, 1) for i, e in enumerate(E)]
    bad = continuity_violations(recs)
    assert bad and all(lvl == 0 for _, lvl in bad)
    smooth = [SpectrumRecord(0.1 * i, 0, np.array([1 + 0.01 * i]), 0.5, 1, 1) for i in range(6)]
    assert continuity_violations(smooth) == []


def test_converge_flat_space():
    rec = converge(0, 0.0, 4, 1e-8)
    assert rec.converged
    assert rec.energies == pytest.approx([3, 5, 7, 7], abs=1e-8)


def test_converge_matches_fixed_basis():
    rec = converge(1, 0.5, 1, 1e-3, start=4, step=2, max_size=14)
    assert rec.converged and rec.M == rec.N
    direct = optimize_b(ModelParams(0.5, 1), rec.M, rec.N).solution.energies[0]
    assert rec.energies[0] == pytest.approx(direct, abs=1e-12)
    assert np.all(rec.truncation_error < 1e-3)


def test_converge_stops_at_dependence_limit():
    # on the m = 0 axis the regular solution is non-analytic in rho; the
    # monomial basis runs into linear dependence before 1e-3 is reached
    rec = converge(0, 1.0, 1, 1e-3, start=4, step=2, max_size=20)
    assert not rec.converged
    assert rec.M < 20


def test_crossing_detection_small():
    # pair (2,3) of m = 2 (multiplet E0 = 11) narrowly avoids near lam ~ 0.83
    grid = lambda_grid(0.70, 0.95, 0.05)
    recs = sweep(2, grid, 4, 8, 8, estimate_error=False)
    reps = detect_crossings(recs, refine_tol=1e-4, levels=[2])
    assert len(reps) == 1
    c = reps[0]
    assert (c.lower_level, c.upper_level) == (2, 3)
    assert 0.75 < c.lambda_star < 0.9
    assert 0 < c.gap < 0.1
    assert c.status == "avoided"
    assert [str(lbl) for lbl in c.multiplet_origin] == ["(1,0,2)", "(0,2,2)"]
    d = c.to_json()
    assert d["lower_level"] == 2 and d["multiplet_origin"] == ["(1,0,2)", "(0,2,2)"]


def test_crossings_require_common_m():
    recs = [SpectrumRecord(0.1, 0, np.ones(2), 0.5, 1, 1), SpectrumRecord(0.2, 1, np.ones(2), 0.5, 1, 1)]
    with pytest.raises(ValueError):
        detect_crossings(recs)
