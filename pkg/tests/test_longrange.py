import math

import numpy as np
import pytest

from pa_spectra import units
from pa_spectra.coupling import LaserSpec, fc_bound_bound
from pa_spectra.longrange import (
    NA2_0G_LEVELS,
    GridPolicy,
    HarmonicWell,
    InnerBoundary,
    PotentialModel,
    TabulatedPotential,
    calibrate_boundary,
    calibrate_c3,
    count_bound,
    leroy_bernstein_fit,
    outer_turning_point,
    solve_levels,
    solve_states,
)
from pa_spectra.trap import TrapSpec

UNITY = LaserSpec.from_lab(factor="unity")


def test_harmonic_oracle():
    s = TrapSpec.from_lab(100.0)
    well = HarmonicWell(s.mu, s.omega, InnerBoundary.wall(1e-10 * s.a_t))
    states = solve_states(well, 0.5 * s.omega, 12.5 * s.omega)
    assert [n for _, _, n in states] == list(range(6))
    for e, _, n in states:
        assert e / s.omega == pytest.approx(2 * n + 1.5, rel=1e-8)


def test_similarity_scaling():
    # eps_v scales as c3^-2 mu^-3 at fixed node structure; the wall moves with beta3
    base = PotentialModel.from_lab(6.0e9, wall_nm=10.0)
    scaled = PotentialModel(base.c3 * 2.0, base.mu, InnerBoundary.wall(base.boundary.r_in * 2.0))
    win = (units.energy_from_khz(1.0), units.energy_from_khz(3000.0))
    e1 = solve_levels(base, win)
    e2 = solve_levels(scaled, (win[0] / 4.0, win[1] / 4.0))
    assert len(e1) == len(e2) > 2
    for a, b in zip(e1, e2):
        assert b.binding_energy * 4.0 == pytest.approx(a.binding_energy, rel=1e-7)


def test_pure_tail_turning_point():
    m = PotentialModel.from_lab(6.24e9)
    eps = units.energy_from_khz(1460.0)
    assert eps * outer_turning_point(m, eps) ** 3 == pytest.approx(m.c3, rel=1e-12)
    assert units.length_to_nm(outer_turning_point(m, eps)) == pytest.approx(162.3, rel=0.005)
    eps38 = units.energy_from_khz(0.3017)
    assert units.length_to_nm(outer_turning_point(m, eps38)) == pytest.approx(2750.0, rel=0.02)
    with pytest.raises(ValueError):
        outer_turning_point(m, 0.0)


def test_calibrate_c3():
    c3, spread = calibrate_c3([(2.0, 1.0), (2.0 / 8.0, 2.0)])
    assert c3 == pytest.approx(2.0) and spread == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        calibrate_c3([(1.0, 1.0)])


def test_leroy_bernstein_synthetic():
    levels = [(v, (39.3 - v) ** 6) for v in range(30, 36)]
    v_d, h, resid = leroy_bernstein_fit(levels)
    assert v_d == pytest.approx(39.3, abs=1e-10)
    assert h == pytest.approx(1.0, rel=1e-10)
    with pytest.raises(ValueError):
        leroy_bernstein_fit(levels[:2])


def test_leroy_bernstein_on_table():
    v_d, _, resid = leroy_bernstein_fit([(v, e) for v, e, _, _ in NA2_0G_LEVELS if v <= 37])
    assert v_d == pytest.approx(39.7, abs=0.3)
    assert np.max(np.abs(resid)) < 0.15


def test_window_guards():
    m = PotentialModel.from_lab(6.24e9)
    with pytest.raises(ValueError):
        solve_levels(m, (0.0, 1e-6))
    with pytest.raises(ValueError):
        solve_levels(m, (1e-9, 1.0))


def test_calibrated_levels(na_levels, na_model):
    assert [lv.v_label for lv in na_levels] == list(range(33, 40))
    assert units.energy_to_khz(na_levels[0].binding_energy) == pytest.approx(1460.0, rel=1e-6)
    for lv in na_levels:
        peak = np.max(np.abs(lv.wave.u))
        below = np.abs(lv.wave.u[lv.wave.r < units.length_from_nm(10.0)])
        assert below.size == 0 or np.max(below) < 1e-3 * peak
        # node count increases by one per level
        assert lv.nodes == na_levels[0].nodes + lv.v_label - 33


def test_orthonormality(na_levels):
    for a in na_levels:
        for b in na_levels:
            assert abs(fc_bound_bound(a.wave, b.wave, UNITY) - (a is b)) < 1e-6


def test_completeness(na_model):
    # every bound level from near the wall depth up to threshold is found once
    depth = -float(na_model.potential(na_model.boundary.r_in))
    levels = solve_levels(na_model, (units.energy_from_khz(1e-4), 0.99 * depth))
    n_total = count_bound(na_model)
    assert len(levels) == n_total
    assert [lv.v_label for lv in levels] == list(range(40 - n_total, 40))
    assert [lv.nodes for lv in levels] == list(range(n_total))


def test_grid_doubling(na_model, na_levels):
    win = (units.energy_from_khz(1e-4), units.energy_from_khz(2000.0))
    fine = solve_levels(na_model, win, GridPolicy(points_per_wavelength=2000.0))
    for a, b in zip(na_levels, fine):
        assert a.v_label == b.v_label
        assert abs(a.binding_energy / b.binding_energy - 1.0) < 1e-8


def test_calibration_is_fixed_point(na_model):
    # starting from another minimum wall below the same node gives the same wall
    start = na_model.with_boundary(InnerBoundary.wall(na_model.boundary.r_in - units.length_from_nm(0.5)))
    b = calibrate_boundary(start, (33, units.energy_from_khz(1460.0)))
    assert b.r_in == pytest.approx(na_model.boundary.r_in, rel=1e-9)


def test_cross_calibration(na_model):
    # anchoring on v = 35 instead of v = 33 moves v = 33 by well under 1%
    m = PotentialModel(na_model.c3, na_model.mu, InnerBoundary.wall(units.length_from_nm(10.0)))
    eps35 = solve_levels(na_model, (units.energy_from_khz(100.0), units.energy_from_khz(300.0)))[0].binding_energy
    m35 = m.with_boundary(calibrate_boundary(m, (35, eps35)))
    got = solve_levels(m35, (units.energy_from_khz(1000.0), units.energy_from_khz(2000.0)))
    assert got[0].v_label == 33
    assert units.energy_to_khz(got[0].binding_energy) == pytest.approx(1460.0, rel=1e-6)


def test_calibration_rejects_wrong_label():
    m = PotentialModel.from_lab(6.2395e9)
    with pytest.raises(ValueError, match="target unreachable"):
        calibrate_boundary(m, (30, units.energy_from_khz(1460.0)))


def test_log_derivative_boundary_calibration():
    m = PotentialModel.from_lab(6.2395e9, wall_nm=12.0)
    m = m.with_boundary(InnerBoundary.log_derivative(m.boundary.r_in, 0.0))
    b = calibrate_boundary(m, (33, units.energy_from_khz(1460.0)))
    assert not b.is_wall
    lv = solve_levels(m.with_boundary(b), (units.energy_from_khz(1000.0), units.energy_from_khz(2000.0)))
    assert lv[0].v_label == 33
    assert units.energy_to_khz(lv[0].binding_energy) == pytest.approx(1460.0, rel=1e-6)


def test_potential_table(tmp_path):
    c3 = 6.2395e9
    r_nm = np.linspace(8.0, 60.0, 60)
    v_mhz = -c3 / r_nm**3 / 1e3
    path = tmp_path / "pot.txt"
    path.write_text("# R nm, V/h MHz\n" + "\n".join(f"{r:.12g} {v:.12g}" for r, v in zip(r_nm, v_mhz)) + "\n")
    table = TabulatedPotential.load(path)
    tab = PotentialModel.from_table(table, wall_nm=10.0)
    pure = PotentialModel.from_lab(c3, wall_nm=10.0)
    assert tab.c3 == pytest.approx(pure.c3, rel=1e-10)
    win = (units.energy_from_khz(100.0), units.energy_from_khz(2000.0))
    a, b = solve_levels(tab, win), solve_levels(pure, win)
    assert [x.nodes for x in a] == [x.nodes for x in b]
    for x, y in zip(a, b):
        assert x.binding_energy == pytest.approx(y.binding_energy, rel=1e-6)


def test_potential_table_validation(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("1 -5\n2 -3\n1.5 -2\n3 -1\n")
    with pytest.raises(ValueError, match="increasing"):
        TabulatedPotential.load(p)
    p.write_text("1 -5 7\n")
    with pytest.raises(ValueError, match=":1:"):
        TabulatedPotential.load(p)
