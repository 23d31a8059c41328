import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pa_spectra import units
from pa_spectra.radial import make_grid
from pa_spectra.scattering import (
    free_amplitude,
    free_state,
    maxwell_moment,
    maxwell_nodes,
    wavenumber,
)

MU = units.mass_from_u(units.NA23_MASS_U) / 2.0


def _eps_for_wavelength(lam):
    k = 2.0 * math.pi / lam
    return k * k / (2.0 * MU)


def test_nodes_of_sine():
    lam = units.length_from_nm(1000.0)
    eps = _eps_for_wavelength(lam)
    g = make_grid(units.length_from_nm(1.0), units.length_from_nm(1200.0), 4001)
    fs = free_state(eps, 0.0, g, MU)
    for r_nm in (500.0, 1000.0):
        assert fs.wave(np.array([units.length_from_nm(r_nm)]))[0] == pytest.approx(0.0, abs=1e-6 * np.max(np.abs(fs.wave.u)))


def test_linear_near_origin():
    eps = units.energy_from_khz(1e-3)
    a = units.length_from_nm(3.0)
    g = make_grid(a + 1.0, a + 20.0, 101)
    fs = free_state(eps, a, g, MU)
    k = wavenumber(eps, MU)
    assert np.allclose(fs.wave.u, free_amplitude(eps, MU) * k * (g.r - a), rtol=1e-6)


@given(st.floats(1e-16, 1e-8))
def test_energy_normalization_amplitude(eps):
    assert free_amplitude(eps, MU) ** 2 * math.pi * eps / wavenumber(eps, MU) == pytest.approx(1.0, rel=1e-12)


def test_under_resolved_grid():
    eps = _eps_for_wavelength(100.0)
    with pytest.raises(ValueError, match="under-resolves"):
        free_state(eps, 0.0, make_grid(1.0, 1000.0, 50), MU)
    with pytest.raises(ValueError):
        free_state(0.0, 0.0, make_grid(1.0, 2.0, 5), MU)


@pytest.mark.parametrize("order", range(4))
def test_maxwell_moments(order):
    kt = units.temperature_to_energy(5e-6)
    ens = maxwell_nodes(kt, 64)
    assert ens.average(ens.nodes**order) == pytest.approx(maxwell_moment(kt, order), rel=1e-8)


def test_maxwell_named_moments():
    kt = 2.0
    ens = maxwell_nodes(kt, 16)
    assert ens.weights.sum() == pytest.approx(1.0, abs=1e-10)
    assert np.all(ens.nodes > 0)
    assert ens.average(ens.nodes) == pytest.approx(1.5 * kt, rel=1e-8)
    assert ens.average(ens.nodes**2) == pytest.approx(3.75 * kt**2, rel=1e-8)
    with pytest.raises(ValueError):
        maxwell_nodes(kt, 4)
    with pytest.raises(ValueError):
        maxwell_nodes(0.0)
