"""Franck-Condon integrals, Rabi frequencies, stimulated rates and
spontaneous linewidths between trap-pair or free states and
ultralong-range vibrational levels. All quantities are in atomic units.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import units
from .radial import RadialGrid, integrate, integrate_sin
from .scattering import free_amplitude, wavenumber
from .trap import solve_trap_x, trap_wavefunction, default_trap_grid, XI_MAX

FACTORS = ("unity", "cos_half", "cos_full")
NA_D2_THZ = 508.333
NA_D0_AU = -3.5007
# edge amplitude (relative to the peak) below which a wave may be cut off
EDGE_TOL = 1e-3


@dataclass(frozen=True)
class LaserSpec:
    """PA laser: wavelength (a.u.), photon-factor mode, atomic transition
    angular frequency (a.u.), dipole constant D0 (a.u.) and orientation
    factor <e.mu>."""

    wavelength: float
    factor: str = "cos_half"
    omega_a: float = units.angular_from_hz(NA_D2_THZ * 1e12)
    d0: float = NA_D0_AU
    orientation: float = 1.0

    def __post_init__(self):
        if not self.wavelength > 0.0:
            raise ValueError("laser wavelength must be positive")
        if self.factor not in FACTORS:
            raise ValueError(f"photon factor must be one of {FACTORS}, got {self.factor!r}")

    @classmethod
    def from_lab(cls, wavelength_nm=None, factor="cos_half", omega_a_thz=NA_D2_THZ, d0_au=NA_D0_AU, orientation=1.0):
        """Wavelength defaults to the atomic line, 2 pi c / omega_A."""
        omega_a = units.angular_from_hz(omega_a_thz * 1e12)
        if wavelength_nm is None:
            wavelength = 2.0 * math.pi * units.C_AU / omega_a
        else:
            wavelength = units.length_from_nm(wavelength_nm)
        return cls(wavelength, factor, omega_a, d0_au, orientation)

    @property
    def k_l(self):
        return 2.0 * math.pi / self.wavelength

    @property
    def photon_wavenumber(self):
        """q in cos(q R): 0, k_L / 2 or k_L."""
        return {"unity": 0.0, "cos_half": 0.5 * self.k_l, "cos_full": self.k_l}[self.factor]

    def photon_factor(self, r):
        return np.cos(self.photon_wavenumber * np.asarray(r, dtype=float))


@dataclass(frozen=True)
class CouplingResult:
    fc: float
    rate: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def fc2(self):
        return self.fc**2


def _edge_check(a, b, lo, hi):
    """Fail if cutting either wave to [lo, hi] drops a non-negligible product."""
    for w, other in ((a, b), (b, a)):
        peak = np.max(np.abs(w.u))
        opeak = np.max(np.abs(other.u))
        if w.grid.r_min > lo or w.grid.r_min == lo:
            outside = other.u[other.r < w.grid.r_min]
            if outside.size and abs(w.u[0]) > EDGE_TOL * peak and np.max(np.abs(outside)) > EDGE_TOL * opeak:
                raise ValueError("grids do not cover the inner overlap of the two waves")
        if w.grid.r_max < hi or w.grid.r_max == hi:
            outside = other.u[other.r > w.grid.r_max]
            if outside.size and abs(w.u[-1]) > EDGE_TOL * peak and np.max(np.abs(outside)) > EDGE_TOL * opeak:
                raise ValueError("grids do not cover the outer overlap of the two waves")


def common_grid(a, b):
    """Union of both grids restricted to their overlap."""
    lo = max(a.grid.r_min, b.grid.r_min)
    hi = min(a.grid.r_max, b.grid.r_max)
    if not hi > lo:
        raise ValueError("the two waves have disjoint grids")
    _edge_check(a, b, lo, hi)
    r = np.union1d(a.r, b.r)
    r = r[(r >= lo) & (r <= hi)]
    return RadialGrid(r, "log")


def fc_bound_bound(v_wave, t_wave, laser):
    """Integral of u_v u_t f(R) dR for two unit-normalized waves."""
    grid = common_grid(v_wave, t_wave)
    f = v_wave(grid.r) * t_wave(grid.r) * laser.photon_factor(grid.r)
    return integrate(grid, f)


def _tail_check(v_wave):
    if abs(v_wave.u[-1]) > 1e-8 * np.max(np.abs(v_wave.u)):
        raise ValueError("bound wave grid stops before its tail falls below 1e-8 of the peak")


def fc_free_bound(v_wave, eps, a_sc, laser, mu):
    """Integral of u_v(R) sqrt(k/(pi eps)) sin(k (R - a_sc)) f(R) dR.

    Carries dimension energy^-1/2. The sine (and the photon factor) are
    integrated exactly on each interval of the bound wave's grid.
    """
    if not eps > 0.0:
        raise ValueError("collision energy must be positive")
    _tail_check(v_wave)
    k = wavenumber(eps, mu)
    q = laser.photon_wavenumber
    g = v_wave.u
    if q == 0.0:
        s = integrate_sin(v_wave.grid, g, k, -k * a_sc)
    else:
        # sin(k(R-a)) cos(qR) = [sin((k+q)R - ka) + sin((k-q)R - ka)] / 2
        s = 0.5 * (
            integrate_sin(v_wave.grid, g, k + q, -k * a_sc) + integrate_sin(v_wave.grid, g, k - q, -k * a_sc)
        )
    return free_amplitude(eps, mu) * s


def rabi_frequency(fc, laser, field_amplitude):
    """|<e.mu> E D0 eta| / hbar."""
    return abs(laser.orientation * field_amplitude * laser.d0 * fc)


def stimulated_rate(fc_free, laser, field_amplitude):
    """(2 pi / hbar) |<e.mu> E D0|^2 |eta_free|^2."""
    return 2.0 * math.pi * (laser.orientation * field_amplitude * laser.d0) ** 2 * fc_free**2


def _spont_prefactor(omega, laser):
    if not omega > 0.0:
        raise ValueError(f"transition frequency must be positive, got {omega!r}")
    return 4.0 / (3.0 * units.C_AU**3) * omega**3 * laser.d0**2


def spont_width_bound(v_level, trap_level, laser, gamma_bb=0.0, fc=None):
    """Bound-bound spontaneous width; gamma_bb is a pass-through constant."""
    if fc is None:
        fc = fc_bound_bound(v_level.wave, trap_level.wave, laser)
    omega = laser.omega_a - (v_level.energy + trap_level.energy)
    width = _spont_prefactor(omega, laser) * fc**2 + gamma_bb
    return CouplingResult(
        fc, width, {"v": v_level.v_label, "n_t": trap_level.n_t, "omega": omega, "factor": laser.factor}
    )


def spont_width_free(v_level, ensemble, a_sc, laser, mu, gamma_bb=0.0):
    """Bound-free spontaneous width averaged over a Maxwellian ensemble.

    The energy integral is weighted with the thermal occupation per unit
    eps / kT, i.e. kT * P(eps), so |eta|^2 (per unit energy) gives a rate.
    """
    omegas = laser.omega_a - (v_level.energy + ensemble.nodes)
    etas = np.array([fc_free_bound(v_level.wave, e, a_sc, laser, mu) for e in ensemble.nodes])
    pref = np.array([_spont_prefactor(o, laser) for o in omegas])
    width = ensemble.kt * float(np.dot(ensemble.weights, pref * etas**2)) + gamma_bb
    mean_eta2 = ensemble.average(etas**2)
    return CouplingResult(
        math.sqrt(mean_eta2), width, {"v": v_level.v_label, "kt": ensemble.kt, "factor": laser.factor}
    )


@dataclass(frozen=True)
class ScanRow:
    a_sc: float
    energy: float | None
    fc: float | None
    error: str | None = None

    @property
    def ok(self):
        return self.error is None


def scan_scattering_length(v_level, n_t, spec, a_values, laser, grid=None):
    """Trap energy and FC integral of (v, n_t) with the trap level re-solved
    at every scattering length; rows outside the model regime are flagged."""
    rows = []
    for a in a_values:
        s = spec.with_a_sc(float(a))
        if not abs(s.xi_s) < XI_MAX:
            rows.append(ScanRow(float(a), None, None, f"|xi_s| = {abs(s.xi_s):.3g} >= {XI_MAX}"))
            continue
        x = solve_trap_x(n_t, s.xi_s)
        wave = trap_wavefunction(x, s, grid or default_trap_grid(s))
        rows.append(ScanRow(float(a), x * s.omega, fc_bound_bound(v_level.wave, wave, laser)))
    return rows
