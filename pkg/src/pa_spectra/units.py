"""Physical constants and unit conversions.

Everything inside the package works in Hartree atomic units
(hbar = m_e = a0 = e = 1). Lab-facing values are nm, kHz/MHz, u and Hz.

Two energy display conventions are kept apart on purpose:

* ``E/h``  in kHz or MHz (a spectroscopic frequency), and
* ``E/hbar`` in Mrad/s (an angular frequency).

They differ by a factor of 2*pi: E/h [MHz] = (E/hbar [Mrad/s]) / (2*pi).
"""

import math

from scipy import constants as _c

_pc = _c.physical_constants

BOHR_NM = _pc["Bohr radius"][0] * 1e9
HARTREE_HZ = _pc["hartree-hertz relationship"][0]
AU_TIME_S = _pc["atomic unit of time"][0]
AMU_ME = _pc["atomic mass constant"][0] / _pc["electron mass"][0]
C_AU = 1.0 / _c.fine_structure
KB_HARTREE_PER_K = _pc["Boltzmann constant in Hz/K"][0] / HARTREE_HZ
AU_FIELD_V_PER_CM = _pc["atomic unit of electric field"][0] / 100.0

NA23_MASS_U = 22.98977


def length_from_nm(x):
    return x / BOHR_NM


def length_to_nm(x):
    return x * BOHR_NM


def mass_from_u(m):
    return m * AMU_ME


def mass_to_u(m):
    return m / AMU_ME


def energy_from_khz(e):
    """E/h in kHz -> Hartree."""
    return e * 1e3 / HARTREE_HZ


def energy_to_khz(e):
    """Hartree -> E/h in kHz."""
    return e * HARTREE_HZ / 1e3


def energy_from_mhz(e):
    return e * 1e6 / HARTREE_HZ


def energy_to_mhz(e):
    return e * HARTREE_HZ / 1e6


def energy_from_mrad_s(e):
    """E/hbar in 10^6 rad/s -> Hartree."""
    return e * 1e6 * AU_TIME_S


def energy_to_mrad_s(e):
    return e / AU_TIME_S / 1e6


def angular_from_hz(f):
    """Ordinary frequency in Hz -> angular frequency in a.u."""
    return 2.0 * math.pi * f * AU_TIME_S


def angular_to_hz(w):
    return w / (2.0 * math.pi * AU_TIME_S)


def rate_to_per_s(g):
    """Rate or angular frequency in a.u. -> s^-1 (rad/s)."""
    return g / AU_TIME_S


def rate_from_per_s(g):
    return g * AU_TIME_S


def temperature_to_energy(t_kelvin):
    return t_kelvin * KB_HARTREE_PER_K


def energy_to_temperature(e):
    return e / KB_HARTREE_PER_K


def field_from_v_per_cm(f):
    return f / AU_FIELD_V_PER_CM
