"""Relative-motion s-wave states of two atoms in an isotropic harmonic trap.

Contact (energy-independent) pseudopotential. Energies come from the
Gamma-ratio root equation; wavefunctions from exp(-r^2/2) U(-nu, 3/2, r^2)
with r = R / a_t, normalized numerically.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import units
from .radial import RadialWave, count_nodes, make_grid, normalize
from .specfun import gen_binom_half, ln_gamma_signed, rgamma, tricomi_u

XI_MAX = 0.5


@dataclass(frozen=True)
class TrapSpec:
    """Trap angular frequency, reduced mass and scattering length, all in a.u."""

    omega: float
    mu: float
    a_sc: float = 0.0

    def __post_init__(self):
        if not self.omega > 0.0:
            raise ValueError(f"trap frequency must be positive, got {self.omega!r}")
        if not self.mu > 0.0:
            raise ValueError(f"reduced mass must be positive, got {self.mu!r}")

    @property
    def a_t(self):
        return math.sqrt(1.0 / (self.mu * self.omega))

    @property
    def xi_s(self):
        return self.a_sc / self.a_t

    @classmethod
    def from_lab(cls, omega_khz, a_sc_nm=0.0, mass_u=units.NA23_MASS_U):
        """Trap frequency omega/2pi in kHz, a_sc in nm, atomic mass in u (mu = m/2)."""
        return cls(
            omega=units.angular_from_hz(omega_khz * 1e3),
            mu=units.mass_from_u(mass_u) / 2.0,
            a_sc=units.length_from_nm(a_sc_nm),
        )

    @classmethod
    def from_xi(cls, omega_khz, xi_s, mass_u=units.NA23_MASS_U):
        spec = cls.from_lab(omega_khz, 0.0, mass_u)
        return cls(spec.omega, spec.mu, xi_s * spec.a_t)

    def with_a_sc(self, a_sc):
        return TrapSpec(self.omega, self.mu, a_sc)


@dataclass(frozen=True, eq=False)
class TrapLevel:
    n_t: int
    x: float
    spec: TrapSpec
    wave: RadialWave | None = None

    @property
    def nu(self):
        return self.x / 2.0 - 0.75

    @property
    def energy(self):
        return self.x * self.spec.omega

    @property
    def turning_point(self):
        return trap_turning_point(self.energy, self.spec)


def root_residual(x, xi_s):
    """Gamma(-x/2+1/4)/Gamma(-x/2+3/4) - sqrt(2) xi_s.

    The reciprocal of the usual left-hand side, so it is finite (zero) at
    the poles x = 2n + 3/2 and the roots are continuous in xi_s through 0.
    """
    g_num = ln_gamma_signed(-x / 2.0 + 0.25)
    return g_num.sign * math.exp(g_num.log_magnitude) * rgamma(-x / 2.0 + 0.75) - math.sqrt(2.0) * xi_s


def _check_regime(xi_s):
    if not abs(xi_s) < XI_MAX:
        raise ValueError(f"|xi_s| = {abs(xi_s):.4g} outside the model regime |xi_s| < {XI_MAX}")


def solve_trap_x(n_t, xi_s):
    """Dimensionless energy x = eps/(hbar omega) of trap level n_t."""
    _check_regime(xi_s)
    pole = 2.0 * n_t + 1.5
    if xi_s == 0.0:
        return pole
    # the residual is monotone between its poles at 2n+1/2 and 2n+5/2
    eps = 1e-13
    lo, hi = (pole, pole + 1.0 - eps) if xi_s > 0 else (pole - 1.0 + eps, pole)
    f_lo, f_hi = root_residual(lo, xi_s), root_residual(hi, xi_s)
    if f_lo * f_hi > 0.0:
        raise RuntimeError(f"root of trap equation not bracketed in [{lo}, {hi}] for n_t={n_t}")
    return brentq(root_residual, lo, hi, args=(xi_s,), xtol=1e-14, rtol=1e-15, maxiter=200)


def trap_levels(spec, n_max, with_waves=True, grid=None):
    """Levels n_t = 0..n_max, optionally with unit-normalized waves on ``grid``."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    levels = []
    if with_waves and grid is None:
        grid = default_trap_grid(spec)
    for n in range(n_max + 1):
        x = solve_trap_x(n, spec.xi_s)
        wave = trap_wavefunction(x, spec, grid) if with_waves else None
        levels.append(TrapLevel(n, x, spec, wave))
    return levels


def trap_energy_perturbative(n_t, spec):
    """First-order energy in xi_s (a.u.)."""
    if n_t < 0:
        raise ValueError("n_t must be >= 0")
    x = 1.5 + 2.0 * n_t + math.sqrt(2.0 / math.pi) * spec.xi_s * gen_binom_half(n_t)
    return x * spec.omega


def trap_turning_point(energy, spec):
    if not energy > 0.0:
        raise ValueError("turning point needs a positive energy")
    return math.sqrt(2.0 * energy / (spec.mu * spec.omega**2))


def default_trap_grid(spec, n=6001):
    """Log grid on [1e-4, 12] a_t.

    For a_sc != 0 the wave tends to a nonzero constant as R -> 0, so the
    piece of the grid below r_min is missing from every overlap; the loss
    scales with r_min, and 1e-4 a_t keeps it below 1e-6.
    """
    return make_grid(1e-4 * spec.a_t, 12.0 * spec.a_t, n, "log")


def trap_wavefunction(x, spec, grid):
    """u(R) = R Phi(R) for the level with dimensionless energy x, unit norm.

    Sign convention: the outer lobe is positive. U(-nu, 3/2, r^2) grows like
    r^(2 nu) > 0 at large r, so the wave is taken without the Gamma(-nu)
    prefactor, whose sign flips whenever nu crosses an integer (that is,
    whenever a_sc changes sign). This keeps the wave continuous in a_sc.
    """
    nu = x / 2.0 - 0.75
    need = (8.0 + math.sqrt(2.0 * x)) * spec.a_t
    rb = grid.r / spec.a_t
    tail = math.exp(-((grid.r_max / spec.a_t) ** 2)) * (grid.r_max / spec.a_t) ** (4 * nu + 2)
    if grid.r_max < need and tail > 1e-8:
        raise ValueError(
            f"trap grid ends at {grid.r_max / spec.a_t:.3g} a_t; needs about {need / spec.a_t:.3g} a_t"
        )
    phi = np.exp(-(rb**2) / 2.0) * tricomi_u(-nu, 1.5, rb**2)
    return normalize(RadialWave(grid, grid.r * phi))


def trap_nodes(level):
    """Nodes of the trap wave outside R = 2|a_sc|.

    For a_sc > 0 every level has an extra node near R ~ a_sc coming from
    orthogonality to the deep contact-interaction bound state, which the
    model excludes; it is not counted.
    """
    w = level.wave
    keep = w.r > 2.0 * abs(level.spec.a_sc)
    return count_nodes(w.u[keep])
