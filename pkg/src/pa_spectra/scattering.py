"""Low-energy s-wave scattering states and Maxwellian collision-energy rules."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_genlaguerre

from .radial import PER_SQRT_ENERGY, RadialWave

MIN_POINTS_PER_WAVELENGTH = 40


def wavenumber(epsilon, mu):
    return math.sqrt(2.0 * mu * epsilon)


def free_amplitude(epsilon, mu):
    """sqrt(k / (pi eps)): the energy-normalization amplitude."""
    return math.sqrt(wavenumber(epsilon, mu) / (math.pi * epsilon))


@dataclass(frozen=True, eq=False)
class FreeState:
    epsilon: float
    k: float
    a_sc: float
    wave: RadialWave


def free_state(epsilon, a_sc, grid, mu):
    """Asymptotic energy-normalized state sqrt(k/(pi eps)) sin(k (R - a_sc))."""
    if not epsilon > 0.0:
        raise ValueError("collision energy must be positive")
    k = wavenumber(epsilon, mu)
    spacing = float(np.max(np.diff(grid.r)))
    if spacing > 2.0 * math.pi / k / MIN_POINTS_PER_WAVELENGTH:
        raise ValueError(
            f"grid spacing {spacing:.4g} a0 under-resolves the wavelength {2 * math.pi / k:.4g} a0"
        )
    u = free_amplitude(epsilon, mu) * np.sin(k * (grid.r - a_sc))
    return FreeState(epsilon, k, a_sc, RadialWave(grid, u, PER_SQRT_ENERGY))


@dataclass(frozen=True, eq=False)
class ThermalEnsemble:
    """Nodes and normalized weights for averages over sqrt(eps) exp(-eps/kT)."""

    kt: float
    nodes: np.ndarray
    weights: np.ndarray

    def average(self, values):
        return float(np.dot(self.weights, values))


def maxwell_nodes(kt, n=64):
    """Generalized Gauss-Laguerre rule (alpha = 1/2) scaled to kT."""
    if not kt > 0.0:
        raise ValueError("temperature must be positive")
    if n < 8:
        raise ValueError("use at least 8 thermal nodes")
    s, w = roots_genlaguerre(n, 0.5)
    return ThermalEnsemble(kt, kt * s, w / w.sum())


def maxwell_moment(kt, order):
    """<eps^order> for the 3D relative-energy Maxwellian."""
    return kt**order * math.gamma(order + 1.5) / math.gamma(1.5)
