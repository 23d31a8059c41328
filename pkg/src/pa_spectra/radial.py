"""Radial grids, sampled radial waves and the quadratures used on them."""

from dataclasses import dataclass, replace

import numpy as np

UNIT = "unit"
PER_SQRT_ENERGY = "per_sqrt_energy"


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Strictly increasing radii (a.u.) with the spacing kind recorded.

    ``kind`` is ``"uniform"`` (uniform in R) or ``"log"`` (uniform in ln R).
    """

    r: np.ndarray
    kind: str = "uniform"

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.ndim != 1 or r.size < 3:
            raise ValueError("a radial grid needs at least 3 points")
        if r[0] <= 0.0:
            raise ValueError(f"first grid point must be > 0, got {r[0]!r}")
        if np.any(np.diff(r) <= 0.0):
            raise ValueError("grid points must be strictly increasing")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    def __len__(self):
        return self.r.size

    @property
    def r_min(self):
        return float(self.r[0])

    @property
    def r_max(self):
        return float(self.r[-1])

    @property
    def step(self):
        """Uniform step in R or in ln R, depending on ``kind``."""
        if self.kind == "log":
            return float(np.log(self.r[1] / self.r[0]))
        return float(self.r[1] - self.r[0])


def make_grid(r_min, r_max, n, kind="uniform"):
    if not r_min > 0.0:
        raise ValueError(f"r_min must be positive, got {r_min!r}")
    if not r_max > r_min:
        raise ValueError(f"r_max ({r_max!r}) must exceed r_min ({r_min!r})")
    n = int(n)
    if n < 3:
        raise ValueError(f"need n >= 3 grid points, got {n}")
    if kind == "uniform":
        r = np.linspace(r_min, r_max, n)
    elif kind == "log":
        h = np.log(r_max / r_min) / (n - 1)
        r = r_min * np.exp(h * np.arange(n))
    else:
        raise ValueError(f"unknown grid kind {kind!r}")
    r[0] = r_min
    r[-1] = r_max
    return RadialGrid(r, kind)


def integrate(grid, f):
    """Composite trapezoid rule on the (possibly nonuniform) grid."""
    f = np.asarray(f, dtype=float)
    if f.shape != grid.r.shape:
        raise ValueError(
            f"sample length {f.shape} does not match grid length {grid.r.shape}"
        )
    return float(np.trapezoid(f, grid.r))


def _sinc(z):
    return np.sinc(z / np.pi)


def _odd_kernel(z):
    # (sin z - z cos z) / z^2, series below |z| = 1e-2
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = np.abs(z) < 1e-2
    zs = z[small]
    out[small] = zs / 3.0 - zs**3 / 30.0 + zs**5 / 840.0
    zl = z[~small]
    out[~small] = (np.sin(zl) - zl * np.cos(zl)) / zl**2
    return out


def integrate_sin(grid, g, k, phase=0.0):
    """Integral of g(R) * sin(k R + phase) with g piecewise linear on the grid.

    Filon-type: the oscillatory factor is integrated exactly on every
    interval, so k may be large compared with the grid spacing. Only the
    envelope ``g`` has to be resolved.
    """
    g = np.asarray(g, dtype=float)
    r = grid.r
    if g.shape != r.shape:
        raise ValueError("envelope length does not match grid length")
    d = 0.5 * np.diff(r)
    mid = 0.5 * (r[1:] + r[:-1])
    gbar = 0.5 * (g[1:] + g[:-1])
    slope = np.diff(g) / (2.0 * d)
    theta = k * mid + phase
    z = k * d
    even = gbar * np.sin(theta) * 2.0 * d * _sinc(z)
    odd = slope * np.cos(theta) * 2.0 * d**2 * _odd_kernel(z)
    return float(np.sum(even + odd))


@dataclass(frozen=True, eq=False)
class RadialWave:
    """Reduced radial amplitude u(R) = R * Phi(R) sampled on a grid.

    ``norm`` is ``"unit"`` for bound states (integral of u^2 dR = 1) or
    ``"per_sqrt_energy"`` for energy-normalized continuum states.
    """

    grid: RadialGrid
    u: np.ndarray
    norm: str = UNIT

    def __post_init__(self):
        u = np.asarray(self.u)
        if np.iscomplexobj(u):
            raise TypeError("radial amplitudes must be real")
        u = u.astype(float)
        if u.shape != self.grid.r.shape:
            raise ValueError("amplitude length does not match grid length")
        if self.norm not in (UNIT, PER_SQRT_ENERGY):
            raise ValueError(f"unknown normalization convention {self.norm!r}")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def r(self):
        return self.grid.r

    def norm2(self):
        return integrate(self.grid, self.u**2)

    def __call__(self, r):
        """Cubic interpolation in ln R; zero outside the grid."""
        from scipy.interpolate import CubicSpline

        r = np.asarray(r, dtype=float)
        spline = CubicSpline(np.log(self.grid.r), self.u)
        out = np.zeros_like(r)
        inside = (r >= self.grid.r_min) & (r <= self.grid.r_max)
        out[inside] = spline(np.log(r[inside]))
        return out


def normalize(w):
    """Scale a wave to unit norm; the shape and sign are preserved."""
    n2 = w.norm2()
    if not n2 > 0.0:
        raise ValueError("cannot normalize a wave with zero norm")
    return replace(w, u=w.u / np.sqrt(n2), norm=UNIT)


def count_nodes(u, rel_floor=1e-9):
    """Sign changes of u, ignoring samples below rel_floor * max|u|."""
    u = np.asarray(u, dtype=float)
    keep = np.abs(u) > rel_floor * np.max(np.abs(u))
    s = np.sign(u[keep])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def peak_radius(w):
    """Radius of max |u|^2, refined by a parabola through the top three samples."""
    p = w.u**2
    i = int(np.argmax(p))
    if i == 0 or i == p.size - 1:
        return float(w.r[i])
    if w.grid.kind == "log":
        x = np.log(w.r[i - 1 : i + 2])
    else:
        x = w.r[i - 1 : i + 2]
    y = p[i - 1 : i + 2]
    denom = (x[0] - x[1]) * (x[0] - x[2]) * (x[1] - x[2])
    a = (x[2] * (y[1] - y[0]) + x[1] * (y[0] - y[2]) + x[0] * (y[2] - y[1])) / denom
    b = (x[2] ** 2 * (y[0] - y[1]) + x[1] ** 2 * (y[2] - y[0]) + x[0] ** 2 * (y[1] - y[2])) / denom
    xv = -b / (2.0 * a) if a < 0 else x[1]
    return float(np.exp(xv)) if w.grid.kind == "log" else float(xv)
