"""Near-dissociation vibrational levels of a -C3/R^3 excited-state potential.

Levels are found with a direct radial eigensolver: Numerov on a grid uniform
in x = ln R, applied to phi = u / sqrt(R), which obeys

    phi'' = [2 mu R^2 (V(R) - E) + 1/4] phi.

Sturm node counting brackets every level in a window, and a normalized
Casoratian (discrete Wronskian) of the outward and inward solutions at the
outer turning point refines it. The short-range physics enters only through
the inner boundary (a hard wall or a fixed log-derivative), whose single
parameter is calibrated against one measured level.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import _numerov, units
from .radial import RadialGrid, RadialWave, count_nodes, normalize, peak_radius

DEFAULT_WALL_NM = 10.0
DEFAULT_TOP_LABEL = 39

# Na2 0g- near-threshold levels: v, E_v/h (kHz), R_t (nm), R_max (nm)
NA2_0G_LEVELS = (
    (33, 1460.0, 162.3, 139.3),
    (34, 550.0, 224.8, 190.2),
    (35, 170.0, 332.3, 275.4),
    (36, 39.5, 540.3, 431.5),
    (37, 5.7, 1000.0, 794.0),
    (38, 0.3017, 2700.0, 1900.0),
    (39, 0.0003, 28200.0, 14200.0),
)


@dataclass(frozen=True)
class InnerBoundary:
    """Boundary condition (u, du/dR) proportional to (u0, du0) at r_in."""

    r_in: float
    u0: float = 0.0
    du0: float = 1.0

    def __post_init__(self):
        if not self.r_in > 0.0:
            raise ValueError("inner radius must be positive")
        if self.u0 == 0.0 and self.du0 == 0.0:
            raise ValueError("boundary direction (u0, du0) cannot be zero")

    @classmethod
    def wall(cls, r_in):
        return cls(r_in, 0.0, 1.0)

    @classmethod
    def log_derivative(cls, r_in, value):
        return cls(r_in, 1.0, value)

    @property
    def is_wall(self):
        return self.u0 == 0.0


@dataclass(frozen=True, eq=False)
class TabulatedPotential:
    """Short-range points (a.u.); joined to -c3/R^3 beyond the last row."""

    r: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 4:
            raise ValueError("a tabulated potential needs >= 4 (R, V) rows")
        if np.any(np.diff(r) <= 0.0):
            raise ValueError("tabulated R values must be strictly increasing")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "_spline", CubicSpline(r, v))

    @classmethod
    def load(cls, path):
        """Two columns: R in nm and V/h in MHz; '#' starts a comment."""
        rows = []
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                text = line.split("#", 1)[0].strip()
                if not text:
                    continue
                parts = text.split()
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 2 columns, got {len(parts)}")
                rows.append((float(parts[0]), float(parts[1])))
        data = np.array(rows)
        return cls(units.length_from_nm(data[:, 0]), units.energy_from_mhz(data[:, 1]))

    def __call__(self, r):
        return self._spline(r)


@dataclass(frozen=True)
class PotentialModel:
    """-c3/R^3 (optionally a tabulated core) with an inner boundary, all a.u."""

    c3: float
    mu: float
    boundary: InnerBoundary
    table: TabulatedPotential | None = field(default=None, compare=False)
    top_label: int = DEFAULT_TOP_LABEL

    def __post_init__(self):
        if not self.c3 > 0.0:
            raise ValueError("c3 must be positive (attractive tail)")
        if not self.mu > 0.0:
            raise ValueError("reduced mass must be positive")
        if self.table is not None:
            if self.boundary.r_in < self.table.r[0]:
                raise ValueError("inner radius lies inside the tabulated range start")
            rs = self.table.r[-1]
            tail = -self.c3 / rs**3
            if abs(self.table.v[-1] - tail) > 0.01 * abs(tail):
                raise ValueError(
                    f"tabulated potential does not join -c3/R^3 at {units.length_to_nm(rs):.4g} nm "
                    f"(jump {abs(self.table.v[-1] / tail - 1):.2%})"
                )

    @classmethod
    def from_lab(cls, c3_khz_nm3, wall_nm=DEFAULT_WALL_NM, mass_u=units.NA23_MASS_U, **kw):
        """c3/h in kHz nm^3, hard wall in nm, atomic mass in u (mu = m/2)."""
        c3 = units.energy_from_khz(c3_khz_nm3) * units.length_from_nm(1.0) ** 3
        return cls(
            c3=c3,
            mu=units.mass_from_u(mass_u) / 2.0,
            boundary=InnerBoundary.wall(units.length_from_nm(wall_nm)),
            **kw,
        )

    @classmethod
    def from_table(cls, table, wall_nm=DEFAULT_WALL_NM, mass_u=units.NA23_MASS_U, **kw):
        """Tabulated core whose -c3/R^3 tail is fixed by the last table row."""
        r_last, v_last = float(table.r[-1]), float(table.v[-1])
        if not v_last < 0.0:
            raise ValueError("the last tabulated point must be attractive (V < 0) to set c3")
        return cls(
            c3=-v_last * r_last**3,
            mu=units.mass_from_u(mass_u) / 2.0,
            boundary=InnerBoundary.wall(units.length_from_nm(wall_nm)),
            table=table,
            **kw,
        )

    def potential(self, r):
        r = np.asarray(r, dtype=float)
        out = -self.c3 / r**3
        if self.table is not None:
            inside = r <= self.table.r[-1]
            out = np.where(inside, self.table(np.minimum(r, self.table.r[-1])), out)
        return out

    def with_boundary(self, boundary):
        return replace(self, boundary=boundary)

    @property
    def threshold(self):
        return 0.0


@dataclass(frozen=True)
class HarmonicWell:
    """1/2 mu omega^2 R^2 with an inner boundary; a solver self-test model."""

    mu: float
    omega: float
    boundary: InnerBoundary
    top_label: int = 0

    def potential(self, r):
        return 0.5 * self.mu * self.omega**2 * np.asarray(r, dtype=float) ** 2

    threshold = math.inf


@dataclass(frozen=True, eq=False)
class VibLevel:
    v_label: int
    binding_energy: float
    wave: RadialWave
    nodes: int
    r_t: float
    r_max: float

    @property
    def energy(self):
        return -self.binding_energy


@dataclass(frozen=True)
class GridPolicy:
    """How solver grids are built for an energy window.

    The step in ln R resolves the largest local wavenumber with
    ``points_per_wavelength`` points; the grid runs out until the WKB decay
    of the least-bound state beyond its turning point reaches ``tail``
    (times ``tail_margin`` in the exponent).
    """

    points_per_wavelength: float = 1000.0
    tail: float = 1e-10
    tail_margin: float = 1.5
    max_points: int = 4_000_000
    min_points_per_wavelength: float = 40.0

    def __post_init__(self):
        if self.points_per_wavelength < self.min_points_per_wavelength:
            raise ValueError(
                f"grid policy needs >= {self.min_points_per_wavelength:g} points per wavelength"
            )
        if not 0.0 < self.tail < 1e-3:
            raise ValueError("tail fraction must be small and positive")

    def step(self, model, e_high, r_stop):
        r = np.geomspace(model.boundary.r_in, r_stop, 4000)
        kr = np.sqrt(2.0 * model.mu * np.maximum(e_high - model.potential(r), 0.0)) * r
        kr_max = max(float(kr.max()), 0.5)
        return 2.0 * math.pi / (kr_max * self.points_per_wavelength)

    def build(self, model, e_low, e_high):
        r_in = model.boundary.r_in
        r_t = classical_outer_turning_point(model, e_high)
        r_end = decay_radius(model, e_high, r_t, self.tail_margin * math.log(1.0 / self.tail))
        h = self.step(model, e_high, r_t)
        n = int(math.ceil(math.log(r_end / r_in) / h)) + 1
        if n > self.max_points:
            raise ValueError(f"grid policy needs {n} points (> {self.max_points})")
        return RadialGrid(r_in * np.exp(h * np.arange(n)), "log")


def classical_outer_turning_point(model, energy):
    """Largest R with V(R) = energy."""
    r_lo = model.boundary.r_in
    if model.potential(r_lo) >= energy:
        raise ValueError("energy lies below the potential at the inner radius")
    r_hi = 2.0 * r_lo
    while model.potential(r_hi) < energy:
        r_lo, r_hi = r_hi, 2.0 * r_hi
        if r_hi > 1e15:
            raise ValueError("no outer turning point: energy at or above threshold")
    return brentq(lambda r: float(model.potential(r)) - energy, r_lo, r_hi, xtol=1e-12 * r_hi, rtol=1e-15)


def decay_radius(model, energy, r_t, target):
    """R beyond r_t where the WKB decay integral of kappa reaches ``target``."""
    x = np.linspace(0.0, math.log(1e8), 40001)
    r = r_t * np.exp(x)
    kappa = np.sqrt(2.0 * model.mu * np.maximum(model.potential(r) - energy, 0.0))
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (kappa[1:] * r[1:] + kappa[:-1] * r[:-1]) * np.diff(x))))
    i = int(np.searchsorted(cum, target))
    if i >= r.size:
        raise ValueError("tail does not decay within 1e8 turning-point radii")
    return float(r[i])


class _Problem:
    """Precomputed arrays for one model on one grid."""

    def __init__(self, model, grid, tail_exponent):
        self.model = model
        self.grid = grid
        self.h = grid.step
        self.r = grid.r
        self.r2 = grid.r**2
        self.v = model.potential(grid.r)
        self.tail_exponent = tail_exponent
        self._count_cache = {}

    def F(self, energy):
        return 2.0 * self.model.mu * self.r2 * (self.v - energy) + 0.25

    def turning_index(self, energy):
        allowed = np.nonzero(self.v < energy)[0]
        if allowed.size == 0:
            raise ValueError("no classically allowed region on the grid")
        return int(allowed[-1])

    def end_index(self, energy, t):
        n = self.r.size
        kappa_r = np.sqrt(2.0 * self.model.mu * np.maximum(self.v[t:] - energy, 0.0)) * self.r[t:]
        cum = np.cumsum(kappa_r) * self.h
        i = int(np.searchsorted(cum, self.tail_exponent))
        end = min(t + i, n - 1)
        # Numerov needs h^2 F / 12 well below 1
        t_num = self.h**2 * self.F(energy)[t : end + 1] / 12.0
        bad = np.nonzero(t_num > 0.5)[0]
        if bad.size:
            end = t + int(bad[0]) - 1
        if end < t + 3:
            raise ValueError("grid ends too close to the outer turning point")
        return end

    def start_values(self, energy, T):
        b = self.model.boundary
        r0, r1 = self.r[0], self.r[1]
        if b.is_wall:
            phi0, phi1 = 0.0, 1e-12 * math.copysign(1.0, b.du0)
        else:
            phi0 = b.u0 / math.sqrt(r0)
            dphi0 = math.sqrt(r0) * b.du0 - 0.5 * b.u0 / math.sqrt(r0)
            mu = self.model.mu

            def rhs(x, y):
                rr = math.exp(x)
                f = 2.0 * mu * rr * rr * (float(self.model.potential(rr)) - energy) + 0.25
                return (y[1], f * y[0])

            sol = solve_ivp(
                rhs, (math.log(r0), math.log(r1)), (phi0, dphi0), method="DOP853", rtol=1e-13, atol=1e-300
            )
            phi1 = float(sol.y[0, -1])
        return (1.0 - T[0]) * phi0, (1.0 - T[1]) * phi1

    def setup(self, energy):
        F = self.F(energy)
        c, w = _numerov.coefficients(F, self.h)
        t = self.turning_index(energy)
        end = self.end_index(energy, t)
        y0, y1 = self.start_values(energy, 1.0 - w)
        return c, w, t, end, y0, y1

    def count(self, energy):
        if energy not in self._count_cache:
            c, _, _, end, y0, y1 = self.setup(energy)
            self._count_cache[energy] = int(_numerov.count_out(c, y0, y1, end))
        return self._count_cache[energy]

    def _pieces(self, energy, m):
        c, w, t, end, y0, y1 = self.setup(energy)
        m = min(m, end - 2)
        yo = _numerov.outward(c, y0, y1, m + 1)
        yi = _numerov.inward(c, end, m)
        return yo, yi, w, m, end

    def casoratian(self, energy, m):
        yo, yi, _, m, _ = self._pieces(energy, m)
        no = math.hypot(yo[m], yo[m + 1])
        ni = math.hypot(yi[m], yi[m + 1])
        return (yo[m] * yi[m + 1] - yo[m + 1] * yi[m]) / (no * ni)

    def wave(self, energy, m):
        yo, yi, w, m, end = self._pieces(energy, m)
        s = (yo[m] * yi[m] + yo[m + 1] * yi[m + 1]) / (yi[m] ** 2 + yi[m + 1] ** 2)
        y = np.concatenate((yo[: m + 1], s * yi[m + 1 : end + 1]))
        phi = y / w[: end + 1]
        u = np.sqrt(self.r[: end + 1]) * phi
        # outer lobe positive
        if u[m] < 0.0:
            u = -u
        grid = RadialGrid(self.r[: end + 1], "log")
        return normalize(RadialWave(grid, u))


def _midpoint(a, b):
    if a < 0.0 and b < 0.0:
        return -math.sqrt(a * b)
    return 0.5 * (a + b)


def _isolate(prob, n, e_lo, e_hi, max_iter=400):
    """Energies a < b with count(a) == n and count(b) == n + 1."""
    a, b = e_lo, e_hi
    for _ in range(max_iter):
        ca, cb = prob.count(a), prob.count(b)
        if ca == n and cb == n + 1:
            return a, b
        mid = _midpoint(a, b)
        if mid in (a, b):
            break
        if prob.count(mid) <= n:
            a = mid
        else:
            b = mid
    raise RuntimeError(f"could not isolate level {n} between energies {a!r} and {b!r}")


def _refine(prob, a, b):
    m = prob.turning_index(_midpoint(a, b))
    fa, fb = prob.casoratian(a, m), prob.casoratian(b, m)
    if fa * fb > 0.0:
        raise RuntimeError(f"matching function does not change sign between {a!r} and {b!r}")
    tol = 1e-14 * max(abs(a), abs(b))
    e = brentq(prob.casoratian, a, b, args=(m,), xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)
    return e, m


def solve_states(model, e_low, e_high, policy=None, grid=None):
    """All eigenstates with e_low < E < e_high as (energy, wave, index) tuples.

    ``index`` is the Sturm count (number of states below) on the solver grid.
    """
    if not e_low < e_high:
        raise ValueError("energy window must have e_low < e_high")
    policy = policy or GridPolicy()
    if grid is None:
        grid = policy.build(model, e_low, e_high)
    prob = _Problem(model, grid, policy.tail_margin * math.log(1.0 / policy.tail))
    n_lo, n_hi = prob.count(e_low), prob.count(e_high)
    out = []
    for n in range(n_lo, n_hi):
        a, b = _isolate(prob, n, e_low, e_high)
        e, m = _refine(prob, a, b)
        out.append((e, prob.wave(e, m), n))
    return out


def count_bound(model, policy=None):
    """Number of bound levels below threshold (zero-energy node count)."""
    policy = policy or GridPolicy()
    r_in = model.boundary.r_in
    beta3 = 2.0 * model.mu * model.c3
    r_end = max(100.0 * beta3, 1e3 * r_in)
    h = policy.step(model, 0.0, r_end)
    n = int(math.ceil(math.log(r_end / r_in) / h)) + 1
    if n > policy.max_points:
        raise ValueError(f"zero-energy count needs {n} points (> {policy.max_points})")
    grid = RadialGrid(r_in * np.exp(h * np.arange(n)), "log")
    prob = _Problem(model, grid, math.inf)
    F = prob.F(0.0)
    c, w = _numerov.coefficients(F, h)
    y0, y1 = prob.start_values(0.0, 1.0 - w)
    nodes = int(_numerov.count_out(c, y0, y1, n - 1))
    y = _numerov.outward(c, y0, y1, n - 1)[-2:]
    u = np.sqrt(grid.r[-2:]) * y / w[-2:]
    # zero-energy tail is u ~ A R + B: one more node if it still heads for zero
    du = (u[1] - u[0]) / (grid.r[-1] - grid.r[-2])
    if u[1] * du < 0.0:
        nodes += 1
    return nodes


def outer_turning_point(model, eps):
    """Outer turning point for binding energy eps (a.u.)."""
    if not eps > 0.0:
        raise ValueError("binding energy must be positive")
    if getattr(model, "table", None) is None and isinstance(model, PotentialModel):
        r = (model.c3 / eps) ** (1.0 / 3.0)
        if r > model.boundary.r_in:
            return r
        raise ValueError("turning point lies inside the inner boundary")
    return classical_outer_turning_point(model, -eps)


def r_max_probability(level):
    return peak_radius(level.wave)


def solve_levels(model, window, policy=None, n_total=None):
    """Bound levels with binding energy inside ``window = (eps_min, eps_max)``.

    Labels count down from ``model.top_label`` at the least-bound level of
    the model (found from the zero-energy node count).
    """
    eps_min, eps_max = window
    if not eps_min > 0.0:
        raise ValueError("binding window must stay strictly below threshold (eps_min > 0)")
    if not eps_max > eps_min:
        raise ValueError("binding window needs eps_max > eps_min")
    depth = -float(model.potential(model.boundary.r_in))
    if eps_max >= depth:
        raise ValueError("binding window reaches below the potential at the inner radius")
    policy = policy or GridPolicy()
    if n_total is None:
        n_total = count_bound(model, policy)
    levels = []
    for e, wave, n in solve_states(model, -eps_max, -eps_min, policy):
        levels.append(
            VibLevel(
                v_label=model.top_label - (n_total - 1 - n),
                binding_energy=-e,
                wave=wave,
                nodes=count_nodes(wave.u),
                r_t=outer_turning_point(model, -e),
                r_max=peak_radius(wave),
            )
        )
    return levels


def calibrate_c3(rows):
    """Constant c3 = mean of eps * r_t^3 and its relative (population) spread."""
    rows = list(rows)
    if len(rows) < 2:
        raise ValueError("calibrate_c3 needs at least 2 rows")
    p = np.array([e * r**3 for e, r in rows], dtype=float)
    c3 = float(p.mean())
    return c3, float(p.std() / c3)


def default_c3_khz_nm3():
    """c3/h (kHz nm^3) from the v = 33..36 Na2 0g- rows."""
    c3, _ = calibrate_c3([(e, r) for v, e, r, _ in NA2_0G_LEVELS if v <= 36])
    return c3


def _single_level(model, n, e_guess, policy):
    """Energy of the state with Sturm index n near e_guess (< 0)."""
    e_lo, e_hi = 30.0 * e_guess, e_guess / 30.0
    depth = float(model.potential(model.boundary.r_in))
    e_lo = max(e_lo, 0.5 * (depth + e_guess))
    grid = policy.build(model, e_lo, e_hi)
    prob = _Problem(model, grid, policy.tail_margin * math.log(1.0 / policy.tail))
    if not prob.count(e_lo) <= n < prob.count(e_hi):
        raise RuntimeError(f"level {n} not inside the search window around {e_guess!r}")
    a, b = _isolate(prob, n, e_lo, e_hi)
    e, _ = _refine(prob, a, b)
    return e


def _inward_at(model, energy, policy):
    grid = policy.build(model, energy, energy)
    prob = _Problem(model, grid, policy.tail_margin * math.log(1.0 / policy.tail))
    c, w, t, end, _, _ = prob.setup(energy)
    yi = _numerov.inward(c, end, 0)
    # drop the y = 0 starting point so it is not read as a node
    return grid.r[:end], yi[:end] / w[:end] * np.sqrt(grid.r[:end])


def calibrate_boundary(model, target, policy=None):
    """Inner boundary placing the level labelled target[0] at binding target[1].

    For a wall the position is located from the nodes of the decaying
    solution at the target energy and then refined by root finding on the
    solved level energy; a log-derivative boundary is calibrated the same way
    through its phase at fixed r_in. The returned boundary reproduces the
    target to better than 1e-6 relative.
    """
    v_label, eps = target
    policy = policy or GridPolicy()
    e_star = -eps
    r_min = model.boundary.r_in
    r, u = _inward_at(model, e_star, policy)
    k_loc = np.sqrt(2.0 * model.mu * np.maximum(e_star - model.potential(r), 1e-300))

    if model.boundary.is_wall:
        s = np.sign(u)
        idx = np.nonzero(s[1:] != s[:-1])[0]
        delta = 0.25 * math.pi / k_loc
        ok = [j for j in idx if r[j] - delta[j] >= r_min]
        if not ok:
            raise ValueError("target unreachable: no node of the decaying solution beyond the minimum wall")
        j = ok[0]
        r_node = r[j] - u[j] * (r[j + 1] - r[j]) / (u[j + 1] - u[j])
        n = len(idx) - idx.tolist().index(j) - 1

        def mismatch(rw):
            m = model.with_boundary(InnerBoundary.wall(rw))
            return _single_level(m, n, e_star, policy) / e_star - 1.0

        lo, hi = r_node - delta[j], r_node + delta[j]
        rw = brentq(mismatch, lo, hi, xtol=1e-12 * r_node, rtol=1e-14)
        boundary = InnerBoundary.wall(rw)
    else:
        k0 = float(k_loc[0])
        theta0 = math.atan2(u[0] * k0, (u[1] - u[0]) / (r[1] - r[0]))
        nodes_inside = np.count_nonzero(np.sign(u[1:]) != np.sign(u[:-1]))
        n = int(nodes_inside)

        def make(theta):
            return InnerBoundary(r_min, math.sin(theta), k0 * math.cos(theta))

        def mismatch(theta):
            return _single_level(model.with_boundary(make(theta)), n, e_star, policy) / e_star - 1.0

        theta = brentq(mismatch, theta0 - 0.3, theta0 + 0.3, xtol=1e-13, rtol=1e-14)
        boundary = make(theta)

    calibrated = model.with_boundary(boundary)
    label = calibrated.top_label - (count_bound(calibrated, policy) - 1 - n)
    if label != v_label:
        raise ValueError(
            f"target unreachable: the level at {units.energy_to_khz(eps):.6g} kHz is v = {label}, not {v_label}"
        )
    return boundary


def leroy_bernstein_fit(levels):
    """Fit eps_v = [H (v_D - v)]^6 through a line in eps^(1/6) against v.

    Returns (v_D, H, relative residuals of eps_v).
    """
    levels = sorted(levels)
    if len(levels) < 3:
        raise ValueError("the near-threshold fit needs at least 3 levels")
    v = np.array([lv for lv, _ in levels], dtype=float)
    e = np.array([le for _, le in levels], dtype=float)
    if np.any(e <= 0.0):
        raise ValueError("binding energies must be positive")
    if np.ptp(v) == 0.0:
        raise ValueError("degenerate fit: all levels share one v")
    slope, intercept = np.polyfit(v, e ** (1.0 / 6.0), 1)
    if slope == 0.0:
        raise ValueError("degenerate fit: zero slope")
    h = -slope
    v_d = intercept / h
    pred = (h * (v_d - v)) ** 6
    return float(v_d), float(h), (pred - e) / e
