"""Builds the physical objects a run needs from a :class:`RunConfig`.

Shared by the command line, the experiment scripts and the acceptance suite
so all three see exactly the same calibrated model.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor

from . import units
from .coupling import LaserSpec
from .longrange import (
    GridPolicy,
    PotentialModel,
    TabulatedPotential,
    calibrate_boundary,
    default_c3_khz_nm3,
    solve_levels,
)
from .scattering import maxwell_nodes
from .trap import TrapSpec, default_trap_grid, trap_levels

THREADS_ENV = "PA_SPECTRA_THREADS"


def worker_count():
    """Workers from PA_SPECTRA_THREADS, else the available parallelism."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        try:
            return max(1, len(os.sched_getaffinity(0)))
        except AttributeError:
            return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def ordered_map(fn, items, workers=None):
    """``map`` over a thread pool; results keep the input order."""
    items = list(items)
    workers = workers or worker_count()
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def grid_policy(cfg):
    return GridPolicy(points_per_wavelength=cfg.points_per_wavelength, tail=cfg.tail)


def trap_spec(cfg, omega_khz):
    return TrapSpec.from_lab(omega_khz, cfg.a_sc_nm_value(), cfg.mass_u)


def trap_states(cfg, omega_khz, n_max=None):
    spec = trap_spec(cfg, omega_khz)
    n_max = cfg.n_max if n_max is None else n_max
    return spec, trap_levels(spec, n_max, grid=default_trap_grid(spec, cfg.trap_points))


def laser(cfg, factor=None):
    return LaserSpec.from_lab(
        cfg.wavelength_nm,
        factor or cfg.factor,
        cfg.omega_a_thz,
        cfg.d0_au,
        cfg.orientation,
    )


def potential_model(cfg):
    """The uncalibrated model: c3 tail (or table) with the configured wall."""
    kw = {"top_label": cfg.top_label}
    if cfg.potential_table is not None:
        table = TabulatedPotential.load(cfg.resolve(cfg.potential_table))
        return PotentialModel.from_table(table, cfg.wall_nm, cfg.mass_u, **kw)
    c3 = cfg.c3_khz_nm3 if cfg.c3_khz_nm3 is not None else default_c3_khz_nm3()
    return PotentialModel.from_lab(c3, cfg.wall_nm, cfg.mass_u, **kw)


def calibrated_model(cfg, policy=None):
    """Model with the inner boundary fitted to the anchor level (if enabled)."""
    model = potential_model(cfg)
    if not cfg.calibrate:
        return model
    target = (cfg.anchor_v, units.energy_from_khz(cfg.anchor_khz))
    return model.with_boundary(calibrate_boundary(model, target, policy or grid_policy(cfg)))


def vib_levels(cfg, model, v_min=None, v_max=None, policy=None):
    """Levels v_min..v_max from the configured binding window; every label
    in the range must be present."""
    v_min = cfg.v_min if v_min is None else v_min
    v_max = cfg.v_max if v_max is None else v_max
    if v_min > v_max:
        raise ValueError(f"empty v range {v_min}..{v_max}")
    window = (units.energy_from_khz(cfg.eps_min_khz), units.energy_from_khz(cfg.eps_max_khz))
    found = {lv.v_label: lv for lv in solve_levels(model, window, policy or grid_policy(cfg))}
    missing = [v for v in range(v_min, v_max + 1) if v not in found]
    if missing:
        raise ValueError(
            f"levels v = {missing} are outside the binding window "
            f"[{cfg.eps_min_khz:g}, {cfg.eps_max_khz:g}] kHz (found {sorted(found)})"
        )
    return [found[v] for v in range(v_min, v_max + 1)]


def pair_temperature(cfg, trap_level, ground_level):
    """Collision temperature as an energy (a.u.) paired with a trap level."""
    return (ground_level if cfg.pairing == "ground" else trap_level).energy


def thermal_ensemble(cfg, kt):
    return maxwell_nodes(kt, cfg.thermal_nodes)


def khz_from_rate(rate):
    """gamma / 2 pi in kHz for a rate in a.u."""
    return units.rate_to_per_s(rate) / (2.0 * math.pi) / 1e3
