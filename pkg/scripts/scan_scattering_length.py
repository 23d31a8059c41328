"""Trap energy and FC integral of one (v, n_t) pair against the scattering length.

Prints a whitespace table (a_sc in nm, energy/h in kHz, eta for each photon
factor) that plots directly with gnuplot or numpy.loadtxt.

    python3 scripts/scan_scattering_length.py --v 35 --omega-khz 10
"""

import argparse
from dataclasses import dataclass

import numpy as np

from pa_spectra import pipeline, units
from pa_spectra.config import parse_config
from pa_spectra.coupling import FACTORS, LaserSpec, scan_scattering_length


@dataclass(frozen=True)
class ScanConfig:
    v: int = 35
    n_t: int = 0
    omega_khz: float = 10.0
    a_min_nm: float = -6.0
    a_max_nm: float = 6.0
    steps: int = 25


def run(cfg):
    base = parse_config(f"trap.omega_khz = {cfg.omega_khz!r}\n")
    level = pipeline.vib_levels(base, pipeline.calibrated_model(base), cfg.v, cfg.v)[0]
    spec = pipeline.trap_spec(base, cfg.omega_khz).with_a_sc(0.0)
    a_nm = np.linspace(cfg.a_min_nm, cfg.a_max_nm, cfg.steps)
    a_au = [units.length_from_nm(a) for a in a_nm]
    cols = {f: scan_scattering_length(level, cfg.n_t, spec, a_au, LaserSpec.from_lab(factor=f)) for f in FACTORS}
    rows = []
    for i, a in enumerate(a_nm):
        first = cols[FACTORS[0]][i]
        energy = units.energy_to_khz(first.energy) if first.ok else float("nan")
        rows.append((a, energy, *[cols[f][i].fc if cols[f][i].ok else float("nan") for f in FACTORS]))
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--v", type=int, default=ScanConfig.v)
    p.add_argument("--n-t", type=int, default=ScanConfig.n_t)
    p.add_argument("--omega-khz", type=float, default=ScanConfig.omega_khz)
    p.add_argument("--a-min", type=float, default=ScanConfig.a_min_nm)
    p.add_argument("--a-max", type=float, default=ScanConfig.a_max_nm)
    p.add_argument("--steps", type=int, default=ScanConfig.steps)
    a = p.parse_args()
    cfg = ScanConfig(a.v, a.n_t, a.omega_khz, a.a_min, a.a_max, a.steps)
    print("# a_sc[nm] energy_over_h[kHz] " + " ".join(f"eta_{f}[1]" for f in FACTORS))
    for row in run(cfg):
        print(" ".join(f"{x:.8g}" for x in row))


if __name__ == "__main__":
    main()
