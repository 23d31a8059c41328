"""How much the calibrated levels and FC factors depend on the starting wall.

The inner wall is re-calibrated to the same anchor level from several
starting radii; since each start can lock onto a different node of the
anchor wave, the resulting walls differ by whole half-wavelengths. The
table shows what that freedom does to energies and |eta|^2.

    python3 scripts/wall_sensitivity.py
"""

import argparse
from dataclasses import dataclass, replace

from pa_spectra import pipeline, units
from pa_spectra.config import parse_config
from pa_spectra.coupling import fc_bound_bound


@dataclass(frozen=True)
class WallConfig:
    walls_nm: tuple = (10.0, 12.0, 14.0, 16.0)
    omega_khz: float = 100.0
    v_min: int = 33
    v_max: int = 36
    factor: str = "cos_half"


def run(cfg):
    base = parse_config(f"trap.omega_khz = {cfg.omega_khz!r}\nlaser.factor = {cfg.factor}\n")
    _, traps = pipeline.trap_states(base, cfg.omega_khz)
    las = pipeline.laser(base)
    out = []
    for wall in cfg.walls_nm:
        run_cfg = replace(base, wall_nm=wall)
        model = pipeline.calibrated_model(run_cfg)
        for lv in pipeline.vib_levels(run_cfg, model, cfg.v_min, cfg.v_max):
            fc2 = [fc_bound_bound(lv.wave, t.wave, las) ** 2 for t in traps]
            out.append(
                (wall, units.length_to_nm(model.boundary.r_in), lv.v_label, units.energy_to_khz(lv.binding_energy), *fc2)
            )
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--walls", type=float, nargs="+", default=list(WallConfig.walls_nm), help="starting walls in nm")
    p.add_argument("--factor", default=WallConfig.factor)
    a = p.parse_args()
    cfg = WallConfig(walls_nm=tuple(a.walls), factor=a.factor)
    print("# start_wall[nm] calibrated_wall[nm] v[1] binding_energy_over_h[kHz] eta2_nt0 eta2_nt1 eta2_nt2")
    for row in run(cfg):
        print(" ".join(f"{x:.6g}" for x in row))


if __name__ == "__main__":
    main()
