"""Trap levels, molecular levels, FC matrices and widths under every photon factor.

Writes one CSV per table into ``--out`` using the same pipeline as the
command line, so the numbers match ``pa-spectra`` for the same settings.

    python3 scripts/reproduce_tables.py --out runs/tables
"""

import argparse
from dataclasses import dataclass, replace
from pathlib import Path

from pa_spectra import cli
from pa_spectra.config import parse_config
from pa_spectra.coupling import FACTORS


@dataclass(frozen=True)
class TablesConfig:
    omega_khz: tuple = (100.0, 10.0)
    xi_s: float = 0.042
    v_min: int = 33
    v_max: int = 39
    factors: tuple = FACTORS

    def config_text(self):
        omegas = ", ".join(f"{w:g}" for w in self.omega_khz)
        return f"trap.omega_khz = {omegas}\npair.xi_s = {self.xi_s!r}\n"


def run(cfg, out):
    base = parse_config(cfg.config_text())
    flags = {"v_min": cfg.v_min, "v_max": cfg.v_max}
    written = []

    def emit(tables, sub, run_cfg=base):
        target = out / sub
        target.mkdir(parents=True, exist_ok=True)
        prov = cli.provenance(run_cfg, sub, flags)
        for name, table in tables.items():
            if isinstance(table, cli.ResultTable):
                (target / name).write_text(table.render(prov))
                written.append(target / name)

    emit(cli.cmd_trap_levels(base, flags), "trap")
    emit(cli.cmd_molecular_levels(base, flags), "molecule")
    for factor in cfg.factors:
        fcfg = replace(base, factor=factor)
        emit(cli.cmd_fc(fcfg, flags), f"fc_{factor}", fcfg)
        emit(cli.cmd_linewidths(fcfg, flags), f"widths_{factor}", fcfg)
    return written


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, default=Path("runs/tables"))
    p.add_argument("--xi-s", type=float, default=TablesConfig.xi_s)
    args = p.parse_args()
    for path in run(TablesConfig(xi_s=args.xi_s), args.out):
        print(path)


if __name__ == "__main__":
    main()
