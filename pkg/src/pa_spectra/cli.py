"""``pa-spectra`` command line: one subcommand per exhibit, CSV output.

Every CSV starts with a '#'-prefixed provenance block (config hash, package
and library versions, the resolved configuration and flags). There are no
timestamps, so the same config and flags give byte-identical files.
On failure the tool prints one line, ``pa-spectra: error[<category>]: ...``,
to stderr and exits nonzero.
"""

import argparse
import math
import platform
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numba
import numpy as np
import scipy

from . import __version__, units
from .config import ConfigError, load_config
from .coupling import (
    FACTORS,
    fc_bound_bound,
    rabi_frequency,
    scan_scattering_length,
    spont_width_bound,
    spont_width_free,
)
from .longrange import leroy_bernstein_fit
from .pipeline import (
    calibrated_model,
    grid_policy,
    khz_from_rate,
    laser,
    ordered_map,
    pair_temperature,
    thermal_ensemble,
    trap_spec,
    trap_states,
    vib_levels,
)
from .trap import trap_energy_perturbative, trap_nodes

PROG = "pa-spectra"
# exit status per error category
EXIT_CODES = {"usage": 2, "config": 3, "input": 4, "numerics": 5, "io": 6}


@dataclass
class ResultTable:
    """Columns as (name, unit) pairs; rows are tuples of numbers or strings."""

    columns: list
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def header(self):
        return ",".join(f"{name} [{unit}]" for name, unit in self.columns)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values for {len(self.columns)} columns")
        self.rows.append(values)

    def render(self, provenance):
        lines = [f"# {p}" for p in provenance]
        lines += [f"# {n}" for n in self.notes]
        lines.append(self.header())
        lines += [",".join(_cell(v) for v in row) for row in self.rows]
        return "\n".join(lines) + "\n"


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.10g}"
    text = str(v)
    if "," in text or "\n" in text:
        raise ValueError(f"cell text may not contain commas or newlines: {text!r}")
    return text


def provenance(cfg, command, flags):
    out = [
        f"{PROG} {__version__} {command}",
        f"config_sha256_16 = {cfg.digest()}",
        f"versions: python {platform.python_version()}, numpy {np.__version__}, "
        f"scipy {scipy.__version__}, numba {numba.__version__}",
        "flags: " + (" ".join(f"{k}={v}" for k, v in sorted(flags.items()) if v is not None) or "none"),
    ]
    out += [f"config: {line}" for line in cfg.echo()]
    return out


def write_plot_data(path, x_label, y_label, pairs, prov):
    lines = [f"# {p}" for p in prov]
    lines.append(f"# {x_label} {y_label}")
    lines += [f"{x:.10g} {y:.10g}" for x, y in pairs]
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------- commands


def cmd_trap_levels(cfg, flags):
    table = ResultTable(
        [
            ("omega_t_over_2pi", "kHz"),
            ("xi_s", "1"),
            ("n_t", "1"),
            ("x", "hbar omega_t"),
            ("energy_over_hbar", "Mrad/s"),
            ("energy_over_h", "MHz"),
            ("energy_perturbative_over_hbar", "Mrad/s"),
            ("r_t", "nm"),
            ("nodes", "1"),
        ]
    )
    for omega_khz in cfg.omega_khz:
        spec, levels = trap_states(cfg, omega_khz)
        for lv in levels:
            table.add(
                omega_khz,
                spec.xi_s,
                lv.n_t,
                lv.x,
                units.energy_to_mrad_s(lv.energy),
                units.energy_to_mhz(lv.energy),
                units.energy_to_mrad_s(trap_energy_perturbative(lv.n_t, spec)),
                units.length_to_nm(lv.turning_point),
                trap_nodes(lv),
            )
    table.notes.append(f"a_sc = {cfg.a_sc_nm_value():.10g} nm")
    return {"trap_levels.csv": table}


def _molecule(cfg, flags):
    policy = grid_policy(cfg)
    model = calibrated_model(cfg, policy)
    levels = vib_levels(cfg, model, flags.get("v_min"), flags.get("v_max"), policy)
    return model, levels


def _model_notes(model):
    notes = [f"c3_over_h = {units.energy_to_khz(model.c3) * units.length_to_nm(1.0) ** 3:.10g} kHz nm^3"]
    b = model.boundary
    if b.is_wall:
        notes.append(f"inner_wall = {units.length_to_nm(b.r_in):.10g} nm")
    else:
        notes.append(f"inner_boundary = r {units.length_to_nm(b.r_in):.10g} nm, (u0, du0) = ({b.u0:.10g}, {b.du0:.10g})")
    return notes


def cmd_molecular_levels(cfg, flags):
    model, levels = _molecule(cfg, flags)
    table = ResultTable(
        [
            ("v", "1"),
            ("binding_energy_over_h", "kHz"),
            ("r_t", "nm"),
            ("r_max", "nm"),
            ("r_max_over_r_t", "1"),
            ("nodes", "1"),
        ]
    )
    table.notes += _model_notes(model)
    for lv in levels:
        table.add(
            lv.v_label,
            units.energy_to_khz(lv.binding_energy),
            units.length_to_nm(lv.r_t),
            units.length_to_nm(lv.r_max),
            lv.r_max / lv.r_t,
            lv.nodes,
        )
    out = {"molecular_levels.csv": table}
    if len(levels) >= 3:
        v_d, h, resid = leroy_bernstein_fit([(lv.v_label, units.energy_to_khz(lv.binding_energy)) for lv in levels])
        fit = ResultTable([("v_D", "1"), ("H", "kHz^(1/6)"), ("max_rel_residual", "1")])
        fit.add(v_d, h, float(np.max(np.abs(resid))))
        out["leroy_bernstein.csv"] = fit
    return out


def cmd_fc(cfg, flags):
    model, levels = _molecule(cfg, flags)
    las = laser(cfg, flags.get("factor"))
    field_au = units.field_from_v_per_cm(cfg.field_v_per_cm)
    long = ResultTable(
        [
            ("omega_t_over_2pi", "kHz"),
            ("v", "1"),
            ("n_t", "1"),
            ("eta", "1"),
            ("eta_squared", "1"),
            ("rabi_over_2pi", "kHz"),
        ]
    )
    long.notes += _model_notes(model)
    long.notes.append(f"photon_factor = {las.factor}; field = {cfg.field_v_per_cm:g} V/cm")
    out = {"fc.csv": long}
    for omega_khz in cfg.omega_khz:
        _, traps = trap_states(cfg, omega_khz, flags.get("nt_max"))
        pairs = [(lv, t) for lv in levels for t in traps]
        etas = ordered_map(lambda p: fc_bound_bound(p[0].wave, p[1].wave, las), pairs)
        matrix = ResultTable([("v", "1")] + [(f"eta_squared_nt{t.n_t}", "1") for t in traps])
        matrix.notes.append(f"omega_t_over_2pi = {omega_khz:g} kHz; photon_factor = {las.factor}")
        for i, lv in enumerate(levels):
            row = etas[i * len(traps) : (i + 1) * len(traps)]
            matrix.add(lv.v_label, *[e * e for e in row])
            for t, e in zip(traps, row):
                rabi = rabi_frequency(e, las, field_au)
                long.add(omega_khz, lv.v_label, t.n_t, e, e * e, units.angular_to_hz(rabi) / 1e3)
        out[f"fc_matrix_{omega_khz:g}khz.csv"] = matrix
    return out


def cmd_linewidths(cfg, flags):
    model, levels = _molecule(cfg, flags)
    las = laser(cfg, flags.get("factor"))
    gamma_bb = units.rate_from_per_s(2.0 * math.pi * cfg.gamma_bb_khz * 1e3)
    table = ResultTable(
        [
            ("omega_t_over_2pi", "kHz"),
            ("v", "1"),
            ("n_t", "1"),
            ("temperature", "uK"),
            ("eta_bound_squared", "1"),
            ("gamma_bound_bound_over_2pi", "kHz"),
            ("gamma_free_bound_over_2pi", "kHz"),
        ]
    )
    table.notes += _model_notes(model)
    table.notes.append(f"photon_factor = {las.factor}; temperature pairing = {cfg.pairing}")
    for omega_khz in cfg.omega_khz:
        spec, traps = trap_states(cfg, omega_khz, flags.get("nt_max"))
        temps = sorted({pair_temperature(cfg, t, traps[0]) for t in traps})
        jobs = [(lv, t) for lv in levels for t in traps] + [(lv, kt) for lv in levels for kt in temps]
        n_bb = len(levels) * len(traps)

        def run(job, n_bb=n_bb, spec=spec):
            lv, x = job
            if not isinstance(x, float):
                return spont_width_bound(lv, x, las, gamma_bb)
            return spont_width_free(lv, thermal_ensemble(cfg, x), spec.a_sc, las, spec.mu, gamma_bb)

        results = ordered_map(run, jobs)
        free = {(job[0].v_label, job[1]): r for job, r in zip(jobs[n_bb:], results[n_bb:])}
        for (lv, t), bb in zip(jobs[:n_bb], results[:n_bb]):
            kt = pair_temperature(cfg, t, traps[0])
            table.add(
                omega_khz,
                lv.v_label,
                t.n_t,
                units.energy_to_temperature(kt) * 1e6,
                bb.fc2,
                khz_from_rate(bb.rate),
                khz_from_rate(free[(lv.v_label, kt)].rate),
            )
    return {"linewidths.csv": table}


def cmd_scan(cfg, flags):
    """The scanned level is scan.v; the --v-min/--v-max flags do not apply."""
    model, levels = _molecule(cfg, {"v_min": cfg.scan_v, "v_max": cfg.scan_v})
    lv = levels[0]
    las = laser(cfg, flags.get("factor"))
    a_min = flags.get("a_min", cfg.scan_a_min_nm)
    a_max = flags.get("a_max", cfg.scan_a_max_nm)
    steps = flags.get("a_steps", cfg.scan_a_steps)
    if not a_max > a_min or steps < 2:
        raise ConfigError(f"scan range needs a_min < a_max and >= 2 steps, got [{a_min}, {a_max}] x {steps}")
    a_nm = np.linspace(a_min, a_max, steps)
    spec = trap_spec(cfg, cfg.scan_omega_khz)
    chunks = ordered_map(
        lambda a: scan_scattering_length(lv, cfg.scan_n_t, spec, [units.length_from_nm(a)], las)[0], a_nm
    )
    table = ResultTable(
        [
            ("a_sc", "nm"),
            ("xi_s", "1"),
            ("energy_over_h", "kHz"),
            ("eta", "1"),
            ("status", "text"),
        ]
    )
    table.notes += _model_notes(model)
    table.notes.append(
        f"v = {lv.v_label}; n_t = {cfg.scan_n_t}; omega_t_over_2pi = {cfg.scan_omega_khz:g} kHz; "
        f"photon_factor = {las.factor}"
    )
    for a, row in zip(a_nm, chunks):
        energy = None if row.energy is None else units.energy_to_khz(row.energy)
        status = "ok" if row.ok else "flagged: " + row.error.replace(",", ";")
        table.add(float(a), units.length_from_nm(float(a)) / spec.a_t, energy, row.fc, status)
    ok = [(a, r) for a, r in zip(a_nm, chunks) if r.ok]
    plots = {
        "scan_energy.dat": ("a_sc[nm]", "energy_over_h[kHz]", [(a, units.energy_to_khz(r.energy)) for a, r in ok]),
        "scan_eta.dat": ("a_sc[nm]", "eta[1]", [(a, r.fc) for a, r in ok]),
    }
    return {"scan.csv": table, **plots}


COMMANDS = {
    "trap-levels": cmd_trap_levels,
    "molecular-levels": cmd_molecular_levels,
    "fc": cmd_fc,
    "linewidths": cmd_linewidths,
    "scan": cmd_scan,
}


# ---------------------------------------------------------------- plumbing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser():
    p = _Parser(prog=PROG, description="Photoassociation spectra of trapped atom pairs.")
    p.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="key = value configuration file")
        s.add_argument("--out", help="output directory (default: output.dir from the config)")
        s.add_argument("--v-min", type=int, dest="v_min")
        s.add_argument("--v-max", type=int, dest="v_max")
        s.add_argument("--nt-max", type=int, dest="nt_max")
        s.add_argument("--a-min", type=float, dest="a_min", help="nm")
        s.add_argument("--a-max", type=float, dest="a_max", help="nm")
        s.add_argument("--a-steps", type=int, dest="a_steps")
        s.add_argument("--factor", choices=FACTORS)
    return p


def _category(exc):
    if isinstance(exc, _UsageError):
        return "usage"
    if isinstance(exc, ConfigError):
        return "config"
    if isinstance(exc, OSError):
        return "io"
    if isinstance(exc, (RuntimeError, ArithmeticError)):
        return "numerics"
    return "input"


def run(argv=None):
    """Parse ``argv``, run one subcommand and return the written paths."""
    args = build_parser().parse_args(argv)
    cfg = load_config(args.config)
    flags = {k: getattr(args, k) for k in ("v_min", "v_max", "nt_max", "a_min", "a_max", "a_steps", "factor")}
    if flags["nt_max"] is not None:
        if flags["nt_max"] < 0:
            raise ConfigError("--nt-max must be >= 0")
        cfg = replace(cfg, n_max=flags["nt_max"])
    out_dir = Path(args.out) if args.out else cfg.resolve(cfg.output_dir)
    results = COMMANDS[args.command](cfg, {k: v for k, v in flags.items() if v is not None})
    prov = provenance(cfg, args.command, flags)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, item in results.items():
        path = out_dir / name
        if isinstance(item, ResultTable):
            path.write_text(item.render(prov))
        else:
            write_plot_data(path, *item, prov)
        written.append(path)
    return written


def main(argv=None):
    try:
        for path in run(argv):
            print(path)
    except SystemExit:
        raise
    except Exception as exc:  # one machine-parsable line per failure
        cat = _category(exc)
        msg = " ".join(str(exc).split()) or type(exc).__name__
        print(f"{PROG}: error[{cat}]: {msg}", file=sys.stderr)
        return EXIT_CODES[cat]
    return 0


if __name__ == "__main__":
    sys.exit(main())
