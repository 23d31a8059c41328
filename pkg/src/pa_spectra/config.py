"""Run configuration: a flat ``key = value`` file with dotted section keys.

Example::

    # Na pair, two trap frequencies
    trap.omega_khz = 100, 10
    pair.xi_s = 0.042
    molecule.anchor_khz = 1460

Keys carry their unit as a suffix (``_khz``, ``_nm``, ...). A value may repeat
the unit as a trailing token (``trap.omega_khz = 100 kHz``); a token that
disagrees with the suffix is an error. Every error names the line number.
"""

import hashlib
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import units
from .coupling import FACTORS, NA_D0_AU, NA_D2_THZ
from .longrange import DEFAULT_TOP_LABEL, DEFAULT_WALL_NM

DEFAULT_XI_S = 0.042
DEFAULT_XI_REF_KHZ = 100.0

# suffix -> accepted spellings of the unit token after a value
_UNIT_TOKENS = {
    "_khz": ("khz",),
    "_thz": ("thz",),
    "_nm": ("nm",),
    "_u": ("u", "amu"),
    "_au": ("au", "a.u."),
    "_khz_nm3": ("khz*nm^3", "khz.nm3", "khz_nm3"),
    "_v_per_cm": ("v/cm",),
}


class ConfigError(ValueError):
    """Invalid configuration; ``lineno`` is the offending line (or None)."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


def _positive(x):
    return x > 0


def _nonneg(x):
    return x >= 0


# config-file key -> (RunConfig field, type, check)
_SCHEMA = {
    "species.mass_u": ("mass_u", float, _positive),
    "trap.omega_khz": ("omega_khz", list, _positive),
    "trap.n_max": ("n_max", int, _nonneg),
    "trap.points": ("trap_points", int, lambda n: n >= 101),
    "pair.a_sc_nm": ("a_sc_nm", float, None),
    "pair.xi_s": ("xi_s", float, None),
    "pair.xi_ref_khz": ("xi_ref_khz", float, _positive),
    "molecule.c3_khz_nm3": ("c3_khz_nm3", float, _positive),
    "molecule.potential_table": ("potential_table", str, None),
    "molecule.wall_nm": ("wall_nm", float, _positive),
    "molecule.anchor_v": ("anchor_v", int, None),
    "molecule.anchor_khz": ("anchor_khz", float, _positive),
    "molecule.calibrate": ("calibrate", bool, None),
    "molecule.top_label": ("top_label", int, None),
    "molecule.eps_min_khz": ("eps_min_khz", float, _positive),
    "molecule.eps_max_khz": ("eps_max_khz", float, _positive),
    "molecule.v_min": ("v_min", int, None),
    "molecule.v_max": ("v_max", int, None),
    "laser.wavelength_nm": ("wavelength_nm", float, _positive),
    "laser.factor": ("factor", str, lambda s: s in FACTORS),
    "laser.omega_a_thz": ("omega_a_thz", float, _positive),
    "laser.d0_au": ("d0_au", float, None),
    "laser.orientation": ("orientation", float, None),
    "laser.field_v_per_cm": ("field_v_per_cm", float, _nonneg),
    "widths.gamma_bb_khz": ("gamma_bb_khz", float, _nonneg),
    "thermal.pairing": ("pairing", str, lambda s: s in ("n_t", "ground")),
    "thermal.nodes": ("thermal_nodes", int, lambda n: n >= 8),
    "grid.points_per_wavelength": ("points_per_wavelength", float, lambda x: x >= 40),
    "grid.tail": ("tail", float, lambda x: 0 < x < 1e-3),
    "scan.omega_khz": ("scan_omega_khz", float, _positive),
    "scan.v": ("scan_v", int, None),
    "scan.n_t": ("scan_n_t", int, _nonneg),
    "scan.a_min_nm": ("scan_a_min_nm", float, None),
    "scan.a_max_nm": ("scan_a_max_nm", float, None),
    "scan.a_steps": ("scan_a_steps", int, lambda n: n >= 2),
    "output.dir": ("output_dir", str, None),
}
_REQUIRED = ("trap.omega_khz",)


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration in laboratory units.

    ``source`` maps each key given in the file to its line number and
    ``base_dir`` resolves relative paths (the potential table, output.dir).
    """

    omega_khz: tuple
    mass_u: float = units.NA23_MASS_U
    n_max: int = 2
    trap_points: int = 6001
    a_sc_nm: float | None = None
    xi_s: float | None = DEFAULT_XI_S
    xi_ref_khz: float = DEFAULT_XI_REF_KHZ
    c3_khz_nm3: float | None = None
    potential_table: str | None = None
    wall_nm: float = DEFAULT_WALL_NM
    anchor_v: int = 33
    anchor_khz: float = 1460.0
    calibrate: bool = True
    top_label: int = DEFAULT_TOP_LABEL
    eps_min_khz: float = 1e-4
    eps_max_khz: float = 2000.0
    v_min: int = 33
    v_max: int = 39
    wavelength_nm: float | None = None
    factor: str = "cos_half"
    omega_a_thz: float = NA_D2_THZ
    d0_au: float = NA_D0_AU
    orientation: float = 1.0
    field_v_per_cm: float = 1.0
    gamma_bb_khz: float = 0.0
    pairing: str = "n_t"
    thermal_nodes: int = 64
    points_per_wavelength: float = 1000.0
    tail: float = 1e-10
    scan_omega_khz: float = 10.0
    scan_v: int = 35
    scan_n_t: int = 0
    scan_a_min_nm: float = -6.0
    scan_a_max_nm: float = 6.0
    scan_a_steps: int = 49
    output_dir: str = "out"
    base_dir: str = "."
    source: dict = field(default_factory=dict, compare=False)

    def echo(self):
        """Resolved settings as ``name = value`` lines, enough to re-run the
        computation. The output location is left out so it cannot change
        the provenance hash."""
        skip = {"source", "base_dir", "output_dir"}
        return [f"{f.name} = {_fmt(getattr(self, f.name))}" for f in fields(self) if f.name not in skip]

    def digest(self):
        return hashlib.sha256("\n".join(self.echo()).encode()).hexdigest()[:16]

    def resolve(self, path):
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def a_sc_nm_value(self):
        """Scattering length in nm; xi_s is referred to the trap at xi_ref_khz."""
        if self.a_sc_nm is not None:
            return self.a_sc_nm
        from .trap import TrapSpec

        return units.length_to_nm(TrapSpec.from_xi(self.xi_ref_khz, self.xi_s, self.mass_u).a_sc)


def _fmt(x):
    if isinstance(x, tuple):
        return ", ".join(_fmt(y) for y in x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _unit_suffix(key):
    for suffix in sorted(_UNIT_TOKENS, key=len, reverse=True):
        if key.endswith(suffix):
            return suffix
    return None


def _strip_unit(key, text, lineno):
    """Split an optional trailing unit token off a numeric value."""
    parts = text.rsplit(None, 1)
    if len(parts) != 2:
        return text
    head, token = parts
    try:
        float(token.rstrip(","))
        return text
    except ValueError:
        pass
    suffix = _unit_suffix(key)
    if suffix is None:
        raise ConfigError(f"key {key!r} takes a plain number, got unit {token!r}", lineno)
    if token.lower() not in _UNIT_TOKENS[suffix]:
        raise ConfigError(f"unit {token!r} does not match key suffix {suffix!r} of {key!r}", lineno)
    return head


def _convert(key, kind, text, lineno):
    try:
        if kind is str:
            if not text:
                raise ValueError("empty value")
            return text
        if kind is bool:
            low = text.lower()
            if low in ("true", "yes", "1"):
                return True
            if low in ("false", "no", "0"):
                return False
            raise ValueError(f"not a boolean: {text!r}")
        text = _strip_unit(key, text, lineno)
        if kind is list:
            return tuple(float(t) for t in text.split(",") if t.strip())
        if kind is int:
            return int(text)
        return float(text)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {exc}", lineno) from None


def parse_config(text, base_dir="."):
    """Parse configuration text; see :func:`load_config`."""
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first on line {lines[key]})", lineno)
        _, kind, check = _SCHEMA[key]
        val = _convert(key, kind, value, lineno)
        items = val if kind is list else (val,)
        if kind is list and not items:
            raise ConfigError(f"{key!r} needs at least one value", lineno)
        if check is not None and not all(check(x) for x in items):
            raise ConfigError(f"value {value!r} out of range for {key!r}", lineno)
        values[key] = val
        lines[key] = lineno

    for key in _REQUIRED:
        if key not in values:
            raise ConfigError(f"missing mandatory key {key!r}")
    for a, b in (("pair.a_sc_nm", "pair.xi_s"), ("molecule.c3_khz_nm3", "molecule.potential_table")):
        if a in values and b in values:
            raise ConfigError(f"give only one of {a!r} and {b!r}", max(lines[a], lines[b]))
    kw = {_SCHEMA[k][0]: v for k, v in values.items()}
    if "pair.a_sc_nm" in values:
        kw["xi_s"] = None
    cfg = RunConfig(base_dir=str(base_dir), source=lines, **kw)
    for lo, hi in (("molecule.eps_min_khz", "molecule.eps_max_khz"), ("scan.a_min_nm", "scan.a_max_nm")):
        if not getattr(cfg, _SCHEMA[lo][0]) < getattr(cfg, _SCHEMA[hi][0]):
            raise ConfigError(f"{lo!r} must be below {hi!r}", lines.get(lo, lines.get(hi)))
    return cfg


def load_config(path):
    """Read and validate a configuration file.

    Raises
    ------
    ConfigError
        Unknown, duplicate or missing keys, unit mismatches and
        out-of-range values, each tagged with its line number.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    return parse_config(text, base_dir=path.parent)
