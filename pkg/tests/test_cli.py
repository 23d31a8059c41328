import csv
import io
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pa_spectra import cli
from pa_spectra.config import ConfigError, load_config, parse_config
from pa_spectra.longrange import default_c3_khz_nm3
from pa_spectra.pipeline import THREADS_ENV, ordered_map, worker_count


def read_table(path):
    body = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


@pytest.fixture
def cfg_file(tmp_path):
    p = tmp_path / "na.cfg"
    p.write_text("# Na pair at two trap frequencies\ntrap.omega_khz = 100, 10  # kHz\npair.xi_s = 0.042\n")
    return p


# ------------------------------------------------------------------ config


def test_minimal_defaults(cfg_file):
    cfg = load_config(cfg_file)
    assert cfg.omega_khz == (100.0, 10.0)
    assert cfg.xi_s == 0.042 and cfg.a_sc_nm is None
    assert cfg.c3_khz_nm3 is None and cfg.potential_table is None
    assert cfg.a_sc_nm_value() == pytest.approx(3.938, abs=1e-3)
    assert cfg.factor == "cos_half"
    assert default_c3_khz_nm3() == pytest.approx(6.24e9, rel=0.002)


@pytest.mark.parametrize(
    "text,line,pattern",
    [
        ("trap.omega_khz = 100\ntrap.omega_hz = 5\n", 2, "unknown key"),
        ("trap.omega_khz = -5\n", 1, "out of range"),
        ("trap.omega_khz = 100 Hz\n", 1, "does not match"),
        ("trap.omega_khz = 100\npair.xi_s = 0.04\npair.a_sc_nm = 3\n", 3, "only one of"),
        ("trap.omega_khz = 100\nmolecule.c3_khz_nm3 = 6e9\nmolecule.potential_table = p.txt\n", 3, "only one of"),
        ("trap.omega_khz = 100\ntrap.omega_khz = 10\n", 2, "duplicate"),
        ("trap.omega_khz 100\n", 1, "expected"),
        ("trap.omega_khz = 100\nlaser.factor = cos_third\n", 2, "out of range"),
        ("trap.omega_khz = 100\ntrap.n_max = 1.5\n", 2, "bad value"),
        ("trap.omega_khz = 100\npair.xi_s = 0.04 nm\n", 2, "plain number"),
    ],
)
def test_config_errors_carry_line_numbers(text, line, pattern):
    with pytest.raises(ConfigError, match=pattern) as info:
        parse_config(text)
    assert info.value.lineno == line
    assert str(info.value).startswith(f"line {line}:")


def test_missing_mandatory_key():
    with pytest.raises(ConfigError, match="missing mandatory key 'trap.omega_khz'"):
        parse_config("pair.xi_s = 0.01\n")


def test_unit_token_accepted():
    cfg = parse_config("trap.omega_khz = 100 kHz\nmolecule.wall_nm = 11 nm\nspecies.mass_u = 23 u\n")
    assert cfg.omega_khz == (100.0,) and cfg.wall_nm == 11.0 and cfg.mass_u == 23.0


@given(key=st.from_regex(r"[a-z]{1,8}\.[a-z_]{1,12}", fullmatch=True))
def test_random_keys_rejected_or_known(key):
    from pa_spectra.config import _SCHEMA

    text = f"trap.omega_khz = 100\n{key} = 1\n"
    if key in _SCHEMA:
        return
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(text)


def test_digest_ignores_output_dir_and_comments():
    a = parse_config("trap.omega_khz = 100\noutput.dir = a\n")
    b = parse_config("# c\ntrap.omega_khz = 100.0   # kHz\noutput.dir = b\n")
    assert a.digest() == b.digest()
    assert a.digest() != parse_config("trap.omega_khz = 10\n").digest()


def test_thread_env(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert worker_count() == 3
    monkeypatch.setenv(THREADS_ENV, "zero")
    with pytest.raises(ValueError, match=THREADS_ENV):
        worker_count()
    monkeypatch.delenv(THREADS_ENV)
    assert worker_count() >= 1
    assert ordered_map(lambda x: x * x, range(20), workers=4) == [x * x for x in range(20)]


# --------------------------------------------------------------------- CLI


def test_trap_levels_table(cfg_file, tmp_path):
    out = tmp_path / "out"
    assert cli.main(["trap-levels", "--config", str(cfg_file), "--out", str(out)]) == 0
    text = (out / "trap_levels.csv").read_text()
    header = [ln for ln in text.splitlines() if not ln.startswith("#")][0]
    assert all("[" in col and col.endswith("]") for col in header.split(","))
    rows = read_table(out / "trap_levels.csv")
    assert len(rows) == 6
    first = rows[0]
    assert float(first["energy_over_hbar [Mrad/s]"]) == pytest.approx(0.96, rel=0.02)
    assert float(first["r_t [nm]"]) == pytest.approx(164.25, rel=0.01)
    assert "config_sha256_16" in text and "numpy" in text


def test_molecular_levels_table(cfg_file, tmp_path):
    out = tmp_path / "out"
    assert cli.main(["molecular-levels", "--config", str(cfg_file), "--out", str(out)]) == 0
    rows = read_table(out / "molecular_levels.csv")
    assert [int(r["v [1]"]) for r in rows] == list(range(33, 40))
    assert float(rows[0]["binding_energy_over_h [kHz]"]) == pytest.approx(1460.0, rel=1e-6)
    assert (out / "leroy_bernstein.csv").exists()


def test_fc_blocks_and_factor_flag(cfg_file, tmp_path):
    out = tmp_path / "out"
    argv = ["fc", "--config", str(cfg_file), "--out", str(out), "--v-min", "33", "--v-max", "36"]
    assert cli.main(argv + ["--factor", "unity"]) == 0
    for khz in (100, 10):
        rows = read_table(out / f"fc_matrix_{khz}khz.csv")
        assert len(rows) == 4 and len(rows[0]) == 4
    assert "photon_factor = unity" in (out / "fc.csv").read_text()


def test_scan_writes_plot_data(cfg_file, tmp_path):
    out = tmp_path / "out"
    argv = ["scan", "--config", str(cfg_file), "--out", str(out), "--a-min", "-2", "--a-max", "2", "--a-steps", "5"]
    assert cli.main(argv) == 0
    rows = read_table(out / "scan.csv")
    assert [float(r["a_sc [nm]"]) for r in rows] == [-2.0, -1.0, 0.0, 1.0, 2.0]
    for name in ("scan_energy.dat", "scan_eta.dat"):
        data = [ln.split() for ln in (out / name).read_text().splitlines() if not ln.startswith("#")]
        assert len(data) == 5 and all(len(d) == 2 for d in data)


def test_rerun_is_byte_identical(cfg_file, tmp_path):
    for sub in ("trap-levels", "linewidths"):
        a, b = tmp_path / f"a_{sub}", tmp_path / f"b_{sub}"
        assert cli.main([sub, "--config", str(cfg_file), "--out", str(a), "--v-min", "35", "--v-max", "36"]) == 0
        assert cli.main([sub, "--config", str(cfg_file), "--out", str(b), "--v-min", "35", "--v-max", "36"]) == 0
        for f in a.iterdir():
            assert f.read_bytes() == (b / f.name).read_bytes()


@pytest.mark.parametrize(
    "argv,category",
    [
        (["trap-levels", "--config", "/nonexistent.cfg"], "config"),
        (["bogus"], "usage"),
        (["fc", "--config", "CFG", "--v-min", "20", "--v-max", "21"], "input"),
    ],
)
def test_failures_print_one_line(argv, category, cfg_file, capsys):
    argv = [str(cfg_file) if a == "CFG" else a for a in argv]
    code = cli.main(argv)
    err = capsys.readouterr().err
    assert code == cli.EXIT_CODES[category]
    assert err.count("\n") == 1
    assert err.startswith(f"pa-spectra: error[{category}]: ")


def test_bad_config_line_reported(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("trap.omega_khz = 100\n\nfoo.bar = 1\n")
    assert cli.main(["trap-levels", "--config", str(p)]) == cli.EXIT_CODES["config"]
    assert "line 3: unknown key 'foo.bar'" in capsys.readouterr().err


def test_console_entry_point(cfg_file, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "pa_spectra.cli", "trap-levels", "--config", str(cfg_file), "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "trap_levels.csv").exists()
