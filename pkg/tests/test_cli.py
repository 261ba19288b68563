import csv
import math
import re
import subprocess
import sys

import numpy as np
import pytest

from hgpdc import analysis, cli
from hgpdc.errors import GeometryError, NumericalError

from conftest import RECIPES


def variant(tmp_path, recipe, *subs, extra=""):
    text = (RECIPES / f"{recipe}.cfg").read_text()
    for old, new in subs:
        assert old in text
        text = text.replace(old, new)
    path = tmp_path / f"{recipe}_variant.cfg"
    path.write_text(text + extra)
    return path


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# hgpdc ") and "config_sha256=" in lines[0]
    rows = list(csv.reader(lines[1:]))
    return rows[0], rows[1:]


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_tuning_curve_turns_at_gvm_point(tmp_path, capsys):
    # the type-II loop turns near the GVM point (0.142 rad, 533.5 nm)
    cfg = variant(tmp_path, "fig3", ("angle_range_rad = [-0.2, 0.2]", "angle_range_rad = [0.14, 0.145]"),
                  ("samples = 81", "samples = 51"))
    code, out, _ = run(capsys, "tuning-curve", cfg, "--out", tmp_path)
    assert code == 0 and "phase-matched points" in out
    header, rows = read_csv(tmp_path / "tuning_curve.csv")
    assert header == ["external_angle_rad", "signal_wavelength_nm", "branch"]
    edge = max(float(r[0]) for r in rows)
    assert abs(edge - 0.142) < 0.01
    assert all(abs(float(r[1]) - 533.5) < 15 for r in rows if float(r[0]) == edge)
    assert any(abs(float(r[1]) - 533.5) < 1 and abs(float(r[0]) - 0.142) < 0.01 for r in rows)


def test_tuning_curve_empty_range(tmp_path, capsys):
    cfg = variant(tmp_path, "fig3", ("angle_range_rad = [-0.2, 0.2]", "angle_range_rad = [1.0, 1.1]"))
    code, _, _ = run(capsys, "tuning-curve", cfg, "--out", tmp_path)
    assert code == 0
    header, rows = read_csv(tmp_path / "tuning_curve.csv")
    assert header and rows == []


@pytest.mark.parametrize("text", ["[geometry\n", "[geometry]\ntype = 3\n", "just words\n"])
def test_malformed_config_exit_2(tmp_path, capsys, text):
    path = tmp_path / "bad.cfg"
    path.write_text(text)
    code, out, err = run(capsys, "tuning-curve", path, "--out", tmp_path)
    assert code == 2 and "error" in err and out == ""


def test_usage_errors_exit_2(tmp_path, capsys):
    assert run(capsys, "tuning-curve", tmp_path / "missing.cfg")[0] == 2
    assert run(capsys, "frobnicate", RECIPES / "fig3.cfg")[0] == 2
    assert run(capsys, "gvm", RECIPES / "fig3.cfg", "--grid", "8")[0] == 2
    assert run(capsys, "gvm", RECIPES / "fig3.cfg", "--cutoff", "-1")[0] == 2
    # sections the command needs but the recipe lacks
    assert run(capsys, "angular-spectrum", RECIPES / "fig3.cfg", "--out", tmp_path)[0] == 2


def test_walkoff_fig2(tmp_path, capsys):
    code, out, _ = run(capsys, "walkoff", RECIPES / "fig2.cfg", "--out", tmp_path)
    assert code == 0
    deg = float(re.search(r"internal walk-off\s+([\d.]+) deg", out).group(1))
    assert abs(deg - 4.0) <= 0.5
    assert "gain cone a/L        0.012 rad" in out
    header, rows = read_csv(tmp_path / "walkoff.csv")
    cuts = np.array([float(r[0]) for r in rows])
    rho = np.array([float(r[1]) for r in rows])
    assert rho[0] == 0.0
    # unimodal, peaking where the Poynting-angle formula peaks
    k = np.argmax(rho)
    assert np.all(np.diff(rho[: k + 1]) > 0) and np.all(np.diff(rho[k:]) < 0)
    from hgpdc.dispersion import BBO

    no2, ne2 = BBO.sellmeier_o.n_squared(0.355), BBO.sellmeier_e.n_squared(0.355)
    th = np.linspace(0, math.pi / 2, 90001)
    oracle = np.degrees(th[np.argmax(np.arctan(no2 / ne2 * np.tan(th)) - th)])
    assert abs(cuts[k] - oracle) <= 1.0 and abs(oracle - 45) < 3


def test_walkoff_at_zero_cut(tmp_path, capsys):
    cfg = variant(tmp_path, "fig2", ("cut_angle_deg = 34.9", "cut_angle_deg = 0.0"),
                  ("sweep_deg = [0.0, 90.0, 91]\n", ""))
    code, out, _ = run(capsys, "walkoff", cfg, "--out", tmp_path)
    assert code == 0 and "internal walk-off    0.0000 deg" in out
    _, rows = read_csv(tmp_path / "walkoff.csv")
    assert rows == [["0", "0", "0"]]


def test_gvm_fig3(capsys):
    code, out, _ = run(capsys, "gvm", RECIPES / "fig3.cfg")
    assert code == 0
    lam = float(re.search(r"GVM wavelength\s+([\d.]+) nm", out).group(1))
    assert abs(lam - 533.5) <= 10
    ang = float(re.search(r"GVM point\s+([\d.]+) rad", out).group(1))
    assert abs(ang - 0.142) < 0.01


def test_gvm_at_31_degrees(tmp_path, capsys):
    cfg = variant(tmp_path, "fig3", ("cut_angle_deg = 37.5", "cut_angle_deg = 31.0"))
    code, out, _ = run(capsys, "gvm", cfg)
    assert code == 0 and "GVM point" in out


def test_gvm_no_crossing_exit_4(tmp_path, capsys):
    cfg = variant(tmp_path, "fig3", ('name = "BBO"', 'name = "flat"\nsellmeier_o = [2.7, 0.0, 0.0, 0.0]\n'
                                      "sellmeier_e = [2.3753, 0.01224, 0.01667, 0.01516]\nwindow_um = [0.205, 3.5]"))
    code, _, err = run(capsys, "gvm", cfg)
    assert code == 4 and "no GVM point" in err


def test_angular_zero_gain(tmp_path, capsys):
    cfg = variant(tmp_path, "fig2", ("G = 15.0", "G = 0.0"), ("cut_angles_deg = [32.5, 33.5, 34.2, 34.9]\n", ""))
    code, _, _ = run(capsys, "angular-spectrum", cfg, "--out", tmp_path, "--grid", "64")
    assert code == 0
    header, rows = read_csv(tmp_path / "angular_spectrum.csv")
    assert header == ["external_angle_rad", "N_signal", "N_idler"]
    assert len(rows) == 64 and all(r[1] == "0" and r[2] == "0" for r in rows)


def test_angular_is_deterministic(tmp_path, capsys):
    for sub in ("a", "b"):
        code, _, _ = run(capsys, "angular-spectrum", RECIPES / "fig2.cfg", "--out", tmp_path / sub,
                         "--grid", "96", "--svg")
        assert code == 0
    for name in ("angular_spectrum.csv", "angular_spectrum_sweep.csv", "angular_spectrum.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    first = (tmp_path / "a" / "angular_spectrum.csv").read_text().splitlines()[0]
    assert "grid=96" in first and "cutoff=1e-12" in first


def test_frequency_spectrum(tmp_path, capsys):
    code, out, _ = run(capsys, "frequency-spectrum", RECIPES / "fig4_5mm.cfg", "--out", tmp_path,
                       "--grid", "96", "--svg")
    assert code == 0 and "N(533.5 nm) / N(636.5 nm)" in out
    header, rows = read_csv(tmp_path / "frequency_spectrum.csv")
    assert header[:2] == ["wavelength_nm", "N_signal"]
    assert len(rows) == 2 * 96
    assert (tmp_path / "frequency_spectrum.svg").stat().st_size > 0


def test_frequency_spectrum_needs_targets(tmp_path, capsys):
    cfg = variant(tmp_path, "fig4_5mm", ("wavelengths_nm = [533.5, 636.5]", ""))
    assert run(capsys, "frequency-spectrum", cfg, "--out", tmp_path)[0] == 2


def test_modes_zero_gain_equals_schmidt_number(tmp_path, capsys):
    cfg = variant(tmp_path, "fig2", ("G = 15.0", "G = 0.0"))
    code, out, _ = run(capsys, "modes", cfg, "--out", tmp_path, "--grid", "96")
    assert code == 0
    K = float(re.search(r"Schmidt number K\s+(\S+)", out).group(1))
    m = float(re.search(r"effective modes m\s+(\S+)", out).group(1))
    assert m == pytest.approx(K, rel=1e-5)
    header, rows = read_csv(tmp_path / "modes.csv")
    assert header == ["n", "lambda_n", "Lambda_n"]
    assert rows[0][0] == "0"


def test_numerical_failure_exit_3(tmp_path, capsys, monkeypatch):
    def boom(*a, **k):
        raise NumericalError("SVD did not converge")

    monkeypatch.setattr(analysis, "angular_spectrum", boom)
    code, _, err = run(capsys, "angular-spectrum", RECIPES / "fig2.cfg", "--out", tmp_path)
    assert code == 3 and "SVD" in err
    monkeypatch.setattr(analysis, "angular_spectrum", lambda *a, **k: 1 / 0)
    assert run(capsys, "angular-spectrum", RECIPES / "fig2.cfg", "--out", tmp_path)[0] == 3


def test_geometry_error_exit_4(tmp_path, capsys, monkeypatch):
    def nope(*a, **k):
        raise GeometryError("not phase-matchable")

    monkeypatch.setattr(analysis, "angular_spectrum", nope)
    assert run(capsys, "angular-spectrum", RECIPES / "fig2.cfg", "--out", tmp_path)[0] == 4


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hgpdc", "gvm", str(RECIPES / "fig3.cfg")],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "GVM wavelength" in res.stdout
