import csv
import io
import math
from pathlib import Path

import pytest

from qgphase import cli
from qgphase.errors import NumericalError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_number():
    assert cli.parse_number("3*pi/4") == pytest.approx(3 * math.pi / 4)
    assert cli.parse_number(" -0.5 ") == -0.5
    assert cli.parse_number("1e-3") == 1e-3
    for bad in ("__import__('os')", "pi**2", "1/0", "x", "", "1e400"):
        with pytest.raises(cli.ConfigError):
            cli.parse_number(bad)


def test_parse_list_and_sweep():
    assert cli.parse_list("0, pi/2,") == [0.0, math.pi / 2]
    with pytest.raises(cli.ConfigError):
        cli.parse_list(" , ")
    sw = cli.parse_sweep("temp:0:300:4")
    assert sw.grid() == [0.0, 100.0, 200.0, 300.0]
    assert cli.parse_sweep("theta0:0:pi").n == cli.DEFAULT_SWEEP_POINTS
    assert cli.parse_sweep("theta0:1:2:1").grid() == [1.0]
    assert cli.parse_sweep("") is None
    for bad in ("temp:0", "speed:0:1", "temp:5:1", "temp:0:1:x", "temp:0:1:0"):
        with pytest.raises(cli.ConfigError):
            cli.parse_sweep(bad)


def test_config_panels_and_override(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("# two panels\nmode = gp-qnd\ntemp = 50\n\n[A]\n\n[B]\ntemp = 100, 300  # hot\n")
    args = cli.build_parser().parse_args(["--config", str(path)])
    a, b = cli.load_configs(args)
    assert (a.panel, a.values["temp"]) == ("A", [50.0])
    assert b.values["temp"] == [100.0, 300.0]
    args = cli.build_parser().parse_args(["--config", str(path), "--temp", "7"])
    assert [c.values["temp"] for c in cli.load_configs(args)] == [[7.0], [7.0]]


def test_config_without_sections(tmp_path):
    path = tmp_path / "flat.conf"
    path.write_text("mode = sweep\ntheta0 = 1.0\n")
    (cfg,) = cli.load_configs(cli.build_parser().parse_args(["--config", str(path)]))
    assert cfg.panel == "main" and cfg.mode == "sweep"


@pytest.mark.parametrize(
    "text",
    [
        "mode = gp-qnd\nwibble = 3\n",
        "mode = teleport\n",
        "mode = gp-qnd\n[A]\n[B]\nmode = sweep\n",
        "mode = gp-qnd\nsamples = 8\n",
        "this line has no delimiter\n",
    ],
)
def test_bad_config_files(tmp_path, capsys, text):
    path = tmp_path / "bad.conf"
    path.write_text(text)
    code, out, err = run(["--config", str(path)], capsys)
    assert code == 2 and out == "" and "config error" in err


def test_missing_config_file(capsys):
    code, _, err = run(["--config", "/nonexistent/run.conf"], capsys)
    assert code == 2 and "cannot read" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["--theta0", "4"],
        ["--phi0", "7"],
        ["--temp", "-1"],
        ["--squeeze-r", "-0.1"],
        ["--sweep", "nope:0:1"],
        ["--mode", "bloch-spheroid", "--time", "0"],
    ],
)
def test_invalid_values_exit_2(capsys, argv):
    code, out, err = run(["--mode", "gp-qnd", *argv] if "--mode" not in argv else argv, capsys)
    assert code == 2 and out == ""


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["--mode", "bogus"])
    assert info.value.code == 2


def test_numerical_failure_exit_3(capsys, monkeypatch):
    def boom(*a, **k):
        raise NumericalError("integral did not converge")

    monkeypatch.setattr(cli, "gp_qnd_closed", boom)
    code, out, err = run(["--mode", "gp-qnd", "--samples", "64"], capsys)
    assert code == 3 and "numerical failure" in err and out == ""


def test_qnd_rows(capsys):
    code, out, _ = run(["--mode", "gp-qnd", "--theta0", "0,pi/2", "--temp", "0,100", "--samples", "128"], capsys)
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 4
    assert [float(r["temp"]) for r in rows] == [0.0, 0.0, 100.0, 100.0]
    assert float(rows[0]["gp"]) == 0.0
    assert abs(abs(float(rows[1]["gp"])) - math.pi) < 1e-12
    for r in rows:
        assert all(v != "" for v in r.values())
        assert -math.pi < float(r["gp"]) <= math.pi


def test_output_is_byte_identical(capsys):
    argv = ["--mode", "sweep", "--theta0", "0.3,2.0", "--gamma0", "0.01,0.1", "--squeeze-r", "0.4", "--samples", "64"]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert first == second and first


def test_workers_preserve_order(capsys):
    argv = ["--mode", "gp-dissipative", "--theta0", "1.0", "--sweep", "temp:0:4:5", "--gamma0", "0.05", "--samples", "64"]
    _, serial, _ = run(argv, capsys)
    _, parallel, _ = run(argv + ["--workers", "3"], capsys)
    assert serial == parallel
    assert [float(r["temp"]) for r in rows_of(serial)] == [0.0, 1.0, 2.0, 3.0, 4.0]


def test_degrees_flag(capsys):
    argv = ["--mode", "gp-qnd", "--theta0", "pi/4", "--samples", "64"]
    _, rad, _ = run(argv, capsys)
    _, deg, _ = run(argv + ["--degrees"], capsys)
    r, d = rows_of(rad)[0], rows_of(deg)[0]
    assert float(d["theta0"]) == pytest.approx(45.0)
    assert float(d["gp"]) == pytest.approx(math.degrees(float(r["gp"])))
    assert d["temp"] == r["temp"]


def test_out_file(tmp_path, capsys):
    target = tmp_path / "gp.csv"
    code, out, _ = run(["--mode", "gp-qnd", "--samples", "64", "--out", str(target)], capsys)
    assert code == 0 and out == ""
    assert len(rows_of(target.read_text())) == 1


def test_verify_passes(capsys):
    code, out, err = run(["--mode", "verify", "--gamma0", "0.6", "--temp", "5", "--squeeze-r", "0.4", "--squeeze-phi", "1.5"], capsys)
    assert code == 0, err
    (row,) = rows_of(out)
    assert row["pass"] == "1"
    for key, limit in cli.VERIFY_LIMITS.items():
        assert float(row[key]) <= limit


def test_verify_failure_exit_3(capsys, monkeypatch):
    monkeypatch.setitem(cli.VERIFY_LIMITS, "lindblad_form", -1.0)
    code, out, err = run(["--mode", "verify", "--gamma0", "0.1"], capsys)
    assert code == 3 and rows_of(out)[0]["pass"] == "0"


def test_spheroid_rows(capsys):
    code, out, _ = run(["--config", str(CONFIGS / "sgad_spheroid.conf"), "--points", "200"], capsys)
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 400
    by_panel = {r["panel"]: r for r in rows}
    assert by_panel["B"]["shape"] == "oblate"
    for r in rows:
        v = [float(r[k]) for k in ("x", "y", "z")]
        assert math.fsum(c * c for c in v) <= 1 + 1e-12


def test_spheroid_both_channels(capsys):
    code, out, _ = run(["--mode", "bloch-spheroid", "--gamma0", "0.6", "--temp", "5", "--points", "50"], capsys)
    assert code == 0
    assert {r["channel"] for r in rows_of(out)} == {"sgad", "qnd"}


@pytest.mark.parametrize(
    "name, mode, panels",
    [
        ("dephasing_vs_theta.conf", "gp-qnd", 2),
        ("dephasing_vs_temp.conf", "gp-qnd", 2),
        ("dissipative_vs_theta.conf", "gp-dissipative", 2),
        ("dissipative_vs_temp_equator.conf", "gp-dissipative", 2),
        ("dissipative_vs_temp_lower.conf", "gp-dissipative", 2),
        ("sgad_spheroid.conf", "bloch-spheroid", 2),
    ],
)
def test_shipped_configs_load(name, mode, panels):
    configs = cli.load_configs(cli.build_parser().parse_args(["--config", str(CONFIGS / name)]))
    assert len(configs) == panels
    assert {c.mode for c in configs} == {mode}
    assert cli.tasks_for(configs)


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "qgphase", "--mode", "gp-qnd", "--samples", "32"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0].startswith("panel,theta0")
