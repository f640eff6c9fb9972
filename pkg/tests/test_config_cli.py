import subprocess
import sys

import pytest

from bellsynth import cli
from bellsynth.config import RunConfig, parse_text
from bellsynth.csvio import fmt, read_csv
from bellsynth.errors import ConfigError


def write(tmp_path, text):
    p = tmp_path / "run.cfg"
    p.write_text(text)
    return p


@pytest.mark.parametrize(
    "text,line,key",
    [
        ("pump.mode = cw\nbogus.key = 1\n", 2, "bogus.key"),
        ("pump.center_nm = 351.1\npump.center_nm = 390\n", 2, "pump.center_nm"),
        ("# c\n\ncrystal.length_mm = three\n", 3, "crystal.length_mm"),
        ("crystal.length_mm =\n", 1, "crystal.length_mm"),
        ("grid.n_plus = nan\n", 1, "grid.n_plus"),
    ],
)
def test_parse_errors_carry_line_and_key(text, line, key):
    with pytest.raises(ConfigError) as exc:
        parse_text(text)
    assert exc.value.line == line and exc.value.key == key
    assert f"line {line}" in str(exc.value) and key in str(exc.value)


def test_missing_equals():
    with pytest.raises(ConfigError) as exc:
        parse_text("pump.mode cw\n")
    assert exc.value.line == 1


def test_defaults_and_comments():
    cfg = RunConfig.from_text("pump.center_nm = 390  # trailing comment\n")
    assert cfg["pump.center_nm"] == 390.0
    assert cfg["crystal.length_mm"] == 3.0
    assert cfg.line("pump.center_nm") == 1 and cfg.line("crystal.length_mm") is None


def test_missing_angle_is_solved():
    setup = RunConfig.from_text("pump.center_nm = 351.1\n").setup()
    assert setup.crystal.phase_matching_angle_deg == pytest.approx(49.2, abs=0.1)


def test_semantic_error_points_at_key():
    cfg = RunConfig.from_text("pump.mode = pulsed\npump.bandwidth_nm = 0\n")
    with pytest.raises(ConfigError) as exc:
        cfg.setup()
    assert exc.value.key == "pump.mode" and exc.value.line == 1


def test_list_values():
    cfg = RunConfig.from_text("universality.filter_fwhms_nm = inf, 5\n")
    assert cfg["universality.filter_fwhms_nm"] == [float("inf"), 5.0]


def test_bundled_configs_load():
    for name in ("cw_fig3", "pulsed_fig4"):
        assert RunConfig.load(name).setup().crystal.length_mm == 3.0


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.load(tmp_path / "nope.cfg")


def test_fmt():
    assert fmt(1 / 3) == "0.333333333"
    assert fmt(-0.0) == "0"
    assert fmt(7) == "7"
    assert fmt(1e-20) == "1e-20"
    assert fmt("HH") == "HH"


def test_cli_exit_2_on_config_error(tmp_path, capsys):
    cfg = write(tmp_path, "pump.mode = cw\nnot.a.key = 3\n")
    assert cli.main(["delay-sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "not.a.key" in err


def test_cli_exit_3_on_physics_error(tmp_path, capsys):
    cfg = write(tmp_path, "pump.center_nm = 351.1\nsweep.tau_max_fs = 100000\n")
    assert cli.main(["delay-sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 3
    assert "ShiftRangeError" in capsys.readouterr().err


def run_ok(args, capsys):
    assert cli.main(args) == 0
    out = capsys.readouterr().out.strip().split()
    assert out[0] == "OK" and out[1] == args[0]
    return int(out[2])


def test_werner_trajectory_endpoint(tmp_path, capsys):
    n = run_ok(["werner-trajectory", "--config", "cw_fig3", "--out", str(tmp_path)], capsys)
    assert n == 1
    header, rows = read_csv(tmp_path / "trajectory.csv")
    assert header == ["tau_fs", "epsilon", "concurrence", "S", "E"]
    tau, eps, c, s, e = map(float, rows[0])
    assert (tau, eps, c, e) == (0.0, 1.0, 1.0, 1.0)
    assert abs(s) < 1e-9


def test_analyzer_sweep(tmp_path, capsys):
    assert run_ok(["analyzer-sweep", "--config", "cw_fig3", "--out", str(tmp_path)], capsys) == 2
    summary = dict(read_csv(tmp_path / "summary.csv")[1])
    assert float(summary["visibility"]) == pytest.approx(1.0, abs=1e-9)


def test_events_and_histogram(tmp_path, capsys):
    cfg = write(tmp_path, "crystal.angle_deg = 49.2\ndetection.duration_s = 0.05\n")
    assert run_ok(["events", "--config", str(cfg), "--out", str(tmp_path / "o"), "--seed", "4"], capsys) == 3
    header, rows = read_csv(tmp_path / "o" / "events.csv")
    assert header == ["detector", "time_ns", "origin"] and rows
    header, rows = read_csv(tmp_path / "o" / "histogram.csv")
    assert header == ["bin_center_ns", "count"] and len(rows) == 60


def test_tomography(tmp_path, capsys):
    cfg = write(tmp_path, "crystal.angle_deg = 49.2\ntomography.shots = 100000\n")
    assert run_ok(["tomography", "--config", str(cfg), "--out", str(tmp_path / "o")], capsys) == 3
    header, rows = read_csv(tmp_path / "o" / "state.csv")
    assert header == ["row", "col", "re", "im"] and len(rows) == 16
    summary = dict(read_csv(tmp_path / "o" / "summary.csv")[1])
    assert float(summary["fidelity"]) > 0.98


def test_reruns_are_byte_identical(tmp_path, capsys):
    cfg = write(tmp_path, "crystal.angle_deg = 49.2\ndetection.duration_s = 0.02\n")
    for d in ("a", "b"):
        run_ok(["events", "--config", str(cfg), "--out", str(tmp_path / d), "--seed", "7"], capsys)
    for name in ("events.csv", "histogram.csv", "summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_seed_changes_output(tmp_path, capsys):
    cfg = write(tmp_path, "crystal.angle_deg = 49.2\ndetection.duration_s = 0.02\n")
    for d, seed in (("a", "1"), ("b", "2")):
        run_ok(["events", "--config", str(cfg), "--out", str(tmp_path / d), "--seed", seed], capsys)
    assert (tmp_path / "a" / "events.csv").read_bytes() != (tmp_path / "b" / "events.csv").read_bytes()


def test_module_entry_point(tmp_path):
    r = subprocess.run(
        [sys.executable, "-m", "bellsynth", "werner-trajectory", "--config", "cw_fig3", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0 and r.stdout.strip() == "OK werner-trajectory 1"


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["delay-sweep"])
    assert exc.value.code == 2
