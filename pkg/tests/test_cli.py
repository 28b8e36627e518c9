import csv
import json
import math

import numpy as np
import pytest

from eulerflock.cli import main
from eulerflock.diagnostics import CSV_COLUMNS
from eulerflock.runner import (
    EXIT_BLOWUP,
    EXIT_ERROR,
    EXIT_OK,
    OUTPUT_ENV,
    SCHEMA_VERSION,
    SWEEP_COLUMNS,
    run_scenario,
    run_sweep,
    sweep_row,
)
from eulerflock.scenario import parse_scenario

SMOOTH = """\
[grid]
n = {n}

[kernel]
variant = bounded
profile = raised_cosine

[initial_data]
name = perturbed_constant
rho_amp = 0.5
u_amp = 0.1

[step_control]
t_end = {t_end}

[output]
cadence = 0.1
formats = csv, npz
"""


def smooth(n=64, t_end=1.0):
    return parse_scenario(SMOOTH.format(n=n, t_end=t_end))


def write(tmp_path, text, name="s.scn"):
    p = tmp_path / name
    p.write_text(text)
    return p


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_zero_horizon(tmp_path):
    res = run_scenario(smooth(t_end=0.0), tmp_path / "out")
    assert res.exit_code == EXIT_OK
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["schema_version"] == SCHEMA_VERSION and summary["outputs"] == 1
    rows = read_csv(tmp_path / "out" / "diagnostics.csv")
    assert rows[0] == list(CSV_COLUMNS) and len(rows) == 2 and float(rows[1][0]) == 0.0


def test_outputs_and_summary(tmp_path):
    res = run_scenario(smooth(), tmp_path)
    names = sorted(p.name for p in res.files)
    assert names == ["diagnostics.csv", "snapshots.csv", "snapshots.npz", "summary.json"]
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["status"] == "ok" and s["threshold"]["subcritical"] is True
    assert set(s["fits"]) >= {"V", "sup_ux", "sup_uxx", "l2_uxxx", "flock_residual"}
    assert s["conservation"]["mass_rel"] <= 1e-12
    snap = np.load(tmp_path / "snapshots.npz")
    assert snap["rho"].shape == (11, 64)
    rows = read_csv(tmp_path / "diagnostics.csv")
    # line-mode columns are blank on the torus
    assert rows[1][CSV_COLUMNS.index("D")] == "" and rows[1][CSV_COLUMNS.index("free_energy")] == ""


def test_supercritical_exit_code(tmp_path, scenario_dir):
    code = main(["simulate", str(scenario_dir / "supercritical.scn"), "-o", str(tmp_path), "-q"])
    assert code == EXIT_BLOWUP
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["status"] == "blowup" and 0 < s["blowup"]["t"] < 50
    assert s["threshold"]["subcritical"] is False


def test_byte_identical_outputs(tmp_path):
    run_scenario(smooth(), tmp_path / "a")
    run_scenario(smooth(), tmp_path / "b")
    for name in ("diagnostics.csv", "snapshots.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_csv_round_trips_floats(tmp_path):
    res = run_scenario(smooth(), tmp_path)
    rows = read_csv(tmp_path / "diagnostics.csv")
    assert float(rows[-1][CSV_COLUMNS.index("V")]) == res.trajectory.records[-1].V


def test_single_value_sweep_matches_run(tmp_path):
    s = smooth()
    path, rows = run_sweep(s, "initial_data.mass", [1.0], tmp_path / "sweep")
    single = run_scenario(s, tmp_path / "single")
    assert rows == [sweep_row(1.0, single.summary)]
    lines = read_csv(path)
    assert lines[0] == ["axis", *SWEEP_COLUMNS] and len(lines) == 2
    sub = tmp_path / "sweep" / "initial_data.mass=1.0" / "diagnostics.csv"
    assert sub.read_bytes() == (tmp_path / "single" / "diagnostics.csv").read_bytes()


def test_sweep_rows_sorted(tmp_path):
    _, rows = run_sweep(smooth(t_end=0.5), "initial_data.u_amp", [0.3, 0.1, 0.2], tmp_path)
    assert [r["value"] for r in rows] == [0.1, 0.2, 0.3]


def test_sweep_non_sweepable_axis(tmp_path, capsys):
    p = write(tmp_path, SMOOTH.format(n=64, t_end=1))
    assert main(["sweep", str(p), "--axis", "output.directory", "--values", "1"]) == EXIT_ERROR
    assert "not a sweepable axis" in capsys.readouterr().err


def test_resolution_sweep_residuals(tmp_path):
    _, rows = run_sweep(smooth(t_end=2.0), "grid.n", [128, 256, 512], tmp_path)
    for key in ("mass_rel", "momentum_abs", "e_mean_abs"):
        vals = [r[key] for r in rows]
        # non-increasing up to rounding-level slack
        assert all(b <= a + 1e-14 for a, b in zip(vals, vals[1:])), (key, vals)


def test_output_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    p = write(tmp_path, SMOOTH.format(n=32, t_end=0.2))
    assert main(["simulate", str(p), "-q"]) == EXIT_OK
    assert (tmp_path / "env" / "summary.json").exists()
    # the command-line flag wins over the environment
    assert main(["simulate", str(p), "-q", "-o", str(tmp_path / "flag")]) == EXIT_OK
    assert (tmp_path / "flag" / "summary.json").exists()


def test_validate_prints_canonical(tmp_path, capsys):
    p = write(tmp_path, SMOOTH.format(n=64, t_end="2*pi"))
    assert main(["validate", str(p)]) == EXIT_OK
    out = capsys.readouterr().out
    assert parse_scenario(out) == parse_scenario(p.read_text())
    assert f"t_end = {2 * math.pi!r}" in out


def test_bad_file_exit_one(tmp_path, capsys):
    p = write(tmp_path, SMOOTH.format(n=63, t_end=1) + "bogus = 1\n")
    assert main(["simulate", str(p), "-q"]) == EXIT_ERROR
    err = capsys.readouterr().err
    assert "line 2" in err and "unknown key output.bogus" in err


def test_missing_file_exit_one(tmp_path, capsys):
    assert main(["validate", str(tmp_path / "nope.scn")]) == EXIT_ERROR
    assert "nope.scn" in capsys.readouterr().err


def test_unwritable_output_reports_path(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    p = write(tmp_path, SMOOTH.format(n=32, t_end=0.1))
    assert main(["simulate", str(p), "-q", "-o", str(blocker / "sub")]) == EXIT_ERROR
    assert str(blocker) in capsys.readouterr().err


def test_simulate_prints_status(tmp_path, capsys):
    p = write(tmp_path, SMOOTH.format(n=32, t_end=0.1))
    assert main(["simulate", str(p), "-o", str(tmp_path / "o")]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["status"] == "ok"


@pytest.mark.parametrize("argv, keys", [
    (["c_alpha", "--alpha", "1.5"], ("quadrature", "closed_form")),
    (["kernel", "--alpha", "1", "--x", "pi", "--terms", "100000"], ("fast", "bruteforce", "hurwitz_zeta")),
    (["fractional", "--alpha", "1", "--n", "32"], ("sup_difference",)),
    (["dissipation", "--alpha", "1", "--n", "128"], ("grid", "quadrature", "closed_form")),
    (["commutator", "--n", "64"], ("sup_difference",)),
])
def test_oracle_subcommands(capsys, argv, keys):
    assert main(["oracle", *argv]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    for k in keys:
        assert k in out
    if "closed_form" in out:
        assert out[keys[0]] == pytest.approx(out["closed_form"], rel=1e-8)
    if "sup_difference" in out:
        assert out["sup_difference"] <= 1e-6
    if "hurwitz_zeta" in out:
        assert out["fast"] == pytest.approx(0.25, abs=1e-10)
        assert out["bruteforce"] == pytest.approx(0.25, abs=1e-10)


def test_console_script_help(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0
    assert OUTPUT_ENV in capsys.readouterr().out
