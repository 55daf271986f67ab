"""Tests for the Movable Wall command line."""
import logging
import textwrap

import pytest
import yaml
from movable_wall.cli import build_parser
from movable_wall.cli import main
from movable_wall.const import EXIT_CONFIG_ERROR
from movable_wall.const import EXIT_NON_CONVERGENCE
from movable_wall.const import EXIT_OK
from movable_wall.const import NAME
from movable_wall.const import VERSION
from movable_wall.output import read_table

PROFILE_1D_COLUMNS = ("x_m", "e2_zeroth", "b2_zeroth", "e2_first", "b2_first", "rho_corr")


def _run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def _floats(table, name):
    return [float(value) for value in table.column(name)]


def test_profile1d_preset(tmp_path):
    assert _run(tmp_path, "profile1d", "--preset", "fig1", "--grid", "50") == EXIT_OK
    assert sorted(path.name for path in tmp_path.iterdir()) == [
        "profile1d.csv",
        "profile1d.meta.yaml",
    ]

    table = read_table(tmp_path / "profile1d.csv")
    assert table.columns == PROFILE_1D_COLUMNS
    assert len(table.rows) == 50
    e2, b2 = _floats(table, "e2_first"), _floats(table, "b2_first")
    for rho, e, b in zip(_floats(table, "rho_corr"), e2, b2):
        assert rho >= 0
        assert rho == pytest.approx((e + b) / 2, rel=1e-15)

    sidecar = yaml.safe_load((tmp_path / "profile1d.meta.yaml").read_text())
    assert sidecar["metadata"]["software"] == NAME
    assert sidecar["metadata"]["version"] == VERSION
    assert sidecar["metadata"]["units"]["rho_corr"] == "J/m"
    assert sidecar["metadata"]["truncation"]["axial"] == 147
    assert sidecar["grid"]["points"] == 50


def test_threads_do_not_change_results(tmp_path):
    texts = []
    for threads in ("1", "4", "4"):
        out = tmp_path / f"threads_{len(texts)}"
        assert (
            _run(out, "profile1d", "--preset", "fig1", "--grid", "100", "--threads", threads)
            == EXIT_OK
        )
        texts.append((out / "profile1d.csv").read_bytes())
    assert texts[0] == texts[1] == texts[2]


def test_sidecar_reproduces_run(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    assert _run(first, "profile1d", "--preset", "fig1", "--grid", "30") == EXIT_OK
    sidecar = first / "profile1d.meta.yaml"
    assert _run(second, "profile1d", "--config", str(sidecar)) == EXIT_OK
    assert (first / "profile1d.csv").read_bytes() == (second / "profile1d.csv").read_bytes()


def test_config_error_writes_nothing(tmp_path, caplog):
    caplog.set_level(logging.INFO)
    config = tmp_path / "run.yaml"
    config.write_text(
        textwrap.dedent(
            """\
            cavity:
              L0: 1.0e-5
              omega_osc: 1.0e+5
              omega_cut: 1.0e+15
            """
        )
    )
    out = tmp_path / "out"
    assert _run(out, "profile1d", "--config", str(config)) == EXIT_CONFIG_ERROR
    assert not out.exists()
    assert "Version: " in caplog.text
    assert f"Configuration error: {config}:1:" in caplog.text
    assert "cavity.M" in caplog.text


def test_non_convergence_writes_nothing(tmp_path, caplog, error_on_profile):
    out = tmp_path / "out"
    assert _run(out, "profile1d", "--preset", "fig1") == EXIT_NON_CONVERGENCE
    assert not out.exists()
    assert "Computation failed" in caplog.text


def test_spectrum_run(tmp_path):
    config = tmp_path / "spectrum.yaml"
    config.write_text(
        textwrap.dedent(
            """\
            cavity:
              L0: 1.0e-5
              Ly: 5.0e-5
              Lz: 5.0e-5
              M: 1.0e-11
              omega_osc: 1.0e+5
              omega_cut: 2.0e+14
            spectrum:
              modes:
                - [1, 0, 0]
                - [2, 1, 0]
                - [1, 1, -1]
            """
        )
    )
    assert _run(tmp_path, "spectrum", "--config", str(config)) == EXIT_OK
    table = read_table(tmp_path / "spectrum.csv")
    assert table.columns == ("m_x", "m_y", "m_z", "occupation")
    assert [row[:3] for row in table.rows] == [
        ("1", "0", "0"),
        ("2", "1", "0"),
        ("1", "1", "-1"),
    ]
    assert all(value > 0 for value in _floats(table, "occupation"))

    sidecar = yaml.safe_load((tmp_path / "spectrum.meta.yaml").read_text())
    assert sidecar["metadata"]["modes"] == 3
    assert list(sidecar["metadata"]["axial_occupation"]) == ["1"]


def test_mass_sweep(tmp_path):
    config = tmp_path / "sweep.yaml"
    config.write_text(
        textwrap.dedent(
            """\
            cavity:
              L0: 1.0e-5
              M: 1.0e-11
              omega_osc: 1.0e+5
              omega_cut: 1.0e+15
            grid:
              points: 40
            sweep:
              parameter: M
              values: [1.0e-11, 2.0e-11]
            """
        )
    )
    out = tmp_path / "out"
    assert _run(out, "sweep", "--config", str(config)) == EXIT_OK
    assert sorted(path.name for path in out.iterdir()) == [
        "sweep.meta.yaml",
        "sweep_0.csv",
        "sweep_1.csv",
        "sweep_summary.csv",
    ]
    summary = read_table(out / "sweep_summary.csv")
    assert _floats(summary, "sweep_value") == [1e-11, 2e-11]
    light, heavy = _floats(summary, "peak_height")
    assert light / heavy == pytest.approx(2.0, rel=1e-10)

    sidecar = yaml.safe_load((out / "sweep.meta.yaml").read_text())
    assert [run["value"] for run in sidecar["metadata"]["runs"]] == [1e-11, 2e-11]


def test_profile3d_desk_preset(tmp_path):
    assert _run(tmp_path, "profile3d", "--preset", "fig3-desk", "--grid", "20") == EXIT_OK
    table = read_table(tmp_path / "profile3d.csv")
    assert table.columns == ("x_m", "rho0", "delta_rho")
    assert len(table.rows) == 20

    sidecar = yaml.safe_load((tmp_path / "profile3d.meta.yaml").read_text())
    peak = sidecar["metadata"]["peak"]["location"]
    grid = _floats(table, "x_m")
    assert grid[0] <= peak <= grid[-1] < 1e-5
    assert sidecar["metadata"]["units"]["delta_rho"] == "J/m^3"


def test_parser_requires_a_source():
    parser = build_parser()
    with pytest.raises(SystemExit):
        parser.parse_args(["profile1d"])
    with pytest.raises(SystemExit):
        parser.parse_args(["profile1d", "--preset", "fig1", "--config", "run.yaml"])
    with pytest.raises(SystemExit):
        parser.parse_args(["profile1d", "--preset", "fig1", "--threads", "0"])
    args = parser.parse_args(["sweep", "--preset", "fig2", "--threads", "3"])
    assert args.command == "sweep"
    assert args.threads == 3


def test_output_path_is_a_file(tmp_path, caplog):
    blocker = tmp_path / "results"
    blocker.write_text("keep")
    assert _run(blocker, "profile1d", "--preset", "fig1", "--grid", "10") == EXIT_CONFIG_ERROR
    assert blocker.read_text() == "keep"
    assert [path.name for path in tmp_path.iterdir()] == ["results"]
    assert "Cannot write output" in caplog.text


def test_failed_write_leaves_no_partial_bundle(tmp_path, caplog):
    out = tmp_path / "out"
    (out / "profile1d.meta.yaml").mkdir(parents=True)
    assert _run(out, "profile1d", "--preset", "fig1", "--grid", "10") == EXIT_CONFIG_ERROR
    assert [path.name for path in out.iterdir()] == ["profile1d.meta.yaml"]
    assert [path.name for path in tmp_path.iterdir()] == ["out"]
    assert "Cannot write output" in caplog.text
