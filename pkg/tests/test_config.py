"""Tests for Movable Wall run configuration."""
import textwrap

import pytest
import yaml
from movable_wall.config import apply_overrides
from movable_wall.config import available_presets
from movable_wall.config import line_index
from movable_wall.config import load_config
from movable_wall.config import load_preset
from movable_wall.config import parse_config
from movable_wall.const import PROFILE_1D
from movable_wall.const import PROFILE_3D
from movable_wall.const import SPECTRUM
from movable_wall.const import SWEEP
from movable_wall.core import Cavity1DConfig
from movable_wall.core import Cavity3DConfig
from movable_wall.core import CutoffScheme
from movable_wall.core import ModeIndex3
from movable_wall.core import SumControl
from movable_wall.exceptions import ConfigError

from .const import MOCK_CAVITY_1D
from .const import MOCK_CONFIG_1D

PROFILE_TEXT = textwrap.dedent(
    """\
    scenario: profile1d
    cavity:
      L0: 1.0e-5
      M: 1.0e-11
      omega_osc: 1.0e+5
      omega_cut: 1.0e+15
    grid:
      points: 40
    """
)


def _errors(text, scenario=None):
    with pytest.raises(ConfigError) as excinfo:
        parse_config(text, scenario)
    return excinfo.value.errors


def test_parse_profile():
    cfg = parse_config(PROFILE_TEXT)
    assert cfg.scenario == PROFILE_1D
    assert cfg.cavity == Cavity1DConfig(**MOCK_CAVITY_1D)
    assert cfg.control == SumControl()
    assert cfg.grid.points == 40
    assert cfg.grid.window is None
    assert cfg.output.stem == PROFILE_1D
    assert cfg.output.directory == "."
    assert cfg.sweep is None
    assert cfg.document["scenario"] == PROFILE_1D


def test_parse_mock_document():
    cfg = parse_config(yaml.safe_dump(MOCK_CONFIG_1D))
    assert cfg.control.rel_tol == 1e-6
    assert cfg.control.cutoff_scheme is CutoffScheme.EXPONENTIAL


def test_presets():
    assert available_presets() == ["fig1", "fig2", "fig3", "fig3-desk"]

    fig1 = load_config(preset="fig1", scenario=PROFILE_1D)
    assert fig1.cavity == Cavity1DConfig(**MOCK_CAVITY_1D)
    assert fig1.grid.points == 1000
    assert fig1.control.rel_tol == 1e-6

    fig2 = load_config(preset="fig2", scenario=SWEEP)
    assert fig2.sweep.parameter == "omega_cut"
    assert fig2.sweep.values == (6e15, 8e15, 9e15, 1e16)
    assert fig2.grid.window == (0.98, 1.0)

    fig3 = load_config(preset="fig3", scenario=PROFILE_3D)
    assert isinstance(fig3.cavity, Cavity3DConfig)
    assert fig3.cavity.Ly == fig3.cavity.Lz == 5e-5
    assert fig3.cavity.omega_cut == 1e15

    desk = load_config(preset="fig3-desk", scenario=PROFILE_3D)
    assert desk.cavity.omega_cut < fig3.cavity.omega_cut


def test_unknown_preset():
    with pytest.raises(ConfigError, match="unknown preset 'fig9'"):
        load_preset("fig9")


def test_missing_field_single_diagnostic():
    text = PROFILE_TEXT.replace("  M: 1.0e-11\n", "")
    errors = _errors(text)
    assert len(errors) == 1
    assert errors[0].startswith("<config>:2:")
    assert "cavity.M" in errors[0]


def test_every_error_reported_with_line():
    text = PROFILE_TEXT.replace("M: 1.0e-11", "M: -1").replace("points: 40", "points: 0")
    errors = _errors(text)
    assert "<config>:4: M must be > 0" in errors
    assert "<config>:8: points must be >= 1" in errors


def test_cutoff_below_oscillator():
    text = PROFILE_TEXT.replace("omega_cut: 1.0e+15", "omega_cut: 1.0e+4")
    assert _errors(text) == ["<config>:2: omega_cut must be > omega_osc"]


def test_rectangular_section_rejected():
    text = textwrap.dedent(
        """\
        cavity:
          L0: 1.0e-5
          Ly: 5.0e-5
          Lz: 4.0e-5
          M: 1.0e-11
          omega_osc: 1.0e+5
          omega_cut: 2.0e+14
        """
    )
    assert _errors(text, PROFILE_3D) == ["<config>:1: Ly must equal Lz"]
    text = text.replace("4.0e-5", "5.0e-5")
    assert parse_config(text, PROFILE_3D).cavity.S == pytest.approx(2.5e-9)


def test_scenario_conflict():
    errors = _errors(PROFILE_TEXT, PROFILE_3D)
    assert "conflicts with requested scenario 'profile3d'" in errors[0]
    assert errors[0].startswith("<config>:1:")
    with pytest.raises(ConfigError, match="scenario must be one of"):
        parse_config(PROFILE_TEXT.replace("profile1d", "profile2d"))


def test_sweep_block():
    sweep = textwrap.dedent(
        """\
        sweep:
          parameter: M
          values: [1.0e-11, 2.0e-11]
        """
    )
    cfg = parse_config(PROFILE_TEXT.replace("profile1d", "sweep") + sweep)
    assert cfg.sweep.parameter == "M"
    assert cfg.sweep.values == (1e-11, 2e-11)
    assert cfg.sweep.target == PROFILE_1D

    errors = _errors(PROFILE_TEXT + sweep)
    assert errors == ["<config>:9: a sweep block needs scenario 'sweep'"]

    unknown = sweep.replace("parameter: M", "parameter: L9")
    errors = _errors(PROFILE_TEXT.replace("profile1d", "sweep") + unknown)
    assert len(errors) == 1
    assert "sweep parameter must be one of omega_cut, M, omega_osc" in errors[0]

    empty = sweep.replace("[1.0e-11, 2.0e-11]", "[]")
    errors = _errors(PROFILE_TEXT.replace("profile1d", "sweep") + empty)
    assert any("sweep values must not be empty" in error for error in errors)

    with pytest.raises(ConfigError, match="sweep"):
        parse_config(PROFILE_TEXT.replace("profile1d", "sweep"))


def test_swept_values_checked_against_cavity():
    sweep = textwrap.dedent(
        """\
        sweep:
          parameter: omega_cut
          values:
            - 1.0e+15
            - 1.0e+4
        """
    )
    errors = _errors(PROFILE_TEXT.replace("profile1d", "sweep") + sweep)
    assert errors == ["<config>:13: omega_cut must be > omega_osc (sweep value 10000.0)"]


def test_spectrum_block():
    text = textwrap.dedent(
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
            - [2, 1, -1]
        """
    )
    cfg = parse_config(text, SPECTRUM)
    assert cfg.spectrum.mode_list() == [ModeIndex3(1), ModeIndex3(2, 1, -1)]

    errors = _errors(text.replace("[2, 1, -1]", "[0, 1, -1]"), SPECTRUM)
    assert errors == ["<config>:11: n_x must be >= 1, got 0"]

    bounded = parse_config(text.split("spectrum:")[0], SPECTRUM)
    modes = bounded.spectrum.mode_list()
    assert len(modes) == 5 * 3 * 3
    assert modes[0] == ModeIndex3(1, -1, -1)


def test_grid_window():
    text = PROFILE_TEXT + "  window: [0.5, 1.0]\n"
    assert parse_config(text).grid.window == (0.5, 1.0)
    errors = _errors(PROFILE_TEXT + "  window: [0.5, 0.2]\n")
    assert any("window must satisfy" in error for error in errors)


def test_metadata_block_is_ignored():
    text = PROFILE_TEXT + "metadata:\n  software: Movable Wall\n"
    cfg = parse_config(text)
    assert "metadata" not in cfg.document
    assert cfg == parse_config(PROFILE_TEXT)


def test_overrides():
    cfg = parse_config(
        PROFILE_TEXT, overrides={("grid", "points"): 7, ("output", "directory"): "out"}
    )
    assert cfg.grid.points == 7
    assert cfg.output.directory == "out"

    document = {"grid": {"points": 3}}
    assert apply_overrides(document, {("grid", "points"): 9}) == {"grid": {"points": 9}}
    assert document == {"grid": {"points": 3}}


def test_line_index():
    index = line_index(PROFILE_TEXT)
    assert index[("scenario",)] == 1
    assert index[("cavity", "omega_cut")] == 6
    assert index[("grid", "points")] == 8
    assert line_index("cavity: [1, 2") == {}


def test_malformed_documents():
    with pytest.raises(ConfigError, match="not valid YAML"):
        parse_config("cavity: [1, 2")
    with pytest.raises(ConfigError, match="a run configuration is a mapping"):
        parse_config("- 1\n- 2\n")


def test_load_config_sources(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(PROFILE_TEXT)
    assert load_config(str(path)) == parse_config(PROFILE_TEXT, source=str(path))

    with pytest.raises(ConfigError, match="exactly one"):
        load_config()
    with pytest.raises(ConfigError, match="exactly one"):
        load_config(str(path), "fig1")
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "missing.yaml"))
