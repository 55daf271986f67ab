"""Run configuration ingestion for Movable Wall.

A run configuration is a YAML document with one block per concern (cavity,
sum_control, grid, sweep, spectrum, output). Every error found is reported at
once, each with a ``source:line`` reference.
"""
import copy
import logging
import pathlib
import typing
from dataclasses import dataclass

import voluptuous as vol
import yaml

from .const import CONF_CAVITY
from .const import CONF_DIRECTORY
from .const import CONF_FORMAT
from .const import CONF_GRID
from .const import CONF_MAX_AXIAL
from .const import CONF_MAX_TRANSVERSE
from .const import CONF_METADATA
from .const import CONF_MODES
from .const import CONF_OUTPUT
from .const import CONF_PARAMETER
from .const import CONF_POINTS
from .const import CONF_SCENARIO
from .const import CONF_SPECTRUM
from .const import CONF_STEM
from .const import CONF_SUM_CONTROL
from .const import CONF_SWEEP
from .const import CONF_TARGET
from .const import CONF_VALUES
from .const import CONF_WINDOW
from .const import DEFAULT_DIRECTORY
from .const import DEFAULT_FORMAT
from .const import DEFAULT_GRID_POINTS
from .const import DEFAULT_SPECTRUM_MAX_AXIAL
from .const import DEFAULT_SPECTRUM_MAX_TRANSVERSE
from .const import PROFILE_1D
from .const import PROFILE_3D
from .const import SCENARIOS
from .const import SPECTRUM
from .const import SWEEP
from .const import SWEEP_PARAMETERS
from .const import SWEEP_TARGETS
from .core import CAVITY_1D_FIELDS
from .core import CAVITY_3D_FIELDS
from .core import SUM_CONTROL_FIELDS
from .core import CavityConfig
from .core import ModeIndex3
from .core import SumControl
from .core import cavity_from_dict
from .core import cavity_invariant_errors
from .core import describe_invalid
from .core import positive
from .core import sum_control_from_dict
from .exceptions import ConfigError

_LOGGER: logging.Logger = logging.getLogger(__package__)

PRESET_DIRECTORY = pathlib.Path(__file__).parent / "presets"

Path = typing.Tuple[typing.Union[str, int], ...]


@dataclass(frozen=True)
class GridSpec:
    points: int = DEFAULT_GRID_POINTS
    window: typing.Optional[typing.Tuple[float, float]] = None


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: typing.Tuple[float, ...]
    target: str = PROFILE_1D


@dataclass(frozen=True)
class SpectrumSpec:
    modes: typing.Optional[typing.Tuple[ModeIndex3, ...]] = None
    max_axial: int = DEFAULT_SPECTRUM_MAX_AXIAL
    max_transverse: int = DEFAULT_SPECTRUM_MAX_TRANSVERSE

    def mode_list(self) -> typing.List[ModeIndex3]:
        if self.modes is not None:
            return list(self.modes)
        span = range(-self.max_transverse, self.max_transverse + 1)
        return [
            ModeIndex3(n_x, n_y, n_z)
            for n_x in range(1, self.max_axial + 1)
            for n_y in span
            for n_z in span
        ]


@dataclass(frozen=True)
class OutputSpec:
    directory: str = DEFAULT_DIRECTORY
    stem: str = ""
    format: str = DEFAULT_FORMAT


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    cavity: CavityConfig
    control: SumControl
    grid: GridSpec
    output: OutputSpec
    sweep: typing.Optional[SweepSpec] = None
    spectrum: typing.Optional[SpectrumSpec] = None
    document: typing.Optional[dict] = None  # validated document, echoed in sidecars

    @property
    def three_dimensional(self) -> bool:
        return _three_dimensional(
            self.scenario, self.sweep.target if self.sweep else None
        )


def _three_dimensional(scenario: str, target: typing.Optional[str]) -> bool:
    return scenario in (PROFILE_3D, SPECTRUM) or (
        scenario == SWEEP and target == PROFILE_3D
    )


def _mode(value) -> ModeIndex3:
    try:
        return ModeIndex3(*value)
    except ValueError as exception:
        raise vol.Invalid(str(exception)) from exception


def _window(value):
    start, stop = value
    if not 0.0 <= start < stop <= 1.0:
        raise vol.Invalid("window must satisfy 0 <= a < b <= 1")
    return [start, stop]


GRID_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_POINTS, default=DEFAULT_GRID_POINTS): vol.All(
            int, vol.Range(min=1, msg=f"{CONF_POINTS} must be >= 1")
        ),
        vol.Optional(CONF_WINDOW): vol.All(
            [vol.Coerce(float)],
            vol.Length(min=2, max=2, msg="window must hold two fractions of L0"),
            _window,
        ),
    }
)

SWEEP_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_PARAMETER): vol.In(
            SWEEP_PARAMETERS,
            msg=f"sweep parameter must be one of {', '.join(SWEEP_PARAMETERS)}",
        ),
        vol.Required(CONF_VALUES): vol.All(
            [positive(CONF_VALUES)],
            vol.Length(min=1, msg="sweep values must not be empty"),
        ),
        vol.Optional(CONF_TARGET, default=PROFILE_1D): vol.In(SWEEP_TARGETS),
    }
)

SPECTRUM_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_MODES): [
            vol.All([int], vol.Length(min=3, max=3, msg="a mode is [n_x, n_y, n_z]"))
        ],
        vol.Optional(CONF_MAX_AXIAL, default=DEFAULT_SPECTRUM_MAX_AXIAL): vol.All(
            int, vol.Range(min=1)
        ),
        vol.Optional(
            CONF_MAX_TRANSVERSE, default=DEFAULT_SPECTRUM_MAX_TRANSVERSE
        ): vol.All(int, vol.Range(min=0)),
    }
)


def _output_schema(scenario: str) -> vol.Schema:
    return vol.Schema(
        {
            vol.Optional(CONF_DIRECTORY, default=DEFAULT_DIRECTORY): str,
            vol.Optional(CONF_STEM, default=scenario): str,
            vol.Optional(CONF_FORMAT, default=DEFAULT_FORMAT): vol.In(
                [DEFAULT_FORMAT]
            ),
        }
    )


def _run_schema(scenario: str, three_dimensional: bool) -> vol.Schema:
    fields = {
        vol.Optional(CONF_SCENARIO): vol.In(SCENARIOS),
        vol.Required(CONF_CAVITY): vol.Schema(
            CAVITY_3D_FIELDS if three_dimensional else CAVITY_1D_FIELDS
        ),
        vol.Optional(CONF_SUM_CONTROL, default={}): vol.Schema(SUM_CONTROL_FIELDS),
        vol.Optional(CONF_GRID, default={}): GRID_SCHEMA,
        vol.Optional(CONF_OUTPUT, default={}): _output_schema(scenario),
        vol.Optional(CONF_METADATA): object,
    }
    if scenario == SWEEP:
        fields[vol.Required(CONF_SWEEP)] = SWEEP_SCHEMA
    if scenario == SPECTRUM:
        fields[vol.Optional(CONF_SPECTRUM, default={})] = SPECTRUM_SCHEMA
    return vol.Schema(fields)


def line_index(text: str) -> typing.Dict[Path, int]:
    """Map key paths of a YAML document to 1-based line numbers."""
    index: typing.Dict[Path, int] = {}

    def walk(node, path: Path) -> None:
        if isinstance(node, yaml.MappingNode):
            for key, value in node.value:
                # a key's line, not its value's, locates errors below it
                index[path + (key.value,)] = key.start_mark.line + 1
                walk(value, path + (key.value,))
        elif isinstance(node, yaml.SequenceNode):
            for position, value in enumerate(node.value):
                index[path + (position,)] = value.start_mark.line + 1
                walk(value, path + (position,))

    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return index
    if root is not None:
        index[()] = root.start_mark.line + 1
        walk(root, ())
    return index


def _locate(index: typing.Dict[Path, int], path: Path, source: str) -> str:
    for end in range(len(path), -1, -1):
        if tuple(path[:end]) in index:
            return f"{source}:{index[tuple(path[:end])]}"
    return source


def _swept_cavity_errors(document: dict) -> typing.List[typing.Tuple[Path, str]]:
    sweep, cavity = document.get(CONF_SWEEP), document[CONF_CAVITY]
    if not sweep:
        return [((CONF_CAVITY,), message) for message in cavity_invariant_errors(cavity)]
    errors = []
    for position, value in enumerate(sweep[CONF_VALUES]):
        swept = {**cavity, sweep[CONF_PARAMETER]: value}
        for message in cavity_invariant_errors(swept):
            path: Path = (CONF_SWEEP, CONF_VALUES, position)
            if sweep[CONF_PARAMETER] not in message:
                path = (CONF_CAVITY,)
            errors.append((path, f"{message} (sweep value {value!r})"))
    # one diagnostic per distinct problem
    return list(dict.fromkeys(errors))


def apply_overrides(document: dict, overrides: typing.Dict[Path, typing.Any]) -> dict:
    document = copy.deepcopy(document)
    for path, value in overrides.items():
        node = document
        for key in path[:-1]:
            node = node.setdefault(key, {})
        node[path[-1]] = value
    return document


def parse_config(
    text: str,
    scenario: typing.Optional[str] = None,
    source: str = "<config>",
    overrides: typing.Optional[typing.Dict[Path, typing.Any]] = None,
) -> RunConfig:
    """Validate a YAML run configuration.

    ``scenario`` is the scenario requested by the caller; a document naming a
    different one is rejected. Raises ConfigError listing every problem found.
    """
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as exception:
        mark = getattr(exception, "problem_mark", None)
        where = f"{source}:{mark.line + 1}" if mark is not None else source
        raise ConfigError(f"{where}: not valid YAML ({exception})") from exception

    if document is None:
        document = {}
    if not isinstance(document, dict):
        raise ConfigError(f"{source}:1: a run configuration is a mapping")
    document = apply_overrides(document, overrides or {})
    index = line_index(text)

    declared = document.get(CONF_SCENARIO)
    if scenario is None:
        scenario = declared
    elif declared is not None and declared != scenario:
        raise ConfigError(
            f"{_locate(index, (CONF_SCENARIO,), source)}: scenario {declared!r} "
            f"conflicts with requested scenario {scenario!r}"
        )
    if scenario not in SCENARIOS:
        raise ConfigError(
            f"{_locate(index, (CONF_SCENARIO,), source)}: scenario must be one of "
            f"{', '.join(SCENARIOS)}, got {scenario!r}"
        )

    errors: typing.List[str] = []
    if scenario != SWEEP and CONF_SWEEP in document:
        errors.append(
            f"{_locate(index, (CONF_SWEEP,), source)}: "
            f"a sweep block needs scenario {SWEEP!r}"
        )
    if scenario != SPECTRUM and CONF_SPECTRUM in document:
        errors.append(
            f"{_locate(index, (CONF_SPECTRUM,), source)}: "
            f"a spectrum block needs scenario {SPECTRUM!r}"
        )
    sweep_block = document.get(CONF_SWEEP)
    target = sweep_block.get(CONF_TARGET) if isinstance(sweep_block, dict) else None
    three_dimensional = _three_dimensional(scenario, target)
    body = {
        key: value
        for key, value in document.items()
        if not (key == CONF_SWEEP and scenario != SWEEP)
        and not (key == CONF_SPECTRUM and scenario != SPECTRUM)
    }

    validated = None
    try:
        validated = _run_schema(scenario, three_dimensional)(body)
    except vol.MultipleInvalid as exception:
        for error in exception.errors:
            errors.append(
                f"{_locate(index, tuple(error.path), source)}: {describe_invalid(error)}"
            )

    if validated is not None:
        for path, message in _swept_cavity_errors(validated):
            errors.append(f"{_locate(index, path, source)}: {message}")
        if CONF_SPECTRUM in validated:
            for position, mode in enumerate(validated[CONF_SPECTRUM].get(CONF_MODES, [])):
                try:
                    _mode(mode)
                except vol.Invalid as exception:
                    path = (CONF_SPECTRUM, CONF_MODES, position)
                    errors.append(f"{_locate(index, path, source)}: {exception.msg}")

    if errors:
        _LOGGER.debug("Configuration %s rejected: %s", source, errors)
        raise ConfigError(errors)

    validated[CONF_SCENARIO] = scenario
    validated.pop(CONF_METADATA, None)
    return run_config_from_document(validated)


def run_config_from_document(document: dict) -> RunConfig:
    scenario = document[CONF_SCENARIO]
    sweep = spectrum = None
    if CONF_SWEEP in document:
        block = document[CONF_SWEEP]
        sweep = SweepSpec(
            parameter=block[CONF_PARAMETER],
            values=tuple(block[CONF_VALUES]),
            target=block[CONF_TARGET],
        )
    if CONF_SPECTRUM in document:
        block = document[CONF_SPECTRUM]
        modes = block.get(CONF_MODES)
        spectrum = SpectrumSpec(
            modes=tuple(_mode(mode) for mode in modes) if modes is not None else None,
            max_axial=block[CONF_MAX_AXIAL],
            max_transverse=block[CONF_MAX_TRANSVERSE],
        )
    grid = document[CONF_GRID]
    window = grid.get(CONF_WINDOW)
    output = document[CONF_OUTPUT]
    return RunConfig(
        scenario=scenario,
        cavity=cavity_from_dict(
            document[CONF_CAVITY], _three_dimensional(scenario, sweep and sweep.target)
        ),
        control=sum_control_from_dict(document[CONF_SUM_CONTROL]),
        grid=GridSpec(
            points=grid[CONF_POINTS], window=tuple(window) if window else None
        ),
        output=OutputSpec(
            directory=output[CONF_DIRECTORY],
            stem=output[CONF_STEM],
            format=output[CONF_FORMAT],
        ),
        sweep=sweep,
        spectrum=spectrum,
        document=document,
    )


def available_presets() -> typing.List[str]:
    return sorted(path.stem for path in PRESET_DIRECTORY.glob("*.yaml"))


def load_preset(name: str) -> str:
    path = PRESET_DIRECTORY / f"{name}.yaml"
    if not path.is_file():
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(available_presets())}"
        )
    return path.read_text()


def load_config(
    path: typing.Optional[str] = None,
    preset: typing.Optional[str] = None,
    scenario: typing.Optional[str] = None,
    overrides: typing.Optional[typing.Dict[Path, typing.Any]] = None,
) -> RunConfig:
    """Read a run configuration from a file or a bundled preset."""
    if (path is None) == (preset is None):
        raise ConfigError("give exactly one of a config file or a preset")
    if preset is not None:
        return parse_config(
            load_preset(preset), scenario, f"preset:{preset}", overrides
        )
    try:
        text = pathlib.Path(path).read_text()
    except OSError as exception:
        raise ConfigError(f"{path}: cannot read ({exception.strerror})") from exception
    return parse_config(text, scenario, path, overrides)
