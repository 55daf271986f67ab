"""Command line drivers: profile1d, profile3d, spectrum and sweep runs."""
import argparse
import dataclasses
import logging
import typing

from .cavity1d import density_profile_1d
from .cavity3d import density_profile_3d
from .cavity3d import photon_number_axial
from .cavity3d import photon_spectrum
from .config import RunConfig
from .config import available_presets
from .config import load_config
from .const import CONF_DIRECTORY
from .const import CONF_GRID
from .const import CONF_METADATA
from .const import CONF_OUTPUT
from .const import CONF_POINTS
from .const import EXIT_CONFIG_ERROR
from .const import EXIT_NON_CONVERGENCE
from .const import EXIT_OK
from .const import NAME
from .const import PROFILE_1D
from .const import PROFILE_3D
from .const import SCENARIOS
from .const import SPECTRUM
from .const import STARTUP_MESSAGE
from .const import SWEEP
from .const import VERSION
from .coordinator import EvaluationCoordinator
from .core import interior_grid
from .core import validate
from .exceptions import ConfigError
from .exceptions import DomainError
from .exceptions import NonConvergence
from .exceptions import OverflowSignal
from .output import OutputBundle
from .output import Table
from .output import write_bundle

_LOGGER: logging.Logger = logging.getLogger(__package__)

Mapper = typing.Callable

UNITS_1D = {
    "x_m": "m",
    "e2_zeroth": "J/m",
    "b2_zeroth": "J/m",
    "e2_first": "J/m",
    "b2_first": "J/m",
    "rho_corr": "J/m",
}
UNITS_3D = {"x_m": "m", "rho0": "J/m^3", "delta_rho": "J/m^3"}


def _sidecar(cfg: RunConfig, metadata: dict) -> dict:
    document = dict(cfg.document or {})
    document[CONF_METADATA] = {"software": NAME, "version": VERSION, **metadata}
    return document


def _grid(cfg: RunConfig, cavity=None):
    cavity = cavity or cfg.cavity
    return interior_grid(cavity.L0, cfg.grid.points, cfg.grid.window)


def _profile1d_table(profile) -> Table:
    return Table.from_columns(
        {
            "x_m": profile.grid,
            "e2_zeroth": profile.e2_0,
            "b2_zeroth": profile.b2_0,
            "e2_first": profile.e2_1,
            "b2_first": profile.b2_1,
            "rho_corr": profile.rho_corr,
        }
    )


def _profile3d_table(profile) -> Table:
    return Table.from_columns(
        {"x_m": profile.grid, "rho0": profile.rho0, "delta_rho": profile.delta_rho}
    )


def run_profile1d(cfg: RunConfig, mapper: Mapper = map) -> OutputBundle:
    profile = density_profile_1d(cfg.cavity, cfg.control, _grid(cfg), mapper)
    return OutputBundle(
        stem=cfg.output.stem,
        tables={cfg.output.stem: _profile1d_table(profile)},
        sidecar=_sidecar(cfg, {"units": UNITS_1D, **profile.meta}),
    )


def run_profile3d(cfg: RunConfig, mapper: Mapper = map) -> OutputBundle:
    profile = density_profile_3d(cfg.cavity, cfg.control, _grid(cfg), mapper)
    return OutputBundle(
        stem=cfg.output.stem,
        tables={cfg.output.stem: _profile3d_table(profile)},
        sidecar=_sidecar(cfg, {"units": UNITS_3D, **profile.meta}),
    )


def run_spectrum(cfg: RunConfig, mapper: Mapper = map) -> OutputBundle:
    modes = cfg.spectrum.mode_list()
    spectrum = photon_spectrum(modes, cfg.cavity, cfg.control, mapper)
    table = Table.from_columns(
        {
            "m_x": [m.n_x for m in modes],
            "m_y": [m.n_y for m in modes],
            "m_z": [m.n_z for m in modes],
            "occupation": [spectrum.entries[m] for m in modes],
        }
    )
    axial = {
        m.n_x: photon_number_axial(m.n_x, cfg.cavity, cfg.control)
        for m in modes
        if m.transverse_square == 0
    }
    metadata = {
        "units": {"occupation": "dimensionless"},
        "modes": len(modes),
        "tail_estimates": {
            "occupation": max(spectrum.tail_estimates.values(), default=0.0)
        },
        "axial_occupation": axial,
    }
    return OutputBundle(
        stem=cfg.output.stem,
        tables={cfg.output.stem: table},
        sidecar=_sidecar(cfg, metadata),
    )


def run_sweep(cfg: RunConfig, mapper: Mapper = map) -> OutputBundle:
    """One profile per sweep value plus a summary of their peaks.

    Every profile is computed before anything is returned for writing.
    """
    sweep = cfg.sweep
    if sweep is None or not sweep.values:
        raise ConfigError("a sweep needs a non-empty value list")
    stem = cfg.output.stem
    bundle = OutputBundle(stem=stem)
    summary = {"sweep_value": [], "peak_height": [], "peak_location": [], "fwhm": []}
    runs = []
    for position, value in enumerate(sweep.values):
        cavity = validate(dataclasses.replace(cfg.cavity, **{sweep.parameter: value}))
        _LOGGER.info(
            "Sweep %s=%r (%d/%d)",
            sweep.parameter,
            value,
            position + 1,
            len(sweep.values),
        )
        if sweep.target == PROFILE_3D:
            profile = density_profile_3d(
                cavity, cfg.control, _grid(cfg, cavity), mapper
            )
            table = _profile3d_table(profile)
        else:
            profile = density_profile_1d(
                cavity, cfg.control, _grid(cfg, cavity), mapper
            )
            table = _profile1d_table(profile)
        bundle.tables[f"{stem}_{position}"] = table
        summary["sweep_value"].append(value)
        summary["peak_height"].append(profile.peak.height)
        summary["peak_location"].append(profile.peak.location)
        summary["fwhm"].append(profile.peak.fwhm)
        runs.append({"value": value, **profile.meta})

    bundle.tables[f"{stem}_summary"] = Table.from_columns(summary)
    bundle.sidecar = _sidecar(
        cfg,
        {
            "units": UNITS_3D if sweep.target == PROFILE_3D else UNITS_1D,
            "parameter": sweep.parameter,
            "runs": runs,
        },
    )
    return bundle


RUNNERS: typing.Dict[str, typing.Callable[[RunConfig, Mapper], OutputBundle]] = {
    PROFILE_1D: run_profile1d,
    PROFILE_3D: run_profile3d,
    SPECTRUM: run_spectrum,
    SWEEP: run_sweep,
}


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="movable_wall",
        description="Vacuum energy densities in a cavity with a quantum mobile wall.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for scenario in SCENARIOS:
        sub = subparsers.add_parser(scenario)
        source = sub.add_mutually_exclusive_group(required=True)
        source.add_argument("--config", help="YAML run configuration")
        source.add_argument(
            "--preset", help=f"bundled parameter set ({', '.join(available_presets())})"
        )
        sub.add_argument("--out", help="output directory")
        sub.add_argument("--threads", type=_positive_int, default=1)
        sub.add_argument("--grid", type=_positive_int, help="grid point count")
        sub.add_argument("--verbose", "-v", action="store_true")
    return parser


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    _LOGGER.info(STARTUP_MESSAGE)

    overrides = {}
    if args.grid is not None:
        overrides[(CONF_GRID, CONF_POINTS)] = args.grid
    if args.out is not None:
        overrides[(CONF_OUTPUT, CONF_DIRECTORY)] = args.out

    try:
        cfg = load_config(args.config, args.preset, args.command, overrides)
        with EvaluationCoordinator(args.threads) as coordinator:
            bundle = RUNNERS[args.command](cfg, coordinator.map)
        write_bundle(bundle, cfg.output.directory)
    except ConfigError as exception:
        for error in exception.errors:
            _LOGGER.error("Configuration error: %s", error)
        return EXIT_CONFIG_ERROR
    except DomainError as exception:
        _LOGGER.error("Invalid argument: %s", exception)
        return EXIT_CONFIG_ERROR
    except (NonConvergence, OverflowSignal) as exception:
        _LOGGER.error("Computation failed: %s", exception)
        return EXIT_NON_CONVERGENCE
    except OSError as exception:
        _LOGGER.error("Cannot write output: %s", exception)
        return EXIT_CONFIG_ERROR
    return EXIT_OK
