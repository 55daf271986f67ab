"""Physical constants, scenario configurations, mode indexing and kinematics.

Everything here is an immutable value object or a pure function, shared by the
one-dimensional and three-dimensional cavity models.
"""
import enum
import logging
import math
import typing
from dataclasses import dataclass
from dataclasses import field

import numpy as np
import voluptuous as vol
from scipy import constants as sc

from .const import CONF_C
from .const import CONF_CUTOFF_SCHEME
from .const import CONF_HBAR
from .const import CONF_L0
from .const import CONF_LY
from .const import CONF_LZ
from .const import CONF_MASS
from .const import CONF_MAX_AXIAL
from .const import CONF_MAX_TRANSVERSE
from .const import CONF_OMEGA_CUT
from .const import CONF_OMEGA_OSC
from .const import CONF_REL_TOL
from .const import CONF_STRICT
from .const import DEFAULT_MAX_AXIAL
from .const import DEFAULT_MAX_TRANSVERSE
from .const import DEFAULT_REL_TOL
from .const import EXPONENTIAL
from .const import GRID_CHUNK_SIZE
from .const import SHARP
from .exceptions import ConfigError
from .exceptions import DomainError

_LOGGER: logging.Logger = logging.getLogger(__package__)


class CutoffScheme(str, enum.Enum):
    EXPONENTIAL = EXPONENTIAL
    SHARP = SHARP


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = sc.hbar  # J s
    c: float = sc.c  # m/s


@dataclass(frozen=True)
class Cavity1DConfig:
    """One-dimensional cavity: fixed wall at 0, mobile wall bound at L0."""

    L0: float
    M: float
    omega_osc: float
    omega_cut: float
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def as_dict(self) -> dict:
        return {
            CONF_L0: self.L0,
            CONF_MASS: self.M,
            CONF_OMEGA_OSC: self.omega_osc,
            CONF_OMEGA_CUT: self.omega_cut,
            CONF_HBAR: self.constants.hbar,
            CONF_C: self.constants.c,
        }


@dataclass(frozen=True)
class Cavity3DConfig:
    """Three-dimensional cavity, periodic across the square section S = Ly Lz."""

    L0: float
    Ly: float
    Lz: float
    M: float
    omega_osc: float
    omega_cut: float
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    @property
    def S(self) -> float:
        return self.Ly * self.Lz

    @property
    def eta(self) -> float:
        return 1.0 / self.omega_cut

    def as_dict(self) -> dict:
        return {
            CONF_L0: self.L0,
            CONF_LY: self.Ly,
            CONF_LZ: self.Lz,
            CONF_MASS: self.M,
            CONF_OMEGA_OSC: self.omega_osc,
            CONF_OMEGA_CUT: self.omega_cut,
            CONF_HBAR: self.constants.hbar,
            CONF_C: self.constants.c,
        }


CavityConfig = typing.Union[Cavity1DConfig, Cavity3DConfig]


@dataclass(frozen=True, order=True)
class ModeIndex3:
    n_x: int
    n_y: int = 0
    n_z: int = 0

    def __post_init__(self) -> None:
        if self.n_x < 1:
            raise DomainError(f"n_x must be >= 1, got {self.n_x}")

    @property
    def transverse_square(self) -> int:
        return self.n_y**2 + self.n_z**2

    def as_tuple(self) -> typing.Tuple[int, int, int]:
        return (self.n_x, self.n_y, self.n_z)


@dataclass(frozen=True)
class SumControl:
    max_axial: int = DEFAULT_MAX_AXIAL
    max_transverse: int = DEFAULT_MAX_TRANSVERSE
    rel_tol: float = DEFAULT_REL_TOL
    cutoff_scheme: CutoffScheme = CutoffScheme.EXPONENTIAL
    strict: bool = True

    def as_dict(self) -> dict:
        return {
            CONF_MAX_AXIAL: self.max_axial,
            CONF_MAX_TRANSVERSE: self.max_transverse,
            CONF_REL_TOL: self.rel_tol,
            CONF_CUTOFF_SCHEME: CutoffScheme(self.cutoff_scheme).value,
            CONF_STRICT: self.strict,
        }


# Validation schemas, shared with the run configuration parser


def _finite(key: str):
    def validator(value):
        if not math.isfinite(value):
            raise vol.Invalid(f"{key} must be finite")
        return value

    return validator


def positive(key: str):
    return vol.All(
        vol.Coerce(float),
        _finite(key),
        vol.Range(min=0, min_included=False, msg=f"{key} must be > 0"),
    )


CONSTANTS_FIELDS = {
    vol.Optional(CONF_HBAR, default=sc.hbar): positive(CONF_HBAR),
    vol.Optional(CONF_C, default=sc.c): positive(CONF_C),
}

CAVITY_1D_FIELDS = {
    vol.Required(CONF_L0): positive(CONF_L0),
    vol.Required(CONF_MASS): positive(CONF_MASS),
    vol.Required(CONF_OMEGA_OSC): positive(CONF_OMEGA_OSC),
    vol.Required(CONF_OMEGA_CUT): positive(CONF_OMEGA_CUT),
    **CONSTANTS_FIELDS,
}

CAVITY_3D_FIELDS = {
    vol.Required(CONF_L0): positive(CONF_L0),
    vol.Required(CONF_LY): positive(CONF_LY),
    vol.Required(CONF_LZ): positive(CONF_LZ),
    vol.Required(CONF_MASS): positive(CONF_MASS),
    vol.Required(CONF_OMEGA_OSC): positive(CONF_OMEGA_OSC),
    vol.Required(CONF_OMEGA_CUT): positive(CONF_OMEGA_CUT),
    **CONSTANTS_FIELDS,
}

SUM_CONTROL_FIELDS = {
    vol.Optional(CONF_MAX_AXIAL, default=DEFAULT_MAX_AXIAL): vol.All(
        int, vol.Range(min=1, msg=f"{CONF_MAX_AXIAL} must be >= 1")
    ),
    vol.Optional(CONF_MAX_TRANSVERSE, default=DEFAULT_MAX_TRANSVERSE): vol.All(
        int, vol.Range(min=0, msg=f"{CONF_MAX_TRANSVERSE} must be >= 0")
    ),
    vol.Optional(CONF_REL_TOL, default=DEFAULT_REL_TOL): vol.All(
        vol.Coerce(float),
        vol.Range(
            min=0,
            max=1,
            min_included=False,
            max_included=False,
            msg=f"{CONF_REL_TOL} must lie in (0, 1)",
        ),
    ),
    vol.Optional(CONF_CUTOFF_SCHEME, default=EXPONENTIAL): vol.All(
        vol.Lower, vol.In([EXPONENTIAL, SHARP])
    ),
    vol.Optional(CONF_STRICT, default=True): bool,
}


def cavity_invariant_errors(data: dict) -> typing.List[str]:
    """Cross-field invariants; fields that are missing or not numbers are skipped."""
    errors = []
    try:
        if float(data[CONF_OMEGA_CUT]) <= float(data[CONF_OMEGA_OSC]):
            errors.append(f"{CONF_OMEGA_CUT} must be > {CONF_OMEGA_OSC}")
    except (KeyError, TypeError, ValueError):
        pass
    if CONF_LY in data or CONF_LZ in data:
        try:
            if float(data[CONF_LY]) != float(data[CONF_LZ]):
                errors.append(f"{CONF_LY} must equal {CONF_LZ}")
        except (KeyError, TypeError, ValueError):
            pass
    return errors


def describe_invalid(error: vol.Invalid) -> str:
    if not error.path:
        return error.msg
    key = str(error.path[-1])
    if error.msg.startswith(key):
        return error.msg
    return f"{'.'.join(str(part) for part in error.path)}: {error.msg}"


def validate(config):
    """Return ``config`` unchanged if every invariant holds, else raise ConfigError."""
    if isinstance(config, Cavity3DConfig):
        fields, data = CAVITY_3D_FIELDS, config.as_dict()
    elif isinstance(config, Cavity1DConfig):
        fields, data = CAVITY_1D_FIELDS, config.as_dict()
    elif isinstance(config, SumControl):
        fields, data = SUM_CONTROL_FIELDS, config.as_dict()
    else:
        raise ConfigError(f"cannot validate {type(config).__name__}")

    errors = []
    try:
        vol.Schema(fields)(data)
    except vol.MultipleInvalid as exception:
        errors.extend(describe_invalid(error) for error in exception.errors)
    if not isinstance(config, SumControl):
        errors.extend(cavity_invariant_errors(data))

    if errors:
        raise ConfigError(errors)
    return config


def cavity_from_dict(data: dict, three_dimensional: bool) -> CavityConfig:
    constants = PhysicalConstants(hbar=data[CONF_HBAR], c=data[CONF_C])
    if three_dimensional:
        return Cavity3DConfig(
            L0=data[CONF_L0],
            Ly=data[CONF_LY],
            Lz=data[CONF_LZ],
            M=data[CONF_MASS],
            omega_osc=data[CONF_OMEGA_OSC],
            omega_cut=data[CONF_OMEGA_CUT],
            constants=constants,
        )
    return Cavity1DConfig(
        L0=data[CONF_L0],
        M=data[CONF_MASS],
        omega_osc=data[CONF_OMEGA_OSC],
        omega_cut=data[CONF_OMEGA_CUT],
        constants=constants,
    )


def sum_control_from_dict(data: dict) -> SumControl:
    return SumControl(
        max_axial=data[CONF_MAX_AXIAL],
        max_transverse=data[CONF_MAX_TRANSVERSE],
        rel_tol=data[CONF_REL_TOL],
        cutoff_scheme=CutoffScheme(data[CONF_CUTOFF_SCHEME]),
        strict=data[CONF_STRICT],
    )


# Kinematics


def omega_1d(j: int, cfg: CavityConfig) -> float:
    """Angular frequency of the j-th Dirichlet mode, j pi c / L0."""
    if j < 1:
        raise DomainError(f"mode index must be >= 1, got {j}")
    return cfg.constants.c * (j * math.pi / cfg.L0)


def omega_3d(n: ModeIndex3, cfg: Cavity3DConfig) -> float:
    c = cfg.constants.c
    q_x = n.n_x * math.pi / cfg.L0
    if n.n_y == 0 and n.n_z == 0:
        return c * q_x
    return c * math.sqrt(q_x**2 + (2 * math.pi) ** 2 * n.transverse_square / cfg.S)


def wavenumbers_3d(
    n: ModeIndex3, cfg: Cavity3DConfig
) -> typing.Tuple[float, np.ndarray]:
    q_x = n.n_x * math.pi / cfg.L0
    q_parallel = (2 * math.pi / math.sqrt(cfg.S)) * np.array(
        [n.n_y, n.n_z], dtype=float
    )
    return q_x, q_parallel


def axial_frequencies(count: int, cfg: CavityConfig) -> np.ndarray:
    """omega_1 .. omega_count, computed exactly as omega_1d does."""
    indices = np.arange(1, count + 1, dtype=float)
    return cfg.constants.c * (indices * math.pi / cfg.L0)


def channel_frequencies(
    axial: np.ndarray, transverse_square, cfg: Cavity3DConfig
) -> np.ndarray:
    """omega for axial indices combined with n_y^2 + n_z^2, broadcasting both."""
    q_x = np.asarray(axial, dtype=float) * math.pi / cfg.L0
    q_parallel_sq = (2 * math.pi) ** 2 * np.asarray(transverse_square, dtype=float)
    return cfg.constants.c * np.sqrt(q_x**2 + q_parallel_sq / cfg.S)


def transverse_frequency(n, cfg: Cavity3DConfig):
    """c |q_parallel| for transverse index magnitude n."""
    return cfg.constants.c * (2 * math.pi / math.sqrt(cfg.S)) * n


# Grids and profile diagnostics


@dataclass(frozen=True)
class PeakDiagnostics:
    height: float
    location: float
    fwhm: float


def interior_grid(
    L0: float,
    points: int,
    window: typing.Optional[typing.Tuple[float, float]] = None,
) -> np.ndarray:
    """Uniform points strictly inside (0, L0), optionally inside [a L0, b L0]."""
    start, stop = window if window is not None else (0.0, 1.0)
    if points < 1:
        raise DomainError(f"grid needs at least one point, got {points}")
    if not 0.0 <= start < stop <= 1.0:
        raise DomainError(f"grid window must satisfy 0 <= a < b <= 1, got {window}")
    fractions = np.arange(1, points + 1, dtype=float) / (points + 1)
    return L0 * (start + (stop - start) * fractions)


def _half_crossing(grid, magnitude, inside: int, outside: int, half: float) -> float:
    x_in, x_out = grid[inside], grid[outside]
    m_in, m_out = magnitude[inside], magnitude[outside]
    return float(x_out + (half - m_out) * (x_in - x_out) / (m_in - m_out))


def peak_diagnostics(grid, values) -> PeakDiagnostics:
    """Peak of |values| with its full width at half maximum.

    Widths are clipped at the grid edges when the profile does not drop to half
    its maximum on that side.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.size == 0 or grid.shape != values.shape:
        raise DomainError("peak diagnostics need matching, non-empty grid and values")

    magnitude = np.abs(values)
    peak = int(np.argmax(magnitude))
    half = magnitude[peak] / 2

    below = np.nonzero(magnitude[:peak] < half)[0]
    if below.size:
        left = _half_crossing(grid, magnitude, below[-1] + 1, below[-1], half)
    else:
        left = float(grid[0])

    below = np.nonzero(magnitude[peak + 1 :] < half)[0]
    if below.size:
        outside = peak + 1 + below[0]
        right = _half_crossing(grid, magnitude, outside - 1, outside, half)
    else:
        right = float(grid[-1])

    return PeakDiagnostics(
        height=float(values[peak]), location=float(grid[peak]), fwhm=right - left
    )


def map_grid_chunks(
    func: typing.Callable[[np.ndarray], np.ndarray],
    grid: np.ndarray,
    mapper: typing.Callable = map,
    chunk_size: int = GRID_CHUNK_SIZE,
) -> np.ndarray:
    """Apply ``func`` to fixed-size chunks of ``grid`` and join along the last axis."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("empty grid")
    chunks = [grid[i : i + chunk_size] for i in range(0, grid.size, chunk_size)]
    return np.concatenate(list(mapper(func, chunks)), axis=-1)
