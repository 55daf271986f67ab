"""One-dimensional electromagnetic cavity bounded by a mobile wall.

The wall is a harmonic oscillator of mass M and frequency omega_osc about its
equilibrium position L0. Its radiation-pressure coupling dresses the field
ground state with virtual pairs of photons plus one phonon; the amplitudes of
that dressed state give the first-order corrections to the local fluctuations
of E_z and B_y, and through them to the energy density and to the energy shift
of a polarizable probe.
"""
import dataclasses
import logging
import math
import typing
from dataclasses import dataclass

import numpy as np

from .const import SERIES_TOLERANCE_FACTOR
from .core import Cavity1DConfig
from .core import PeakDiagnostics
from .core import SumControl
from .core import axial_frequencies
from .core import map_grid_chunks
from .core import omega_1d
from .core import peak_diagnostics
from .exceptions import DomainError
from .exceptions import OverflowSignal
from .modesum import BilinearSumSpec
from .modesum import CutoffWeight
from .modesum import Truncation
from .modesum import check_convergence
from .modesum import compensated_reduce
from .modesum import eval_bilinear_grid
from .modesum import relative_tail
from .modesum import truncation_for
from .modesum import truncation_tail_factor

_LOGGER: logging.Logger = logging.getLogger(__package__)

SINE = "sin"
COSINE = "cos"


@dataclass(frozen=True)
class Coupling1D:
    j: int
    l: int  # noqa: E741
    value: float


@dataclass(frozen=True)
class Amplitude1D:
    j: int
    l: int  # noqa: E741
    value: float


@dataclass(frozen=True)
class PolarizableBody:
    alpha_E: float
    alpha_M: float
    x_pb: float  # m

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha_E) and math.isfinite(self.alpha_M)):
            raise DomainError("polarizabilities must be finite")


@dataclass(frozen=True)
class Density1DProfile:
    grid: np.ndarray
    e2_0: np.ndarray
    b2_0: np.ndarray
    e2_1: np.ndarray
    b2_1: np.ndarray
    rho_corr: np.ndarray
    peak: PeakDiagnostics
    meta: dict


def _check_indices(*indices: int) -> None:
    for index in indices:
        if index < 1:
            raise DomainError(f"mode index must be >= 1, got {index}")


def _sign(power: int) -> int:
    return -1 if power % 2 else 1


def coupling_C(j: int, l: int, cfg: Cavity1DConfig) -> Coupling1D:  # noqa: E741
    _check_indices(j, l)
    hbar = cfg.constants.hbar
    value = (
        _sign(j + l)
        * (hbar / 2) ** 1.5
        / (cfg.L0 * math.sqrt(cfg.M))
        * math.sqrt(omega_1d(j, cfg) * omega_1d(l, cfg) / cfg.omega_osc)
    )
    return Coupling1D(j=j, l=l, value=value)


def amplitude_D(j: int, l: int, cfg: Cavity1DConfig) -> Amplitude1D:  # noqa: E741
    _check_indices(j, l)
    omega_j, omega_l = omega_1d(j, cfg), omega_1d(l, cfg)
    value = (
        _sign(j + l)
        / cfg.L0
        * math.sqrt(
            cfg.constants.hbar * omega_j * omega_l / (8 * cfg.M * cfg.omega_osc)
        )
        / (cfg.omega_osc + omega_j + omega_l)
    )
    return Amplitude1D(j=j, l=l, value=value)


def amplitude_matrix(omegas: np.ndarray, cfg: Cavity1DConfig) -> np.ndarray:
    """D[j, l] for the modes with frequencies ``omegas`` (index 1 first)."""
    signs = np.where(np.arange(1, omegas.size + 1) % 2, -1.0, 1.0)
    numerator = np.sqrt(
        cfg.constants.hbar * np.outer(omegas, omegas) / (8 * cfg.M * cfg.omega_osc)
    )
    denominator = cfg.omega_osc + omegas[:, None] + omegas[None, :]
    return np.outer(signs, signs) * numerator / (cfg.L0 * denominator)


# Zeroth order


def _as_output(values: np.ndarray, like):
    return float(values) if np.ndim(like) == 0 else values


def _sin_squared(x, cfg: Cavity1DConfig) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or np.any(x >= cfg.L0):
        raise DomainError(f"zeroth-order fields need 0 < x < L0={cfg.L0}")
    return np.sin(np.pi * x / cfg.L0) ** 2


def _zeroth(x, cfg: Cavity1DConfig, sign: float):
    s2 = _sin_squared(x, cfg)
    with np.errstate(divide="ignore", over="ignore"):
        divergent = 1 / (8 * s2)
    if not np.all(np.isfinite(divergent)):
        raise OverflowSignal(f"sin^2(pi x / L0) underflows at x={x}")
    scale = cfg.constants.hbar * cfg.constants.c * math.pi / cfg.L0**2
    return _as_output(scale * (-1 / 24 + sign * divergent), x)


def e2_zeroth(x, cfg: Cavity1DConfig):
    """<E_z^2> of the fixed-wall cavity: -hbar c pi/24L0^2 + hbar c pi/(8 L0^2 sin^2)."""
    return _zeroth(x, cfg, 1.0)


def b2_zeroth(x, cfg: Cavity1DConfig):
    return _zeroth(x, cfg, -1.0)


def casimir_density_1d(cfg: Cavity1DConfig) -> float:
    return -cfg.constants.hbar * cfg.constants.c * math.pi / (24 * cfg.L0**2)


def near_wall_asymptotics(
    x: float, cfg: Cavity1DConfig
) -> typing.Tuple[float, float]:
    if not cfg.L0 / 2 < x < cfg.L0:
        raise DomainError(f"near-wall expansion needs L0/2 < x < L0, got {x}")
    hbar_c = cfg.constants.hbar * cfg.constants.c
    divergent = hbar_c / (8 * math.pi * (x - cfg.L0) ** 2)
    return divergent, -hbar_c * math.pi / (12 * cfg.L0**2) - divergent


# First order


@dataclass(frozen=True)
class FirstOrderSeries1D:
    """Truncated mode data shared by every first-order sum of one configuration."""

    cfg: Cavity1DConfig
    control: SumControl
    weight: CutoffWeight
    truncation: Truncation
    omegas: np.ndarray
    weights: np.ndarray
    tail_factor: float

    @classmethod
    def build(cls, cfg: Cavity1DConfig, control: SumControl) -> "FirstOrderSeries1D":
        weight = CutoffWeight(control.cutoff_scheme, cfg.omega_cut)
        truncation = truncation_for(
            dataclasses.replace(
                control, rel_tol=control.rel_tol * SERIES_TOLERANCE_FACTOR
            ),
            weight,
            lambda n: omega_1d(n, cfg),
        )
        omegas = axial_frequencies(truncation.bound, cfg)
        _LOGGER.debug(
            "1D first-order series: %d modes (natural %d)",
            truncation.bound,
            truncation.natural,
        )
        return cls(
            cfg=cfg,
            control=control,
            weight=weight,
            truncation=truncation,
            omegas=omegas,
            weights=weight.weights(omegas),
            tail_factor=truncation_tail_factor(
                truncation, weight, lambda n: omega_1d(n, cfg)
            ),
        )

    @property
    def prefactor(self) -> float:
        cfg = self.cfg
        return cfg.constants.hbar**2 / (cfg.L0**3 * cfg.M * cfg.omega_osc)

    @property
    def wavenumbers(self) -> np.ndarray:
        return self.omegas / self.cfg.constants.c

    def basis(self, kind: str) -> typing.Callable[[np.ndarray], np.ndarray]:
        trig = np.sin if kind == SINE else np.cos

        def evaluate(grid: np.ndarray) -> np.ndarray:
            return trig(self.wavenumbers[:, None] * grid[None, :])

        return evaluate

    def spec(self, kind: str) -> BilinearSumSpec:
        omegas, weights = self.omegas, self.weights
        signs = np.where(np.arange(1, omegas.size + 1) % 2, -1.0, 1.0)
        inner = (signs * omegas * weights)[None, :] / (
            self.cfg.omega_osc + omegas[:, None] + omegas[None, :]
        )
        return BilinearSumSpec(
            outer_weights=self.prefactor * omegas * weights,
            left=inner,
            right=inner,
            left_basis=self.basis(kind),
            right_basis=self.basis(kind),
            tail_factor=self.tail_factor,
        )


def _check_closed(x, cfg: Cavity1DConfig) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(grid < 0) or np.any(grid > cfg.L0):
        raise DomainError(f"first-order fields need 0 <= x <= L0={cfg.L0}")
    return grid


def _first(x, cfg: Cavity1DConfig, control: SumControl, kind: str, what: str):
    grid = _check_closed(x, cfg)
    result = eval_bilinear_grid(FirstOrderSeries1D.build(cfg, control).spec(kind), grid)
    check_convergence(relative_tail(result.tail, result.magnitude), control, what)
    return float(result.values[0]) if np.ndim(x) == 0 else result.values


def e2_first(x, cfg: Cavity1DConfig, control: SumControl):
    """First-order correction to <E_z^2>, nonnegative as a weighted sum of squares."""
    return _first(x, cfg, control, SINE, "e2_first")


def b2_first(x, cfg: Cavity1DConfig, control: SumControl):
    return _first(x, cfg, control, COSINE, "b2_first")


def energy_density_correction(x, cfg: Cavity1DConfig, control: SumControl):
    return (e2_first(x, cfg, control) + b2_first(x, cfg, control)) / 2


def energy_density_correction_direct(
    x: float, cfg: Cavity1DConfig, control: SumControl
) -> float:
    """Brute-force triple sum in the cos[(k_l - k_r) x] form."""
    grid = _check_closed(x, cfg)
    series = FirstOrderSeries1D.build(cfg, control)
    omegas, weights, k = series.omegas, series.weights, series.wavenumbers
    signs = np.where(np.arange(1, omegas.size + 1) % 2, -1.0, 1.0)
    den = cfg.omega_osc + omegas[:, None] + omegas[None, :]

    # axes (j, l, r), flattened in lexicographic order
    terms = (
        series.prefactor
        / 2
        * (omegas * weights)[:, None, None]
        * (signs * omegas * weights)[None, :, None]
        * (signs * omegas * weights)[None, None, :]
        / (den[:, :, None] * den[:, None, :])
        * np.cos((k[:, None] - k[None, :]) * grid[0])[None, :, :]
    )
    return float(compensated_reduce(terms.ravel()))


def propagator_correction(
    x: float,
    t: float,
    x_prime: float,
    t_prime: float,
    cfg: Cavity1DConfig,
    control: SumControl,
) -> float:
    """First-order correction to the renormalized propagator of the dressed ground state.

    8 hbar c^2/L0 sum_jlr D_lj D_jr w_j w_l w_r cos(w_l t - w_r t') sin(k_l x) sin(k_r x')
    / sqrt(w_l w_r), split over cos(a - b) = cos a cos b + sin a sin b.
    """
    series = FirstOrderSeries1D.build(cfg, control)
    omegas, weights, k = series.omegas, series.weights, series.wavenumbers
    D = amplitude_matrix(omegas, cfg)
    scaled = D * (weights / np.sqrt(omegas))[None, :]
    outer = 8 * cfg.constants.hbar * cfg.constants.c**2 / cfg.L0 * weights

    total = 0.0
    for trig in (np.cos, np.sin):
        left = compensated_reduce(scaled * (trig(omegas * t) * np.sin(k * x)), axis=-1)
        right = compensated_reduce(
            scaled * (trig(omegas * t_prime) * np.sin(k * x_prime)), axis=-1
        )
        total += compensated_reduce(outer * left * right)
    return float(total)


def correlations_from_propagator(
    propagator: typing.Callable[[float, float, float, float], float],
    x: float,
    t: float,
    cfg: Cavity1DConfig,
    time_step: typing.Optional[float] = None,
    space_step: typing.Optional[float] = None,
) -> typing.Tuple[float, float]:
    """<E^2> = c^-2 d_t d_t' G and <B^2> = d_x d_x' G at coincident points.

    Mixed derivatives are taken by central differences.
    """
    h = time_step if time_step is not None else 1e-3 / cfg.omega_cut
    d = space_step if space_step is not None else 1e-3 * cfg.constants.c / cfg.omega_cut

    def mixed(shifted: typing.Callable[[float, float], float], step: float) -> float:
        return (
            shifted(step, step)
            - shifted(step, -step)
            - shifted(-step, step)
            + shifted(-step, -step)
        ) / (4 * step**2)

    e2 = mixed(lambda a, b: propagator(x, t + a, x, t + b), h) / cfg.constants.c**2
    b2 = mixed(lambda a, b: propagator(x + a, t, x + b, t), d)
    return e2, b2


def casimir_polder_shift(
    body: PolarizableBody, cfg: Cavity1DConfig, control: SumControl
) -> float:
    """Energy shift -alpha_E <E^2>/2 - alpha_M <B^2>/2 of a probe at x_pb."""
    if not 0 < body.x_pb < cfg.L0:
        raise DomainError(f"probe must sit inside (0, L0), got {body.x_pb}")
    e2 = e2_zeroth(body.x_pb, cfg) + e2_first(body.x_pb, cfg, control)
    b2 = b2_zeroth(body.x_pb, cfg) + b2_first(body.x_pb, cfg, control)
    return -0.5 * body.alpha_E * e2 - 0.5 * body.alpha_M * b2


# Profiles


def density_profile_1d(
    cfg: Cavity1DConfig,
    control: SumControl,
    grid,
    mapper: typing.Callable = map,
) -> Density1DProfile:
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise DomainError("profile grid must be non-empty and strictly increasing")
    series = FirstOrderSeries1D.build(cfg, control)
    e_spec, b_spec = series.spec(SINE), series.spec(COSINE)

    def evaluate(chunk: np.ndarray) -> np.ndarray:
        e, b = eval_bilinear_grid(e_spec, chunk), eval_bilinear_grid(b_spec, chunk)
        return np.stack(
            [
                e2_zeroth(chunk, cfg),
                b2_zeroth(chunk, cfg),
                e.values,
                b.values,
                e.tail,
                e.magnitude,
                b.tail,
                b.magnitude,
            ]
        )

    e2_0, b2_0, e2_1, b2_1, e_tail, e_mag, b_tail, b_mag = map_grid_chunks(
        evaluate, grid, mapper
    )
    tails = {
        "e2_first": relative_tail(e_tail, e_mag),
        "b2_first": relative_tail(b_tail, b_mag),
    }
    for what, tail in tails.items():
        check_convergence(tail, control, what)

    rho_corr = (e2_1 + b2_1) / 2
    peak = peak_diagnostics(grid, rho_corr)
    meta = {
        "casimir_density": casimir_density_1d(cfg),
        "truncation": {
            "axial": series.truncation.bound,
            "natural": series.truncation.natural,
            "clamped": series.truncation.clamped,
        },
        "tail_estimates": tails,
        "peak": dataclasses.asdict(peak),
    }
    return Density1DProfile(
        grid=grid,
        e2_0=e2_0,
        b2_0=b2_0,
        e2_1=e2_1,
        b2_1=b2_1,
        rho_corr=rho_corr,
        peak=peak,
        meta=meta,
    )
