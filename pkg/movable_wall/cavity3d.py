"""Three-dimensional massless scalar cavity with one mobile wall.

Dirichlet walls at x = 0 and at the mobile position L0, periodic boundary
conditions across the square section S = Ly Lz. Modes are labelled by
ModeIndex3(n_x, n_y, n_z) with n_x >= 1.

Every first-order quantity couples a mode only to modes with opposite
transverse momentum, and frequencies depend on the transverse indices only
through s = n_y^2 + n_z^2. Transverse sums are therefore grouped into channels
of equal s, weighted by the number of index pairs sharing it and accumulated in
ascending s.
"""
import dataclasses
import logging
import math
import typing
from dataclasses import dataclass

import numpy as np

from .const import CHANNEL_BLOCK_SIZE
from .const import SERIES_TOLERANCE_FACTOR
from .const import TRANSVERSE_TOLERANCE_FACTOR
from .core import Cavity3DConfig
from .core import ModeIndex3
from .core import PeakDiagnostics
from .core import SumControl
from .core import channel_frequencies
from .core import map_grid_chunks
from .core import omega_3d
from .core import peak_diagnostics
from .core import transverse_frequency
from .exceptions import DomainError
from .modesum import BilinearSumSpec
from .modesum import CutoffWeight
from .modesum import NeumaierAccumulator
from .modesum import Truncation
from .modesum import check_convergence
from .modesum import compensated_reduce
from .modesum import compensated_sum
from .modesum import eval_bilinear_grid
from .modesum import relative_tail
from .modesum import truncation_for
from .modesum import truncation_tail_factor

_LOGGER: logging.Logger = logging.getLogger(__package__)

# Summed transverse frequency of the three modes in a first-order summand
FIRST_ORDER_TRANSVERSE_MODES = 3


@dataclass(frozen=True)
class GCoupling:
    k: ModeIndex3
    j: ModeIndex3
    value: float


@dataclass(frozen=True)
class Coupling3D:
    k: ModeIndex3
    j: ModeIndex3
    value: float


@dataclass(frozen=True)
class Amplitude3D:
    k: ModeIndex3
    j: ModeIndex3
    value: float


@dataclass(frozen=True)
class PhotonSpectrum:
    entries: typing.Dict[ModeIndex3, float]
    cfg: Cavity3DConfig
    control: SumControl
    tail_estimates: typing.Dict[ModeIndex3, float] = dataclasses.field(
        default_factory=dict
    )


@dataclass(frozen=True)
class Density3DProfile:
    grid: np.ndarray
    rho0: np.ndarray
    delta_rho: np.ndarray
    casimir_constant: float
    offset: float
    peak: PeakDiagnostics
    meta: dict


def _sign(power: int) -> int:
    return -1 if power % 2 else 1


def g_coupling(k: ModeIndex3, j: ModeIndex3) -> GCoupling:
    if k.n_x == j.n_x or (k.n_y, k.n_z) != (-j.n_y, -j.n_z):
        return GCoupling(k=k, j=j, value=0.0)
    value = _sign(k.n_x + j.n_x) * 2 * k.n_x * j.n_x / (j.n_x**2 - k.n_x**2)
    return GCoupling(k=k, j=j, value=value)


def g_matrix(count: int) -> np.ndarray:
    """Axial part of g for indices 1..count, zero on the diagonal."""
    n = np.arange(1, count + 1, dtype=float)
    signs = np.where(np.arange(1, count + 1) % 2, -1.0, 1.0)
    difference = n[None, :] ** 2 - n[:, None] ** 2
    np.fill_diagonal(difference, 1.0)
    g = np.outer(signs, signs) * 2 * np.outer(n, n) / difference
    np.fill_diagonal(g, 0.0)
    return g


def domega_dq(k: ModeIndex3, cfg: Cavity3DConfig) -> float:
    """Derivative of omega_k with respect to the wall position, at L0."""
    c = cfg.constants.c
    return -(c**2) * math.pi**2 * k.n_x**2 / (cfg.L0**3 * omega_3d(k, cfg))


def _coupling_prefactor(cfg: Cavity3DConfig) -> float:
    hbar = cfg.constants.hbar
    return hbar / 2 * math.sqrt(hbar / (2 * cfg.M * cfg.omega_osc))


def coupling_C3(k: ModeIndex3, j: ModeIndex3, cfg: Cavity3DConfig) -> Coupling3D:
    omega_k, omega_j = omega_3d(k, cfg), omega_3d(j, cfg)
    diagonal = domega_dq(k, cfg) if k == j else 0.0
    off_diagonal = (
        g_coupling(k, j).value / cfg.L0 * math.sqrt(omega_k / omega_j) * omega_k
    )
    return Coupling3D(
        k=k, j=j, value=_coupling_prefactor(cfg) * (diagonal - off_diagonal)
    )


def amplitude_D3(k: ModeIndex3, j: ModeIndex3, cfg: Cavity3DConfig) -> Amplitude3D:
    denominator = cfg.constants.hbar * (
        cfg.omega_osc + omega_3d(k, cfg) + omega_3d(j, cfg)
    )
    return Amplitude3D(k=k, j=j, value=coupling_C3(k, j, cfg).value / denominator)


# Photon spectrum


def _series_control(control: SumControl) -> SumControl:
    return dataclasses.replace(
        control, rel_tol=control.rel_tol * SERIES_TOLERANCE_FACTOR
    )


def _axial_truncation(
    cfg: Cavity3DConfig, control: SumControl, weight: CutoffWeight, n_y=0, n_z=0
) -> typing.Tuple[Truncation, float]:
    def omega_of_index(n: int) -> float:
        return omega_3d(ModeIndex3(n, n_y, n_z), cfg)

    truncation = truncation_for(_series_control(control), weight, omega_of_index)
    return truncation, truncation_tail_factor(truncation, weight, omega_of_index)


def _partner_indices(m_x: int, bound: int) -> np.ndarray:
    # ascending, always containing m_x itself
    return np.union1d(np.arange(1, bound + 1), [m_x])


def _photon_terms(
    m: ModeIndex3, cfg: Cavity3DConfig, weight: CutoffWeight, partners: np.ndarray
) -> np.ndarray:
    hbar, c = cfg.constants.hbar, cfg.constants.c
    omega_osc, L0 = cfg.omega_osc, cfg.L0
    omega = omega_3d(m, cfg)
    omegas = channel_frequencies(partners, m.transverse_square, cfg)
    weights = weight.weights(omega) * weight.weights(omegas)

    m_x = float(m.n_x)
    others = partners != m.n_x
    p = partners[others].astype(float)
    omega_p = omegas[others]

    terms = np.empty(partners.size)
    terms[others] = (
        hbar
        / (2 * cfg.M * L0**2)
        * (m_x * p) ** 2
        / (p**2 - m_x**2) ** 2
        * (omega**2 - omega_p**2) ** 2
        / (omega_osc * omega * omega_p * (omega_osc + omega + omega_p) ** 2)
    )
    terms[~others] = (
        math.pi**4
        * hbar
        * c**4
        * m_x**4
        / (2 * cfg.M * L0**6 * omega_osc * omega**2 * (omega_osc + 2 * omega) ** 2)
    )
    return terms * weights


def _finish_series(
    terms: np.ndarray, factor: float, control: SumControl, what: str
) -> typing.Tuple[float, float]:
    value = float(compensated_reduce(terms))
    tail = relative_tail(abs(terms[-1]) * factor, compensated_reduce(np.abs(terms)))
    check_convergence(tail, control, what)
    return value, tail


def _photon_number(
    m: ModeIndex3, cfg: Cavity3DConfig, control: SumControl
) -> typing.Tuple[float, float]:
    weight = CutoffWeight(control.cutoff_scheme, cfg.omega_cut)
    truncation, factor = _axial_truncation(cfg, control, weight, m.n_y, m.n_z)
    terms = _photon_terms(m, cfg, weight, _partner_indices(m.n_x, truncation.bound))
    return _finish_series(terms, factor, control, f"photon_number{m.as_tuple()}")


def photon_number(m: ModeIndex3, cfg: Cavity3DConfig, control: SumControl) -> float:
    """Occupation of mode m in the dressed ground state."""
    return _photon_number(m, cfg, control)[0]


def photon_number_axial(m_x: int, cfg: Cavity3DConfig, control: SumControl) -> float:
    """Occupation of (m_x, 0, 0) in the purely axial form.

    hbar/(2 M L0^2 omega_osc) sum_m' omega omega'/(omega_osc + omega + omega')^2
    """
    if m_x < 1:
        raise DomainError(f"m_x must be >= 1, got {m_x}")
    weight = CutoffWeight(control.cutoff_scheme, cfg.omega_cut)
    truncation, factor = _axial_truncation(cfg, control, weight)
    partners = _partner_indices(m_x, truncation.bound)

    omega = omega_3d(ModeIndex3(m_x), cfg)
    omegas = channel_frequencies(partners, 0, cfg)
    terms = (
        cfg.constants.hbar
        / (2 * cfg.M * cfg.L0**2 * cfg.omega_osc)
        * omega
        * omegas
        / (cfg.omega_osc + omega + omegas) ** 2
        * weight.weights(omega)
        * weight.weights(omegas)
    )
    return _finish_series(terms, factor, control, f"photon_number_axial({m_x})")[0]


def photon_spectrum(
    modes: typing.Iterable[ModeIndex3],
    cfg: Cavity3DConfig,
    control: SumControl,
    mapper: typing.Callable = map,
) -> PhotonSpectrum:
    modes = list(modes)
    results = list(mapper(lambda m: _photon_number(m, cfg, control), modes))
    return PhotonSpectrum(
        entries={m: value for m, (value, _) in zip(modes, results)},
        cfg=cfg,
        control=control,
        tail_estimates={m: tail for m, (_, tail) in zip(modes, results)},
    )


# Transverse channels


@dataclass(frozen=True)
class TransverseChannels:
    """Distinct s = n_y^2 + n_z^2 over the square |n_y|, |n_z| <= bound."""

    s: np.ndarray
    multiplicity: np.ndarray
    shell_multiplicity: np.ndarray  # pairs on the outermost square shell

    @classmethod
    def square(cls, bound: int) -> "TransverseChannels":
        n = np.arange(-bound, bound + 1)
        s = (n[:, None] ** 2 + n[None, :] ** 2).ravel()
        on_shell = (np.maximum(np.abs(n[:, None]), np.abs(n[None, :])) == bound).ravel()
        values, multiplicity = np.unique(s, return_counts=True)
        shell = np.zeros(values.size, dtype=int)
        shell_values, shell_counts = np.unique(s[on_shell], return_counts=True)
        shell[np.searchsorted(values, shell_values)] = shell_counts
        return cls(s=values, multiplicity=multiplicity, shell_multiplicity=shell)


def _transverse_truncation(
    cfg: Cavity3DConfig, control: SumControl, weight: CutoffWeight, modes: int
) -> typing.Tuple[Truncation, float]:
    def omega_of_index(n: int) -> float:
        return modes * transverse_frequency(n, cfg)

    truncation = truncation_for(
        dataclasses.replace(
            control, rel_tol=control.rel_tol * TRANSVERSE_TOLERANCE_FACTOR
        ),
        weight,
        omega_of_index,
        maximum=control.max_transverse,
    )
    return truncation, truncation_tail_factor(truncation, weight, omega_of_index)


# Zeroth order


def casimir_density_3d(cfg: Cavity3DConfig) -> float:
    return -(math.pi**2) * cfg.constants.hbar * cfg.constants.c / (1440 * cfg.L0**4)


@dataclass(frozen=True)
class ZerothOrderSeries3D:
    """Amplitudes A_p of the cos(2 pi p x / L0) terms of the fixed-wall density."""

    cfg: Cavity3DConfig
    amplitudes: np.ndarray  # (P,)
    offset: float
    axial: Truncation
    transverse: Truncation
    tail_estimate: float

    @classmethod
    def build(cls, cfg: Cavity3DConfig, control: SumControl) -> "ZerothOrderSeries3D":
        weight = CutoffWeight(control.cutoff_scheme, cfg.omega_cut)
        axial, axial_factor = _axial_truncation(cfg, control, weight)
        transverse, transverse_factor = _transverse_truncation(
            cfg, control, weight, 1
        )
        channels = TransverseChannels.square(transverse.bound)

        hbar, c, S = cfg.constants.hbar, cfg.constants.c, cfg.S
        scale = hbar / (S * cfg.L0)
        q_x = np.arange(1, axial.bound + 1, dtype=float)[:, None] * math.pi / cfg.L0
        q_parallel_sq = (2 * math.pi) ** 2 * channels.s[None, :] / S
        omegas = channel_frequencies(
            np.arange(1, axial.bound + 1)[:, None], channels.s[None, :], cfg
        )
        # (P, channels)
        terms = (
            scale
            * c**2
            * (q_x**2 + 2 * q_parallel_sq)
            / (2 * omegas)
            * weight.weights(omegas)
        )
        amplitudes = compensated_reduce(terms * channels.multiplicity, axis=-1)
        magnitude = float(compensated_reduce(np.abs(amplitudes)))
        shell = compensated_reduce(terms * channels.shell_multiplicity, axis=-1)
        absolute_tail = abs(amplitudes[-1]) * axial_factor + float(
            compensated_reduce(np.abs(shell))
        ) * transverse_factor

        # the p_x = 0 channel: no x dependence, zero-frequency mode left out
        _LOGGER.debug("Skipping the zero-frequency mode in the p_x = 0 channel")
        q_parallel = 2 * math.pi * np.sqrt(channels.s[1:] / S)
        offset_terms = (
            -scale
            * c
            * q_parallel
            * weight.weights(c * q_parallel)
            * channels.multiplicity[1:]
        )
        offset = float(compensated_reduce(offset_terms)) if offset_terms.size else 0.0

        return cls(
            cfg=cfg,
            amplitudes=amplitudes,
            offset=offset,
            axial=axial,
            transverse=transverse,
            tail_estimate=0.0 if magnitude == 0 else absolute_tail / magnitude,
        )

    def position_part(self, grid: np.ndarray) -> np.ndarray:
        p = np.arange(1, self.amplitudes.size + 1, dtype=float)
        phases = np.cos(2 * math.pi * p[:, None] * grid[None, :] / self.cfg.L0)
        return -compensated_reduce(self.amplitudes[:, None] * phases, axis=0)


def _zeroth_series(cfg: Cavity3DConfig, control: SumControl) -> ZerothOrderSeries3D:
    series = ZerothOrderSeries3D.build(cfg, control)
    check_convergence(series.tail_estimate, control, "rho_zeroth")
    return series


def rho_zeroth(x, cfg: Cavity3DConfig, control: SumControl):
    """Fixed-wall energy density: Casimir constant plus the p_x >= 1 wall terms."""
    grid = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(grid <= 0) or np.any(grid >= cfg.L0):
        raise DomainError(f"rho_zeroth needs 0 < x < L0={cfg.L0}")
    values = casimir_density_3d(cfg) + _zeroth_series(cfg, control).position_part(grid)
    return float(values[0]) if np.ndim(x) == 0 else values


def rho_zeroth_position_part(grid, cfg: Cavity3DConfig, control: SumControl):
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    return _zeroth_series(cfg, control).position_part(grid)


def rho_zeroth_offset(cfg: Cavity3DConfig, control: SumControl) -> float:
    """Constant contribution of the p_x = 0 modes, kept out of the Casimir constant."""
    return _zeroth_series(cfg, control).offset


# First order


@dataclass(frozen=True)
class DeltaRhoKernels:
    """Channel and intermediate-mode sums, left with the x dependence only.

    delta_rho(x) = sum over m, r of sin_kernel[m, r] sin(q_m x) sin(q_r x)
    + cos_kernel[m, r] cos(q_m x) cos(q_r x).
    """

    sin_kernel: np.ndarray  # (N, N)
    cos_kernel: np.ndarray  # (N, N)
    tail: float  # absolute, bounds every x
    magnitude: float  # sum of |summands| with |sin|, |cos| <= 1


@dataclass(frozen=True)
class DeltaRhoSeries:
    cfg: Cavity3DConfig
    weight: CutoffWeight
    axial: Truncation
    transverse: Truncation
    channels: TransverseChannels
    axial_factor: float
    transverse_factor: float
    kernels: typing.Optional[DeltaRhoKernels] = None

    @classmethod
    def build(cls, cfg: Cavity3DConfig, control: SumControl) -> "DeltaRhoSeries":
        weight = CutoffWeight(control.cutoff_scheme, cfg.omega_cut)
        axial, axial_factor = _axial_truncation(cfg, control, weight)
        transverse, transverse_factor = _transverse_truncation(
            cfg, control, weight, FIRST_ORDER_TRANSVERSE_MODES
        )
        channels = TransverseChannels.square(transverse.bound)
        _LOGGER.debug(
            "Delta rho series: %d axial modes, %d transverse channels",
            axial.bound,
            channels.s.size,
        )
        series = cls(
            cfg=cfg,
            weight=weight,
            axial=axial,
            transverse=transverse,
            channels=channels,
            axial_factor=axial_factor,
            transverse_factor=transverse_factor,
        )
        return dataclasses.replace(series, kernels=series._kernels())

    def amplitudes(
        self, s: np.ndarray
    ) -> typing.Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Frequencies (B, N), off-diagonal amplitudes (B, N, N) and diagonal (B, N)."""
        cfg, N = self.cfg, self.axial.bound
        hbar, c = cfg.constants.hbar, cfg.constants.c
        n = np.arange(1, N + 1, dtype=float)
        omegas = channel_frequencies(n[None, :], s[:, None], cfg)
        prefactor = _coupling_prefactor(cfg) / hbar

        off_diagonal = (
            -prefactor
            * g_matrix(N)[None, :, :]
            / cfg.L0
            * np.sqrt(omegas[:, :, None] / omegas[:, None, :])
            * omegas[:, :, None]
            / (cfg.omega_osc + omegas[:, :, None] + omegas[:, None, :])
        )
        derivative = -(c**2) * math.pi**2 * n[None, :] ** 2 / (cfg.L0**3 * omegas)
        diagonal = prefactor * derivative / (cfg.omega_osc + 2 * omegas)
        return omegas, off_diagonal, diagonal

    def _basis(self, trig) -> typing.Callable[[np.ndarray], np.ndarray]:
        q_x = np.arange(1, self.axial.bound + 1, dtype=float) * math.pi / self.cfg.L0

        def evaluate(grid: np.ndarray) -> np.ndarray:
            return trig(q_x[:, None] * grid[None, :])

        return evaluate

    def _block(self, s: np.ndarray):
        """Per-channel kernels (B, N, N) with their tail and magnitude bounds (B,)."""
        cfg = self.cfg
        c, S = cfg.constants.c, cfg.S
        omegas, off_diagonal, diagonal = self.amplitudes(s)
        N = omegas.shape[1]
        weights = self.weight.weights(omegas)
        zero_channel = (s == 0)[:, None, None]
        full = off_diagonal + zero_channel * (
            diagonal[:, :, None] * np.eye(N)[None, :, :]
        )

        # P[m, r] = sum_j w_j X[m, j] X[j, r], shared by every form of the summand
        pair = NeumaierAccumulator(full.shape)
        for j in range(N):
            pair.add(weights[:, j, None, None] * full[:, :, j, None] * full[:, j, None, :])
        pair = pair.value * weights[:, :, None] * weights[:, None, :]

        root = np.sqrt(omegas)
        q_x = np.arange(1, N + 1, dtype=float) * math.pi / cfg.L0
        transverse_sq = (4 * math.pi**2 * s / S)[:, None]
        product = root[:, :, None] * root[:, None, :]
        sin_kernel = (product / c**2 + transverse_sq[:, :, None] / product) * pair
        cos_kernel = (q_x[:, None] * q_x[None, :])[None, :, :] / product * pair

        # j = m = r inside channels with s != 0
        lone = (s != 0)[:, None] * diagonal**2 * weights**3
        modes = np.arange(N)
        lone_sin = lone * (omegas / c**2 + transverse_sq / omegas)
        lone_cos = lone * q_x[None, :] ** 2 / omegas
        sin_kernel[:, modes, modes] += lone_sin
        cos_kernel[:, modes, modes] += lone_cos

        # outer terms bounded with |sin|, |cos| <= 1, one per intermediate mode j
        bounds = np.zeros(omegas.shape)
        for factor, scale in (
            (root, 1 / c**2),
            (1 / root, transverse_sq),
            (q_x[None, :] / root, 1.0),
        ):
            coefficients = weights * factor
            left = compensated_reduce(np.abs(full) * coefficients[:, :, None], axis=1)
            right = compensated_reduce(np.abs(full) * coefficients[:, None, :], axis=2)
            bounds += np.abs(scale) * weights * left * right
        lone_bounds = np.abs(lone_sin) + np.abs(lone_cos)
        tail = (bounds[:, -1] + lone_bounds[:, -1]) * self.axial_factor
        magnitude = compensated_reduce(bounds, axis=1) + compensated_reduce(
            lone_bounds, axis=1
        )
        return sin_kernel, cos_kernel, tail, magnitude

    def _kernels(self) -> DeltaRhoKernels:
        cfg = self.cfg
        overall = 4 * cfg.constants.hbar * cfg.constants.c**2 / (cfg.S * cfg.L0)
        channels, N = self.channels, self.axial.bound
        sin_kernel = NeumaierAccumulator((N, N))
        cos_kernel = NeumaierAccumulator((N, N))
        axial_tails, transverse_tails, magnitudes = [], [], []
        for start in range(0, channels.s.size, CHANNEL_BLOCK_SIZE):
            block = slice(start, start + CHANNEL_BLOCK_SIZE)
            sin_block, cos_block, tail, magnitude = self._block(channels.s[block])
            multiplicity = overall * channels.multiplicity[block]
            sin_kernel.add(
                compensated_reduce(multiplicity[:, None, None] * sin_block, axis=0)
            )
            cos_kernel.add(
                compensated_reduce(multiplicity[:, None, None] * cos_block, axis=0)
            )
            axial_tails.append(multiplicity * tail)
            magnitudes.append(multiplicity * magnitude)
            transverse_tails.append(
                overall
                * channels.shell_multiplicity[block]
                * magnitude
                * self.transverse_factor
            )
        return DeltaRhoKernels(
            sin_kernel=sin_kernel.value,
            cos_kernel=cos_kernel.value,
            tail=compensated_sum(np.concatenate(axial_tails))
            + compensated_sum(np.concatenate(transverse_tails)),
            magnitude=compensated_sum(np.concatenate(magnitudes)),
        )

    def evaluate(self, grid: np.ndarray) -> np.ndarray:
        """Stacked (value, absolute tail, magnitude) rows over ``grid``."""
        kernels = self.kernels if self.kernels is not None else self._kernels()
        N = self.axial.bound
        values = NeumaierAccumulator(grid.shape)
        for kernel, trig in ((kernels.sin_kernel, np.sin), (kernels.cos_kernel, np.cos)):
            spec = BilinearSumSpec(
                outer_weights=np.ones(N),
                left=np.eye(N),
                right=kernel,
                left_basis=self._basis(trig),
                right_basis=self._basis(trig),
            )
            values.add(eval_bilinear_grid(spec, grid).values)
        value = values.value
        return np.stack(
            [
                value,
                np.full(grid.shape, kernels.tail),
                np.full(grid.shape, kernels.magnitude),
            ]
        )


def delta_rho(x, cfg: Cavity3DConfig, control: SumControl):
    """First-order correction to the energy density.

    Independent of the transverse position, so none is taken.
    """
    grid = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(grid < 0) or np.any(grid > cfg.L0):
        raise DomainError(f"delta_rho needs 0 <= x <= L0={cfg.L0}")
    values, tail, magnitude = DeltaRhoSeries.build(cfg, control).evaluate(grid)
    check_convergence(relative_tail(tail, magnitude), control, "delta_rho")
    return float(values[0]) if np.ndim(x) == 0 else values


def density_profile_3d(
    cfg: Cavity3DConfig,
    control: SumControl,
    grid,
    mapper: typing.Callable = map,
) -> Density3DProfile:
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise DomainError("profile grid must be non-empty and strictly increasing")
    if grid[0] <= 0 or grid[-1] >= cfg.L0:
        raise DomainError(f"profile grid must lie inside (0, L0={cfg.L0})")

    zeroth = _zeroth_series(cfg, control)
    series = DeltaRhoSeries.build(cfg, control)

    def evaluate(chunk: np.ndarray) -> np.ndarray:
        return np.vstack([zeroth.position_part(chunk)[None, :], series.evaluate(chunk)])

    position_part, values, tail, magnitude = map_grid_chunks(evaluate, grid, mapper)
    delta_tail = check_convergence(relative_tail(tail, magnitude), control, "delta_rho")

    casimir = casimir_density_3d(cfg)
    peak = peak_diagnostics(grid, values)
    meta = {
        "casimir_constant": casimir,
        "p_x0_offset": zeroth.offset,
        "truncation": {
            "rho0_axial": zeroth.axial.bound,
            "rho0_transverse": zeroth.transverse.bound,
            "delta_rho_axial": series.axial.bound,
            "delta_rho_transverse": series.transverse.bound,
            "clamped": any(
                t.clamped
                for t in (zeroth.axial, zeroth.transverse, series.axial, series.transverse)
            ),
        },
        "tail_estimates": {
            "rho0": zeroth.tail_estimate,
            "delta_rho": delta_tail,
        },
        "peak": dataclasses.asdict(peak),
    }
    return Density3DProfile(
        grid=grid,
        rho0=casimir + position_part,
        delta_rho=values,
        casimir_constant=casimir,
        offset=zeroth.offset,
        peak=peak,
        meta=meta,
    )
