"""Regularized summation engine.

Cutoff weights, compensated accumulation, the factorized evaluation of sums that
share one index between two partial sums, and tail estimates.
"""
import logging
import math
import typing
from dataclasses import dataclass

import numpy as np

from .const import TRUNCATION_SEARCH_LIMIT
from .core import CutoffScheme
from .core import SumControl
from .exceptions import DomainError
from .exceptions import NonConvergence

_LOGGER: logging.Logger = logging.getLogger(__package__)


@dataclass(frozen=True)
class CutoffWeight:
    scheme: CutoffScheme
    omega_cut: float  # 1/s

    def weights(self, omegas) -> np.ndarray:
        """Vectorized weight for an array of nonnegative frequencies."""
        omegas = np.asarray(omegas, dtype=float)
        if CutoffScheme(self.scheme) is CutoffScheme.SHARP:
            return np.where(omegas <= self.omega_cut, 1.0, 0.0)
        return np.exp(-omegas / self.omega_cut)


def cutoff_weight(omega: float, w: CutoffWeight) -> float:
    if omega < 0:
        raise DomainError(f"frequency must be >= 0, got {omega}")
    if CutoffScheme(w.scheme) is CutoffScheme.SHARP:
        return 1.0 if omega <= w.omega_cut else 0.0
    return math.exp(-omega / w.omega_cut)


def compensated_sum(terms: typing.Iterable[float]) -> float:
    """Correctly rounded sum of a finite sequence; empty gives 0."""
    return math.fsum(terms)


class NeumaierAccumulator:
    """Elementwise compensated running sum of equally shaped arrays."""

    def __init__(self, shape) -> None:
        self.total = np.zeros(shape)
        self.compensation = np.zeros(shape)

    def add(self, term: np.ndarray) -> None:
        updated = self.total + term
        self.compensation += np.where(
            np.abs(self.total) >= np.abs(term),
            (self.total - updated) + term,
            (term - updated) + self.total,
        )
        self.total = updated

    @property
    def value(self) -> np.ndarray:
        return self.total + self.compensation


def compensated_reduce(terms, axis: int = -1) -> np.ndarray:
    """Neumaier sum along ``axis`` in ascending index order.

    Only elementwise operations are used, so the result at any position does not
    depend on what else is in the array.
    """
    terms = np.moveaxis(np.asarray(terms, dtype=float), axis, 0)
    accumulator = NeumaierAccumulator(terms.shape[1:])
    for term in terms:
        accumulator.add(term)
    return accumulator.value


@dataclass(frozen=True)
class BilinearSumSpec:
    """Sum over j of w_j (sum_l a(j,l) u_l(x)) (sum_r a'(j,r) v_r(x)).

    Leading axes of the coefficient arrays are independent batch entries that
    share the basis functions. Bases map a grid of shape (G,) to (L, G).
    """

    outer_weights: np.ndarray  # (..., J)
    left: np.ndarray  # (..., J, L)
    right: np.ndarray  # (..., J, R)
    left_basis: typing.Callable[[np.ndarray], np.ndarray]
    right_basis: typing.Callable[[np.ndarray], np.ndarray]
    tail_factor: float = 0.0

    def __post_init__(self) -> None:
        outer, left, right = (
            np.asarray(self.outer_weights),
            np.asarray(self.left),
            np.asarray(self.right),
        )
        if 0 in outer.shape or 0 in left.shape or 0 in right.shape:
            raise DomainError("bilinear sum needs non-empty index ranges")
        if left.shape[:-1] != outer.shape or right.shape[:-1] != outer.shape:
            raise DomainError(
                f"coefficient shapes {left.shape} and {right.shape} do not match "
                f"outer weights {outer.shape}"
            )


@dataclass(frozen=True)
class SumResult:
    value: float
    tail_estimate: float  # relative
    terms_used: int


@dataclass(frozen=True)
class BilinearGridResult:
    values: np.ndarray  # (..., G)
    tail: np.ndarray  # absolute, (..., G)
    magnitude: np.ndarray  # sum of |outer terms|, (..., G)


def _partial_sums(coefficients: np.ndarray, basis: np.ndarray) -> np.ndarray:
    # (..., J, L) x (L, G) -> (..., J, G), one inner index at a time
    accumulator = NeumaierAccumulator(coefficients.shape[:-1] + basis.shape[-1:])
    for inner in range(coefficients.shape[-1]):
        accumulator.add(coefficients[..., inner, None] * basis[inner])
    return accumulator.value


def eval_bilinear_grid(spec: BilinearSumSpec, grid) -> BilinearGridResult:
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    left = _partial_sums(np.asarray(spec.left, dtype=float), spec.left_basis(grid))
    right = _partial_sums(np.asarray(spec.right, dtype=float), spec.right_basis(grid))
    outer_terms = np.asarray(spec.outer_weights, dtype=float)[..., None] * left * right

    values = compensated_reduce(outer_terms, axis=-2)
    magnitude = compensated_reduce(np.abs(outer_terms), axis=-2)
    tail = np.abs(outer_terms[..., -1, :]) * spec.tail_factor
    return BilinearGridResult(values=values, tail=tail, magnitude=magnitude)


def eval_bilinear(spec: BilinearSumSpec, x: float) -> SumResult:
    if np.ndim(spec.outer_weights) != 1:
        raise DomainError("eval_bilinear takes an unbatched spec")
    result = eval_bilinear_grid(spec, [x])
    outer, inner_left = np.shape(spec.left)
    inner_right = np.shape(spec.right)[-1]
    return SumResult(
        value=float(result.values[0]),
        tail_estimate=relative_tail(result.tail[0], result.magnitude[0]),
        terms_used=outer * inner_left * inner_right,
    )


def relative_tail(tail, magnitude) -> float:
    tail, magnitude = float(np.max(tail)), float(np.max(magnitude))
    if magnitude == 0:
        return 0.0
    return tail / magnitude


@dataclass(frozen=True)
class Truncation:
    bound: int
    natural: int
    clamped: bool


def truncation_for(
    control: SumControl,
    w: CutoffWeight,
    omega_of_index: typing.Callable[[int], float],
    maximum: typing.Optional[int] = None,
) -> Truncation:
    """Smallest index whose cutoff weight falls below ``control.rel_tol``.

    Under the sharp scheme the bound is the last index still inside the band.
    The result is clamped to ``maximum`` (``control.max_axial`` by default).
    """
    maximum = control.max_axial if maximum is None else maximum

    def below(n: int) -> bool:
        return cutoff_weight(omega_of_index(n), w) < control.rel_tol

    if control.rel_tol >= 1:
        natural = 1
    else:
        high = 1
        while not below(high) and high < TRUNCATION_SEARCH_LIMIT:
            high *= 2
        low = high // 2
        # below(low) is false unless low == 0
        while high - low > 1:
            middle = (low + high) // 2
            if below(middle):
                high = middle
            else:
                low = middle
        natural = high
        if CutoffScheme(w.scheme) is CutoffScheme.SHARP:
            natural = max(natural - 1, 1)

    clamped = natural > maximum
    if clamped:
        _LOGGER.warning(
            "Truncation clamped from %d to %d (omega_cut=%.3e)",
            natural,
            maximum,
            w.omega_cut,
        )
    return Truncation(bound=min(natural, maximum), natural=natural, clamped=clamped)


def tail_factor(
    w: CutoffWeight, omega_last: float, omega_next: float, remaining: int = 0
) -> float:
    """Multiplier turning the last retained term into a bound on the omitted ones."""
    if CutoffScheme(w.scheme) is CutoffScheme.SHARP:
        return float(remaining)
    ratio = math.exp(-(omega_next - omega_last) / w.omega_cut)
    if ratio >= 1:
        return math.inf
    return ratio / (1 - ratio)


def truncation_tail_factor(
    truncation: Truncation,
    w: CutoffWeight,
    omega_of_index: typing.Callable[[int], float],
) -> float:
    remaining = truncation.natural - truncation.bound if truncation.clamped else 0
    return tail_factor(
        w,
        omega_of_index(truncation.bound),
        omega_of_index(truncation.bound + 1),
        remaining,
    )


def check_convergence(tail: float, control: SumControl, what: str) -> float:
    """Raise NonConvergence (strict) or warn when ``tail`` exceeds rel_tol."""
    if tail > control.rel_tol:
        if control.strict:
            raise NonConvergence(what, tail, control.rel_tol)
        _LOGGER.warning(
            "%s: tail estimate %.3e exceeds rel_tol %.3e", what, tail, control.rel_tol
        )
    else:
        _LOGGER.debug("%s: tail estimate %.3e", what, tail)
    return tail
