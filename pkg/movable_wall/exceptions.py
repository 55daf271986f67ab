"""Exceptions raised by Movable Wall."""
import typing


class MovableWallException(Exception):
    pass


class ConfigError(MovableWallException):
    """A configuration violates one or more invariants."""

    errors: typing.List[str]

    def __init__(self, errors: typing.Union[str, typing.Iterable[str]]) -> None:
        self.errors = [errors] if isinstance(errors, str) else list(errors)
        super().__init__("; ".join(self.errors))


class DomainError(MovableWallException, ValueError):
    """An argument lies outside the domain of the operation."""


class NonConvergence(MovableWallException):
    """A truncated mode sum left a tail larger than the requested tolerance."""

    def __init__(self, what: str, tail_estimate: float, rel_tol: float) -> None:
        self.what = what
        self.tail_estimate = tail_estimate
        self.rel_tol = rel_tol
        super().__init__(
            f"{what}: tail estimate {tail_estimate:.3e} exceeds rel_tol {rel_tol:.3e}"
        )


class OverflowSignal(MovableWallException, ArithmeticError):
    """A closed form overflowed at a point too close to a wall."""
