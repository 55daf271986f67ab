import logging
import typing
from concurrent.futures import ThreadPoolExecutor

from .exceptions import DomainError

_LOGGER: logging.Logger = logging.getLogger(__package__)


class EvaluationCoordinator:
    """Class to manage evaluating grid chunks and mode entries on a worker pool.

    Results come back in submission order, so callers see the same sequence
    whatever the number of threads.
    """

    def __init__(self, threads: int = 1) -> None:
        """Initialize."""
        if threads < 1:
            raise DomainError(f"threads must be >= 1, got {threads}")
        self.threads = threads
        self._executor: typing.Optional[ThreadPoolExecutor] = None

    def __enter__(self) -> "EvaluationCoordinator":
        if self.threads > 1:
            _LOGGER.debug("Starting a pool of %d threads", self.threads)
            self._executor = ThreadPoolExecutor(
                max_workers=self.threads, thread_name_prefix="movable_wall"
            )
        return self

    def __exit__(self, *exc_info) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def map(
        self, func: typing.Callable, items: typing.Iterable
    ) -> typing.List[typing.Any]:
        """Evaluate ``func`` on every item, preserving order."""
        if self._executor is None:
            return list(map(func, items))
        return list(self._executor.map(func, items))
