"""Tests for the Movable Wall evaluation coordinator."""
import threading
import time

import pytest
from movable_wall.coordinator import EvaluationCoordinator
from movable_wall.exceptions import DomainError


def test_rejects_empty_pool():
    with pytest.raises(DomainError, match="threads must be >= 1, got 0"):
        EvaluationCoordinator(0)


def test_serial_map_stays_on_caller_thread():
    caller = threading.get_ident()
    with EvaluationCoordinator() as coordinator:
        assert coordinator.map(lambda item: threading.get_ident(), range(4)) == [caller] * 4


def test_results_keep_submission_order():
    def slow_square(item):
        time.sleep(0.001 * (8 - item))
        return item * item

    with EvaluationCoordinator(4) as coordinator:
        assert coordinator.map(slow_square, range(8)) == [item * item for item in range(8)]


def test_pool_size_does_not_change_results():
    items = [0.1 * item for item in range(50)]
    results = []
    for threads in (1, 2, 8):
        with EvaluationCoordinator(threads) as coordinator:
            results.append(coordinator.map(lambda value: value**3 - value, items))
    assert results[0] == results[1] == results[2]


def test_pool_shut_down_on_exit():
    coordinator = EvaluationCoordinator(2)
    with coordinator:
        assert coordinator._executor is not None
    assert coordinator._executor is None
