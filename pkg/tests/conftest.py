"""Global fixtures for Movable Wall."""
import dataclasses
import math
from unittest.mock import patch

import pytest
from movable_wall.core import Cavity1DConfig
from movable_wall.core import Cavity3DConfig
from movable_wall.core import CutoffScheme
from movable_wall.core import SumControl
from movable_wall.exceptions import NonConvergence

from .const import MOCK_CAVITY_1D
from .const import MOCK_CAVITY_3D


@pytest.fixture(name="cavity_1d")
def cavity_1d_fixture():
    return Cavity1DConfig(**MOCK_CAVITY_1D)


@pytest.fixture(name="cavity_3d")
def cavity_3d_fixture():
    return Cavity3DConfig(**MOCK_CAVITY_3D)


# A sharp cutoff placed halfway between the N-th and (N+1)-th axial modes keeps exactly
# N unweighted modes: the finite truncation that brute-force loops can reproduce.
@pytest.fixture(name="mode_limited")
def mode_limited_fixture():
    """Return a factory of (cavity, control) pairs keeping N axial modes."""

    def factory(cfg, modes: int):
        omega_cut = (modes + 0.5) * math.pi * cfg.constants.c / cfg.L0
        cfg = dataclasses.replace(cfg, omega_cut=omega_cut)
        return cfg, SumControl(cutoff_scheme=CutoffScheme.SHARP)

    return factory


# In this fixture, we are forcing the 1D profile builder to give up. This is useful for
# exercising the exit codes and the no-partial-output rule.
@pytest.fixture(name="error_on_profile")
def error_on_profile_fixture():
    """Simulate a truncation that cannot meet its tolerance."""
    with patch(
        "movable_wall.cli.density_profile_1d",
        side_effect=NonConvergence("e2_first", 1.0, 1e-6),
    ):
        yield
