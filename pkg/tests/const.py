"""Constants for Movable Wall tests."""
from movable_wall.const import CONF_L0
from movable_wall.const import CONF_LY
from movable_wall.const import CONF_LZ
from movable_wall.const import CONF_MASS
from movable_wall.const import CONF_OMEGA_CUT
from movable_wall.const import CONF_OMEGA_OSC

# Parameter set of the fig1 and fig2 presets
MOCK_CAVITY_1D = {
    CONF_L0: 1e-5,
    CONF_MASS: 1e-11,
    CONF_OMEGA_OSC: 1e5,
    CONF_OMEGA_CUT: 1e15,
}

# Reduced cutoff for three-dimensional runs that finish in seconds
MOCK_CAVITY_3D = {
    CONF_L0: 1e-5,
    CONF_LY: 5e-5,
    CONF_LZ: 5e-5,
    CONF_MASS: 1e-11,
    CONF_OMEGA_OSC: 1e5,
    CONF_OMEGA_CUT: 2e14,
}

MOCK_CONFIG_1D = {
    "scenario": "profile1d",
    "cavity": MOCK_CAVITY_1D,
    "sum_control": {"rel_tol": 1e-6},
    "grid": {"points": 40},
}
