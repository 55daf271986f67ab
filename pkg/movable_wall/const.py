"""Constants for Movable Wall."""
# Base component constants
NAME = "Movable Wall"
DOMAIN = "movable_wall"
VERSION = "1.0.0"

ISSUE_URL = "https://github.com/movable-wall/movable-wall/issues"

# Scenarios
PROFILE_1D = "profile1d"
PROFILE_3D = "profile3d"
SPECTRUM = "spectrum"
SWEEP = "sweep"
SCENARIOS = [PROFILE_1D, PROFILE_3D, SPECTRUM, SWEEP]
SWEEP_TARGETS = [PROFILE_1D, PROFILE_3D]

# Cutoff schemes
EXPONENTIAL = "exponential"
SHARP = "sharp"

# Configuration blocks
CONF_SCENARIO = "scenario"
CONF_CAVITY = "cavity"
CONF_SUM_CONTROL = "sum_control"
CONF_GRID = "grid"
CONF_SWEEP = "sweep"
CONF_SPECTRUM = "spectrum"
CONF_OUTPUT = "output"
CONF_METADATA = "metadata"

# Cavity keys (SI units)
CONF_L0 = "L0"  # m
CONF_LY = "Ly"  # m
CONF_LZ = "Lz"  # m
CONF_MASS = "M"  # kg
CONF_OMEGA_OSC = "omega_osc"  # 1/s
CONF_OMEGA_CUT = "omega_cut"  # 1/s
CONF_HBAR = "hbar"  # J s
CONF_C = "c"  # m/s

# Sum control keys
CONF_MAX_AXIAL = "max_axial"
CONF_MAX_TRANSVERSE = "max_transverse"
CONF_REL_TOL = "rel_tol"
CONF_CUTOFF_SCHEME = "cutoff_scheme"
CONF_STRICT = "strict"

# Grid, sweep, spectrum and output keys
CONF_POINTS = "points"
CONF_WINDOW = "window"
CONF_PARAMETER = "parameter"
CONF_VALUES = "values"
CONF_TARGET = "target"
CONF_MODES = "modes"
CONF_DIRECTORY = "directory"
CONF_STEM = "stem"
CONF_FORMAT = "format"

SWEEP_PARAMETERS = [CONF_OMEGA_CUT, CONF_MASS, CONF_OMEGA_OSC]

# Defaults
DEFAULT_MAX_AXIAL = 4000
DEFAULT_MAX_TRANSVERSE = 400
DEFAULT_REL_TOL = 1e-6
DEFAULT_GRID_POINTS = 1000
DEFAULT_SPECTRUM_MAX_AXIAL = 5
DEFAULT_SPECTRUM_MAX_TRANSVERSE = 1
DEFAULT_DIRECTORY = "."
DEFAULT_FORMAT = "csv"

# Grid points handed to one worker; fixed so results never depend on the worker count
GRID_CHUNK_SIZE = 64
# Transverse channels evaluated together in the 3D first-order sums
CHANNEL_BLOCK_SIZE = 128
# First-order series are cut where the summand weight drops this far below rel_tol
SERIES_TOLERANCE_FACTOR = 0.01
# Transverse shells grow in multiplicity with their index, so they are cut further out
TRANSVERSE_TOLERANCE_FACTOR = 1e-5
# Upper limit for the truncation search of a single index
TRUNCATION_SEARCH_LIMIT = 2**40

# Output
TABLE_SUFFIX = ".csv"
SIDECAR_SUFFIX = ".meta.yaml"

# Exit codes
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NON_CONVERGENCE = 3


STARTUP_MESSAGE = f"""
-------------------------------------------------------------------
{NAME}
Version: {VERSION}
Vacuum densities in a cavity with a quantum mobile wall.
If you have any issues with this you need to open an issue here:
{ISSUE_URL}
-------------------------------------------------------------------
"""
