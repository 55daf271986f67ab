"""
Vacuum energy densities in a cavity bounded by a quantum mobile wall.

The one-dimensional electromagnetic model lives in ``cavity1d``, the
three-dimensional scalar model in ``cavity3d``; ``cli`` drives both from YAML
run configurations.
"""
from .const import VERSION

__version__ = VERSION
