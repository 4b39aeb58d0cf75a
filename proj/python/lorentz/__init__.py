"""Resonances of a random Lorentz gas of point scatterers."""

from ._lorentz import *  # noqa: F401,F403
from ._lorentz import __version__  # noqa: F401
