"""Pseudo-spectral stochastic 2D vorticity toolkit."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
