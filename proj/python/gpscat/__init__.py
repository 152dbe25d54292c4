"""Spectral toolkit for small-data scattering experiments on the periodic box."""

from ._core import *  # noqa: F401,F403
from ._core import Error, Field, Grid

__all__ = [name for name in dir() if not name.startswith("_")]
