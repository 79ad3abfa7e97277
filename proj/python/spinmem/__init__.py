"""Exact simulation of memory-assisted state transfer on spin chains."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
