"""Replica count selection, weighted placement, data-loss analysis and
deterministic simulation for heterogeneous PC-cluster storage."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
