"""Additive-clustering weights and size-principle statistics (C++ core)."""

from ._core import *  # noqa: F401,F403
from ._core import SizeLensError, run_cli  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
