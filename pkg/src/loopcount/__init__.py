"""Exact counting of nilpotent loops of order 2q up to isotopy."""

from loopcount.errors import LoopCountError

__version__ = "0.1.0"

__all__ = ["LoopCountError", "__version__"]
