"""Solubility of the surfaces Y^2 + Z^2 = (aT^2 + b)(cT^2 + d) over Q."""

from .descent import Decision, decide, witness_search
from .model import CanonicalSurface, canonicalize

__all__ = ["CanonicalSurface", "Decision", "canonicalize", "decide", "witness_search"]
__version__ = "0.1.0"
