"""Quantum hyperbolic state sums K_N on decorated singular triangulations."""
from __future__ import annotations

__version__ = "0.1.0"
