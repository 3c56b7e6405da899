"""Exact-solution machinery for a quantum well whose width shrinks slowly.

The package evaluates bound-state data of the instantaneous well, the
difference-equation layer that resums the slow drive into contour integrands,
the contour integrals themselves (the exact mode fields), closed-form leading
asymptotics in every regime of the slow time, and an independent finite
difference propagator used to validate everything end to end.
"""

from __future__ import annotations

__version__ = "0.1.0"

from . import branches, errors

__all__ = ["branches", "errors", "__version__"]
