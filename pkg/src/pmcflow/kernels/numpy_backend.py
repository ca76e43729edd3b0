"""Pure-numpy periodic stencil kernels (reference backend).

Second-order centered differences on periodic structured grids.  Expression
shapes and association order mirror the numba backend exactly so both produce
bitwise-identical output.
"""

from __future__ import annotations

import numpy as np

name = "numpy"


def diff1(u: np.ndarray, h: float, axis: int = 0) -> np.ndarray:
    """Centered first derivative along ``axis`` with periodic wrap."""
    up = np.roll(u, -1, axis=axis)
    um = np.roll(u, 1, axis=axis)
    return (up - um) / (2.0 * h)


def diff2(u: np.ndarray, h: float, axis: int = 0) -> np.ndarray:
    """Centered second derivative along ``axis`` with periodic wrap."""
    up = np.roll(u, -1, axis=axis)
    um = np.roll(u, 1, axis=axis)
    return (up - 2.0 * u + um) / (h * h)


def diff_cross(u: np.ndarray, h0: float, h1: float) -> np.ndarray:
    """Mixed second derivative of a 2D field (4-point centered cross stencil)."""
    if u.ndim != 2:
        raise ValueError("diff_cross expects a 2D field")
    upp = np.roll(np.roll(u, -1, axis=0), -1, axis=1)
    upm = np.roll(np.roll(u, -1, axis=0), 1, axis=1)
    ump = np.roll(np.roll(u, 1, axis=0), -1, axis=1)
    umm = np.roll(np.roll(u, 1, axis=0), 1, axis=1)
    return ((upp - upm) - (ump - umm)) / (4.0 * h0 * h1)
