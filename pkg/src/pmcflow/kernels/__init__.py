"""Periodic finite-difference stencils with selectable backend.

The hot inner loops of the pipeline are the centered-difference stencils on
the structured grid.  Two interchangeable implementations exist:

* ``numba`` — jitted loops (default when numba imports cleanly),
* ``numpy`` — ``np.roll`` arithmetic, always available.

Select with the environment variable ``PMCFLOW_BACKEND`` in {auto, numba,
numpy} (read once at import), or programmatically with :func:`set_backend`.
Both produce bitwise-identical output; ``benchmarks/bench_kernels.py``
compares their throughput.
"""

from __future__ import annotations

import os

from ..errors import ConfigError
from . import numpy_backend

_BACKENDS = ("auto", "numba", "numpy")


def _resolve(name: str):
    if name not in _BACKENDS:
        raise ConfigError(f"unknown backend {name!r}; expected one of {_BACKENDS}")
    if name == "numpy":
        return numpy_backend
    if name == "numba":
        from . import numba_backend

        return numba_backend
    try:
        from . import numba_backend

        return numba_backend
    except ImportError:
        return numpy_backend


_active = _resolve(os.environ.get("PMCFLOW_BACKEND", "auto"))


def set_backend(name: str) -> None:
    """Switch the active stencil backend ('auto', 'numba', or 'numpy')."""
    global _active
    _active = _resolve(name)


def active_backend() -> str:
    return _active.name


def get_backend(name: str):
    """Fetch a backend module by explicit name (for parity tests/benchmarks)."""
    if name == "auto":
        raise ConfigError("get_backend needs an explicit backend name")
    return _resolve(name)


def diff1(u, h: float, axis: int = 0):
    return _active.diff1(u, h, axis)


def diff2(u, h: float, axis: int = 0):
    return _active.diff2(u, h, axis)


def diff_cross(u, h0: float, h1: float):
    return _active.diff_cross(u, h0, h1)


def warmup() -> None:
    """Precompile jitted kernels if the active backend has any."""
    fn = getattr(_active, "warmup", None)
    if fn is not None:
        fn()
