"""Named scale-factor presets for the Robertson-Walker chart family.

A preset bundles the scale function a(x0) together with its first three
derivatives in closed form. Config files refer to presets by name; arbitrary
callables can still be passed to RobertsonWalker programmatically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ScaleFactor:
    """Scale function a(x0) with derivatives up to third order."""

    name: str
    a: ArrayFn
    da: ArrayFn
    dda: ArrayFn
    ddda: ArrayFn


def _exp_neg_t(n: int) -> ScaleFactor:
    # a = e^{-t}: contracting slicing with slice mean curvature n at every level
    return ScaleFactor(
        name="exp(-t)",
        a=lambda t: np.exp(-np.asarray(t, dtype=float)),
        da=lambda t: -np.exp(-np.asarray(t, dtype=float)),
        dda=lambda t: np.exp(-np.asarray(t, dtype=float)),
        ddda=lambda t: -np.exp(-np.asarray(t, dtype=float)),
    )


def _crossing(n: int) -> ScaleFactor:
    # a = exp(-t^2/(2n)): the slice {x0 = c} has mean curvature exactly c,
    # so the flow's stationary target sits at height tau^(1/p).
    def a(t):
        t = np.asarray(t, dtype=float)
        return np.exp(-(t**2) / (2.0 * n))

    def da(t):
        t = np.asarray(t, dtype=float)
        return -(t / n) * a(t)

    def dda(t):
        t = np.asarray(t, dtype=float)
        return (t**2 / n**2 - 1.0 / n) * a(t)

    def ddda(t):
        t = np.asarray(t, dtype=float)
        return (3.0 * t / n**2 - t**3 / n**3) * a(t)

    return ScaleFactor(name="crossing", a=a, da=da, dda=dda, ddda=ddda)


def _const(n: int) -> ScaleFactor:
    # a = 1: static torus, coincides with the Minkowski family
    def zero(t):
        return np.zeros_like(np.asarray(t, dtype=float))

    return ScaleFactor(
        name="const",
        a=lambda t: np.ones_like(np.asarray(t, dtype=float)),
        da=zero,
        dda=zero,
        ddda=zero,
    )


_PRESETS: dict[str, Callable[[int], ScaleFactor]] = {
    "exp(-t)": _exp_neg_t,
    "crossing": _crossing,
    "const": _const,
}


def scale_preset(name: str, n: int) -> ScaleFactor:
    """Resolve a preset name for spatial dimension ``n``."""
    try:
        factory = _PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(_PRESETS))
        raise ConfigError(f"unknown scale preset {name!r}; known presets: {known}") from None
    return factory(n)


def preset_names() -> tuple[str, ...]:
    return tuple(sorted(_PRESETS))
