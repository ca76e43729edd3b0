"""Numba-jitted periodic stencil kernels.

Same arithmetic, same association order as the numpy backend — no fastmath,
no parallel loops — so results are bitwise identical and runs stay
deterministic.  Importing this module requires numba.
"""

from __future__ import annotations

import numpy as np
from numba import njit

name = "numba"


@njit(cache=True)
def _d1_1d(u, h):
    m = u.shape[0]
    out = np.empty_like(u)
    for i in range(m):
        ip = i + 1 if i + 1 < m else 0
        im = i - 1 if i >= 1 else m - 1
        out[i] = (u[ip] - u[im]) / (2.0 * h)
    return out


@njit(cache=True)
def _d2_1d(u, h):
    m = u.shape[0]
    out = np.empty_like(u)
    for i in range(m):
        ip = i + 1 if i + 1 < m else 0
        im = i - 1 if i >= 1 else m - 1
        out[i] = (u[ip] - 2.0 * u[i] + u[im]) / (h * h)
    return out


@njit(cache=True)
def _d1_2d_ax0(u, h):
    mx, my = u.shape
    out = np.empty_like(u)
    for i in range(mx):
        ip = i + 1 if i + 1 < mx else 0
        im = i - 1 if i >= 1 else mx - 1
        for j in range(my):
            out[i, j] = (u[ip, j] - u[im, j]) / (2.0 * h)
    return out


@njit(cache=True)
def _d1_2d_ax1(u, h):
    mx, my = u.shape
    out = np.empty_like(u)
    for i in range(mx):
        for j in range(my):
            jp = j + 1 if j + 1 < my else 0
            jm = j - 1 if j >= 1 else my - 1
            out[i, j] = (u[i, jp] - u[i, jm]) / (2.0 * h)
    return out


@njit(cache=True)
def _d2_2d_ax0(u, h):
    mx, my = u.shape
    out = np.empty_like(u)
    for i in range(mx):
        ip = i + 1 if i + 1 < mx else 0
        im = i - 1 if i >= 1 else mx - 1
        for j in range(my):
            out[i, j] = (u[ip, j] - 2.0 * u[i, j] + u[im, j]) / (h * h)
    return out


@njit(cache=True)
def _d2_2d_ax1(u, h):
    mx, my = u.shape
    out = np.empty_like(u)
    for i in range(mx):
        for j in range(my):
            jp = j + 1 if j + 1 < my else 0
            jm = j - 1 if j >= 1 else my - 1
            out[i, j] = (u[i, jp] - 2.0 * u[i, j] + u[i, jm]) / (h * h)
    return out


@njit(cache=True)
def _cross_2d(u, h0, h1):
    mx, my = u.shape
    out = np.empty_like(u)
    for i in range(mx):
        ip = i + 1 if i + 1 < mx else 0
        im = i - 1 if i >= 1 else mx - 1
        for j in range(my):
            jp = j + 1 if j + 1 < my else 0
            jm = j - 1 if j >= 1 else my - 1
            out[i, j] = ((u[ip, jp] - u[ip, jm]) - (u[im, jp] - u[im, jm])) / (
                4.0 * h0 * h1
            )
    return out


def diff1(u: np.ndarray, h: float, axis: int = 0) -> np.ndarray:
    u = np.ascontiguousarray(u)
    if u.ndim == 1:
        return _d1_1d(u, h)
    if u.ndim == 2:
        return _d1_2d_ax0(u, h) if axis == 0 else _d1_2d_ax1(u, h)
    raise ValueError("stencil kernels support 1D and 2D fields only")


def diff2(u: np.ndarray, h: float, axis: int = 0) -> np.ndarray:
    u = np.ascontiguousarray(u)
    if u.ndim == 1:
        return _d2_1d(u, h)
    if u.ndim == 2:
        return _d2_2d_ax0(u, h) if axis == 0 else _d2_2d_ax1(u, h)
    raise ValueError("stencil kernels support 1D and 2D fields only")


def diff_cross(u: np.ndarray, h0: float, h1: float) -> np.ndarray:
    if u.ndim != 2:
        raise ValueError("diff_cross expects a 2D field")
    return _cross_2d(np.ascontiguousarray(u), h0, h1)


def warmup() -> None:
    """Trigger jit compilation of every kernel (call before timing)."""
    u1 = np.linspace(0.0, 1.0, 8)
    u2 = np.outer(u1, u1)
    _d1_1d(u1, 0.1)
    _d2_1d(u1, 0.1)
    _d1_2d_ax0(u2, 0.1)
    _d1_2d_ax1(u2, 0.1)
    _d2_2d_ax0(u2, 0.1)
    _d2_2d_ax1(u2, 0.1)
    _cross_2d(u2, 0.1, 0.1)
