"""Stencil kernels: accuracy, backend parity, and dispatch."""

from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pmcflow import kernels
from pmcflow.errors import ConfigError

numpy_be = kernels.get_backend("numpy")
numba_be = kernels.get_backend("numba")


def wave_1d(m: int):
    x = np.arange(m) * (2.0 * np.pi / m)
    return x, np.sin(x) + 0.3 * np.cos(2.0 * x)


def wave_2d(mx: int, my: int):
    x = np.arange(mx) * (2.0 * np.pi / mx)
    y = np.arange(my) * (2.0 * np.pi / my)
    X, Y = np.meshgrid(x, y, indexing="ij")
    return X, Y, np.sin(X) * np.cos(2.0 * Y)


class TestAccuracy:
    def test_diff1_truncation_bound(self):
        m = 64
        h = 2.0 * np.pi / m
        x, u = wave_1d(m)
        exact = np.cos(x) - 0.6 * np.sin(2.0 * x)
        # |error| <= h^2/6 * max |f'''| for the centered stencil
        bound = h**2 / 6.0 * np.max(np.abs(np.cos(x) + 2.4 * np.sin(2.0 * x)))
        assert np.max(np.abs(kernels.diff1(u, h) - exact)) <= bound * 1.01

    def test_diff2_convergence_order(self):
        errs = []
        for m in (32, 64, 128):
            h = 2.0 * np.pi / m
            x, u = wave_1d(m)
            exact = -np.sin(x) - 1.2 * np.cos(2.0 * x)
            errs.append(np.max(np.abs(kernels.diff2(u, h) - exact)))
        orders = [np.log2(errs[k] / errs[k + 1]) for k in range(2)]
        assert min(orders) >= 1.9

    def test_diff_cross_matches_product_rule(self):
        mx, my = 48, 40
        hx, hy = 2.0 * np.pi / mx, 2.0 * np.pi / my
        X, Y, u = wave_2d(mx, my)
        exact = -2.0 * np.cos(X) * np.sin(2.0 * Y)
        err = np.max(np.abs(kernels.diff_cross(u, hx, hy) - exact))
        assert err <= (hx**2 + hy**2)

    def test_constant_field_derivatives_are_exactly_zero(self):
        u = np.full((32,), 3.7)
        assert np.all(kernels.diff1(u, 0.1) == 0.0)
        assert np.all(kernels.diff2(u, 0.1) == 0.0)


class TestBackendParity:
    """numpy and numba must agree bit for bit, not just to tolerance."""

    @given(
        u=arrays(np.float64, st.integers(8, 40),
                 elements=st.floats(-1e6, 1e6, allow_nan=False, width=64)),
    )
    @settings(max_examples=50, deadline=None)
    def test_bitwise_identical_1d(self, u):
        for fn in ("diff1", "diff2"):
            a = getattr(numpy_be, fn)(u, 0.125)
            b = getattr(numba_be, fn)(u, 0.125)
            assert np.array_equal(a, b), f"{fn} differs"

    @given(
        u=arrays(np.float64, st.tuples(st.integers(8, 16), st.integers(8, 16)),
                 elements=st.floats(-1e3, 1e3, allow_nan=False, width=64)),
    )
    @settings(max_examples=30, deadline=None)
    def test_bitwise_identical_2d(self, u):
        for axis in (0, 1):
            assert np.array_equal(numpy_be.diff1(u, 0.2, axis), numba_be.diff1(u, 0.2, axis))
            assert np.array_equal(numpy_be.diff2(u, 0.2, axis), numba_be.diff2(u, 0.2, axis))
        assert np.array_equal(numpy_be.diff_cross(u, 0.2, 0.3),
                              numba_be.diff_cross(u, 0.2, 0.3))


class TestDispatch:
    def test_set_backend_round_trip(self):
        before = kernels.active_backend()
        try:
            kernels.set_backend("numpy")
            assert kernels.active_backend() == "numpy"
            kernels.set_backend("numba")
            assert kernels.active_backend() == "numba"
        finally:
            kernels.set_backend("auto")
        assert kernels.active_backend() in ("numpy", "numba")
        assert kernels.active_backend() == before or before in ("numpy", "numba")

    def test_unknown_backend_rejected(self):
        with pytest.raises(ConfigError):
            kernels.set_backend("fortran")
        with pytest.raises(ConfigError):
            kernels.get_backend("auto")

    def test_env_variable_selects_backend(self):
        script = ("import pmcflow.kernels as k; "
                  "print(k.active_backend())")
        for want in ("numpy", "numba"):
            env = dict(os.environ, PMCFLOW_BACKEND=want)
            out = subprocess.run([sys.executable, "-c", script], env=env,
                                 capture_output=True, text=True, check=True)
            assert out.stdout.strip() == want

    def test_diff_cross_requires_2d(self):
        with pytest.raises(ValueError):
            kernels.diff_cross(np.zeros(8), 0.1, 0.1)
