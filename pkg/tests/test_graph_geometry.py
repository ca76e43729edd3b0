"""Induced graph geometry: curvature oracles, slice fixtures, causal guards."""

from __future__ import annotations

import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmcflow import (
    GraphState,
    Grid,
    MinkowskiTorus,
    RobertsonWalker,
    assemble_fields,
    mean_curvature,
    normal_vector,
    second_fundamental_norm,
    slice_second_fundamental_form,
    spatial_gradient,
    tilt,
)
from pmcflow.errors import SpacelikeViolation
from pmcflow.graph_geometry import fields_to_csv

amp = st.floats(min_value=-0.2, max_value=0.2, allow_nan=False)


def minkowski_sine_state(m: int, amplitude: float = 0.3) -> GraphState:
    grid = Grid.regular(1, m)
    x = grid.coordinates()[..., 0]
    return GraphState(t=0.0, u=amplitude * np.sin(x), grid=grid, chart=MinkowskiTorus(1))


def curve_oracle_H(x: np.ndarray, a: float = 0.3) -> np.ndarray:
    # graph u = a sin x in 1+1 Minkowski: H = -u'' / (1 - u'^2)^{3/2} with the
    # past-normal sign convention, so H = a sin x / (1 - a^2 cos^2 x)^{3/2}
    return a * np.sin(x) / (1.0 - a**2 * np.cos(x) ** 2) ** 1.5


class TestCurvatureOracle:
    def test_1d_closed_form(self):
        state = minkowski_sine_state(128)
        fields = assemble_fields(state)
        x = state.grid.coordinates()[..., 0]
        err = np.max(np.abs(fields.H - curve_oracle_H(x)))
        assert err <= (2.0 * np.pi / 128) ** 2

    def test_1d_refinement_order(self):
        errs = []
        for m in (32, 64, 128):
            state = minkowski_sine_state(m)
            x = state.grid.coordinates()[..., 0]
            errs.append(np.max(np.abs(assemble_fields(state).H - curve_oracle_H(x))))
        orders = [np.log2(errs[k] / errs[k + 1]) for k in range(2)]
        assert min(orders) >= 1.8, f"orders {orders}"

    def test_2d_refinement_self_consistency(self):
        # no hand closed form in 2D; Richardson against the finest grid
        def h_at(m: int) -> np.ndarray:
            grid = Grid.regular(2, m)
            c = grid.coordinates()
            u = 0.1 * np.sin(c[..., 0]) + 0.1 * np.cos(c[..., 1])
            state = GraphState(t=0.0, u=u, grid=grid, chart=MinkowskiTorus(2))
            return assemble_fields(state).H

        h16, h32, h64 = h_at(16), h_at(32), h_at(64)
        e16 = np.max(np.abs(h16 - h64[::4, ::4]))
        e32 = np.max(np.abs(h32 - h64[::2, ::2]))
        assert np.log2(e16 / e32) >= 1.7


class TestTilt:
    def test_discrete_closed_form(self):
        # v is built from the centered-difference gradient, whose action on
        # sin is exactly (sin h / h) cos, so the whole chain has a closed form
        m, a = 64, 0.3
        state = minkowski_sine_state(m, a)
        v, vtilde = tilt(state.u, state.grid, state.chart)
        h = 2.0 * np.pi / m
        x = state.grid.coordinates()[..., 0]
        du = a * (np.sin(h) / h) * np.cos(x)
        np.testing.assert_allclose(v, np.sqrt(1.0 - du**2), rtol=1e-14)
        np.testing.assert_allclose(v * vtilde, 1.0, rtol=1e-14)

    def test_flat_slice_has_unit_tilt(self):
        grid = Grid.regular(2, 16)
        v, vtilde = tilt(np.zeros(grid.sizes), grid, MinkowskiTorus(2))
        assert np.all(v == 1.0) and np.all(vtilde == 1.0)

    def test_causal_guard_raises(self):
        grid = Grid.regular(1, 64)
        x = grid.coordinates()[..., 0]
        with pytest.raises(SpacelikeViolation) as info:
            tilt(1.2 * np.sin(x), grid, MinkowskiTorus(1))
        assert info.value.max_grad_sq > 1.0 - 1e-6


class TestSliceFixtures:
    @pytest.mark.parametrize("n", [1, 2])
    @pytest.mark.parametrize("c", [-0.4, 0.0, 0.8])
    def test_contracting_rw_slice_curvature(self, n, c):
        chart = RobertsonWalker(n, "exp(-t)")
        grid = Grid.regular(n, 16)
        state = GraphState(t=0.0, u=np.full(grid.sizes, c), grid=grid, chart=chart)
        fields = assemble_fields(state)
        np.testing.assert_allclose(fields.H, float(n), rtol=1e-13)
        hbar = slice_second_fundamental_form(chart, (c, grid.coordinates()[(0,) * n]))
        np.testing.assert_allclose(fields.hij[(0,) * n], hbar, rtol=1e-13)

    def test_slice_normal_is_past_directed_unit(self):
        chart = RobertsonWalker(2, "crossing")
        grid = Grid.regular(2, 12)
        nu = normal_vector(np.full(grid.sizes, 0.3), grid, chart)
        np.testing.assert_allclose(nu[..., 0], -1.0, rtol=1e-14)
        np.testing.assert_allclose(nu[..., 1:], 0.0, atol=1e-15)

    def test_minkowski_slice_is_totally_geodesic(self):
        grid = Grid.regular(1, 32)
        state = GraphState(t=0.0, u=np.full(grid.sizes, 0.7), grid=grid,
                           chart=MinkowskiTorus(1))
        fields = assemble_fields(state)
        assert np.all(fields.hij == 0.0)
        assert np.all(fields.H == 0.0)
        assert np.all(fields.normA2 == 0.0)


class TestInvariants:
    @given(a1=amp, a2=amp, c=st.floats(-0.5, 0.5, allow_nan=False))
    @settings(max_examples=40, deadline=None)
    def test_metric_inverse_normal_and_cauchy_schwarz(self, a1, a2, c):
        grid = Grid.regular(1, 32)
        x = grid.coordinates()[..., 0]
        u = c + a1 * np.sin(x) + a2 * np.cos(2.0 * x)
        state = GraphState(t=0.0, u=u, grid=grid, chart=RobertsonWalker(1, "crossing"))
        fields = assemble_fields(state)

        gg = np.einsum("...ij,...jk->...ik", fields.g, fields.ginv)
        np.testing.assert_allclose(gg, np.broadcast_to(np.eye(1), gg.shape), atol=1e-12)

        gbar = state.chart.metric(u, grid.coordinates())
        norm = np.einsum("...ab,...a,...b->...", gbar, fields.nu, fields.nu)
        np.testing.assert_allclose(norm, -1.0, atol=1e-12)
        assert np.all(fields.nu[..., 0] < 0.0)

        # Cauchy-Schwarz: H^2 = (g^ij h_ij)^2 <= n ||A||^2
        assert np.all(fields.H**2 <= 1.0 * fields.normA2 + 1e-12)

    def test_accessors_match_fields(self):
        state = minkowski_sine_state(48)
        fields = assemble_fields(state)
        np.testing.assert_array_equal(mean_curvature(fields), fields.H)
        np.testing.assert_array_equal(second_fundamental_norm(fields), fields.normA2)
        nu = normal_vector(state.u, state.grid, state.chart)
        np.testing.assert_array_equal(nu, fields.nu)


class TestGradient:
    def test_constant_field(self):
        grid = Grid.regular(2, 16)
        du = spatial_gradient(np.full(grid.sizes, 2.5), grid)
        assert np.all(du == 0.0)

    def test_sine_truncation_bound(self):
        grid = Grid.regular(1, 64)
        x = grid.coordinates()[..., 0]
        du = spatial_gradient(np.sin(x), grid)
        assert np.max(np.abs(du[..., 0] - np.cos(x))) <= (2.0 * np.pi / 64) ** 2


class TestValidation:
    def test_graph_state_shape_mismatch(self):
        grid = Grid.regular(1, 16)
        with pytest.raises(ValueError):
            GraphState(t=0.0, u=np.zeros(8), grid=grid, chart=MinkowskiTorus(1))

    def test_graph_state_rejects_nan(self):
        grid = Grid.regular(1, 16)
        u = np.zeros(grid.sizes)
        u[3] = np.nan
        with pytest.raises(ValueError):
            GraphState(t=0.0, u=u, grid=grid, chart=MinkowskiTorus(1))

    def test_graph_state_u_is_immutable(self):
        grid = Grid.regular(1, 16)
        state = GraphState(t=0.0, u=np.zeros(grid.sizes), grid=grid,
                           chart=MinkowskiTorus(1))
        with pytest.raises(ValueError):
            state.u[0] = 1.0

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            Grid(3, (8, 8, 8), (1.0, 1.0, 1.0))
        with pytest.raises(ValueError):
            Grid.regular(1, 4)
        with pytest.raises(ValueError):
            Grid(1, (16,), (-1.0,))


def test_fields_to_csv_round_trip(tmp_path):
    state = minkowski_sine_state(16)
    fields = assemble_fields(state)
    out = tmp_path / "fields.csv"
    fields_to_csv(state, fields, out)
    with out.open() as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 17  # header + one row per node
    idx = rows[0].index("H")
    got = np.array([float(r[idx]) for r in rows[1:]])
    np.testing.assert_allclose(got, fields.H, rtol=1e-15)
