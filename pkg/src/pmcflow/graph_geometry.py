"""Induced geometry of spacelike graph hypersurfaces over a periodic grid.

A hypersurface is stored as a height function u on the torus: the point above
grid node x sits at ambient coordinates (u(x), x).  This module turns u into
the induced metric, tilt, past-directed unit normal, second fundamental form,
mean curvature, and curvature norm.

Conventions (all fields evaluated at the graph, i.e. at x0 = u(x)):

    v^2      = 1 - sigma^ij u_i u_j         (spacelike iff positive)
    vtilde   = 1 / v
    g_ij     = e^{2 psi} (-u_i u_j + sigma_ij)
    g^ij     = e^{-2 psi} (u^i u^j / v^2 + sigma^ij),  u^i = sigma^ij u_j
    nu^alpha = -(1/v) e^{-psi} (1, u^i)      (past directed: nu^0 < 0)
    h_ij     = -e^psi v (u_{;ij} + G^0_00 u_i u_j + G^0_0j u_i + G^0_0i u_j + G^0_ij)
    H        = g^ij h_ij,   ||A||^2 = g^ik g^jl h_ij h_kl

where u_{;ij} = u_{,ij} - Gamma^k_ij(g) u_k is the covariant Hessian in the
induced metric and G^a_bc are ambient Christoffel symbols.  The sign puts
H = n on the coordinate slices of the a = e^{-x0} Robertson-Walker chart.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import SpacelikeViolation
from .spacetime import SpacetimeChart, _christoffel_from_dmetric

EPS_GUARD = 1e-6  # distance below |Du|^2 = 1 at which the flow must abort


@dataclass(frozen=True)
class Grid:
    """Structured periodic grid over the spatial torus."""

    n: int
    sizes: tuple[int, ...]
    periods: tuple[float, ...]

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"spatial dimension must be 1 or 2, got {self.n}")
        object.__setattr__(self, "sizes", tuple(int(m) for m in self.sizes))
        object.__setattr__(self, "periods", tuple(float(L) for L in self.periods))
        if len(self.sizes) != self.n or len(self.periods) != self.n:
            raise ValueError("sizes and periods must have one entry per axis")
        if any(m < 8 for m in self.sizes):
            raise ValueError(f"need at least 8 nodes per axis, got {self.sizes}")
        if any(L <= 0 for L in self.periods):
            raise ValueError(f"periods must be positive, got {self.periods}")

    @classmethod
    def regular(cls, n: int, size: int, period: float = 2.0 * np.pi) -> "Grid":
        return cls(n, (size,) * n, (period,) * n)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / m for L, m in zip(self.periods, self.sizes))

    def axes(self) -> list[np.ndarray]:
        return [
            np.arange(m) * (L / m) for m, L in zip(self.sizes, self.periods)
        ]

    def coordinates(self) -> np.ndarray:
        """Node coordinates, shape (*sizes, n)."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack(mesh, axis=-1)


@dataclass(frozen=True)
class GraphState:
    """Immutable snapshot of the height function at flow time t."""

    t: float
    u: np.ndarray
    grid: Grid
    chart: SpacetimeChart

    def __post_init__(self):
        u = np.array(self.u, dtype=float)  # private copy
        if u.shape != self.grid.sizes:
            raise ValueError(f"u has shape {u.shape}, grid expects {self.grid.sizes}")
        if not np.all(np.isfinite(u)):
            raise ValueError("u contains non-finite values")
        u.flags.writeable = False
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "t", float(self.t))

    def with_u(self, u: np.ndarray, t: float) -> "GraphState":
        return GraphState(t=t, u=u, grid=self.grid, chart=self.chart)


@dataclass(frozen=True)
class GeometryFields:
    """Per-node derived geometry of one GraphState."""

    du: np.ndarray      # (*sizes, n)
    v: np.ndarray       # (*sizes,)
    vtilde: np.ndarray  # (*sizes,)
    g: np.ndarray       # (*sizes, n, n)
    ginv: np.ndarray    # (*sizes, n, n)
    hij: np.ndarray     # (*sizes, n, n)
    H: np.ndarray       # (*sizes,)
    normA2: np.ndarray  # (*sizes,)
    nu: np.ndarray      # (*sizes, n+1)


def spatial_gradient(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Centered-difference gradient with periodic wrap, shape (*sizes, n)."""
    h = grid.spacing
    cols = [kernels.diff1(u, h[i], axis=i) for i in range(grid.n)]
    return np.stack(cols, axis=-1)


def _hessian(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Coordinate Hessian u_{,ij}, shape (*sizes, n, n)."""
    h = grid.spacing
    out = np.empty(u.shape + (grid.n, grid.n))
    for i in range(grid.n):
        out[..., i, i] = kernels.diff2(u, h[i], axis=i)
    if grid.n == 2:
        mixed = kernels.diff_cross(u, h[0], h[1])
        out[..., 0, 1] = mixed
        out[..., 1, 0] = mixed
    return out


def _tilt_core(u, grid, chart, eps_guard: float, t: float | None):
    coords = grid.coordinates()
    du = spatial_gradient(u, grid)
    sinv = chart.sigma_inv(u, coords)
    grad2 = np.einsum("...ij,...i,...j->...", sinv, du, du)
    worst = float(np.max(grad2))
    if worst >= 1.0 - eps_guard:
        raise SpacelikeViolation(worst, t=t)
    v = np.sqrt(1.0 - grad2)
    return coords, du, sinv, v


def tilt(u: np.ndarray, grid: Grid, chart: SpacetimeChart,
         eps_guard: float = EPS_GUARD) -> tuple[np.ndarray, np.ndarray]:
    """Per-node v and vtilde = 1/v; aborts if any node approaches the light cone."""
    _, _, _, v = _tilt_core(u, grid, chart, eps_guard, t=None)
    return v, 1.0 / v


def assemble_fields(state: GraphState, eps_guard: float = EPS_GUARD) -> GeometryFields:
    """All induced geometry of one snapshot in a single pass."""
    u, grid, chart = state.u, state.grid, state.chart
    coords, du, sinv, v = _tilt_core(u, grid, chart, eps_guard, t=state.t)
    vtilde = 1.0 / v

    psi = chart.psi(u, coords)
    sig = chart.sigma(u, coords)
    e2psi = np.exp(2.0 * psi)
    du_up = np.einsum("...ij,...j->...i", sinv, du)

    g = e2psi[..., None, None] * (sig - du[..., :, None] * du[..., None, :])
    ginv = np.exp(-2.0 * psi)[..., None, None] * (
        sinv + du_up[..., :, None] * du_up[..., None, :] / (v * v)[..., None, None]
    )

    # Christoffels of the induced metric from grid differences of the g field
    h = grid.spacing
    dg = np.empty(u.shape + (grid.n, grid.n, grid.n))
    for k in range(grid.n):
        for i in range(grid.n):
            for j in range(i, grid.n):
                dg[..., k, i, j] = kernels.diff1(g[..., i, j], h[k], axis=k)
                if j > i:
                    dg[..., k, j, i] = dg[..., k, i, j]
    gamma = _christoffel_from_dmetric(ginv, dg)
    hess = _hessian(u, grid) - np.einsum("...kij,...k->...ij", gamma, du)

    # ambient correction terms, evaluated at the graph
    gbar = chart.christoffel(u, coords)
    g000 = gbar[..., 0, 0, 0]
    g00i = gbar[..., 0, 0, 1:]
    g0ij = gbar[..., 0, 1:, 1:]
    bracket = (
        hess
        + g000[..., None, None] * du[..., :, None] * du[..., None, :]
        + du[..., :, None] * g00i[..., None, :]
        + g00i[..., :, None] * du[..., None, :]
        + g0ij
    )
    hij = -np.exp(psi)[..., None, None] * v[..., None, None] * bracket
    hij = 0.5 * (hij + np.swapaxes(hij, -1, -2))

    H = np.einsum("...ij,...ij->...", ginv, hij)
    normA2 = np.einsum("...ik,...jl,...ij,...kl->...", ginv, ginv, hij, hij)

    nu = np.empty(u.shape + (grid.n + 1,))
    scale = -np.exp(-psi) / v
    nu[..., 0] = scale
    nu[..., 1:] = scale[..., None] * du_up

    return GeometryFields(du=du, v=v, vtilde=vtilde, g=g, ginv=ginv,
                          hij=hij, H=H, normA2=normA2, nu=nu)


def second_fundamental_form(u: np.ndarray, grid: Grid, chart: SpacetimeChart) -> np.ndarray:
    return assemble_fields(GraphState(0.0, u, grid, chart)).hij


def mean_curvature(fields: GeometryFields) -> np.ndarray:
    return fields.H


def second_fundamental_norm(fields: GeometryFields) -> np.ndarray:
    return fields.normA2


def normal_vector(u: np.ndarray, grid: Grid, chart: SpacetimeChart) -> np.ndarray:
    """Past-directed unit normal nu^alpha per node, shape (*sizes, n+1)."""
    coords, du, sinv, v = _tilt_core(u, grid, chart, EPS_GUARD, t=None)
    psi = chart.psi(u, coords)
    du_up = np.einsum("...ij,...j->...i", sinv, du)
    nu = np.empty(u.shape + (grid.n + 1,))
    scale = -np.exp(-psi) / v
    nu[..., 0] = scale
    nu[..., 1:] = scale[..., None] * du_up
    return nu


def fields_to_csv(state: GraphState, fields: GeometryFields, path) -> None:
    """One row per node (C order): coordinates, u, v, H, ||A||^2."""
    grid = state.grid
    coords = grid.coordinates().reshape(-1, grid.n)
    cols = [coords[:, i] for i in range(grid.n)]
    cols += [state.u.ravel(), fields.v.ravel(), fields.H.ravel(), fields.normA2.ravel()]
    header = [f"x{i+1}" for i in range(grid.n)] + ["u", "v", "H", "normA2"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*cols):
            writer.writerow([repr(float(val)) for val in row])
