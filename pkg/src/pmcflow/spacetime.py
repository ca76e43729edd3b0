"""Ambient Lorentzian charts over a flat spatial torus.

The ambient manifold is a conformal product

    ds^2 = e^{2 psi(x0, x)} ( -(dx0)^2 + sigma_ij(x0, x) dx^i dx^j )

with spatial coordinates x on [0, L_1) x ... x [0, L_n), n in {1, 2}.
Charts expose psi, sigma, their coordinate derivatives, and derived curvature
data (Christoffel symbols, Ricci, Riemann) consumed by the graph and curve
pipelines.

Evaluation methods are vectorized: ``x0`` carries an arbitrary batch shape,
``x`` the same batch shape plus a trailing axis of length n, and results carry
the batch shape plus tensor axes.  Index conventions (d = n + 1):

    christoffel(x0, x)[..., a, b, c]            Gamma^a_{bc}
    christoffel_dpartial(x0, x)[..., m, a, b, c]  partial_m Gamma^a_{bc}
    riemann(x0, x)[..., a, b, c, d]             R_{abcd} (fully covariant)
    riemann_dcov(x0, x)[..., l, a, b, c, d]     nabla_l R_{abcd}
    ricci(x0, x)[..., a, b]                     R_{ab} = g^{cd} R_{cadb}

Curvature sign convention: R^r_{smn} = partial_m Gamma^r_{ns}
- partial_n Gamma^r_{ms} + Gamma^r_{ml} Gamma^l_{ns} - Gamma^r_{nl} Gamma^l_{ms},
Ricci the (1,3) contraction R^m_{amb}.  Flat space gives zero; the closed
Robertson-Walker forms below follow the same convention.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ChartDomainError, ContractViolation
from .presets import ScaleFactor, scale_preset

# Centered-difference steps for the Custom family: first derivatives balance
# truncation vs round-off near 1e-5; second-derivative stencils lose eps/h^2
# to cancellation, so they use a coarser step.
_FD_STEP = 1e-5
_FD2_STEP = 3e-4

_DEFAULT_PERIOD = 2.0 * np.pi

_UNIT_TOL = 1e-10


@dataclass(frozen=True)
class ChartPoint:
    """A single event (x0, x); build via SpacetimeChart.point to get reduced x."""

    x0: float
    x: tuple[float, ...]


def _point_arrays(pt) -> tuple[np.ndarray, np.ndarray]:
    """Accept a ChartPoint or an (x0, x) pair of array-likes."""
    if isinstance(pt, ChartPoint):
        return np.asarray(pt.x0, dtype=float), np.asarray(pt.x, dtype=float)
    x0, x = pt
    return np.asarray(x0, dtype=float), np.asarray(x, dtype=float)


def _spd_inverse(s: np.ndarray) -> np.ndarray:
    """Invert a field of 1x1 or 2x2 symmetric positive definite matrices."""
    n = s.shape[-1]
    if n == 1:
        s00 = s[..., 0, 0]
        if np.any(s00 <= 0.0) or not np.all(np.isfinite(s00)):
            raise ChartDomainError("spatial metric is not positive definite")
        return (1.0 / s00)[..., None, None]
    # n == 2: Sylvester criterion s00 > 0, det > 0
    det = s[..., 0, 0] * s[..., 1, 1] - s[..., 0, 1] * s[..., 1, 0]
    if np.any(s[..., 0, 0] <= 0.0) or np.any(det <= 0.0) or not np.all(np.isfinite(det)):
        raise ChartDomainError("spatial metric is not positive definite")
    inv = np.empty_like(s)
    inv[..., 0, 0] = s[..., 1, 1] / det
    inv[..., 1, 1] = s[..., 0, 0] / det
    inv[..., 0, 1] = -s[..., 0, 1] / det
    inv[..., 1, 0] = -s[..., 1, 0] / det
    return inv


def _christoffel_from_dmetric(ginv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Levi-Civita symbols from a metric inverse and its coordinate derivatives.

    ``dg[..., m, a, b] = partial_m g_ab``; returns ``Gamma^a_{bc}``.
    Symmetric in (b, c) by construction.
    """
    # S_{dbc} = partial_b g_dc + partial_c g_db - partial_d g_bc
    e1 = np.swapaxes(dg, -3, -2)          # [..., d, b, c] = dg[..., b, d, c]
    e2 = np.moveaxis(dg, -3, -1)          # [..., d, b, c] = dg[..., c, d, b]
    s = e1 + e2 - dg
    return 0.5 * np.einsum("...ad,...dbc->...abc", ginv, s)


class SpacetimeChart(ABC):
    """Base class for ambient charts; subclasses supply psi, sigma and derivatives."""

    family = "abstract"

    def __init__(self, n: int, periods: Sequence[float] | None = None):
        if n not in (1, 2):
            raise ChartDomainError(f"spatial dimension must be 1 or 2, got {n}")
        self.n = int(n)
        if periods is None:
            periods = (_DEFAULT_PERIOD,) * self.n
        periods = tuple(float(L) for L in periods)
        if len(periods) != self.n or any(L <= 0 for L in periods):
            raise ChartDomainError(f"need {self.n} positive periods, got {periods!r}")
        self.periods = periods

    # -- shape plumbing ------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.n + 1

    def _batch_shape(self, x0, x) -> tuple[int, ...]:
        x = np.asarray(x)
        if x.shape[-1:] != (self.n,):
            raise ValueError(f"x must have trailing axis of length {self.n}, got shape {x.shape}")
        return np.broadcast_shapes(np.shape(x0), x.shape[:-1])

    def wrap(self, x: np.ndarray) -> np.ndarray:
        """Reduce spatial coordinates modulo the torus periods."""
        return np.mod(np.asarray(x, dtype=float), np.asarray(self.periods))

    def point(self, x0: float, x) -> ChartPoint:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return ChartPoint(float(x0), tuple(self.wrap(x)))

    def describe(self) -> dict:
        return {"family": self.family, "n": self.n, "periods": list(self.periods)}

    # -- chart data (abstract) -----------------------------------------------

    @abstractmethod
    def psi(self, x0, x) -> np.ndarray:
        """Conformal exponent, shape (batch,)."""

    @abstractmethod
    def dpsi(self, x0, x) -> np.ndarray:
        """Coordinate gradient of psi, shape (batch, d)."""

    @abstractmethod
    def sigma(self, x0, x) -> np.ndarray:
        """Spatial metric sigma_ij, shape (batch, n, n)."""

    @abstractmethod
    def dsigma(self, x0, x) -> np.ndarray:
        """partial_m sigma_ij for m = 0..n, shape (batch, d, n, n)."""

    # -- assembled fields ----------------------------------------------------

    def sigma_inv(self, x0, x) -> np.ndarray:
        return _spd_inverse(self.sigma(x0, x))

    def metric(self, x0, x) -> np.ndarray:
        """Full ambient metric g_ab, shape (batch, d, d)."""
        batch = self._batch_shape(x0, x)
        sig = np.broadcast_to(self.sigma(x0, x), batch + (self.n, self.n))
        conf = np.exp(2.0 * self.psi(x0, x))
        g = np.zeros(batch + (self.dim, self.dim))
        g[..., 0, 0] = -1.0
        g[..., 1:, 1:] = sig
        return g * np.broadcast_to(conf, batch)[..., None, None]

    def metric_inv(self, x0, x) -> np.ndarray:
        batch = self._batch_shape(x0, x)
        sinv = np.broadcast_to(self.sigma_inv(x0, x), batch + (self.n, self.n))
        conf = np.exp(-2.0 * self.psi(x0, x))
        g = np.zeros(batch + (self.dim, self.dim))
        g[..., 0, 0] = -1.0
        g[..., 1:, 1:] = sinv
        return g * np.broadcast_to(conf, batch)[..., None, None]

    def dmetric(self, x0, x) -> np.ndarray:
        """partial_m g_ab assembled from dpsi and dsigma, shape (batch, d, d, d)."""
        batch = self._batch_shape(x0, x)
        d = self.dim
        psi = np.broadcast_to(self.psi(x0, x), batch)
        dpsi = np.broadcast_to(self.dpsi(x0, x), batch + (d,))
        sig = np.broadcast_to(self.sigma(x0, x), batch + (self.n, self.n))
        dsig = np.broadcast_to(self.dsigma(x0, x), batch + (d, self.n, self.n))
        eta = np.zeros(batch + (d, d))
        eta[..., 0, 0] = -1.0
        eta[..., 1:, 1:] = sig
        deta = np.zeros(batch + (d, d, d))
        deta[..., :, 1:, 1:] = dsig
        out = 2.0 * dpsi[..., :, None, None] * eta[..., None, :, :] + deta
        return out * np.exp(2.0 * psi)[..., None, None, None]

    def d2metric(self, x0, x, step: float = _FD2_STEP) -> np.ndarray:
        """partial_m partial_n g_ab by centered stencils, shape (batch, d, d, d, d)."""
        d = self.dim
        x0 = np.asarray(x0, dtype=float)
        x = np.asarray(x, dtype=float)
        f0 = self.metric(x0, x)
        grid: list[list[np.ndarray | None]] = [[None] * d for _ in range(d)]
        for m in range(d):
            x0p, xp = self._shifted(x0, x, m, step)
            x0m, xm = self._shifted(x0, x, m, -step)
            grid[m][m] = (self.metric(x0p, xp) - 2.0 * f0 + self.metric(x0m, xm)) / step**2
        for m in range(d):
            for k in range(m + 1, d):
                vals = []
                for sa, sb in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                    x0a, xa = self._shifted(x0, x, m, sa * step)
                    x0b, xb = self._shifted(x0a, xa, k, sb * step)
                    vals.append(self.metric(x0b, xb))
                mixed = (vals[0] - vals[1] - vals[2] + vals[3]) / (4.0 * step**2)
                grid[m][k] = mixed
                grid[k][m] = mixed
        rows = [np.stack(grid[m], axis=f0.ndim - 2) for m in range(d)]
        return np.stack(rows, axis=f0.ndim - 2)

    def christoffel(self, x0, x) -> np.ndarray:
        """Gamma^a_{bc} of the full metric, assembled from the conformal blocks.

        With psidot = partial_0 psi, psi_i the spatial gradient, sigdot =
        partial_0 sigma, and Gamma(sigma) the symbols of the spatial metric:

            Gamma^0_00 = psidot            Gamma^0_0i = psi_i
            Gamma^0_ij = psidot sigma_ij + sigdot_ij / 2
            Gamma^i_00 = sigma^{ik} psi_k
            Gamma^i_0j = psidot delta^i_j + sigma^{ik} sigdot_kj / 2
            Gamma^i_jk = Gamma(sigma)^i_jk + psi_j delta^i_k + psi_k delta^i_j
                         - sigma^{il} psi_l sigma_jk
        """
        batch = self._batch_shape(x0, x)
        n, d = self.n, self.dim
        dpsi = np.broadcast_to(self.dpsi(x0, x), batch + (d,))
        sig = np.broadcast_to(self.sigma(x0, x), batch + (n, n))
        sinv = np.broadcast_to(self.sigma_inv(x0, x), batch + (n, n))
        dsig = np.broadcast_to(self.dsigma(x0, x), batch + (d, n, n))

        psidot = dpsi[..., 0]
        psi_sp = dpsi[..., 1:]
        psi_up = np.einsum("...ik,...k->...i", sinv, psi_sp)
        sigdot = dsig[..., 0, :, :]
        eye = np.eye(n)

        G = np.zeros(batch + (d, d, d))
        G[..., 0, 0, 0] = psidot
        G[..., 0, 0, 1:] = psi_sp
        G[..., 0, 1:, 0] = psi_sp
        G[..., 0, 1:, 1:] = psidot[..., None, None] * sig + 0.5 * sigdot
        G[..., 1:, 0, 0] = psi_up
        mixed = psidot[..., None, None] * eye + 0.5 * np.einsum(
            "...ik,...kj->...ij", sinv, sigdot
        )
        G[..., 1:, 0, 1:] = mixed
        G[..., 1:, 1:, 0] = mixed
        spatial = _christoffel_from_dmetric(sinv, dsig[..., 1:, :, :])
        spatial = spatial + np.einsum("...j,ik->...ijk", psi_sp, eye)
        spatial = spatial + np.einsum("...k,ij->...ijk", psi_sp, eye)
        spatial = spatial - np.einsum("...i,...jk->...ijk", psi_up, sig)
        G[..., 1:, 1:, 1:] = spatial
        return G

    # -- finite-difference plumbing ------------------------------------------

    def _shifted(self, x0, x, mu: int, delta: float):
        if mu == 0:
            return x0 + delta, x
        dx = np.zeros(self.n)
        dx[mu - 1] = delta
        return x0, x + dx

    def _fd1(self, fn: Callable, x0, x, tail_rank: int, step: float = _FD_STEP) -> np.ndarray:
        """Centered first derivative of fn along each coordinate; new axis before tail."""
        x0 = np.asarray(x0, dtype=float)
        x = np.asarray(x, dtype=float)
        cols = []
        for mu in range(self.dim):
            x0p, xp = self._shifted(x0, x, mu, step)
            x0m, xm = self._shifted(x0, x, mu, -step)
            cols.append((np.asarray(fn(x0p, xp)) - np.asarray(fn(x0m, xm))) / (2.0 * step))
        return np.stack(cols, axis=cols[0].ndim - tail_rank)

    # -- curvature ------------------------------------------------------------

    def christoffel_dpartial(self, x0, x) -> np.ndarray:
        """partial_m Gamma^a_{bc} by centered differences of christoffel."""
        return self._fd1(self.christoffel, x0, x, tail_rank=3)

    def ricci(self, x0, x) -> np.ndarray:
        G = self.christoffel(x0, x)
        dG = self.christoffel_dpartial(x0, x)
        t1 = np.einsum("...mmab->...ab", dG)
        t2 = np.einsum("...bmma->...ab", dG)
        trG = np.einsum("...mml->...l", G)
        t3 = np.einsum("...l,...lba->...ab", trG, G)
        t4 = np.einsum("...mbl,...lma->...ab", G, G)
        return t1 - t2 + t3 - t4

    def riemann(self, x0, x) -> np.ndarray:
        """Fully covariant R_{abcd}."""
        G = self.christoffel(x0, x)
        dG = self.christoffel_dpartial(x0, x)
        up = np.einsum("...mrns->...rsmn", dG) - np.einsum("...nrms->...rsmn", dG)
        up = up + np.einsum("...rml,...lns->...rsmn", G, G)
        up = up - np.einsum("...rnl,...lms->...rsmn", G, G)
        g = self.metric(x0, x)
        return np.einsum("...ar,...rsmn->...asmn", g, up)

    def riemann_dcov(self, x0, x) -> np.ndarray:
        """nabla_l R_{abcd}: coordinate derivative minus four connection terms."""
        dR = self._fd1(self.riemann, x0, x, tail_rank=4)
        G = self.christoffel(x0, x)
        R = self.riemann(x0, x)
        out = dR
        out = out - np.einsum("...mla,...mbcd->...labcd", G, R)
        out = out - np.einsum("...mlb,...amcd->...labcd", G, R)
        out = out - np.einsum("...mlc,...abmd->...labcd", G, R)
        out = out - np.einsum("...mld,...abcm->...labcd", G, R)
        return out


class MinkowskiTorus(SpacetimeChart):
    """Flat chart: psi = 0, sigma = identity. Everything curvature-flavored is zero."""

    family = "minkowski-torus"

    def psi(self, x0, x):
        return np.zeros(self._batch_shape(x0, x))

    def dpsi(self, x0, x):
        return np.zeros(self._batch_shape(x0, x) + (self.dim,))

    def sigma(self, x0, x):
        batch = self._batch_shape(x0, x)
        return np.broadcast_to(np.eye(self.n), batch + (self.n, self.n))

    def dsigma(self, x0, x):
        return np.zeros(self._batch_shape(x0, x) + (self.dim, self.n, self.n))

    def sigma_inv(self, x0, x):
        return self.sigma(x0, x)

    def christoffel(self, x0, x):
        d = self.dim
        return np.zeros(self._batch_shape(x0, x) + (d, d, d))

    def christoffel_dpartial(self, x0, x):
        d = self.dim
        return np.zeros(self._batch_shape(x0, x) + (d, d, d, d))

    def ricci(self, x0, x):
        d = self.dim
        return np.zeros(self._batch_shape(x0, x) + (d, d))

    def riemann(self, x0, x):
        d = self.dim
        return np.zeros(self._batch_shape(x0, x) + (d, d, d, d))

    def riemann_dcov(self, x0, x):
        d = self.dim
        return np.zeros(self._batch_shape(x0, x) + (d, d, d, d, d))


class RobertsonWalker(SpacetimeChart):
    """Warped chart: psi = 0, sigma = a(x0)^2 delta, flat torus fibers.

    Closed forms (dot = d/dx0): Gamma^0_ij = a adot delta_ij,
    Gamma^i_0j = (adot/a) delta^i_j; Ricci R_00 = -n addot / a,
    R_ij = (a addot + (n-1) adot^2) delta_ij.  In 1+1 the curvature reduces to
    the scalar K = addot / a with R_abcd = K (g_ac g_bd - g_ad g_bc).
    """

    family = "robertson-walker"

    def __init__(self, n: int, scale: ScaleFactor | str, periods: Sequence[float] | None = None):
        super().__init__(n, periods)
        if isinstance(scale, str):
            scale = scale_preset(scale, self.n)
        self.scale = scale

    def describe(self) -> dict:
        out = super().describe()
        out["a"] = self.scale.name
        return out

    def _a(self, x0) -> np.ndarray:
        a = np.asarray(self.scale.a(np.asarray(x0, dtype=float)))
        if np.any(a <= 0.0) or not np.all(np.isfinite(a)):
            raise ChartDomainError("scale factor must stay positive and finite")
        return a

    def psi(self, x0, x):
        return np.zeros(self._batch_shape(x0, x))

    def dpsi(self, x0, x):
        return np.zeros(self._batch_shape(x0, x) + (self.dim,))

    def sigma(self, x0, x):
        batch = self._batch_shape(x0, x)
        a2 = np.broadcast_to(self._a(x0) ** 2, batch)
        return a2[..., None, None] * np.eye(self.n)

    def dsigma(self, x0, x):
        batch = self._batch_shape(x0, x)
        t = np.asarray(x0, dtype=float)
        rate = np.broadcast_to(2.0 * self._a(t) * np.asarray(self.scale.da(t)), batch)
        out = np.zeros(batch + (self.dim, self.n, self.n))
        out[..., 0, :, :] = rate[..., None, None] * np.eye(self.n)
        return out

    def sigma_inv(self, x0, x):
        batch = self._batch_shape(x0, x)
        a2 = np.broadcast_to(self._a(x0) ** 2, batch)
        return (1.0 / a2)[..., None, None] * np.eye(self.n)

    def christoffel(self, x0, x):
        batch = self._batch_shape(x0, x)
        d = self.dim
        t = np.asarray(x0, dtype=float)
        a = self._a(t)
        da = np.asarray(self.scale.da(t))
        ada = np.broadcast_to(a * da, batch)
        hub = np.broadcast_to(da / a, batch)
        eye = np.eye(self.n)
        G = np.zeros(batch + (d, d, d))
        G[..., 0, 1:, 1:] = ada[..., None, None] * eye
        G[..., 1:, 0, 1:] = hub[..., None, None] * eye
        G[..., 1:, 1:, 0] = hub[..., None, None] * eye
        return G

    def ricci(self, x0, x):
        batch = self._batch_shape(x0, x)
        t = np.asarray(x0, dtype=float)
        a = self._a(t)
        da = np.asarray(self.scale.da(t))
        dda = np.asarray(self.scale.dda(t))
        out = np.zeros(batch + (self.dim, self.dim))
        out[..., 0, 0] = np.broadcast_to(-self.n * dda / a, batch)
        spatial = np.broadcast_to(a * dda + (self.n - 1) * da * da, batch)
        out[..., 1:, 1:] = spatial[..., None, None] * np.eye(self.n)
        return out

    def _gauss_curvature(self, x0) -> np.ndarray:
        t = np.asarray(x0, dtype=float)
        return np.asarray(self.scale.dda(t)) / self._a(t)

    def riemann(self, x0, x):
        if self.n != 1:
            return super().riemann(x0, x)
        g = self.metric(x0, x)
        wedge = np.einsum("...ac,...bd->...abcd", g, g) - np.einsum(
            "...ad,...bc->...abcd", g, g
        )
        batch = self._batch_shape(x0, x)
        K = np.broadcast_to(self._gauss_curvature(x0), batch)
        return K[..., None, None, None, None] * wedge

    def riemann_dcov(self, x0, x):
        if self.n != 1:
            return super().riemann_dcov(x0, x)
        # R = K(x0) (g wedge g) with the wedge parallel, so nabla R = dK tensor wedge
        g = self.metric(x0, x)
        wedge = np.einsum("...ac,...bd->...abcd", g, g) - np.einsum(
            "...ad,...bc->...abcd", g, g
        )
        batch = self._batch_shape(x0, x)
        t = np.asarray(x0, dtype=float)
        a = self._a(t)
        da = np.asarray(self.scale.da(t))
        dda = np.asarray(self.scale.dda(t))
        ddda = np.asarray(self.scale.ddda(t))
        Kdot = np.broadcast_to(ddda / a - dda * da / (a * a), batch)
        dK = np.zeros(batch + (self.dim,))
        dK[..., 0] = Kdot
        return np.einsum("...l,...abcd->...labcd", dK, wedge)


class CustomChart(SpacetimeChart):
    """Chart from user callables psi(x0, x) and sigma(x0, x).

    Derivatives come from centered differences with step 1e-5; Christoffel
    symbols from the Levi-Civita formula on the assembled metric.  Spatial
    arguments are reduced modulo the periods before the callables run, so the
    callables must be periodic on the torus.
    """

    family = "custom"

    def __init__(
        self,
        n: int,
        psi: Callable[[np.ndarray, np.ndarray], np.ndarray],
        sigma: Callable[[np.ndarray, np.ndarray], np.ndarray],
        periods: Sequence[float] | None = None,
    ):
        super().__init__(n, periods)
        self._psi_fn = psi
        self._sigma_fn = sigma

    def psi(self, x0, x):
        batch = self._batch_shape(x0, x)
        val = np.asarray(self._psi_fn(np.asarray(x0, dtype=float), self.wrap(x)), dtype=float)
        return np.broadcast_to(val, batch)

    def sigma(self, x0, x):
        batch = self._batch_shape(x0, x)
        val = np.asarray(self._sigma_fn(np.asarray(x0, dtype=float), self.wrap(x)), dtype=float)
        val = np.broadcast_to(val, batch + (self.n, self.n))
        # symmetrize: downstream algebra assumes exact symmetry
        return 0.5 * (val + np.swapaxes(val, -1, -2))

    def dpsi(self, x0, x):
        return self._fd1(self.psi, x0, x, tail_rank=0)

    def dsigma(self, x0, x):
        return self._fd1(self.sigma, x0, x, tail_rank=2)

    def christoffel(self, x0, x):
        return _christoffel_from_dmetric(self.metric_inv(x0, x), self.dmetric(x0, x))

    def christoffel_dpartial(self, x0, x):
        # Assembled from first and second metric derivatives rather than by
        # differencing christoffel(): nesting two FD levels would amplify the
        # inner round-off by 1/step.
        ginv = self.metric_inv(x0, x)
        dg = self.dmetric(x0, x)
        d2g = self.d2metric(x0, x)
        e1 = np.swapaxes(dg, -3, -2)
        e2 = np.moveaxis(dg, -3, -1)
        s = e1 + e2 - dg
        de1 = np.swapaxes(d2g, -3, -2)
        de2 = np.moveaxis(d2g, -3, -1)
        ds = de1 + de2 - d2g
        dginv = -np.einsum("...ae,...df,...mef->...mad", ginv, ginv, dg)
        out = 0.5 * np.einsum("...mad,...dbc->...mabc", dginv, s)
        out = out + 0.5 * np.einsum("...ad,...mdbc->...mabc", ginv, ds)
        return out


# -- module-level operations ---------------------------------------------------


def christoffel_bar(chart: SpacetimeChart, pt) -> np.ndarray:
    """Full ambient Christoffel symbols Gamma^a_{bc} at pt."""
    x0, x = _point_arrays(pt)
    return chart.christoffel(x0, x)


def slice_second_fundamental_form(chart: SpacetimeChart, pt) -> np.ndarray:
    """Second fundamental form of the level slice {x0 = const} through pt.

    hbar_ij = e^psi ( -sigdot_ij / 2 - psidot sigma_ij ), taken with respect to
    the past-directed unit normal, so contracting slices have positive trace.
    """
    x0, x = _point_arrays(pt)
    psi = chart.psi(x0, x)
    dpsi = chart.dpsi(x0, x)
    sig = chart.sigma(x0, x)
    sigdot = chart.dsigma(x0, x)[..., 0, :, :]
    psidot = dpsi[..., 0]
    return np.exp(psi)[..., None, None] * (-0.5 * sigdot - psidot[..., None, None] * sig)


def slice_mean_curvature(chart: SpacetimeChart, pt) -> np.ndarray | float:
    """Trace of the slice second fundamental form in the induced metric."""
    x0, x = _point_arrays(pt)
    hbar = slice_second_fundamental_form(chart, (x0, x))
    sinv = chart.sigma_inv(x0, x)
    psi = chart.psi(x0, x)
    out = np.exp(-2.0 * psi) * np.einsum("...ij,...ij->...", sinv, hbar)
    return float(out) if out.ndim == 0 else out


def _ricci_contraction(chart: SpacetimeChart, x0, x, nu: np.ndarray) -> np.ndarray:
    """R_ab nu^a nu^b with the unit-timelike contract enforced.

    ``nu`` may carry extra axes between the batch and the component axis; the
    metric and Ricci tensors broadcast across them.
    """
    g = chart.metric(x0, x)
    norm = np.einsum("...ab,...a,...b->...", g, nu, nu)
    if np.any(np.abs(norm + 1.0) > _UNIT_TOL):
        worst = float(np.max(np.abs(norm + 1.0)))
        raise ContractViolation(
            f"direction is not unit timelike: max |<nu,nu>+1| = {worst:.3e}"
        )
    ric = chart.ricci(x0, x)
    return np.einsum("...ab,...a,...b->...", ric, nu, nu)


def ricci_timelike(chart: SpacetimeChart, pt, nu) -> float | np.ndarray:
    """Ricci curvature contracted twice with a unit timelike direction."""
    x0, x = _point_arrays(pt)
    out = _ricci_contraction(chart, x0, x, np.asarray(nu, dtype=float))
    return float(out) if out.ndim == 0 else out


def _midpoint_levels(samples: int) -> list[int]:
    levels = [1]
    while 2 * levels[-1] <= samples:
        levels.append(2 * levels[-1])
    return levels


def lambda_bound(
    chart: SpacetimeChart,
    x0_interval: tuple[float, float],
    samples: int,
    rapidities: Sequence[float] = (0.0, 0.5, 1.0),
) -> float:
    """Nonnegative lower-bound constant for -Ric on sampled unit timelike directions.

    Samples a union of nested midpoint lattices (levels 1, 2, 4, ... up to
    ``samples``) over the x0 interval and the torus, and at each point takes
    the slice-normal direction together with boosts of rapidity chi along
    each coordinate axis (both signs).  Because the lattices nest, the result
    is nondecreasing in ``samples``.
    """
    lo, hi = (float(x0_interval[0]), float(x0_interval[1]))
    if not np.isfinite(lo) or not np.isfinite(hi) or hi < lo:
        raise ContractViolation(f"empty x0 interval [{lo}, {hi}]")
    if samples < 1:
        raise ContractViolation(f"samples must be >= 1, got {samples}")

    x0_parts, x_parts = [], []
    for k in _midpoint_levels(int(samples)):
        mids0 = lo + (np.arange(k) + 0.5) * (hi - lo) / k
        axes = [(np.arange(k) + 0.5) * (L / k) for L in chart.periods]
        mesh = np.meshgrid(mids0, *axes, indexing="ij")
        x0_parts.append(mesh[0].ravel())
        x_parts.append(np.stack([m.ravel() for m in mesh[1:]], axis=-1))
    pts0 = np.concatenate(x0_parts)
    ptsx = np.concatenate(x_parts, axis=0)

    psi = chart.psi(pts0, ptsx)
    sig = chart.sigma(pts0, ptsx)
    emp = np.exp(-psi)
    d = chart.dim

    dirs = []
    base = np.zeros(pts0.shape + (d,))
    base[..., 0] = emp
    dirs.append(base)
    boosts = sorted({float(c) for c in rapidities if float(c) > 0.0})
    for i in range(chart.n):
        root = np.sqrt(sig[..., i, i])
        for chi in boosts:
            for sign in (1.0, -1.0):
                v = np.zeros(pts0.shape + (d,))
                v[..., 0] = emp * np.cosh(chi)
                v[..., 1 + i] = sign * emp * np.sinh(chi) / root
                dirs.append(v)
    nu = np.stack(dirs, axis=-2)  # (P, M, d)

    vals = _ricci_contraction(chart, pts0[..., None], ptsx[..., None, :], nu)
    return float(max(0.0, -np.min(vals)))
