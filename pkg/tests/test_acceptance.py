"""End-to-end acceptance suite: one test per headline guarantee.

Each test exercises the public API at production resolution and asserts a
stated tolerance, printing the measured figure so `pytest -rA` doubles as an
acceptance report.  Long trajectories are shared through the session-scoped
``crossing_run`` factory in conftest.
"""

from __future__ import annotations

import dataclasses
import json
import time

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from pmcflow import (
    DEFAULT_BOUND_C,
    FlowConfig,
    GraphState,
    Grid,
    MinkowskiTorus,
    RobertsonWalker,
    assemble_fields,
    check_bounds,
    identity_suite,
    run,
    tau_sweep,
)
from pmcflow.cli import main
from pmcflow.errors import BoundViolation

from conftest import crossing_setup

STATIONARY_CASES = ((1.0, 0.3), (0.5, 0.5))


@pytest.fixture(scope="module")
def flat_runs(crossing_run):
    """The two flat stationary-convergence runs, with their wall time."""
    t0 = time.perf_counter()
    runs = {case: crossing_run(*case, 64) for case in STATIONARY_CASES}
    return runs, time.perf_counter() - t0


@pytest.fixture(scope="module")
def perturbed_runs(crossing_run):
    """Perturbed variants at 64 and 128 nodes for refinement checks."""
    return {
        (p, tau, m): crossing_run(p, tau, m, amplitude=0.05)
        for p, tau in STATIONARY_CASES
        for m in (64, 128)
    }


def ode_height(p: float, tau: float, t_final: float):
    """Reference solution of u' = -(u^p - tau), u(0) = 1, as a dense spline."""
    sol = solve_ivp(lambda _, y: -(y ** p - tau), (0.0, t_final * 1.001),
                    [1.0], rtol=1e-12, atol=1e-14, dense_output=True)
    return sol.sol


def test_01_homogeneous_translation_tracks_exact_height():
    budget = 10.0
    t0 = time.perf_counter()
    worst = 0.0
    for n in (1, 2):
        grid = Grid.regular(n, 64)
        state = GraphState(t=0.0, u=np.zeros(grid.sizes), grid=grid,
                           chart=RobertsonWalker(n, "exp(-t)"))
        config = FlowConfig(p=1.0, tau=0.0, t_max=1.0, integrator="euler",
                            monitor_stride=1)
        result = run(state, config)
        assert result.termination == "TimeExhausted"
        for rec in result.monitors:
            worst = max(worst, abs(rec.inf_u + n * rec.t))
        final = result.final_state
        worst = max(worst, float(np.max(np.abs(final.u + n * final.t))))
    elapsed = time.perf_counter() - t0
    print(f"max |u(t) + n t| = {worst:.3e} (tol 1e-8), wall {elapsed:.2f}s")
    assert worst <= 1e-8
    assert elapsed < budget


def test_02_stationary_convergence_and_ode_tracking(flat_runs):
    runs, elapsed = flat_runs
    assert elapsed < 60.0, f"runs took {elapsed:.1f}s"
    for (p, tau), result in runs.items():
        assert result.termination == "Stationary"
        target = tau ** (1.0 / p)
        gap = abs(result.monitors[-1].sup_H - target)
        assert len(result.states) >= 10
        idx = np.linspace(0, len(result.states) - 1, 10).round().astype(int)
        oracle = ode_height(p, tau, result.final_state.t)
        ode_err = max(
            abs(float(np.mean(result.states[k].u)) - float(oracle(result.states[k].t)[0]))
            for k in idx
        )
        print(f"p={p} tau={tau}: sup|H - tau^(1/p)| = {gap:.2e} (tol 1e-4), "
              f"ODE deviation = {ode_err:.2e} (tol 1e-5), wall {elapsed:.1f}s")
        assert gap <= 1e-4
        assert ode_err <= 1e-5


def test_03_speed_stays_above_tau_minus_discretization(flat_runs, perturbed_runs):
    worst_c = 0.0
    for key, result in {**{k + (64,): v for k, v in flat_runs[0].items()},
                        **perturbed_runs}.items():
        m = key[-1]
        h = 2.0 * np.pi / m
        max_dt = max(rec.dt_used for rec in result.monitors)
        dip = max(0.0, -min(rec.min_HpMinusTau for rec in result.monitors))
        c_obs = dip / (h * h + max_dt)
        worst_c = max(worst_c, c_obs)
        print(f"{key}: min(H^p - tau) dip = {dip:.3e}, measured C = {c_obs:.3f}")
    print(f"largest measured C = {worst_c:.3f} (asserted <= {DEFAULT_BOUND_C})")
    assert worst_c <= DEFAULT_BOUND_C


def test_04_a_priori_bounds_hold_and_corruption_is_caught(flat_runs, perturbed_runs):
    for key, result in {**{k + (64,): v for k, v in flat_runs[0].items()},
                        **perturbed_runs}.items():
        p, m = key[0], key[-1]
        report = check_bounds(result.monitors, result.lam, p, h=2.0 * np.pi / m)
        assert report.passed
        print(f"{key}: bounds pass, lam={result.lam:.6f}, tol={report.tol:.2e}")

    # negative control: doubling one sup H sample must trip the envelope
    for p, bound_name in ((1.0, "sup-H-exponential-envelope"),
                          (0.5, "sup-H-power-envelope")):
        result = flat_runs[0][(p, dict(STATIONARY_CASES)[p])]
        recs = list(result.monitors)
        recs[1] = dataclasses.replace(recs[1], sup_H=2.0 * recs[1].sup_H)
        with pytest.raises(BoundViolation) as info:
            check_bounds(recs, result.lam, p, h=2.0 * np.pi / 64)
        assert info.value.bound == bound_name
        assert info.value.t == recs[1].t
        assert f"t={recs[1].t:.6g}" in str(info.value)
        print(f"p={p}: corrupted sample correctly flagged at t={info.value.t:.6g}")


def test_05_tilt_bounded_and_refinement_stable(perturbed_runs):
    for p, tau in STATIONARY_CASES:
        coarse = max(r.max_vtilde for r in perturbed_runs[(p, tau, 64)].monitors)
        fine = max(r.max_vtilde for r in perturbed_runs[(p, tau, 128)].monitors)
        change = abs(fine - coarse) / coarse
        print(f"p={p} tau={tau}: max vtilde {coarse:.6f} -> {fine:.6f} "
              f"({100 * change:.2f}% change)")
        assert coarse <= 10.0 and fine <= 10.0
        assert change < 0.05


def test_06_second_fundamental_form_bounded_and_stable(perturbed_runs):
    for p, tau in STATIONARY_CASES:
        coarse = max(r.max_normA for r in perturbed_runs[(p, tau, 64)].monitors)
        fine = max(r.max_normA for r in perturbed_runs[(p, tau, 128)].monitors)
        assert np.isfinite(coarse) and np.isfinite(fine)
        change = abs(fine - coarse) / coarse
        print(f"p={p} tau={tau}: max ||A|| {coarse:.6f} -> {fine:.6f} "
              f"({100 * change:.2f}% change)")
        assert change < 0.05


def test_07_structure_identities_converge():
    identities = ("metric_evolution", "H_evolution", "mixed_hij",
                  "tilt", "codazzi", "gauss")
    t0 = time.perf_counter()
    reports = identity_suite(identities)
    elapsed = time.perf_counter() - t0
    for rep in reports:
        mark = "exact" if rep.exact else f"dt={rep.slope_dt:.2f} h={rep.slope_h:.2f}"
        print(f"{rep.scenario:17s} {rep.identity:17s} {mark}")
        assert rep.satisfies(1.0, 1.8), rep.as_dict()
    print(f"identity suite wall time {elapsed:.1f}s (budget 300s)")
    assert elapsed < 300.0


def test_08_stationary_limits_are_cauchy_in_tau():
    taus = [0.4, 0.2, 0.1, 0.05]
    state, config = crossing_setup(1.0, taus[0], 64)
    sweep = tau_sweep(state, config, taus)
    assert sweep.terminations == ["Stationary"] * len(taus)
    expected = [abs(b - a) for a, b in zip(taus, taus[1:])]  # p = 1: u* = tau
    for d, e in zip(sweep.distances, expected):
        print(f"sup-norm distance {d:.5f} vs tau gap {e:.5f}")
        assert abs(d - e) <= 0.2 * e
    assert all(a > b for a, b in zip(sweep.distances, sweep.distances[1:]))
    assert sweep.cauchy


def test_09_curvature_matches_closed_form_at_second_order():
    amp = 0.3
    errs = []
    for m in (32, 64, 128, 256):
        grid = Grid.regular(1, m)
        x = grid.coordinates()[..., 0]
        state = GraphState(t=0.0, u=amp * np.sin(x), grid=grid,
                           chart=MinkowskiTorus(1))
        cosx, sinx = np.cos(x), np.sin(x)
        exact = amp * sinx / (1.0 - amp * amp * cosx * cosx) ** 1.5
        errs.append(float(np.max(np.abs(assemble_fields(state).H - exact))))
    orders = [float(np.log2(a / b)) for a, b in zip(errs, errs[1:])]
    print("observed orders:", " ".join(f"{o:.2f}" for o in orders))
    assert all(o >= 1.8 for o in orders)


def test_10_identical_config_reproduces_identical_monitors(tmp_path):
    config_text = """
family = "robertson-walker"
a-preset = "crossing"
u0-preset = "const"
p = 0.5
tau = 0.5
t_max = 14.0
integrator = "rk2"
eps_stationary = 5e-5

[grid]
n = 1
sizes = [64]

[u0]
value = 1.0

[output]
stride = 10
"""
    cfg = tmp_path / "run.toml"
    cfg.write_text(config_text)
    outs = []
    for name in ("first", "second"):
        out = tmp_path / name
        assert main(["run", "--config", str(cfg), "--out", str(out),
                     "--quiet"]) == 0
        outs.append((out / "monitors.ndjson").read_bytes())
    assert outs[0] == outs[1]
    manifest = json.loads((tmp_path / "first" / "manifest.json").read_text())
    print(f"bit-identical monitors across two runs "
          f"({len(outs[0])} bytes, {manifest['steps']} steps)")
