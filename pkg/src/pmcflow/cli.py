"""Command-line driver: run flows, verify identities, sweep tau.

Exit codes follow the usual tool convention: 0 on success (run reached
Stationary or TimeExhausted, all verification slopes met thresholds, sweep
limits are Cauchy), 1 when the computation itself reports failure (aborted
run, missed slope, non-Cauchy sweep), 2 for configuration and usage errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import load_config
from .errors import ConfigError, InitialDataError
from .flow_engine import DEFAULT_BOUND_C, FlowConfig, RunResult, run, tau_sweep
from .io import (
    RunManifest,
    build_manifest,
    write_manifest,
    write_residuals_csv,
    write_run_artifacts,
    write_slopes_json,
    write_sweep_json,
)
from .lagrangian import IDENTITIES, identity_suite, scenario_names

_VERIFY_BASE_DT = 0.2
_VERIFY_BASE_M = 32


def _fail(message: str) -> int:
    print(f"pmcflow: error: {message}", file=sys.stderr)
    return 2


def _tolerances(flow: FlowConfig) -> dict:
    return {
        "eps_stationary": flow.eps_stationary,
        "eps_guard": flow.eps_guard,
        "cfl_safety": flow.cfl_safety,
        "vtilde_max": flow.vtilde_max,
        "bound_C": DEFAULT_BOUND_C,
    }


def cmd_run(config_path: str | Path, out_dir: str | Path | None = None,
            quiet: bool = False) -> int:
    """Integrate the configured flow and write monitors, snapshots, manifest."""
    try:
        setup = load_config(config_path)
    except ConfigError as exc:
        return _fail(str(exc))
    out = Path(out_dir) if out_dir is not None else setup.out_dir
    out.mkdir(parents=True, exist_ok=True)

    start = time.perf_counter()
    try:
        result = run(setup.initial, setup.flow)
    except InitialDataError as exc:
        # Rejected before the first step: record the attempt, signal failure.
        wall = time.perf_counter() - start
        manifest = RunManifest(
            config=setup.echo, termination="Aborted",
            abort_reason=f"InitialDataError: {exc}", steps=0,
            final_t=0.0, lam=0.0,
            tolerances=_tolerances(setup.flow), wall_time_s=wall,
        )
        write_manifest(manifest, out / "manifest.json")
        print(f"pmcflow: aborted: {exc}", file=sys.stderr)
        return 1
    wall = time.perf_counter() - start

    write_run_artifacts(result, out)
    manifest = build_manifest(setup.echo, result, _tolerances(setup.flow), wall)
    write_manifest(manifest, out / "manifest.json")

    if not quiet:
        print(f"termination={result.termination} steps={result.steps} "
              f"t={result.final_state.t:.6g} out={out}")
    if result.termination == "Aborted":
        print(f"pmcflow: aborted: {result.abort_reason}", file=sys.stderr)
        return 1
    return 0


def cmd_verify(identity_selector: str = "all", fixture: str = "all",
               refinement_levels: int = 4, out_dir: str | Path = ".",
               quiet: bool = False) -> int:
    """Run residual refinement studies and write residuals.csv, slopes.json."""
    try:
        if identity_selector == "all":
            identities: Sequence[str] = IDENTITIES
        elif identity_selector in IDENTITIES:
            identities = (identity_selector,)
        else:
            known = ", ".join(("all",) + IDENTITIES)
            raise ConfigError(
                f"unknown identity {identity_selector!r}; known: {known}")
        if fixture == "all":
            scenarios: Sequence[str] = scenario_names()
        elif fixture in scenario_names():
            scenarios = (fixture,)
        else:
            known = ", ".join(("all",) + scenario_names())
            raise ConfigError(f"unknown fixture {fixture!r}; known: {known}")
        if refinement_levels < 3:
            raise ConfigError(
                f"refinement levels must be >= 3 to fit a slope, got {refinement_levels}")
        dt_list = tuple(_VERIFY_BASE_DT * 0.5**k for k in range(refinement_levels))
        h_list = tuple(_VERIFY_BASE_M * 2**k for k in range(refinement_levels))
        reports = identity_suite(identities, scenarios, dt_list, h_list)
    except ConfigError as exc:
        return _fail(str(exc))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_residuals_csv(reports, out / "residuals.csv")
    write_slopes_json(reports, out / "slopes.json")

    ok = True
    for report in reports:
        passed = report.satisfies()
        ok = ok and passed
        if not quiet:
            def fmt(slope):
                return "exact" if slope is None else f"{slope:.2f}"
            print(f"{report.scenario:17s} {report.identity:17s} "
                  f"slope_dt={fmt(report.slope_dt)} slope_h={fmt(report.slope_h)} "
                  f"{'PASS' if passed else 'FAIL'}")
    return 0 if ok else 1


def cmd_sweep_tau(config_path: str | Path, tau_list: Sequence[float],
                  out_dir: str | Path | None = None, quiet: bool = False) -> int:
    """Run the flow at each tau and write the limit comparison to sweep.json."""
    try:
        setup = load_config(config_path)
        sweep = tau_sweep(setup.initial, setup.flow, tau_list)
    except ConfigError as exc:
        return _fail(str(exc))
    out = Path(out_dir) if out_dir is not None else setup.out_dir
    out.mkdir(parents=True, exist_ok=True)
    write_sweep_json(sweep, out / "sweep.json")
    if not quiet:
        dists = " ".join(f"{d:.3e}" for d in sweep.distances)
        print(f"taus={sweep.taus} cauchy={sweep.cauchy} distances=[{dists}]")
    return 0 if sweep.cauchy else 1


def _parse_taus(text: str) -> list[float]:
    parts = [s.strip() for s in text.split(",") if s.strip()]
    try:
        return [float(s) for s in parts]
    except ValueError as exc:
        raise ConfigError(f"--taus must be comma-separated numbers: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmcflow",
        description="Power mean curvature flow of spacelike graphs: "
                    "run, verify identities, sweep tau.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="DIR", default=None,
                        help="output directory (run/sweep default: config [output] dir; "
                             "verify default: current directory)")
    common.add_argument("--seed", metavar="N", type=int, default=None,
                        help="seed numpy's global RNG (flows themselves are deterministic)")
    common.add_argument("--quiet", action="store_true",
                        help="suppress progress output on stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", parents=[common],
                           help="integrate one configured flow")
    run_p.add_argument("--config", metavar="PATH", required=True)

    verify_p = sub.add_parser("verify", parents=[common],
                              help="residual refinement studies of the evolution identities")
    verify_p.add_argument("--identity", metavar="NAME", default="all",
                          help="one of %s, or 'all'" % ", ".join(IDENTITIES))
    verify_p.add_argument("--fixture", metavar="NAME", default="all",
                          help="one of %s, or 'all'" % ", ".join(scenario_names()))
    verify_p.add_argument("--levels", metavar="K", type=int, default=4,
                          help="refinement levels (>= 3, default 4)")

    sweep_p = sub.add_parser("sweep-tau", parents=[common],
                             help="rerun the flow along a descending tau list")
    sweep_p.add_argument("--config", metavar="PATH", required=True)
    sweep_p.add_argument("--taus", metavar="LIST", required=True,
                         help="comma-separated, strictly descending, e.g. 0.4,0.2,0.1")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is not None:
        np.random.seed(args.seed)
    if args.command == "run":
        return cmd_run(args.config, out_dir=args.out, quiet=args.quiet)
    if args.command == "verify":
        return cmd_verify(args.identity, args.fixture, args.levels,
                          out_dir=args.out if args.out is not None else ".",
                          quiet=args.quiet)
    try:
        taus = _parse_taus(args.taus)
    except ConfigError as exc:
        return _fail(str(exc))
    return cmd_sweep_tau(args.config, taus, out_dir=args.out, quiet=args.quiet)


if __name__ == "__main__":
    raise SystemExit(main())
