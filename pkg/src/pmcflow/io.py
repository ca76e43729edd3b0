"""Artifact writers: monitor series, snapshots, manifests, residual tables.

Every writer is deterministic: floats are serialized through ``repr`` (which
round-trips doubles exactly), dict keys keep their insertion order, and no
timestamps or machine identifiers enter the run artifacts themselves.  Two
runs of the same config therefore produce byte-identical monitor files.  Wall
time lives only in the manifest, which records it as provenance, not output.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .flow_engine import MonitorRecord, RunResult, SweepResult
from .graph_geometry import GraphState
from .lagrangian import ResidualReport


def write_monitors_ndjson(monitors: Sequence[MonitorRecord], path: str | Path) -> None:
    """One JSON object per line, keys in fixed record order, None as null."""
    path = Path(path)
    lines = [json.dumps(rec.as_dict(), allow_nan=False) for rec in monitors]
    path.write_text("\n".join(lines) + "\n" if lines else "")


def read_monitors_ndjson(path: str | Path) -> list[MonitorRecord]:
    """Inverse of :func:`write_monitors_ndjson`."""
    records = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            records.append(MonitorRecord(**json.loads(line)))
    return records


def write_snapshot_csv(state: GraphState, path: str | Path) -> None:
    """Height function as rows of node coordinates plus u, C order."""
    path = Path(path)
    coords = state.grid.coordinates().reshape(-1, state.grid.n)
    u = np.asarray(state.u).reshape(-1)
    header = [f"x{i + 1}" for i in range(state.grid.n)] + ["u"]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row, val in zip(coords, u):
            writer.writerow([repr(float(c)) for c in row] + [repr(float(val))])


@dataclass(frozen=True)
class RunManifest:
    """Provenance for one flow run: what was asked, what happened, how long."""

    config: dict
    termination: str
    abort_reason: str | None
    steps: int
    final_t: float
    lam: float
    tolerances: dict
    wall_time_s: float
    version: str = field(default=__version__)

    def as_dict(self) -> dict:
        return {
            "version": self.version,
            "config": self.config,
            "termination": self.termination,
            "abort_reason": self.abort_reason,
            "steps": self.steps,
            "final_t": self.final_t,
            "lambda": self.lam,
            "tolerances": self.tolerances,
            "wall_time_s": self.wall_time_s,
        }


def build_manifest(echo: dict, result: RunResult, flow_tolerances: dict,
                   wall_time_s: float) -> RunManifest:
    return RunManifest(
        config=echo,
        termination=result.termination,
        abort_reason=result.abort_reason,
        steps=result.steps,
        final_t=result.final_state.t,
        lam=result.lam,
        tolerances=flow_tolerances,
        wall_time_s=wall_time_s,
    )


def write_manifest(manifest: RunManifest, path: str | Path) -> None:
    Path(path).write_text(json.dumps(manifest.as_dict(), indent=2, allow_nan=False) + "\n")


def write_run_artifacts(result: RunResult, out_dir: str | Path) -> None:
    """Monitors plus numbered snapshots under ``out_dir`` (created if needed)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_monitors_ndjson(result.monitors, out_dir / "monitors.ndjson")
    snap_dir = out_dir / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    for k, state in enumerate(result.states):
        write_snapshot_csv(state, snap_dir / f"u_{k}.csv")


def write_residuals_csv(reports: Sequence[ResidualReport], path: str | Path) -> None:
    """Residual grid as rows of identity, dt, h, max_residual."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["identity", "dt", "h", "max_residual"])
        for report in reports:
            for identity, dt, h, res in report.rows():
                writer.writerow([identity, repr(dt), repr(h), repr(res)])


def write_slopes_json(reports: Sequence[ResidualReport], path: str | Path) -> None:
    payload = [report.as_dict() for report in reports]
    Path(path).write_text(json.dumps(payload, indent=2, allow_nan=False) + "\n")


def write_sweep_json(sweep: SweepResult, path: str | Path) -> None:
    Path(path).write_text(json.dumps(sweep.as_dict(), indent=2, allow_nan=False) + "\n")
