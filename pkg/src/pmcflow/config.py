"""TOML run configuration: parsing, validation, and state construction.

A config file fully determines one flow run.  Top-level keys select the
ambient chart and flow parameters; the ``[grid]``, ``[u0]``, and ``[output]``
tables size the discretization, build the initial height function, and route
the artifacts.  Every diagnostic names the offending key so a bad file fails
fast with an actionable message.

Example::

    family = "robertson-walker"
    a-preset = "crossing"
    u0-preset = "const"
    p = 0.5
    tau = 0.5
    t_max = 10.0
    cfl_safety = 0.2
    integrator = "rk2"
    eps_stationary = 1e-5

    [grid]
    n = 1
    sizes = [64]

    [u0]
    value = 1.0

    [output]
    stride = 10
    dir = "out"
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .flow_engine import FlowConfig
from .graph_geometry import Grid, GraphState
from .presets import preset_names
from .spacetime import MinkowskiTorus, RobertsonWalker, SpacetimeChart

_FAMILIES = ("minkowski-torus", "robertson-walker")
_U0_PRESETS = ("const", "sinusoid", "file")

_TOP_KEYS = {
    "family", "a-preset", "u0-preset", "p", "tau", "t_max",
    "cfl_safety", "integrator", "eps_stationary",
    "grid", "u0", "output",
}
_GRID_KEYS = {"n", "sizes", "periods"}
_U0_KEYS = {"value", "amplitude", "mode", "offset", "path"}
_OUTPUT_KEYS = {"stride", "snapshot-stride", "dir"}


@dataclass(frozen=True)
class RunSetup:
    """Everything a run needs, decoded from one config file."""

    initial: GraphState
    flow: FlowConfig
    out_dir: Path
    echo: dict  # parsed config as written, for the manifest


def _require(table: dict, key: str, where: str = ""):
    if key not in table:
        loc = f" in [{where}]" if where else ""
        raise ConfigError(f"missing required key '{key}'{loc}")
    return table[key]


def _reject_unknown(table: dict, allowed: set, where: str = "") -> None:
    unknown = sorted(set(table) - allowed)
    if unknown:
        loc = f" in [{where}]" if where else ""
        known = ", ".join(sorted(allowed))
        raise ConfigError(
            f"unknown key '{unknown[0]}'{loc}; known keys: {known}"
        )


def _as_float(table: dict, key: str, default=None, where: str = "") -> float:
    if key not in table:
        if default is None:
            return _require(table, key, where)  # raises
        return float(default)
    val = table[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"key '{key}' must be a number, got {val!r}")
    return float(val)


def _as_int(table: dict, key: str, default=None, where: str = "") -> int:
    if key not in table:
        if default is None:
            return _require(table, key, where)  # raises
        return int(default)
    val = table[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"key '{key}' must be an integer, got {val!r}")
    return val


def _as_str(table: dict, key: str, default=None, where: str = "") -> str:
    if key not in table:
        if default is None:
            return _require(table, key, where)  # raises
        return str(default)
    val = table[key]
    if not isinstance(val, str):
        raise ConfigError(f"key '{key}' must be a string, got {val!r}")
    return val


def _build_chart(raw: dict, n: int) -> SpacetimeChart:
    family = _as_str(raw, "family")
    if family not in _FAMILIES:
        known = ", ".join(_FAMILIES)
        raise ConfigError(f"key 'family' must be one of {known}; got {family!r}")
    if family == "minkowski-torus":
        if "a-preset" in raw:
            raise ConfigError(
                "key 'a-preset' only applies to family = 'robertson-walker'"
            )
        return MinkowskiTorus(n)
    preset = _as_str(raw, "a-preset")
    if preset not in preset_names():
        known = ", ".join(preset_names())
        raise ConfigError(f"key 'a-preset' must be one of {known}; got {preset!r}")
    return RobertsonWalker(n, preset)


def _build_grid(raw: dict) -> Grid:
    table = raw.get("grid")
    if not isinstance(table, dict):
        raise ConfigError("missing required table [grid]")
    _reject_unknown(table, _GRID_KEYS, "grid")
    n = _as_int(table, "n", where="grid")
    if n not in (1, 2):
        raise ConfigError(f"key 'n' must be 1 or 2, got {n}")
    sizes = _require(table, "sizes", "grid")
    if not isinstance(sizes, list) or not all(
        isinstance(m, int) and not isinstance(m, bool) for m in sizes
    ):
        raise ConfigError(f"key 'sizes' must be a list of integers, got {sizes!r}")
    if len(sizes) != n:
        raise ConfigError(f"key 'sizes' must list {n} entries for n = {n}, got {sizes}")
    periods = table.get("periods", [2.0 * np.pi] * n)
    if not isinstance(periods, list) or not all(
        isinstance(L, (int, float)) and not isinstance(L, bool) for L in periods
    ):
        raise ConfigError(f"key 'periods' must be a list of numbers, got {periods!r}")
    if len(periods) != n:
        raise ConfigError(f"key 'periods' must list {n} entries for n = {n}, got {periods}")
    try:
        return Grid(n, tuple(sizes), tuple(float(L) for L in periods))
    except ValueError as exc:
        raise ConfigError(f"invalid [grid]: {exc}") from exc


def _build_u0(raw: dict, grid: Grid, config_dir: Path) -> np.ndarray:
    preset = _as_str(raw, "u0-preset")
    if preset not in _U0_PRESETS:
        known = ", ".join(_U0_PRESETS)
        raise ConfigError(f"key 'u0-preset' must be one of {known}; got {preset!r}")
    table = raw.get("u0", {})
    if not isinstance(table, dict):
        raise ConfigError("[u0] must be a table")
    _reject_unknown(table, _U0_KEYS, "u0")

    if preset == "const":
        value = _as_float(table, "value", default=0.0)
        return np.full(grid.sizes, value)

    if preset == "sinusoid":
        amplitude = _as_float(table, "amplitude", where="u0")
        mode = _as_int(table, "mode", default=1)
        if mode < 1:
            raise ConfigError(f"key 'mode' must be >= 1, got {mode}")
        offset = _as_float(table, "offset", default=0.0)
        # offset + amplitude * sin(2 pi k x1 / L1): varies along the first
        # axis only, which keeps the 1D and 2D forms of one config comparable
        coords = grid.coordinates()
        phase = 2.0 * np.pi * mode * coords[..., 0] / grid.periods[0]
        return offset + amplitude * np.sin(phase)

    path_str = _as_str(table, "path", where="u0")
    path = Path(path_str)
    if not path.is_absolute():
        path = config_dir / path
    try:
        flat = np.loadtxt(path, dtype=float)
    except OSError as exc:
        raise ConfigError(f"key 'path': cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"key 'path': {path} is not numeric text: {exc}") from exc
    try:
        return np.asarray(flat, dtype=float).reshape(grid.sizes)
    except ValueError as exc:
        raise ConfigError(
            f"key 'path': {path} holds {np.asarray(flat).size} values, "
            f"grid expects {int(np.prod(grid.sizes))}"
        ) from exc


def parse_config(text: str, config_dir: Path | None = None) -> RunSetup:
    """Decode config text into an initial state, flow settings, and output dir."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML: {exc}") from exc

    _reject_unknown(raw, _TOP_KEYS)
    grid = _build_grid(raw)
    chart = _build_chart(raw, grid.n)
    u0 = _build_u0(raw, grid, config_dir or Path.cwd())

    out_table = raw.get("output", {})
    if not isinstance(out_table, dict):
        raise ConfigError("[output] must be a table")
    _reject_unknown(out_table, _OUTPUT_KEYS, "output")
    stride = _as_int(out_table, "stride", default=1)
    if stride < 1:
        raise ConfigError(f"key 'stride' must be >= 1, got {stride}")
    snapshot_stride = _as_int(out_table, "snapshot-stride", default=0)
    if snapshot_stride < 0:
        raise ConfigError(f"key 'snapshot-stride' must be >= 0, got {snapshot_stride}")
    out_dir = Path(_as_str(out_table, "dir", default="out"))

    flow = FlowConfig(
        p=_as_float(raw, "p"),
        tau=_as_float(raw, "tau"),
        t_max=_as_float(raw, "t_max"),
        cfl_safety=_as_float(raw, "cfl_safety", default=0.2),
        eps_stationary=_as_float(raw, "eps_stationary", default=1e-6),
        integrator=_as_str(raw, "integrator", default="euler"),
        monitor_stride=stride,
        snapshot_stride=snapshot_stride,
    )
    try:
        flow.validate()
    except ConfigError as exc:
        raise ConfigError(f"invalid value: {exc}") from exc

    try:
        initial = GraphState(t=0.0, u=u0, grid=grid, chart=chart)
    except ValueError as exc:
        raise ConfigError(f"invalid initial data: {exc}") from exc
    return RunSetup(initial=initial, flow=flow, out_dir=out_dir, echo=raw)


def load_config(path: str | Path) -> RunSetup:
    """Read and decode a TOML config file; see :func:`parse_config`."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text, config_dir=path.parent)
