"""Power mean curvature flow of spacelike graphs in Lorentzian product spacetimes.

The package simulates closed spacelike graph hypersurfaces moving with normal
speed H^p - tau (0 < p <= 1) inside a conformally split Lorentzian product,
and verifies the discrete geometry against the exact evolution identities.

Layout:

- :mod:`pmcflow.spacetime` — ambient charts: metric, Christoffels, curvature.
- :mod:`pmcflow.graph_geometry` — induced geometry of a height function.
- :mod:`pmcflow.flow_engine` — explicit time stepping, monitors, bounds.
- :mod:`pmcflow.lagrangian` — parametric curve verifier for the identities.
- :mod:`pmcflow.config` / :mod:`pmcflow.io` / :mod:`pmcflow.cli` — TOML
  configs, deterministic artifacts, command-line driver.
- :mod:`pmcflow.kernels` — stencil kernels, numba-compiled with a pure numpy
  fallback (PMCFLOW_BACKEND=auto|numba|numpy).
"""

__version__ = "0.1.0"

from .errors import (
    BoundViolation,
    ChartDomainError,
    ConfigError,
    ContractViolation,
    FlowError,
    InitialDataError,
    NonpositiveCurvature,
    PmcflowError,
    SpacelikeViolation,
    StiffnessError,
    TiltGuardExceeded,
)
from .presets import ScaleFactor, preset_names, scale_preset
from .spacetime import (
    ChartPoint,
    CustomChart,
    MinkowskiTorus,
    RobertsonWalker,
    SpacetimeChart,
    christoffel_bar,
    lambda_bound,
    ricci_timelike,
    slice_mean_curvature,
    slice_second_fundamental_form,
)
from .graph_geometry import (
    GeometryFields,
    Grid,
    GraphState,
    assemble_fields,
    mean_curvature,
    normal_vector,
    second_fundamental_norm,
    spatial_gradient,
    tilt,
)
from .flow_engine import (
    DEFAULT_BOUND_C,
    BoundsReport,
    FlowConfig,
    MonitorRecord,
    RunResult,
    SweepResult,
    check_bounds,
    rhs,
    run,
    stable_dt,
    step,
    tau_sweep,
)
from .lagrangian import (
    CurveFields,
    IDENTITIES,
    ParametricState,
    ResidualReport,
    Scenario,
    curve_geometry,
    flow_step_lagrangian,
    hp_consistency_gap,
    identity_suite,
    scenario_names,
    scenario_state,
    verify_identity,
)
from .config import RunSetup, load_config, parse_config
from .io import (
    RunManifest,
    build_manifest,
    read_monitors_ndjson,
    write_manifest,
    write_monitors_ndjson,
    write_residuals_csv,
    write_run_artifacts,
    write_slopes_json,
    write_snapshot_csv,
    write_sweep_json,
)

__all__ = [
    "__version__",
    # errors
    "PmcflowError", "ConfigError", "ChartDomainError", "ContractViolation",
    "FlowError", "SpacelikeViolation", "NonpositiveCurvature", "StiffnessError",
    "TiltGuardExceeded", "InitialDataError", "BoundViolation",
    # presets
    "ScaleFactor", "scale_preset", "preset_names",
    # spacetime
    "SpacetimeChart", "MinkowskiTorus", "RobertsonWalker", "CustomChart",
    "ChartPoint", "christoffel_bar", "slice_second_fundamental_form",
    "slice_mean_curvature", "ricci_timelike", "lambda_bound",
    # graph geometry
    "Grid", "GraphState", "GeometryFields", "assemble_fields", "tilt",
    "spatial_gradient", "mean_curvature", "second_fundamental_norm",
    "normal_vector",
    # flow engine
    "FlowConfig", "MonitorRecord", "RunResult", "BoundsReport", "SweepResult",
    "DEFAULT_BOUND_C", "rhs", "stable_dt", "step", "run", "check_bounds",
    "tau_sweep",
    # lagrangian verifier
    "ParametricState", "CurveFields", "Scenario", "ResidualReport",
    "IDENTITIES", "curve_geometry", "flow_step_lagrangian", "verify_identity",
    "identity_suite", "scenario_names", "scenario_state", "hp_consistency_gap",
    # config / io
    "RunSetup", "load_config", "parse_config", "RunManifest", "build_manifest",
    "write_monitors_ndjson", "read_monitors_ndjson", "write_snapshot_csv",
    "write_manifest", "write_run_artifacts", "write_residuals_csv",
    "write_slopes_json", "write_sweep_json",
]
