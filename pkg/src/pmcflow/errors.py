"""Exception types shared across the package."""


class PmcflowError(Exception):
    """Base class for all package errors."""


class ConfigError(PmcflowError):
    """Invalid run configuration (bad key, bad value, malformed file)."""


class ChartDomainError(PmcflowError):
    """A chart was evaluated where its metric data is invalid (e.g. sigma not SPD)."""


class ContractViolation(PmcflowError):
    """A caller broke an operation precondition (e.g. non-unit timelike vector)."""


class FlowError(PmcflowError):
    """Base class for failures that abort a flow in progress."""


class SpacelikeViolation(FlowError):
    """|Du| reached the causal limit; the graph is no longer uniformly spacelike."""

    def __init__(self, max_grad_sq: float, t: float | None = None):
        self.max_grad_sq = max_grad_sq
        self.t = t
        where = "" if t is None else f" at t={t:.6g}"
        super().__init__(f"spacelike guard tripped{where}: max sigma^ij u_i u_j = {max_grad_sq:.12g}")


class NonpositiveCurvature(FlowError):
    """H <= 0 at some node while a fractional power of H is required."""

    def __init__(self, min_h: float, p: float):
        self.min_h = min_h
        self.p = p
        super().__init__(f"mean curvature must stay positive for p={p} < 1; min H = {min_h:.12g}")


class StiffnessError(FlowError):
    """The stable explicit step collapsed below the representable floor."""

    def __init__(self, dt: float):
        self.dt = dt
        super().__init__(f"stable time step underflow: dt = {dt:.3e} < 1e-14")


class TiltGuardExceeded(FlowError):
    """max(vtilde) crossed the configured abort threshold."""

    def __init__(self, vtilde: float, limit: float):
        self.vtilde = vtilde
        self.limit = limit
        super().__init__(f"tilt guard tripped: max vtilde = {vtilde:.6g} > {limit:.6g}")


class InitialDataError(PmcflowError):
    """Initial hypersurface rejected before stepping (min H^p < tau)."""


class BoundViolation(PmcflowError):
    """A monitored a-priori bound failed beyond tolerance."""

    def __init__(self, bound: str, t: float, lhs: float, rhs: float, tol: float):
        self.bound = bound
        self.t = t
        self.lhs = lhs
        self.rhs = rhs
        self.tol = tol
        super().__init__(
            f"bound '{bound}' violated at t={t:.6g}: lhs={lhs:.12g} exceeds rhs={rhs:.12g} by more than tol={tol:.3g}"
        )
