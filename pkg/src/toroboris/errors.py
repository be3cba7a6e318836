"""Exception types shared across the package."""

from __future__ import annotations


class ToroborisError(Exception):
    """Base class for all package errors."""


class AxisSingularity(ToroborisError):
    """Raised when a point comes closer to the symmetry axis than r_min.

    The toroidal frame and field are undefined on the axis; a trajectory
    visiting this region has left the modeled domain.
    """

    def __init__(self, r: float, r_min: float, t: float | None = None):
        self.r = r
        self.r_min = r_min
        self.t = t
        where = f" at t={t}" if t is not None else ""
        super().__init__(f"distance to axis r={r:.6g} fell below r_min={r_min:.6g}{where}")


class DomainError(ToroborisError):
    """Raised when the field magnitude profile leaves its valid range (b <= b_min)."""

    def __init__(self, b: float, b_min: float, t: float | None = None):
        self.b = b
        self.b_min = b_min
        self.t = t
        where = f" at t={t}" if t is not None else ""
        super().__init__(f"field profile b={b:.6g} is not above b_min={b_min:.6g}{where}")


class SanityGuard(ToroborisError):
    """Raised when the per-step displacement exceeds h times the velocity bound."""

    def __init__(self, displacement: float, bound: float, t: float | None = None):
        self.displacement = displacement
        self.bound = bound
        self.t = t
        where = f" at t={t}" if t is not None else ""
        super().__init__(
            f"step displacement {displacement:.6g} exceeds h*V_max={bound:.6g}{where}; "
            "the orbit is running away"
        )


class Unsupported(ToroborisError):
    """Raised when an optional model capability (e.g. a scalar potential) is absent."""


class BudgetExceeded(ToroborisError):
    """Raised when a run would need more steps than the configured budget."""

    def __init__(self, steps: float, budget: float):
        self.steps = steps
        self.budget = budget
        super().__init__(
            f"run needs {steps:.4g} steps, above the budget of {budget:.4g}; "
            "shrink the horizon constant c or use a larger epsilon"
        )


class GridMismatch(ToroborisError):
    """Raised when two series to be compared are not on the same time grid."""

    def __init__(self, max_diff: float):
        self.max_diff = max_diff
        super().__init__(f"time stamps differ by up to {max_diff:.4g} (> 1e-12)")


class SchemaError(ToroborisError):
    """Raised for malformed run configurations; carries a JSON-pointer-style path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
