"""Charged-particle pushers and slow-drift studies in toroidal fields.

The package provides the standard and modified Boris integrators (in
equivalent two-step and one-step forms), analytic axisymmetric toroidal
field models with numerical self-validation, the slow guiding-center
system as an independent comparator, and an experiment harness for
error-scaling studies, all driven by a deterministic CSV/JSON CLI.
"""

from .boris import (
    ParticleState,
    PusherConfig,
    Trajectory,
    TwoStepWindow,
    filter_initial_velocity,
    initialize,
    integrate,
    magnetic_moment,
    nondegeneracy_sigma,
    one_step_push,
    solve_rotation,
    two_step_advance,
)
from .drift import (
    DriftConfig,
    DriftState,
    DriftTrajectory,
    drift_init,
    drift_integrate,
    drift_rhs,
    guiding_center,
)
from .errors import (
    AxisSingularity,
    BudgetExceeded,
    DomainError,
    GridMismatch,
    SanityGuard,
    SchemaError,
    ToroborisError,
    Unsupported,
)
from .geometry import (
    CylindricalFrame,
    FieldSample,
    ToroidalFieldModel,
    UniformFieldModel,
    ValidationReport,
    check_field,
    eval_field,
    frame,
    potential,
    toroidal_model,
    toroidal_probes,
)
from .harness import (
    ConvergencePoint,
    ConvergenceReport,
    ErrorSeries,
    ExperimentSpec,
    ObservableSeries,
    Theorem1Report,
    build_convergence_report,
    convergence_study,
    error_vs_drift,
    error_vs_reference,
    fit_loglog_slope,
    observables,
    run_drift,
    run_reference,
    run_trajectory,
    theorem1_suite,
)

__version__ = "0.1.0"

__all__ = [
    "AxisSingularity",
    "BudgetExceeded",
    "ConvergencePoint",
    "ConvergenceReport",
    "CylindricalFrame",
    "DomainError",
    "DriftConfig",
    "DriftState",
    "DriftTrajectory",
    "ErrorSeries",
    "ExperimentSpec",
    "FieldSample",
    "GridMismatch",
    "ObservableSeries",
    "ParticleState",
    "PusherConfig",
    "SanityGuard",
    "SchemaError",
    "Theorem1Report",
    "ToroborisError",
    "ToroidalFieldModel",
    "Trajectory",
    "TwoStepWindow",
    "UniformFieldModel",
    "Unsupported",
    "ValidationReport",
    "build_convergence_report",
    "check_field",
    "convergence_study",
    "drift_init",
    "drift_integrate",
    "drift_rhs",
    "error_vs_drift",
    "error_vs_reference",
    "eval_field",
    "filter_initial_velocity",
    "fit_loglog_slope",
    "frame",
    "guiding_center",
    "initialize",
    "integrate",
    "magnetic_moment",
    "nondegeneracy_sigma",
    "observables",
    "one_step_push",
    "potential",
    "run_drift",
    "run_reference",
    "run_trajectory",
    "solve_rotation",
    "theorem1_suite",
    "toroidal_model",
    "toroidal_probes",
    "two_step_advance",
]
