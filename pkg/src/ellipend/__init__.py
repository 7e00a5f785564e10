"""Rotational motion of a pendulum whose pivot traces a near-circular ellipse.

The package simulates the full equation of motion, provides the exact
rotation branches of the circular zero-gravity case, builds asymptotic
rotations for small ellipticity (an order-one-damping expansion and a
small-damping averaging pipeline), classifies stability, and quantifies
how far each asymptotic solution sits from high-accuracy numerics.
"""

from .averaging import (
    AveragedState,
    ScaledParams,
    averaged_rhs,
    averaged_stability,
    averaging_solution,
    stationary_closed_form_first,
    stationary_state,
)
from .compare import (
    ComparisonReport,
    SweepResult,
    SweepRow,
    compare_solution,
    reference_orbit,
    sweep_beta,
)
from .dynamics import (
    PeriodicOrbit,
    State,
    Trajectory,
    find_periodic_rotation,
    floquet_multipliers,
    integrate,
    integrate_physical,
    orbit_trajectory,
    rhs,
    rhs_physical,
)
from .errors import EllipendError
from .exact import ExactRotation, exact_branches, existence_window, stability_check
from .harmonic import HarmonicSeries, harmonic_response, residual, response_series
from .multiscale import (
    AsymptoticSolution,
    SolutionMethod,
    first_order_forcing,
    multiscale_solution,
    second_order_forcing,
    theta1_series,
)
from .params import (
    DimensionlessParams,
    PhysicalParams,
    Regime,
    classify_regime,
    load_params_file,
    nondimensionalize,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticSolution",
    "AveragedState",
    "ComparisonReport",
    "DimensionlessParams",
    "EllipendError",
    "ExactRotation",
    "HarmonicSeries",
    "PeriodicOrbit",
    "PhysicalParams",
    "Regime",
    "ScaledParams",
    "SolutionMethod",
    "State",
    "SweepResult",
    "SweepRow",
    "Trajectory",
    "averaged_rhs",
    "averaged_stability",
    "averaging_solution",
    "classify_regime",
    "compare_solution",
    "exact_branches",
    "existence_window",
    "find_periodic_rotation",
    "first_order_forcing",
    "floquet_multipliers",
    "harmonic_response",
    "integrate",
    "integrate_physical",
    "load_params_file",
    "multiscale_solution",
    "nondimensionalize",
    "orbit_trajectory",
    "reference_orbit",
    "residual",
    "response_series",
    "rhs",
    "rhs_physical",
    "second_order_forcing",
    "stability_check",
    "stationary_closed_form_first",
    "stationary_state",
    "sweep_beta",
    "theta1_series",
]
