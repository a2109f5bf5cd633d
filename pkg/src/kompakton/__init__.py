"""Compacton propagation with compact stencils, and its radiation diagnostics."""

from .banded import PeriodicBandedMatrix, solve_periodic_banded
from .config import ExperimentConfig, parse_config
from .dispersion import (DispersionCurve, dispersion_curve, group_velocity,
                         peak_wavenumber, predicted_front_velocities)
from .errors import (AnalysisError, ConfigParseError, ConfigurationError,
                     InsufficientDataError, KompaktonError, LinearSolveError,
                     ParameterError, StepFailureError)
from .grid import (CompactonSpec, FieldState, GridSpec, TimeSpec, as_fraction,
                   compacton_value, sample_initial, signed_power,
                   signed_power_derivative, support_edges)
from .invariants import InvariantSeries, invariant, invariant_values
from .radiation import (AnalysisSettings, RadiationReport, RegressionFit, Side,
                        SideReport, analyze_trajectory, convergence_exponent,
                        detect_amplitude, front_position, front_velocity,
                        mean_envelope_amplitude, scaling_exponent, side_maximum)
from .schemes import (Scheme, StencilOperator, apply, empirical_order,
                      operator_A, operator_B, operator_C)
from .stepper import (NewtonReport, RunStatus, Stepper, StepperConfig,
                      TimeRule, Trajectory, jacobian, residual, run, step)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
