"""Implicit time advancement of the semidiscrete system by Newton iteration.

Both one-step rules lead to a nonlinear system per step whose Jacobian is a
periodic pentadiagonal matrix; it is refactorized and solved directly at
every Newton iteration.  Convergence is declared on the residual max-norm;
on fine grids the third-difference stencil amplifies representation error
above any fixed tolerance, so an iterate that stagnates below a per-state
rounding-floor estimate is also accepted (flagged on the report).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .banded import PeriodicBandedMatrix, SolverWorkspace, solve_periodic_banded
from .errors import (ConfigurationError, LinearSolveError, ParameterError,
                     StepFailureError)
from .grid import (CompactonSpec, FieldState, GridSpec, TimeSpec,
                   sample_initial, signed_power, signed_power_derivative)
from .invariants import InvariantSeries, invariant_values
from .schemes import OFFSETS, Scheme, operator_A, operator_B, operator_C, periodic_stencil

_EPS = float(np.finfo(float).eps)
_FLOOR_FACTOR = 8.0
_DEFAULT_BLOWUP_FACTOR = 1e3


class TimeRule(enum.Enum):
    TRAPEZOIDAL = "trapezoidal"
    MIDPOINT = "midpoint"

    @classmethod
    def from_name(cls, name: str) -> "TimeRule":
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ParameterError(
                f"unknown time rule {name!r}; expected 'trapezoidal' or 'midpoint'"
            ) from None


@dataclass(frozen=True)
class StepperConfig:
    rule: TimeRule = TimeRule.MIDPOINT
    newton_abs_tol: float = 1e-12
    newton_max_iters: int = 20
    blowup_threshold: Optional[float] = None  # None: 1e3 x initial peak amplitude

    def __post_init__(self):
        if self.newton_abs_tol <= 0:
            raise ParameterError("newton_abs_tol must be positive")
        if self.newton_max_iters < 1:
            raise ParameterError("newton_max_iters must be at least 1")
        if self.blowup_threshold is not None and self.blowup_threshold <= 0:
            raise ParameterError("blowup_threshold must be positive")


@dataclass
class NewtonReport:
    iterations: int
    final_residual: float
    converged: bool
    at_rounding_floor: bool = False


class RunStatus(enum.Enum):
    COMPLETED = "completed"
    BLOWUP = "blowup"
    SOLVER_FAILURE = "solver_failure"


@dataclass
class Trajectory:
    """Snapshots, per-step Newton reports and invariant series of one run."""

    scheme: Scheme
    spec: CompactonSpec
    grid: GridSpec
    dt: float
    states: list
    reports: list
    invariants: InvariantSeries
    status: RunStatus
    end_time: float
    failure_detail: Optional[str] = None

    @property
    def blown_up(self) -> bool:
        return self.status is RunStatus.BLOWUP

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])


class Stepper:
    """Owns the operator weights for one (scheme, grid, dt) combination."""

    def __init__(self, scheme: Scheme, config: StepperConfig, spec: CompactonSpec,
                 grid: GridSpec, dt: float):
        if dt <= 0:
            raise ParameterError(f"time step must be positive, got {dt}")
        self.scheme = scheme
        self.config = config
        self.spec = spec
        self.grid = grid
        self.dt = dt
        dx = grid.dx
        self._mass = operator_A(scheme).weights
        self._grad = operator_B(scheme, dx).weights
        self._flux = self._grad + operator_C(scheme, dx).weights
        # Constant part of the Jacobian diagonals: A/dt - c0*B/2.
        self._const = self._mass / dt - spec.c0 * self._grad / 2.0
        self._mass_max = float(np.max(np.abs(self._mass)))
        self._grad_max = float(np.max(np.abs(self._grad)))
        self._flux_max = float(np.max(np.abs(self._flux)))
        self._workspace = SolverWorkspace(grid.num_nodes)
        self._jac_diags = np.empty((len(OFFSETS), grid.num_nodes))

    def residual(self, u_old: np.ndarray, u_new: np.ndarray) -> np.ndarray:
        du = u_new - u_old
        avg = 0.5 * (u_new + u_old)
        out = periodic_stencil(self._mass, du) / self.dt
        if self.spec.c0 != 0.0:
            out = out - self.spec.c0 * periodic_stencil(self._grad, avg)
        if self.config.rule is TimeRule.MIDPOINT:
            flux_arg = signed_power(avg, self.spec.p)
        else:
            flux_arg = 0.5 * (signed_power(u_new, self.spec.p)
                              + signed_power(u_old, self.spec.p))
        return out + periodic_stencil(self._flux, flux_arg)

    def jacobian(self, u_old: np.ndarray, u_new: np.ndarray,
                 reuse_buffer: bool = False) -> PeriodicBandedMatrix:
        if self.config.rule is TimeRule.MIDPOINT:
            w = 0.5 * signed_power_derivative(0.5 * (u_new + u_old), self.spec.p)
        else:
            w = 0.5 * signed_power_derivative(u_new, self.spec.p)
        diags = self._jac_diags if reuse_buffer else np.empty(self._jac_diags.shape)
        for j, offset in enumerate(OFFSETS):
            row = diags[j]
            # row[i] = const_j + flux_j * w[(i + offset) % M], without a temporary
            if offset >= 0:
                np.multiply(self._flux[j], w[offset:], out=row[:row.size - offset])
                np.multiply(self._flux[j], w[:offset], out=row[row.size - offset:])
            else:
                np.multiply(self._flux[j], w[:offset], out=row[-offset:])
                np.multiply(self._flux[j], w[offset:], out=row[:-offset])
            row += self._const[j]
        return PeriodicBandedMatrix(diags)

    def _residual_floor(self, u: np.ndarray) -> float:
        """Representation-error scale of the residual at state ``u``."""
        umax = float(np.max(np.abs(u)))
        pwmax = umax ** float(self.spec.p)
        scale = max(self._mass_max * umax / self.dt,
                    abs(self.spec.c0) * self._grad_max * umax,
                    self._flux_max * pwmax)
        return _FLOOR_FACTOR * _EPS * scale

    def newton_step(self, u_old: np.ndarray):
        """One implicit step from ``u_old``; returns (u_new, NewtonReport)."""
        tol = self.config.newton_abs_tol
        u = u_old.copy()
        res = self.residual(u_old, u)
        if not np.isfinite(res).all():
            raise StepFailureError("residual is not finite",
                                   NewtonReport(0, float("inf"), False),
                                   reason="non-finite")
        rnorm = float(np.max(np.abs(res)))
        if rnorm <= tol:
            return u, NewtonReport(0, rnorm, True)

        best_norm, best_u = rnorm, u
        prev_norm = float("inf")
        for iteration in range(1, self.config.newton_max_iters + 1):
            jac = self.jacobian(u_old, u, reuse_buffer=True)
            delta = solve_periodic_banded(jac, res, self._workspace)
            u = u - delta
            res = self.residual(u_old, u)
            if not np.isfinite(res).all():
                raise StepFailureError(
                    "Newton iterate produced a non-finite residual",
                    NewtonReport(iteration, float("inf"), False),
                    reason="non-finite")
            rnorm = float(np.max(np.abs(res)))
            if rnorm < best_norm:
                best_norm, best_u = rnorm, u
            if rnorm <= tol:
                return u, NewtonReport(iteration, rnorm, True)
            # Stagnation at the rounding floor: no further progress possible.
            if rnorm <= self._residual_floor(u) and rnorm >= 0.5 * prev_norm:
                return best_u, NewtonReport(iteration, best_norm, True,
                                            at_rounding_floor=True)
            prev_norm = rnorm

        if best_norm <= self._residual_floor(best_u):
            return best_u, NewtonReport(self.config.newton_max_iters, best_norm,
                                        True, at_rounding_floor=True)
        raise StepFailureError(
            f"Newton did not converge in {self.config.newton_max_iters} iterations "
            f"(residual {best_norm:.3e})",
            NewtonReport(self.config.newton_max_iters, best_norm, False),
            reason="newton")


def residual(scheme: Scheme, config: StepperConfig, state: FieldState,
             candidate: FieldState, dt: float, spec: CompactonSpec,
             grid: GridSpec) -> np.ndarray:
    """Residual of the implicit equation linking ``state`` to ``candidate``."""
    if state.values.shape != candidate.values.shape:
        raise ParameterError("states have mismatched lengths")
    for fld in (state, candidate):
        if not fld.is_finite:
            raise StepFailureError("non-finite input state", reason="non-finite")
    return Stepper(scheme, config, spec, grid, dt).residual(state.values,
                                                            candidate.values)


def jacobian(scheme: Scheme, config: StepperConfig, state: FieldState,
             candidate: FieldState, dt: float, spec: CompactonSpec,
             grid: GridSpec) -> PeriodicBandedMatrix:
    """Jacobian of the implicit equation with respect to the new time level."""
    return Stepper(scheme, config, spec, grid, dt).jacobian(state.values,
                                                            candidate.values)


def step(scheme: Scheme, config: StepperConfig, state: FieldState, dt: float,
         spec: CompactonSpec, grid: GridSpec):
    """Advance one time level; returns (FieldState, NewtonReport)."""
    if not state.is_finite:
        raise StepFailureError("non-finite input state", reason="non-finite")
    stepper = Stepper(scheme, config, spec, grid, dt)
    u_new, report = stepper.newton_step(state.values)
    return FieldState(state.t + dt, u_new), report


def run(scheme: Scheme, config: StepperConfig, spec: CompactonSpec,
        grid: GridSpec, time: TimeSpec) -> Trajectory:
    """Integrate from the sampled initial profile to ``t_end`` or blow-up.

    The trajectory records the field and all four invariants at every
    snapshot time; on failure the partial trajectory is returned with the
    status flag set instead of raising.
    """
    dt = time.dt
    total_steps = int(round(time.t_end / dt))
    if abs(total_steps * dt - time.t_end) > 1e-8 * max(1.0, time.t_end):
        raise ConfigurationError(
            f"t_end={time.t_end} is not an integer number of steps of dt={dt}")
    snap_steps = sorted({min(int(round(s / dt)), total_steps)
                         for s in time.snapshot_times})

    initial = sample_initial(spec, grid)
    threshold = config.blowup_threshold
    if threshold is None:
        threshold = _DEFAULT_BLOWUP_FACTOR * spec.peak_amplitude

    stepper = Stepper(scheme, config, spec, grid, dt)
    u = initial.values.copy()
    states, reports = [], []
    inv_times, inv_rows = [], []

    def record(step_index, values):
        t = step_index * dt
        states.append(FieldState(t, values.copy()))
        inv_times.append(t)
        inv_rows.append(invariant_values(values, spec.p, grid))

    if snap_steps and snap_steps[0] == 0:
        record(0, u)
        snap_steps = snap_steps[1:]

    status = RunStatus.COMPLETED
    detail = None
    reached = 0
    for n in range(1, total_steps + 1):
        try:
            u_new, report = stepper.newton_step(u)
        except StepFailureError as exc:
            status = RunStatus.BLOWUP
            detail = f"step to t={n * dt:.6g}: {exc}"
            if exc.report is not None:
                reports.append(exc.report)
            break
        except LinearSolveError as exc:
            status = RunStatus.SOLVER_FAILURE
            detail = f"step to t={n * dt:.6g}: {exc}"
            break
        reports.append(report)
        if float(np.max(np.abs(u_new))) > threshold:
            status = RunStatus.BLOWUP
            detail = (f"amplitude exceeded {threshold:.6g} at t={n * dt:.6g}")
            break
        u = u_new
        reached = n
        if snap_steps and n == snap_steps[0]:
            record(n, u)
            snap_steps = snap_steps[1:]

    series = InvariantSeries(np.array(inv_times),
                             np.array(inv_rows).reshape(-1, 4))
    return Trajectory(scheme=scheme, spec=spec, grid=grid, dt=dt,
                      states=states, reports=reports, invariants=series,
                      status=status, end_time=reached * dt,
                      failure_detail=detail)
