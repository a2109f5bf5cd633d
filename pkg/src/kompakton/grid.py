"""Periodic grids, compacton parameterization, and exact-solution sampling.

The travelling-wave profile is ``peak * cos(b*xi)**(2*mu)`` inside a compact
support of width ``pi/b`` and exactly zero outside, where ``xi`` is the
position in the co-moving frame.  The nonlinearity exponent is kept as an
exact rational so families like ``p = 5/3`` do not drift through float
parsing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigurationError, ParameterError


def as_fraction(value) -> Fraction:
    """Coerce ``value`` (int, Fraction, "a/b" string, integral float) to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not value.is_integer():
            raise ParameterError(
                f"non-integral float exponent {value!r}; pass a string like '5/3'")
        return Fraction(int(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParameterError(f"cannot parse rational exponent {value!r}") from exc
    raise ParameterError(f"unsupported exponent type {type(value).__name__!r}")


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on ``[0, length)`` with nodes ``m * dx``.

    Node ``num_nodes`` is identified with node 0; all index arithmetic is
    modulo ``num_nodes``.
    """

    length: float
    num_nodes: int

    def __post_init__(self):
        if self.length <= 0:
            raise ParameterError(f"domain length must be positive, got {self.length}")
        if self.num_nodes < 8:
            raise ParameterError(f"need at least 8 nodes, got {self.num_nodes}")

    @property
    def dx(self) -> float:
        return self.length / self.num_nodes

    def positions(self) -> np.ndarray:
        return np.arange(self.num_nodes) * self.dx


@dataclass(frozen=True)
class TimeSpec:
    """Fixed-step time axis with a list of persistence instants."""

    dt: float
    t_end: float
    snapshot_times: tuple = ()

    def __post_init__(self):
        if self.dt <= 0:
            raise ParameterError(f"time step must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ParameterError(f"final time must be nonnegative, got {self.t_end}")
        snaps = tuple(sorted(set(float(s) for s in self.snapshot_times)))
        for s in snaps:
            if s < 0 or s > self.t_end + 1e-9 * max(1.0, self.t_end):
                raise ParameterError(f"snapshot time {s} outside [0, {self.t_end}]")
        object.__setattr__(self, "snapshot_times", snaps)


@dataclass(frozen=True)
class CompactonSpec:
    """Physical parameters of a single compacton plus the frame drift.

    Parameters
    ----------
    p : rational nonlinearity exponent, > 1
    c : compacton velocity, > 0
    x0 : initial peak position
    c0 : drift velocity of the computational frame (``c0 == c`` holds the
         profile stationary on the grid)
    """

    p: Fraction
    c: float
    x0: float = 0.0
    c0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "p", as_fraction(self.p))
        if self.p <= 1:
            raise ParameterError(f"exponent must exceed 1, got {self.p}")
        if self.c <= 0:
            raise ParameterError(f"compacton velocity must be positive, got {self.c}")

    @property
    def shape_exponent(self) -> float:
        """Power applied to the squared cosine (1/(p-1))."""
        return 1.0 / (float(self.p) - 1.0)

    @property
    def peak_amplitude(self) -> float:
        p = float(self.p)
        return (2.0 * self.c * p / (p + 1.0)) ** self.shape_exponent

    @property
    def half_width(self) -> float:
        """Half the support width; the profile vanishes beyond ``x0 +- half_width``."""
        return math.pi / (2.0 * self._cos_rate)

    @property
    def _cos_rate(self) -> float:
        p = float(self.p)
        return (p - 1.0) / (2.0 * p)

    @property
    def frame_speed(self) -> float:
        """Propagation speed of the profile in the computational frame."""
        return self.c - self.c0


@dataclass(frozen=True)
class FieldState:
    """Discrete solution values on the periodic grid at one time level."""

    t: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)

    @property
    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())


def compacton_value(spec: CompactonSpec, x, t: float = 0.0):
    """Exact profile value(s) at position(s) ``x`` and time ``t``.

    Zero outside the compact support; the squared cosine is formed first so
    fractional shape exponents never see a negative base near the edges.
    """
    xi = np.asarray(x, dtype=float) - spec.x0 - spec.frame_speed * t
    inside = np.abs(xi) < spec.half_width
    cos_sq = np.cos(spec._cos_rate * xi) ** 2
    values = np.where(inside, spec.peak_amplitude * cos_sq ** spec.shape_exponent, 0.0)
    if np.ndim(x) == 0:
        return float(values)
    return values


def support_edges(spec: CompactonSpec, t: float = 0.0):
    """(left, right) support edge positions at time ``t``."""
    shift = spec.frame_speed * t
    return (spec.x0 - spec.half_width + shift, spec.x0 + spec.half_width + shift)


def sample_initial(spec: CompactonSpec, grid: GridSpec) -> FieldState:
    """Sample the profile at ``t = 0`` on the grid nodes.

    The support must lie strictly inside ``(0, length)`` so the periodic wrap
    does not clip the initial condition.
    """
    left, right = support_edges(spec, 0.0)
    if left <= 0.0 or right >= grid.length:
        raise ConfigurationError(
            f"compacton support [{left:.6g}, {right:.6g}] not contained in "
            f"(0, {grid.length:.6g})")
    return FieldState(0.0, compacton_value(spec, grid.positions(), 0.0))


def signed_power(u, p):
    """``u**p`` for integer ``p``; odd extension ``sign(u)*|u|**p`` otherwise.

    Radiation amplitudes change sign, and real fractional powers of negative
    numbers are undefined; the odd extension preserves the antisymmetry of
    the flux terms.
    """
    frac = as_fraction(p)
    arr = np.asarray(u, dtype=float)
    if frac.denominator == 1:
        out = arr ** int(frac)
    else:
        out = np.sign(arr) * np.abs(arr) ** float(frac)
    if np.ndim(u) == 0:
        return float(out)
    return out


def signed_power_derivative(u, p):
    """Derivative of :func:`signed_power` with respect to ``u`` (needs p > 1)."""
    frac = as_fraction(p)
    arr = np.asarray(u, dtype=float)
    if frac.denominator == 1:
        n = int(frac)
        out = float(n) * arr ** (n - 1)
    else:
        q = float(frac)
        out = q * np.abs(arr) ** (q - 1.0)
    if np.ndim(u) == 0:
        return float(out)
    return out
