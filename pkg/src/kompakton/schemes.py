"""Five-point periodic stencils for the four spatial discretizations.

Each method is a rational approximation: a mass stencil applied to the time
derivative and two antisymmetric stencils for the first and third space
derivatives.  Coefficients are stored as exact rationals and converted to
floating point once, at operator construction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import AnalysisError, ParameterError
from .grid import FieldState

OFFSETS = (-2, -1, 0, 1, 2)


class Scheme(enum.Enum):
    ISMAIL = "ismail"
    DE_FRUTOS = "de_frutos"
    PADE6 = "pade6"
    PADE8 = "pade8"

    @property
    def accuracy_orders(self):
        """(first-derivative order, third-derivative order) of the rational operators."""
        return _ACCURACY_ORDERS[self]

    @classmethod
    def from_name(cls, name: str) -> "Scheme":
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise ParameterError(
                f"unknown scheme {name!r}; expected one of "
                + ", ".join(s.value for s in cls)) from None


_ACCURACY_ORDERS = {
    Scheme.ISMAIL: (2, 2),
    Scheme.DE_FRUTOS: (6, 4),
    Scheme.PADE6: (4, 6),
    Scheme.PADE8: (8, 2),
}

_F = Fraction

_MASS_COEFFS = {
    Scheme.ISMAIL: (_F(0), _F(0), _F(1), _F(0), _F(0)),
    Scheme.DE_FRUTOS: tuple(_F(n, 120) for n in (1, 26, 66, 26, 1)),
    Scheme.PADE6: tuple(_F(n, 240) for n in (1, 56, 126, 56, 1)),
    Scheme.PADE8: tuple(_F(n, 70) for n in (1, 16, 36, 16, 1)),
}

_GRADIENT_COEFFS = {
    Scheme.ISMAIL: tuple(_F(n, 2) for n in (0, -1, 0, 1, 0)),
    Scheme.DE_FRUTOS: tuple(_F(n, 24) for n in (-1, -10, 0, 10, 1)),
    Scheme.PADE6: tuple(_F(n, 24) for n in (-1, -10, 0, 10, 1)),
    Scheme.PADE8: tuple(_F(n, 84) for n in (-5, -32, 0, 32, 5)),
}

# All four methods share the same third-difference stencil.
_THIRD_DIFF_COEFFS = tuple(_F(n, 2) for n in (-1, 2, 0, -2, 1))


@dataclass(frozen=True)
class StencilOperator:
    """A 5-point periodic stencil scaled by a power of the grid spacing.

    ``dx_power`` is 0 for mass operators, 1 for first-derivative stencils and
    3 for third-difference stencils.
    """

    coefficients: tuple
    dx_power: int
    dx: float = 1.0

    def __post_init__(self):
        if len(self.coefficients) != len(OFFSETS):
            raise ParameterError("stencil needs exactly 5 coefficients")
        if self.dx_power > 0 and self.dx <= 0:
            raise ParameterError(f"grid spacing must be positive, got {self.dx}")
        weights = np.array([float(c) for c in self.coefficients])
        weights /= self.dx ** self.dx_power
        object.__setattr__(self, "_weights", weights)

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def __call__(self, values: np.ndarray) -> np.ndarray:
        return periodic_stencil(self._weights, np.asarray(values, dtype=float))


def periodic_stencil(weights, values: np.ndarray) -> np.ndarray:
    """Apply a 5-point stencil with periodic wrap: out[m] = sum_j w_j * v[(m+o_j) % M]."""
    out = weights[2] * values
    for j, offset in ((0, -2), (1, -1), (3, 1), (4, 2)):
        if weights[j] != 0.0:
            out = out + weights[j] * np.roll(values, -offset)
    return out


def operator_A(scheme: Scheme) -> StencilOperator:
    """Mass stencil of the method (identity for the second-order scheme)."""
    return StencilOperator(_MASS_COEFFS[scheme], dx_power=0)


def operator_B(scheme: Scheme, dx: float) -> StencilOperator:
    """First-derivative stencil numerator; rational operator is B/A."""
    return StencilOperator(_GRADIENT_COEFFS[scheme], dx_power=1, dx=dx)


def operator_C(scheme: Scheme, dx: float) -> StencilOperator:
    """Third-derivative stencil numerator, shared by all four methods."""
    return StencilOperator(_THIRD_DIFF_COEFFS, dx_power=3, dx=dx)


def apply(op: StencilOperator, field: FieldState) -> FieldState:
    """Apply a stencil to a field, keeping its time stamp."""
    if field.values.size < len(OFFSETS):
        raise ParameterError("field must have at least 5 nodes")
    return FieldState(field.t, op(field.values))


def empirical_order(scheme: Scheme, derivative: int, grid_sizes=(64, 128, 256),
                    periods: int = 5) -> float:
    """Measured convergence order of the rational operator B/A or C/A.

    Applies the operator to samples of sin(x) on ``periods`` exact periods,
    halving the spacing across ``grid_sizes``, and returns the mean log2
    error ratio.  Ratios whose finer error sits at the rounding floor are
    discarded; if none survive an :class:`AnalysisError` is raised.
    """
    from .banded import PeriodicBandedMatrix, solve_periodic_banded

    if derivative not in (1, 3):
        raise ParameterError(f"derivative must be 1 or 3, got {derivative}")
    length = 2.0 * math.pi * periods
    errors = []
    for m in grid_sizes:
        dx = length / m
        x = np.arange(m) * dx
        u = np.sin(x)
        numerator = operator_B(scheme, dx) if derivative == 1 else operator_C(scheme, dx)
        mass = PeriodicBandedMatrix.from_stencil(operator_A(scheme), m)
        approx = solve_periodic_banded(mass, numerator(u))
        exact = np.cos(x) if derivative == 1 else -np.cos(x)
        errors.append(float(np.max(np.abs(approx - exact))))

    ratios = []
    for (coarse, fine), m_fine in zip(zip(errors, errors[1:]), grid_sizes[1:]):
        floor = 100.0 * np.finfo(float).eps * math.sqrt(m_fine)
        if fine <= floor or coarse <= 1.5 * fine:
            continue  # error at the rounding floor or no longer shrinking
        ratios.append(math.log2(coarse / fine))
    if not ratios:
        raise AnalysisError(
            f"operator errors {errors} are at the rounding floor; "
            "use coarser grids to measure the order")
    return float(np.mean(ratios))
