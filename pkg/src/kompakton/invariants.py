"""Discrete conserved-quantity monitoring on the periodic grid.

Rectangle-rule quadrature of the four densities: u, u^(p+1), u*cos(x) and
u*sin(x).  On a uniform periodic grid the equal-weight rule is the natural
discrete counterpart of the conserved sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .grid import FieldState, GridSpec, as_fraction, signed_power


def invariant_values(values: np.ndarray, p, grid: GridSpec) -> np.ndarray:
    """All four invariants of one state, as a length-4 vector."""
    x = grid.positions()
    dx = grid.dx
    u = np.asarray(values, dtype=float)
    return np.array([
        dx * float(np.sum(u)),
        dx * float(np.sum(signed_power(u, as_fraction(p) + 1))),
        dx * float(np.sum(u * np.cos(x))),
        dx * float(np.sum(u * np.sin(x))),
    ])


def invariant(field: FieldState, index: int, p, grid: GridSpec) -> float:
    """Invariant ``index`` (1..4) of a field state."""
    if index not in (1, 2, 3, 4):
        raise ParameterError(f"invariant index must be in 1..4, got {index}")
    return float(invariant_values(field.values, p, grid)[index - 1])


@dataclass
class InvariantSeries:
    """Invariant values per snapshot; ``values[n, j-1]`` is invariant j at times[n]."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float).reshape(-1, 4)
        if self.values.shape[0] != self.times.size:
            raise ParameterError("invariant series lengths are inconsistent")

    def relative_drifts(self) -> np.ndarray:
        """|I_j(t) - I_j(0)| scaled by |I_j(0)| (absolute where I_j(0) = 0)."""
        if self.times.size == 0:
            return np.zeros((0, 4))
        base = self.values[0]
        scale = np.where(np.abs(base) > 0.0, np.abs(base), 1.0)
        return np.abs(self.values - base) / scale

    def max_relative_drift(self, index: int) -> float:
        """Largest drift of invariant ``index`` (1..4) over the series."""
        if index not in (1, 2, 3, 4):
            raise ParameterError(f"invariant index must be in 1..4, got {index}")
        drifts = self.relative_drifts()
        if drifts.shape[0] == 0:
            return 0.0
        return float(np.max(drifts[:, index - 1]))
