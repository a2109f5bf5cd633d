"""Pentadiagonal periodic systems: storage, products, and a direct solver.

The matrix is stored as five cyclic diagonals.  Solving splits it into a
plain banded core plus the six wrap entries coupling the first and last two
rows, which are folded back in through a rank-4 correction, keeping the cost
O(M) per solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack as _lapack

from .errors import LinearSolveError, ParameterError
from .schemes import OFFSETS, StencilOperator

# (row key, offset) pairs whose column index wraps around the boundary;
# negative row keys count from the end.
_WRAP_ENTRIES = ((0, -2), (0, -1), (1, -2), (-2, 2), (-1, 1), (-1, 2))

_MAX_CLOSURE_COND = 1e12


@dataclass
class PeriodicBandedMatrix:
    """Bandwidth-2 matrix with periodic corner coupling, as cyclic diagonals.

    ``diagonals[j][i]`` holds entry ``(i, (i + j - 2) % size)`` for
    ``j = 0..4``.
    """

    diagonals: np.ndarray

    def __post_init__(self):
        diags = np.asarray(self.diagonals, dtype=float)
        if diags.ndim != 2 or diags.shape[0] != len(OFFSETS):
            raise ParameterError(f"expected (5, M) diagonals, got {diags.shape}")
        if diags.shape[1] < 5:
            raise ParameterError("periodic banded matrix needs at least 5 rows")
        self.diagonals = diags

    @property
    def size(self) -> int:
        return self.diagonals.shape[1]

    @classmethod
    def from_stencil(cls, op: StencilOperator, size: int) -> "PeriodicBandedMatrix":
        return cls(np.repeat(op.weights[:, None], size, axis=1))

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = self.diagonals[2] * x
        for j, offset in ((0, -2), (1, -1), (3, 1), (4, 2)):
            out += self.diagonals[j] * np.roll(x, -offset)
        return out

    def to_dense(self) -> np.ndarray:
        m = self.size
        dense = np.zeros((m, m))
        rows = np.arange(m)
        for j, offset in enumerate(OFFSETS):
            dense[rows, (rows + offset) % m] += self.diagonals[j]
        return dense


class SolverWorkspace:
    """Reusable LAPACK buffers; avoids fresh page-faulted allocations per solve."""

    def __init__(self, size: int):
        self.size = size
        self.band = np.zeros((7, size), order="F")
        self.block = np.zeros((size, 5), order="F")


def solve_periodic_banded(mat: PeriodicBandedMatrix, rhs: np.ndarray,
                          workspace: SolverWorkspace = None) -> np.ndarray:
    """Solve ``mat @ x = rhs`` by banded LU plus a rank-4 wrap correction.

    Raises :class:`LinearSolveError` if the core factorization fails, the
    periodic closure is (numerically) singular, or the result is not finite.
    """
    m = mat.size
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (m,):
        raise ParameterError(f"rhs shape {rhs.shape} does not match matrix size {m}")
    if not np.isfinite(rhs).all():
        raise LinearSolveError("right-hand side contains non-finite entries")

    if workspace is None or workspace.size != m:
        workspace = SolverWorkspace(m)

    diags = mat.diagonals
    # LAPACK gbsv layout: band row 4 + i - j holds entry (i, j), plus two
    # spare rows on top for pivoting fill-in.
    band = workspace.band
    for j, offset in enumerate(OFFSETS):
        row = diags[j]
        if offset >= 0:
            band[4 - offset, offset:] = row[:m - offset]
            band[4 - offset, :offset] = 0.0
        else:
            band[4 - offset, :m + offset] = row[-offset:]
            band[4 - offset, m + offset:] = 0.0

    corner_rows = (0, 1, m - 2, m - 1)
    block = workspace.block
    block[:, 0] = rhs
    block[:, 1:] = 0.0
    for k, r in enumerate(corner_rows):
        block[r, 1 + k] = 1.0

    lu, piv, info = _lapack.dgbtrf(band, 2, 2, overwrite_ab=True)
    if info != 0:
        raise LinearSolveError(f"banded core factorization failed (info={info})")
    solved, info = _lapack.dgbtrs(lu, 2, 2, block, piv, overwrite_b=True)
    if info != 0:
        raise LinearSolveError(f"banded core solve failed (info={info})")

    y = solved[:, 0]
    z = solved[:, 1:]

    # Closure system: (I + V Z) t = V y, with V holding the six wrap entries.
    closure = np.eye(len(corner_rows))
    vy = np.zeros(len(corner_rows))
    for row_key, offset in _WRAP_ENTRIES:
        r = row_key % m
        k = corner_rows.index(r)
        col = (r + offset) % m
        value = diags[offset + 2][r]
        if value != 0.0:
            closure[k, :] += value * z[col, :]
            vy[k] += value * y[col]

    if not np.isfinite(closure).all() or np.linalg.cond(closure) > _MAX_CLOSURE_COND:
        raise LinearSolveError("periodic closure is numerically singular")
    correction = np.linalg.solve(closure, vy)
    x = y - z @ correction
    if not np.isfinite(x).all():
        raise LinearSolveError("solve produced non-finite values")
    return x
