"""Graded 1-D grid, difference operators, and weighted quadrature.

The grid clusters cells near x = 0 (where the equation degenerates and
concentration is expected) via faces at L * (j/N)^grading.  All operators are
built in "difference form" -- weighted sums of neighbour differences -- so
that constant fields are annihilated exactly in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "build_grid",
    "DiffOps",
    "diff_ops",
    "weighted_integral",
]

MIN_CELLS = 8  # difference stencils plus ghost handling need this many


@dataclass(frozen=True)
class Grid:
    """Cell faces and centers of a graded mesh on [0, L]."""

    faces: np.ndarray
    centers: np.ndarray
    widths: np.ndarray
    grading_exponent: float

    @property
    def n_cells(self) -> int:
        return self.centers.size

    @property
    def length(self) -> float:
        return float(self.faces[-1])


@dataclass
class Field:
    """Nonnegative grid function with its time stamp."""

    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")
        if np.any(self.values < 0.0):
            raise ValueError("field values must be nonnegative")

    def copy(self) -> "Field":
        return Field(self.values.copy(), self.time)

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


def build_grid(n_cells: int, grading_exponent: float = 2.0, length: float = 1.0) -> Grid:
    """Build the graded grid with faces at L * (j/N)^grading.

    grading_exponent = 1 gives a uniform grid; larger values cluster cells
    near x = 0.  Centers are arithmetic midpoints of the faces.
    """
    if n_cells < MIN_CELLS:
        raise ValueError(f"need at least {MIN_CELLS} cells, got {n_cells}")
    if not length > 0.0:
        raise ValueError(f"length must be positive, got {length}")
    if grading_exponent < 1.0:
        raise ValueError(f"grading exponent must be >= 1, got {grading_exponent}")
    j = np.arange(n_cells + 1, dtype=float)
    faces = length * (j / n_cells) ** grading_exponent
    faces[0] = 0.0
    faces[-1] = length
    centers = 0.5 * (faces[:-1] + faces[1:])
    widths = np.diff(faces)
    return Grid(faces=faces, centers=centers, widths=widths, grading_exponent=float(grading_exponent))


def _derivative_weights(d1: np.ndarray, d2: np.ndarray, order: int):
    """3-point difference-form weights exact for quadratics.

    For offsets d1, d2 of the two neighbours, returns (a1, a2) with
    f^(order)(x0) ~= a1*(f1 - f0) + a2*(f2 - f0).
    """
    if order == 1:
        a1 = d2 / (d1 * (d2 - d1))
        a2 = d1 / (d2 * (d1 - d2))
    elif order == 2:
        a1 = 2.0 / (d1 * (d1 - d2))
        a2 = 2.0 / (d2 * (d2 - d1))
    else:
        raise ValueError(order)
    return a1, a2


class DiffOps:
    """Second-order difference operators on the (possibly nonuniform) grid.

    ``bc="onesided"`` uses one-sided stencils at the two boundary centers
    (generic differentiation).  ``bc="mirror"`` reflects the first/last
    center across the boundary face, imposing the even extension that
    realizes the discrete no-flux conditions u_x = u_xxx = 0.
    """

    def __init__(self, grid: Grid, bc: str = "onesided"):
        if bc not in ("onesided", "mirror"):
            raise ValueError(f"unknown bc {bc!r}")
        self.grid = grid
        self.bc = bc
        x = grid.centers
        n = x.size

        idx1 = np.empty(n, dtype=int)
        idx2 = np.empty(n, dtype=int)
        idx1[1:-1] = np.arange(1, n - 1) - 1
        idx2[1:-1] = np.arange(1, n - 1) + 1
        d1 = np.empty(n)
        d2 = np.empty(n)
        d1[1:-1] = x[:-2] - x[1:-1]
        d2[1:-1] = x[2:] - x[1:-1]

        if bc == "onesided":
            idx1[0], idx2[0] = 1, 2
            d1[0], d2[0] = x[1] - x[0], x[2] - x[0]
            idx1[-1], idx2[-1] = n - 2, n - 3
            d1[-1], d2[-1] = x[-2] - x[-1], x[-3] - x[-1]
        else:
            # ghost centers mirrored across the boundary faces carry the
            # boundary-adjacent values, so their difference terms vanish and
            # only the interior-neighbour weight survives
            idx1[0], idx2[0] = 0, 1
            d1[0], d2[0] = -2.0 * (x[0] - grid.faces[0]), x[1] - x[0]
            idx1[-1], idx2[-1] = n - 1, n - 2
            d1[-1], d2[-1] = 2.0 * (grid.faces[-1] - x[-1]), x[-2] - x[-1]

        self._idx1, self._idx2 = idx1, idx2
        self._c1_d1, self._c1_d2 = _derivative_weights(d1, d2, 1)
        self._c2_d1, self._c2_d2 = _derivative_weights(d1, d2, 2)
        self._face_dx = x[1:] - x[:-1]

    def _apply(self, u: np.ndarray, a1: np.ndarray, a2: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return a1 * (u[self._idx1] - u) + a2 * (u[self._idx2] - u)

    def d1(self, u: np.ndarray) -> np.ndarray:
        """First derivative at cell centers."""
        return self._apply(u, self._c1_d1, self._c1_d2)

    def d2(self, u: np.ndarray) -> np.ndarray:
        """Second derivative at cell centers."""
        return self._apply(u, self._c2_d1, self._c2_d2)

    def face_gradient(self, u: np.ndarray) -> np.ndarray:
        """Two-point gradient (u_{i+1}-u_i)/(x_{i+1}-x_i) at interior faces."""
        u = np.asarray(u, dtype=float)
        return (u[1:] - u[:-1]) / self._face_dx


def diff_ops(grid: Grid, bc: str = "onesided") -> DiffOps:
    """Operator bundle {d1, d2, face_gradient} for the grid."""
    return DiffOps(grid, bc=bc)


def weighted_integral(
    f,
    grid: Grid,
    weight_exponent: float = 0.0,
    shift: float = 0.0,
) -> float:
    """Midpoint-rule quadrature of (x + shift)^w * f over the grid.

    For shift = 0 and w in (-1, 0) the singular weight is integrated
    cell-exactly on the first cell (closed form of the weight integral times
    the first-cell value) so the singularity does not dominate the error.
    Rejects w <= -1 with shift = 0, where the integral diverges.
    """
    values = f.values if isinstance(f, Field) else np.asarray(f, dtype=float)
    if values.shape != grid.centers.shape:
        raise ValueError("sample count does not match the grid")
    w = float(weight_exponent)
    if shift < 0.0:
        raise ValueError(f"shift must be nonnegative, got {shift}")
    if shift == 0.0 and w <= -1.0:
        raise ValueError(f"weight exponent {w} not integrable at the origin without shift")
    weights = (grid.centers + shift) ** w * grid.widths
    if shift == 0.0 and -1.0 < w < 0.0:
        # exact first-cell weight: integral of x^w over (0, x_{1/2})
        weights = weights.copy()
        weights[0] = grid.faces[1] ** (w + 1.0) / (w + 1.0)
    return float(np.dot(weights, values))
