"""Rectangular breakpoint grids, look-up tables, and exact multilinear interpolation.

A table stores one value per grid corner, flattened in lexicographic order with
the *last* axis varying fastest (C order). Grids and tables are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import AxisTooShort, NotStrictlyIncreasing, OutOfHull

#: points this far (relative to axis span) outside the hull are clamped,
#: absorbing solver round-off; anything farther raises OutOfHull.
HULL_SLACK = 1e-9


@dataclass(frozen=True)
class Grid:
    """Rectangular grid of per-axis breakpoints."""

    axes: tuple[np.ndarray, ...]

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.axes)

    @property
    def num_corners(self) -> int:
        return int(np.prod([a.size for a in self.axes]))

    @property
    def num_cells(self) -> int:
        return int(np.prod([a.size - 1 for a in self.axes]))

    def strides(self) -> np.ndarray:
        """Flat-index strides, last axis fastest."""
        shape = self.shape
        s = np.ones(self.n, dtype=np.int64)
        for j in range(self.n - 2, -1, -1):
            s[j] = s[j + 1] * shape[j + 1]
        return s

    def flat_index(self, k: Sequence[int]) -> int:
        return int(np.dot(self.strides(), np.asarray(k, dtype=np.int64)))

    def corner(self, k: Sequence[int]) -> np.ndarray:
        return np.array([self.axes[j][k[j]] for j in range(self.n)])


@dataclass(frozen=True)
class LookupTable:
    """Grid plus one finite value per corner (flat, last axis fastest)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        if self.values.size != self.grid.num_corners:
            raise ValueError(
                f"table has {self.values.size} values, grid has "
                f"{self.grid.num_corners} corners"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("table values must be finite")

    def value_at(self, k: Sequence[int]) -> float:
        return float(self.values[self.grid.flat_index(k)])

    def cell_corner_values(self, cell: "CellIndex") -> np.ndarray:
        """Values at the 2^n corners of a cell; corner bit j indexes axis j."""
        n = self.grid.n
        strides = self.grid.strides()
        base = int(np.dot(strides, np.asarray(cell.t, dtype=np.int64)))
        out = np.empty(1 << n)
        for corner in range(1 << n):
            idx = base
            for j in range(n):
                if (corner >> j) & 1:
                    idx += strides[j]
            out[corner] = self.values[idx]
        return out


@dataclass(frozen=True)
class CellIndex:
    """One hyperrectangle of the grid: segment index per axis."""

    t: tuple[int, ...]

    def validate(self, grid: Grid) -> None:
        if len(self.t) != grid.n:
            raise ValueError("cell index arity mismatch")
        for j, tj in enumerate(self.t):
            if not 0 <= tj <= grid.axes[j].size - 2:
                raise ValueError(f"segment {tj} out of range on axis {j}")


def make_grid(axes: Iterable[Sequence[float]]) -> Grid:
    """Validate per-axis breakpoints and build a Grid."""
    arrs = []
    for j, raw in enumerate(axes):
        a = np.asarray(raw, dtype=float).copy()
        if a.ndim != 1 or a.size < 2:
            raise AxisTooShort(f"axis {j} needs at least 2 breakpoints")
        diffs = np.diff(a)
        scale = np.maximum(1.0, np.maximum(np.abs(a[:-1]), np.abs(a[1:])))
        if np.any(diffs <= 1e-12 * scale):
            raise NotStrictlyIncreasing(f"axis {j} is not strictly increasing")
        a.setflags(write=False)
        arrs.append(a)
    if not arrs:
        raise AxisTooShort("grid needs at least one axis")
    return Grid(axes=tuple(arrs))


def make_table(grid: Grid, values: Sequence[float]) -> LookupTable:
    v = np.asarray(values, dtype=float).copy()
    v.setflags(write=False)
    return LookupTable(grid=grid, values=v)


def _clamp(axis: np.ndarray, x: float, what: str) -> float:
    span = float(axis[-1] - axis[0])
    slack = HULL_SLACK * span
    if x < axis[0]:
        if axis[0] - x > slack:
            raise OutOfHull(f"{what}={x} below hull [{axis[0]}, {axis[-1]}]")
        return float(axis[0])
    if x > axis[-1]:
        if x - axis[-1] > slack:
            raise OutOfHull(f"{what}={x} above hull [{axis[0]}, {axis[-1]}]")
        return float(axis[-1])
    return float(x)


def find_segment(axis: np.ndarray, x: float) -> int:
    """Left-closed cell containing x: ties at a breakpoint go left-closed."""
    x = _clamp(axis, x, "x")
    k = int(np.searchsorted(axis, x, side="right")) - 1
    return min(max(k, 0), axis.size - 2)


def weights_1d(axis: Sequence[float], x: float) -> np.ndarray:
    """Convex-combination weights of x over one axis (two consecutive nonzeros)."""
    a = np.asarray(axis, dtype=float)
    x = _clamp(a, x, "x")
    k = find_segment(a, x)
    xi = np.zeros(a.size)
    frac = (x - a[k]) / (a[k + 1] - a[k])
    xi[k] = 1.0 - frac
    xi[k + 1] = frac
    return xi


def locate(grid: Grid, x: Sequence[float]) -> tuple[CellIndex, np.ndarray]:
    """Cell containing x and the per-axis fractional coordinates in [0, 1]."""
    x = np.asarray(x, dtype=float)
    if x.size != grid.n:
        raise ValueError(f"point has {x.size} coordinates, grid has {grid.n} axes")
    t = []
    frac = np.empty(grid.n)
    for j in range(grid.n):
        a = grid.axes[j]
        xj = _clamp(a, float(x[j]), f"x[{j}]")
        k = find_segment(a, xj)
        t.append(k)
        frac[j] = (xj - a[k]) / (a[k + 1] - a[k])
    return CellIndex(t=tuple(t)), frac


def lambda_weights(grid: Grid, x: Sequence[float]) -> dict[tuple[int, ...], float]:
    """Corner weights of x: products of the per-axis 1-D weights.

    Returns the nonzero weights only, keyed by corner multi-index; the support
    lies on the corners of a single cell, so there are at most 2^n entries.
    """
    cell, frac = locate(grid, x)
    out: dict[tuple[int, ...], float] = {}
    n = grid.n
    for corner in range(1 << n):
        lam = 1.0
        k = []
        for j in range(n):
            bit = (corner >> j) & 1
            lam *= frac[j] if bit else 1.0 - frac[j]
            k.append(cell.t[j] + bit)
        if lam > 0.0:
            out[tuple(k)] = lam
    return out


def interpolate(table: LookupTable, x: Sequence[float]) -> float:
    """Multilinear interpolant value at x (product-sum over cell corners)."""
    return float(interpolate_many(table, np.asarray(x, dtype=float)[None, :])[0])


def interpolate_many(table: LookupTable, points: np.ndarray) -> np.ndarray:
    """Vectorized interpolation of an array of points (P, n)."""
    grid = table.grid
    pts = np.array(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != grid.n:
        raise ValueError("points must have shape (P, n)")
    for j in range(grid.n):
        a = grid.axes[j]
        pts[:, j] = [_clamp(a, float(v), f"x[{j}]") for v in pts[:, j]]
    axes_flat = np.concatenate(grid.axes)
    offsets = np.zeros(grid.n + 1, dtype=np.int64)
    np.cumsum([a.size for a in grid.axes], out=offsets[1:])
    return _kernels.interp_many(
        axes_flat, offsets, grid.strides(), np.asarray(table.values), pts
    )


def interpolate_recursive(table: LookupTable, x: Sequence[float]) -> float:
    """Interpolant value via per-axis recursive reduction.

    Independent of the product-sum path in :func:`interpolate`; the two must
    agree to machine precision on any in-hull point.
    """
    grid = table.grid
    x = np.asarray(x, dtype=float)
    vals = np.asarray(table.values).reshape(grid.shape)

    def reduce(axis_j: int, block: np.ndarray) -> np.ndarray:
        a = grid.axes[axis_j]
        xj = _clamp(a, float(x[axis_j]), f"x[{axis_j}]")
        k = find_segment(a, xj)
        w = (xj - a[k]) / (a[k + 1] - a[k])
        return (1.0 - w) * block[k] + w * block[k + 1]

    block = vals
    for j in range(grid.n):
        block = reduce(j, block)
    return float(block)


def product_table(grid: Grid, monomial: Iterable[int]) -> LookupTable:
    """Table whose value at each corner is the product of the selected coordinates.

    ``monomial`` holds distinct 0-based axis indices. Coordinate products are
    multilinear, so interpolating this table reproduces the exact product
    anywhere inside the hull.
    """
    dims = sorted(set(int(d) for d in monomial))
    if not dims:
        raise ValueError("monomial must name at least one axis")
    for d in dims:
        if not 0 <= d < grid.n:
            raise ValueError(f"monomial axis {d} out of range")
    factors = [grid.axes[j] if j in dims else np.ones(grid.axes[j].size) for j in range(grid.n)]
    mesh = np.meshgrid(*factors, indexing="ij")
    vals = np.ones(grid.shape)
    for j in dims:
        vals = vals * mesh[j]
    flat = vals.reshape(-1).copy()
    flat.setflags(write=False)
    return LookupTable(grid=grid, values=flat)
