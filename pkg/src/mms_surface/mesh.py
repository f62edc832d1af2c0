"""Rectangular element grids, adjacency and skeleton lines.

Elements are indexed row-major from the lower-left corner:
``eid = row * nx + col``. All tie-breaks follow that order.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from .element import Axis, ElementGeometry


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    BOTTOM = "bottom"
    TOP = "top"


@dataclass(frozen=True)
class BoundaryScaling:
    """Linear shrinking of the outermost element rows and columns.

    The outermost row has width ``factor * h`` and the widths grow linearly
    towards the interior width ``h`` over ``rows`` rows. ``h`` is chosen so
    the grid still tiles the domain exactly.
    """

    rows: int = 4
    factor: float = 0.25

    def __post_init__(self):
        if self.rows < 1:
            raise ValueError(f"scaling needs at least one row, got {self.rows}")
        if not 0 < self.factor <= 1:
            raise ValueError(f"scaling factor must lie in (0, 1], got {self.factor}")

    def relative_widths(self) -> np.ndarray:
        k = np.arange(self.rows)
        return self.factor + (1.0 - self.factor) * k / self.rows


@dataclass(frozen=True)
class MeshSpec:
    nx: int
    ny: int
    domain: tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0)
    scaling: BoundaryScaling | None = None

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"element counts must be >= 1, got {self.nx}x{self.ny}")
        x0, x1, y0, y1 = self.domain
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"domain must have positive extent, got {self.domain}")

    @property
    def lx(self) -> float:
        return self.domain[1] - self.domain[0]

    @property
    def ly(self) -> float:
        return self.domain[3] - self.domain[2]


@dataclass(frozen=True)
class Edge:
    """Interior edge: ``first`` is the left/lower element, ``second`` the right/upper."""

    first: int
    second: int
    orientation: str  # "v" (vertical edge, X-sections meet) or "h"

    @property
    def sides(self) -> tuple[Side, Side]:
        if self.orientation == "v":
            return Side.RIGHT, Side.LEFT
        return Side.TOP, Side.BOTTOM


@dataclass(frozen=True)
class SkeletonLine:
    orientation: Axis
    coordinate: float
    index: int  # row index for X-lines, column index for Y-lines
    elements: tuple[int, ...]


def _widths(n: int, length: float, scaling: BoundaryScaling | None) -> np.ndarray:
    if scaling is None:
        return np.full(n, length / n)
    if 2 * scaling.rows > n:
        raise ValueError(
            f"{scaling.rows} scaled rows at each end do not fit into {n} elements"
        )
    rel = scaling.relative_widths()
    interior = n - 2 * scaling.rows
    h = length / (2 * rel.sum() + interior)
    w = np.concatenate([rel, np.ones(interior), rel[::-1]]) * h
    return w


def _edges_from_widths(start: float, widths: np.ndarray) -> np.ndarray:
    e = start + np.concatenate([[0.0], np.cumsum(widths)])
    # pin the far end so that tiling is exact
    e[-1] = start + widths.sum()
    return e


@dataclass(frozen=True)
class Mesh:
    spec: MeshSpec
    x_edges: np.ndarray
    y_edges: np.ndarray
    D: float = 1.0
    nu: float = 0.0

    @property
    def nx(self) -> int:
        return self.spec.nx

    @property
    def ny(self) -> int:
        return self.spec.ny

    @property
    def n_elements(self) -> int:
        return self.nx * self.ny

    @cached_property
    def widths(self) -> np.ndarray:
        return np.diff(self.x_edges)

    @cached_property
    def heights(self) -> np.ndarray:
        return np.diff(self.y_edges)

    @cached_property
    def x_centers(self) -> np.ndarray:
        return 0.5 * (self.x_edges[:-1] + self.x_edges[1:])

    @cached_property
    def y_centers(self) -> np.ndarray:
        return 0.5 * (self.y_edges[:-1] + self.y_edges[1:])

    def col_row(self, eid: int) -> tuple[int, int]:
        return eid % self.nx, eid // self.nx

    def eid(self, col: int, row: int) -> int:
        return row * self.nx + col

    def geometry(self, eid: int, P: float = 0.0) -> ElementGeometry:
        col, row = self.col_row(eid)
        return ElementGeometry(float(self.widths[col]), float(self.heights[row]), self.D, self.nu, P)

    def lower_left(self, eid: int) -> tuple[float, float]:
        col, row = self.col_row(eid)
        return float(self.x_edges[col]), float(self.y_edges[row])

    def center(self, eid: int) -> tuple[float, float]:
        col, row = self.col_row(eid)
        return float(self.x_centers[col]), float(self.y_centers[row])

    @cached_property
    def element_a(self) -> np.ndarray:
        return np.tile(self.widths, self.ny)

    @cached_property
    def element_b(self) -> np.ndarray:
        return np.repeat(self.heights, self.nx)

    @cached_property
    def element_centers(self) -> np.ndarray:
        xc, yc = np.meshgrid(self.x_centers, self.y_centers)
        return np.column_stack([xc.ravel(), yc.ravel()])

    def geometry_groups(self) -> dict[tuple[float, float], np.ndarray]:
        """Element ids grouped by distinct ``(a, b)``."""
        a = self.element_a
        b = self.element_b
        keys = np.column_stack([a, b])
        uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
        inverse = inverse.ravel()
        order = np.argsort(inverse, kind="stable")
        splits = np.cumsum(np.bincount(inverse, minlength=len(uniq)))[:-1]
        return {
            (float(k[0]), float(k[1])): ids
            for k, ids in zip(uniq, np.split(order, splits))
        }

    @cached_property
    def v_edges(self) -> np.ndarray:
        """``(n, 2)`` pairs (left, right) sharing a vertical edge."""
        col, row = np.meshgrid(np.arange(self.nx - 1), np.arange(self.ny))
        left = (row * self.nx + col).ravel()
        return np.column_stack([left, left + 1])

    @cached_property
    def h_edges(self) -> np.ndarray:
        """``(n, 2)`` pairs (lower, upper) sharing a horizontal edge."""
        col, row = np.meshgrid(np.arange(self.nx), np.arange(self.ny - 1))
        lower = (row * self.nx + col).ravel()
        return np.column_stack([lower, lower + self.nx])

    def interior_edges(self) -> list[Edge]:
        return [Edge(int(p), int(q), "v") for p, q in self.v_edges] + [
            Edge(int(p), int(q), "h") for p, q in self.h_edges
        ]

    def boundary_elements(self, side: Side | str) -> np.ndarray:
        """Element ids along one domain edge, ordered by increasing arclength."""
        side = Side(side)
        if side is Side.LEFT:
            return np.arange(self.ny) * self.nx
        if side is Side.RIGHT:
            return np.arange(self.ny) * self.nx + self.nx - 1
        if side is Side.BOTTOM:
            return np.arange(self.nx)
        return (self.ny - 1) * self.nx + np.arange(self.nx)

    @property
    def boundary_sides(self) -> list[tuple[int, Side]]:
        return [(int(e), s) for s in Side for e in self.boundary_elements(s)]

    def side_midpoint(self, eid: int, side: Side | str) -> tuple[float, float]:
        side = Side(side)
        col, row = self.col_row(eid)
        xc, yc = self.center(eid)
        if side is Side.LEFT:
            return float(self.x_edges[col]), yc
        if side is Side.RIGHT:
            return float(self.x_edges[col + 1]), yc
        if side is Side.BOTTOM:
            return xc, float(self.y_edges[row])
        return xc, float(self.y_edges[row + 1])

    def contains(self, point) -> bool:
        x, y = point
        x0, x1, y0, y1 = self.spec.domain
        return x0 <= x <= x1 and y0 <= y <= y1

    def locate_element(self, point) -> tuple[int, tuple[float, float]]:
        """Containing element and the point's offset from that element's center.

        Points on a shared edge go to the lower-indexed element.
        """
        if not self.contains(point):
            raise ValueError(f"point {tuple(point)} lies outside the domain {self.spec.domain}")
        x, y = float(point[0]), float(point[1])
        col = int(np.clip(np.searchsorted(self.x_edges, x, side="left") - 1, 0, self.nx - 1))
        row = int(np.clip(np.searchsorted(self.y_edges, y, side="left") - 1, 0, self.ny - 1))
        eid = self.eid(col, row)
        xc, yc = self.center(eid)
        return eid, (x - xc, y - yc)

    def skeleton_lines(self) -> list[SkeletonLine]:
        lines = [
            SkeletonLine(Axis.X, float(yc), j, tuple(range(j * self.nx, (j + 1) * self.nx)))
            for j, yc in enumerate(self.y_centers)
        ]
        lines += [
            SkeletonLine(Axis.Y, float(xc), i, tuple(range(i, self.n_elements, self.nx)))
            for i, xc in enumerate(self.x_centers)
        ]
        return lines

    def skeleton_line(self, orientation: Axis | str, index: int) -> SkeletonLine:
        orientation = Axis(orientation)
        if orientation is Axis.X:
            if not 0 <= index < self.ny:
                raise IndexError(f"no X skeleton line with row index {index}")
            return SkeletonLine(Axis.X, float(self.y_centers[index]), index,
                                tuple(range(index * self.nx, (index + 1) * self.nx)))
        if not 0 <= index < self.nx:
            raise IndexError(f"no Y skeleton line with column index {index}")
        return SkeletonLine(Axis.Y, float(self.x_centers[index]), index,
                            tuple(range(index, self.n_elements, self.nx)))

    def nearest_line(self, orientation: Axis | str, coordinate: float) -> SkeletonLine:
        """Skeleton line of the given orientation closest to a transverse coordinate.

        X-lines are looked up by ``y``, Y-lines by ``x``; ties go to the lower index.
        """
        orientation = Axis(orientation)
        centers = self.y_centers if orientation is Axis.X else self.x_centers
        return self.skeleton_line(orientation, int(np.argmin(np.abs(centers - coordinate))))

    def summary(self) -> str:
        """Plain-text dump for debugging."""
        x0, x1, y0, y1 = self.spec.domain
        lines = [
            f"mesh {self.nx}x{self.ny} on [{x0:g}, {x1:g}] x [{y0:g}, {y1:g}]",
            f"D = {self.D:g}, nu = {self.nu:g}",
            f"elements: {self.n_elements}",
            f"interior edges: {len(self.v_edges) + len(self.h_edges)} "
            f"({len(self.v_edges)} vertical, {len(self.h_edges)} horizontal)",
            f"boundary sides: {2 * (self.nx + self.ny)}",
            f"element widths: min {self.widths.min():.6g}, max {self.widths.max():.6g}",
            f"element heights: min {self.heights.min():.6g}, max {self.heights.max():.6g}",
        ]
        if self.spec.scaling is not None:
            s = self.spec.scaling
            lines.append(f"boundary scaling: rows = {s.rows}, factor = {s.factor:g}")
            lines.append("outer widths: " + " ".join(f"{w:.6g}" for w in self.widths[: s.rows + 1]))
        return "\n".join(lines) + "\n"


def build_mesh(spec: MeshSpec, D: float = 1.0, nu: float = 0.0) -> Mesh:
    x0, _, y0, _ = spec.domain
    xe = _edges_from_widths(x0, _widths(spec.nx, spec.lx, spec.scaling))
    ye = _edges_from_widths(y0, _widths(spec.ny, spec.ly, spec.scaling))
    xe[-1] = spec.domain[1]
    ye[-1] = spec.domain[3]
    # validates D and nu once for the whole grid
    ElementGeometry(1.0, 1.0, D, nu)
    return Mesh(spec, xe, ye, D, nu)
