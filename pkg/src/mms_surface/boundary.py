"""Boundary equations for element sides lying on the domain boundary.

Every boundary side contributes exactly three linear equations over the
element's 24 unknowns (inlet 0..11, outlet 12..23). Left and bottom sides
act on the inlet parameters of the X- and Y-section, right and top sides on
the corresponding outlet parameters.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .element import ElementGeometry
from .mesh import Mesh, Side
from .surfaces import AnalyticSurface

# local offset of the six section parameters touched by each side
SIDE_OFFSET = {Side.LEFT: 0, Side.BOTTOM: 6, Side.RIGHT: 12, Side.TOP: 18}

W, THETA_N, THETA_TAU, M_N, M_TAU, Q = range(6)


class BoundaryConflictError(ValueError):
    pass


class Corner(str, Enum):
    LOWER_LEFT = "lower_left"
    LOWER_RIGHT = "lower_right"
    UPPER_LEFT = "upper_left"
    UPPER_RIGHT = "upper_right"

    @property
    def sides(self) -> tuple[Side, Side]:
        vertical = Side.LEFT if self.value.endswith("left") else Side.RIGHT
        horizontal = Side.BOTTOM if self.value.startswith("lower") else Side.TOP
        return vertical, horizontal


@dataclass(frozen=True)
class PrescribedKinematic:
    w: float
    theta_n: float
    theta_tau: float


@dataclass(frozen=True)
class PrescribedCurvature:
    w: float
    m_n: float
    m_tau: float


@dataclass(frozen=True)
class Free:
    pass


@dataclass(frozen=True)
class CornerSupport:
    variant: str  # "B", "BA" or "BAM"
    corner: Corner

    def __post_init__(self):
        if self.variant not in ("B", "BA", "BAM"):
            raise ValueError(f"unknown corner variant {self.variant!r}")
        object.__setattr__(self, "corner", Corner(self.corner))


BoundaryCondition = PrescribedKinematic | PrescribedCurvature | Free | CornerSupport

CLAMPED = PrescribedKinematic(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class BoundaryRow:
    """One equation ``sum(coeffs[k] * z[k]) = rhs`` over local unknowns 0..23."""

    coeffs: dict[int, float]
    rhs: float = 0.0

    def dense(self) -> np.ndarray:
        v = np.zeros(24)
        for k, c in self.coeffs.items():
            v[k] = c
        return v


def _corner_sign(side: Side, corner: Corner) -> float:
    """-1 when the corner sits at the start of the side's arclength, else +1."""
    if corner not in _CORNERS_OF[side]:
        raise BoundaryConflictError(f"corner {corner.value} is not an end of the {side.value} side")
    if side in (Side.LEFT, Side.RIGHT):
        return -1.0 if corner.value.startswith("lower") else 1.0
    return -1.0 if corner.value.endswith("left") else 1.0


_CORNERS_OF = {s: tuple(c for c in Corner if s in c.sides) for s in Side}


def boundary_rows(side: Side | str, bc: BoundaryCondition, geom: ElementGeometry) -> list[BoundaryRow]:
    side = Side(side)
    o = SIDE_OFFSET[side]
    if isinstance(bc, PrescribedKinematic):
        return [BoundaryRow({o + W: 1.0}, bc.w),
                BoundaryRow({o + THETA_N: 1.0}, bc.theta_n),
                BoundaryRow({o + THETA_TAU: 1.0}, bc.theta_tau)]
    if isinstance(bc, PrescribedCurvature):
        return [BoundaryRow({o + W: 1.0}, bc.w),
                BoundaryRow({o + M_N: 1.0}, bc.m_n),
                BoundaryRow({o + M_TAU: 1.0}, bc.m_tau)]
    if isinstance(bc, Free):
        return [BoundaryRow({o + M_N: 1.0}), BoundaryRow({o + M_TAU: 1.0}), BoundaryRow({o + Q: 1.0})]
    if isinstance(bc, CornerSupport):
        s = _corner_sign(side, bc.corner)
        # half length of the side measured from its midpoint to the corner
        half = (geom.b if side in (Side.LEFT, Side.RIGHT) else geom.a) / 2
        w_row = {o + W: 1.0}
        if bc.variant in ("BA", "BAM"):
            w_row[o + THETA_TAU] = s * half
        tau_row = {o + M_TAU: 1.0}
        if bc.variant == "BAM":
            tau_row[o + Q] = s * half
        return [BoundaryRow(w_row), BoundaryRow({o + M_N: 1.0}), BoundaryRow(tau_row)]
    raise TypeError(f"not a boundary condition: {bc!r}")


def sample_boundary_data(
    surf: AnalyticSurface,
    side: Side | str,
    point,
    kind: str = "kinematic",
    D: float = 1.0,
    nu: float = 0.0,
) -> PrescribedKinematic | PrescribedCurvature:
    """Boundary values of an analytic surface at a side midpoint.

    On left/right sides the normal direction is ``x``, on bottom/top ``y``.
    """
    side = Side(side)
    x, y = float(point[0]), float(point[1])
    w = float(surf.w(x, y))
    normal_is_x = side in (Side.LEFT, Side.RIGHT)
    if kind == "kinematic":
        wx, wy = float(surf.wx(x, y)), float(surf.wy(x, y))
        return PrescribedKinematic(w, wx, wy) if normal_is_x else PrescribedKinematic(w, wy, wx)
    if kind == "curvature":
        wxx, wyy, wxy = float(surf.wxx(x, y)), float(surf.wyy(x, y)), float(surf.wxy(x, y))
        wnn, wtt = (wxx, wyy) if normal_is_x else (wyy, wxx)
        return PrescribedCurvature(w, D * (wnn + nu * wtt), D * (1 - nu) * wxy)
    raise ValueError(f"unknown boundary data kind {kind!r}")


@dataclass(frozen=True)
class TabulatedBoundary:
    """Boundary samples ``side, s, w, d1, d2`` with ``s`` the arclength along the side."""

    samples: dict[Side, np.ndarray]  # side -> (n, 4) rows (s, w, d1, d2), sorted by s

    @classmethod
    def read_csv(cls, path: str | Path) -> "TabulatedBoundary":
        rows: dict[Side, list] = {s: [] for s in Side}
        with open(path, newline="") as fh:
            for lineno, rec in enumerate(csv.reader(fh), start=1):
                if not rec or rec[0].strip().startswith("#"):
                    continue
                if rec[0].strip() == "side":
                    continue
                if len(rec) != 5:
                    raise ValueError(f"{path}:{lineno}: expected 5 fields side,s,w,d1,d2, got {len(rec)}")
                try:
                    side = Side(rec[0].strip())
                    rows[side].append([float(v) for v in rec[1:]])
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from None
        samples = {}
        for side, r in rows.items():
            if r:
                arr = np.array(r)
                samples[side] = arr[np.argsort(arr[:, 0], kind="stable")]
        return cls(samples)

    def values(self, side: Side, s: float) -> tuple[float, float, float]:
        side = Side(side)
        if side not in self.samples:
            raise KeyError(f"no tabulated boundary data for the {side.value} side")
        t = self.samples[side]
        return tuple(float(np.interp(s, t[:, 0], t[:, k])) for k in (1, 2, 3))


def arclength(mesh: Mesh, side: Side, point) -> float:
    x0, _, y0, _ = mesh.spec.domain
    return point[1] - y0 if side in (Side.LEFT, Side.RIGHT) else point[0] - x0


@dataclass
class BoundarySpec:
    """Boundary conditions for all element sides on the domain boundary.

    ``edges`` maps each domain edge to ``"data"`` (values from the surface or
    the tabulated file), ``"free"`` or ``"clamped"``. ``corners`` lists corner
    supports; they replace the edge condition on both outer sides of the
    corner element. ``overrides`` pins individual ``(eid, side)`` pairs.
    """

    edges: dict[Side, str] = field(default_factory=lambda: {s: "data" for s in Side})
    kind: str = "kinematic"
    surface: AnalyticSurface | None = None
    table: TabulatedBoundary | None = None
    corners: dict[Corner, str] = field(default_factory=dict)
    overrides: dict[tuple[int, Side], BoundaryCondition] = field(default_factory=dict)

    def __post_init__(self):
        self.edges = {Side(k): v for k, v in self.edges.items()}
        for s in Side:
            self.edges.setdefault(s, "data")
        self.corners = {Corner(k): v for k, v in self.corners.items()}
        bad = {v for v in self.edges.values()} - {"data", "free", "clamped"}
        if bad:
            raise ValueError(f"unknown edge condition(s) {sorted(bad)}")
        if self.surface is not None and self.table is not None:
            raise BoundaryConflictError("boundary data given both as a surface and as a table")
        if self.kind not in ("kinematic", "curvature"):
            raise ValueError(f"unknown boundary data kind {self.kind!r}")

    def _data_condition(self, mesh: Mesh, eid: int, side: Side) -> BoundaryCondition:
        point = mesh.side_midpoint(eid, side)
        if self.surface is not None:
            return sample_boundary_data(self.surface, side, point, self.kind, mesh.D, mesh.nu)
        if self.table is not None:
            w, d1, d2 = self.table.values(side, arclength(mesh, side, point))
            return PrescribedKinematic(w, d1, d2) if self.kind == "kinematic" else PrescribedCurvature(w, d1, d2)
        raise ValueError(f"{side.value} edge needs boundary data but neither a surface nor a table is set")

    def conditions(self, mesh: Mesh) -> list[tuple[int, Side, BoundaryCondition]]:
        """One condition per boundary side, in mesh boundary-side order."""
        corner_bc: dict[tuple[int, Side], CornerSupport] = {}
        for corner, variant in self.corners.items():
            vert, horiz = corner.sides
            col = 0 if vert is Side.LEFT else mesh.nx - 1
            row = 0 if horiz is Side.BOTTOM else mesh.ny - 1
            eid = mesh.eid(col, row)
            for side in (vert, horiz):
                if (eid, side) in corner_bc:
                    raise BoundaryConflictError(
                        f"element {eid} {side.value} side carries two corner supports"
                    )
                if self.edges[side] == "clamped":
                    raise BoundaryConflictError(
                        f"corner support at {corner.value} lies on the clamped {side.value} edge"
                    )
                if isinstance(self.overrides.get((eid, side)), Free):
                    raise BoundaryConflictError(
                        f"element {eid} {side.value} side is set free and corner-supported"
                    )
                corner_bc[(eid, side)] = CornerSupport(variant, corner)
        out = []
        for eid, side in mesh.boundary_sides:
            if (eid, side) in corner_bc:
                bc = corner_bc[(eid, side)]
            elif (eid, side) in self.overrides:
                bc = self.overrides[(eid, side)]
            elif self.edges[side] == "free":
                bc = Free()
            elif self.edges[side] == "clamped":
                bc = CLAMPED
            else:
                bc = self._data_condition(mesh, eid, side)
            out.append((eid, side, bc))
        return out
