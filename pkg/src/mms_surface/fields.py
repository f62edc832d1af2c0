"""Sampling of solved fields along skeleton lines, energy and error norms."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .assembly import Solution
from .element import Axis, ElementGeometry, transfer
from .mesh import Mesh, SkeletonLine
from .surfaces import AnalyticSurface

FIELD_NAMES = ("w", "theta_n", "theta_tau", "m_n", "m_tau", "q")
CSV_HEADER = ("x", "y") + FIELD_NAMES


@dataclass(frozen=True)
class FieldSample:
    x: float
    y: float
    w: float
    theta_n: float
    theta_tau: float
    m_n: float
    m_tau: float
    q: float


@dataclass(frozen=True)
class LineSamples:
    line: SkeletonLine
    xy: np.ndarray  # (n, 2)
    values: np.ndarray  # (n, 6) columns as FIELD_NAMES
    max_mismatch: float  # largest disagreement at shared element ends

    def __len__(self):
        return len(self.xy)

    def samples(self) -> list[FieldSample]:
        return [FieldSample(*p, *v) for p, v in zip(self.xy.tolist(), self.values.tolist())]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, FIELD_NAMES.index(name)]

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for p, v in zip(self.xy, self.values):
                w.writerow([f"{t:.12g}" for t in (*p, *v)])


@dataclass(frozen=True)
class EnergyReport:
    total: float
    per_element: np.ndarray

    def summary(self) -> str:
        pe = self.per_element
        return (
            f"total {self.total:.10g}\n"
            f"elements {len(pe)}\n"
            f"per_element_min {pe.min():.10g}\n"
            f"per_element_max {pe.max():.10g}\n"
            f"per_element_mean {pe.mean():.10g}\n"
        )


def _section_values(mesh: Mesh, sol: Solution, eid: int, axis: Axis, ts) -> np.ndarray:
    g = mesh.geometry(eid)
    z = sol.inlet[eid]
    P = float(sol.loads[eid])
    return np.array([transfer(g, None, axis, float(t)).apply(z, P) for t in ts])


def sample_line(sol: Solution, mesh: Mesh, line: SkeletonLine, resolution: int = 3) -> LineSamples:
    """Section parameters at ``resolution`` evenly spaced points per element.

    Shared element ends are emitted once; ``max_mismatch`` records how far
    the two neighbours disagree there.
    """
    if resolution < 2:
        raise ValueError("need at least the two element ends per element")
    if line.elements not in (mesh.skeleton_line(line.orientation, line.index).elements,):
        raise ValueError("skeleton line does not belong to this mesh")
    axis = line.orientation
    xy, vals = [], []
    mismatch = 0.0
    prev_end = None
    for k, eid in enumerate(line.elements):
        x0, y0 = mesh.lower_left(eid)
        span = mesh.geometry(eid).a if axis is Axis.X else mesh.geometry(eid).b
        ts = np.linspace(0.0, span, resolution)
        v = _section_values(mesh, sol, eid, axis, ts)
        if prev_end is not None:
            scale = max(1.0, np.max(np.abs(prev_end)))
            mismatch = max(mismatch, float(np.max(np.abs(v[0] - prev_end)) / scale))
            ts, v = ts[1:], v[1:]
        prev_end = v[-1]
        if axis is Axis.X:
            pts = np.column_stack([x0 + ts, np.full(len(ts), line.coordinate)])
        else:
            pts = np.column_stack([np.full(len(ts), line.coordinate), y0 + ts])
        xy.append(pts)
        vals.append(v)
    return LineSamples(line, np.vstack(xy), np.vstack(vals), mismatch)


@dataclass(frozen=True)
class PointSample:
    values: np.ndarray  # (6,) as FIELD_NAMES
    line: SkeletonLine
    offset: float  # distance between the requested point and the line

    def __getitem__(self, name: str) -> float:
        return float(self.values[FIELD_NAMES.index(name)])


def sample_point(sol: Solution, mesh: Mesh, point, axis: Axis | str = Axis.X) -> PointSample:
    """Section parameters at ``point`` taken from the nearest skeleton line of ``axis``."""
    axis = Axis(axis)
    x, y = float(point[0]), float(point[1])
    eid, _ = mesh.locate_element((x, y))
    x0, y0 = mesh.lower_left(eid)
    g = mesh.geometry(eid)
    if axis is Axis.X:
        line = mesh.nearest_line(Axis.X, y)
        col, _ = mesh.col_row(eid)
        eid = mesh.eid(col, line.index)
        t = min(max(x - x0, 0.0), g.a)
        offset = abs(y - line.coordinate)
    else:
        line = mesh.nearest_line(Axis.Y, x)
        _, row = mesh.col_row(eid)
        eid = mesh.eid(line.index, row)
        t = min(max(y - y0, 0.0), g.b)
        offset = abs(x - line.coordinate)
    v = _section_values(mesh, sol, eid, axis, [t])[0]
    return PointSample(v, line, offset)


def _center_moment_table(mesh: Mesh, sol: Solution) -> np.ndarray:
    """``(N, 4)`` center moments m_n_x, m_tau_x, m_tau_y, m_n_y (vectorised per geometry)."""
    out = np.empty((mesh.n_elements, 4))
    for (a, b), ids in mesh.geometry_groups().items():
        g = ElementGeometry(a, b, mesh.D, mesh.nu)
        tx = transfer(g, None, Axis.X, a / 2)
        ty = transfer(g, None, Axis.Y, b / 2)
        z = sol.inlet[ids]
        P = sol.loads[ids]
        sx = z @ tx.coeff.T + P[:, None] * tx.load
        sy = z @ ty.coeff.T + P[:, None] * ty.load
        out[ids] = np.column_stack([sx[:, 3], sx[:, 4], sy[:, 4], sy[:, 3]])
    return out


def total_energy(sol: Solution, mesh: Mesh) -> EnergyReport:
    m = _center_moment_table(mesh, sol)
    per = np.sum(m**2, axis=1) * mesh.element_a * mesh.element_b
    return EnergyReport(float(per.sum()), per)


def element_center_values(sol: Solution, mesh: Mesh) -> np.ndarray:
    """``(N, 6)`` X-section parameters at every element center."""
    out = np.empty((mesh.n_elements, 6))
    for (a, b), ids in mesh.geometry_groups().items():
        tx = transfer(ElementGeometry(a, b, mesh.D, mesh.nu), None, Axis.X, a / 2)
        out[ids] = sol.inlet[ids] @ tx.coeff.T + sol.loads[ids][:, None] * tx.load
    return out


def write_grid_csv(sol: Solution, mesh: Mesh, path: str | Path) -> None:
    w = element_center_values(sol, mesh)[:, 0]
    c = mesh.element_centers
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(("x", "y", "w"))
        for (x, y), v in zip(c, w):
            wr.writerow((f"{x:.12g}", f"{y:.12g}", f"{v:.12g}"))


@dataclass(frozen=True)
class ErrorNorms:
    max: dict
    rms: dict
    n_samples: int


def reference_values(surf: AnalyticSurface, xy: np.ndarray, axis: Axis, D: float = 1.0, nu: float = 0.0) -> np.ndarray:
    """Exact ``(w, theta_n, m_n)`` columns matching samples of an ``axis`` skeleton line."""
    x, y = xy[:, 0], xy[:, 1]
    wxx, wyy = surf.wxx(x, y), surf.wyy(x, y)
    if axis is Axis.X:
        return np.column_stack([surf.w(x, y), surf.wx(x, y), D * (wxx + nu * wyy)])
    return np.column_stack([surf.w(x, y), surf.wy(x, y), D * (wyy + nu * wxx)])


def compare_to_reference(sol: Solution, mesh: Mesh, surf: AnalyticSurface, lines=None,
                         resolution: int = 3) -> ErrorNorms:
    """Max and RMS deviation of w, theta_n and m_n from an analytic surface."""
    lines = mesh.skeleton_lines() if lines is None else lines
    diffs = []
    for line in lines:
        s = sample_line(sol, mesh, line, resolution)
        ref = reference_values(surf, s.xy, line.orientation, mesh.D, mesh.nu)
        diffs.append(s.values[:, [0, 1, 3]] - ref)
    d = np.vstack(diffs)
    names = ("w", "theta_n", "m_n")
    return ErrorNorms(
        {n: float(np.max(np.abs(d[:, k]))) for k, n in enumerate(names)},
        {n: float(np.sqrt(np.mean(d[:, k] ** 2))) for k, n in enumerate(names)},
        len(d),
    )


def cross_edge_jumps(sol: Solution, mesh: Mesh) -> np.ndarray:
    """``(n_edges, 6)`` absolute differences of the shared section parameters."""
    jv = np.abs(sol.outlet[mesh.v_edges[:, 0], :6] - sol.inlet[mesh.v_edges[:, 1], :6])
    jh = np.abs(sol.outlet[mesh.h_edges[:, 0], 6:] - sol.inlet[mesh.h_edges[:, 1], 6:])
    return np.vstack([jv, jh])


def matching_residuals(sol: Solution, mesh: Mesh) -> np.ndarray:
    """``(N, 3)`` center mismatches w_x - w_y, theta_n_x - theta_tau_y, theta_tau_x - theta_n_y."""
    out = np.empty((mesh.n_elements, 3))
    for (a, b), ids in mesh.geometry_groups().items():
        g = ElementGeometry(a, b, mesh.D, mesh.nu)
        tx = transfer(g, None, Axis.X, a / 2)
        ty = transfer(g, None, Axis.Y, b / 2)
        z, P = sol.inlet[ids], sol.loads[ids]
        sx = z @ tx.coeff.T + P[:, None] * tx.load
        sy = z @ ty.coeff.T + P[:, None] * ty.load
        out[ids] = np.column_stack([sx[:, 0] - sy[:, 0], sx[:, 1] - sy[:, 2], sx[:, 2] - sy[:, 1]])
    return out

