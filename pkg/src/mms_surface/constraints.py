"""Interior point constraints.

A constraint adds one unknown multiplier ``lam`` and one equation pinning
the elevation at the center of the element that holds the point. The
multiplier acts as a distributed load ``P_e = alpha_e * lam`` on every
element within the cutoff distance, with ``alpha_e`` from the smoothing
kernel.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .mesh import Mesh


@dataclass(frozen=True)
class PointConstraint:
    location: tuple[float, float]
    target: float
    zeta: float | None = None  # None: reaction stays in the attachment element
    cutoff: float | None = None  # None -> min(lx, ly) / 5

    def __post_init__(self):
        if self.zeta is not None and not self.zeta > 0:
            raise ValueError(f"regularization parameter must be positive, got {self.zeta}")
        if self.cutoff is not None and self.cutoff < 0:
            raise ValueError(f"cutoff must be non-negative, got {self.cutoff}")


@dataclass(frozen=True)
class SpreadWeights:
    elements: np.ndarray  # element ids, attachment element first
    weights: np.ndarray


@dataclass(frozen=True)
class ConstraintContribution:
    index: int  # position among the run's constraints
    attach: int  # element whose center elevation is pinned
    target: float
    spread: SpreadWeights


def default_cutoff(lx: float, ly: float) -> float:
    return min(lx, ly) / 5


def kernel_weight(d, zeta: float, lx: float, ly: float, cutoff: float | None = None):
    """Smoothing-kernel weight for center-to-center distance ``d``.

    Pass ``cutoff=float("inf")`` to disable the hard cutoff.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("distances must be non-negative")
    if cutoff is None:
        cutoff = default_cutoff(lx, ly)
    scale = zeta * min(lx, ly)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(np.isinf(scale), 0.0, d / scale)
    alpha = 1.0 / (1.0 + ratio**2)
    alpha = np.where(d > cutoff, 0.0, alpha)
    return float(alpha) if alpha.ndim == 0 else alpha


def spread_weights(mesh: Mesh, attach: int, zeta: float | None, cutoff: float | None) -> SpreadWeights:
    if zeta is None:
        return SpreadWeights(np.array([attach]), np.array([1.0]))
    lx, ly = mesh.spec.lx, mesh.spec.ly
    centers = mesh.element_centers
    d = np.hypot(*(centers - centers[attach]).T)
    alpha = kernel_weight(d, zeta, lx, ly, cutoff)
    ids = np.flatnonzero(alpha > 0)
    ids = np.concatenate([[attach], ids[ids != attach]])
    return SpreadWeights(ids, np.asarray(alpha)[ids])


def constraint_contribution(mesh: Mesh, pc: PointConstraint, index: int = 0) -> ConstraintContribution:
    attach, _ = mesh.locate_element(pc.location)
    return ConstraintContribution(index, attach, float(pc.target),
                                  spread_weights(mesh, attach, pc.zeta, pc.cutoff))


def constraint_contributions(mesh: Mesh, constraints) -> list[ConstraintContribution]:
    out = []
    seen: dict[int, int] = {}
    for k, pc in enumerate(constraints):
        c = constraint_contribution(mesh, pc, k)
        if c.attach in seen:
            raise ValueError(
                f"constraints {seen[c.attach]} and {k} attach to the same element {c.attach}"
            )
        seen[c.attach] = k
        out.append(c)
    return out


def read_constraints(path: str | Path, zeta: float | None = None, cutoff: float | None = None,
                     surface=None) -> list[PointConstraint]:
    """Read ``x, y, target`` rows. Rows with only ``x, y`` take the target from ``surface``."""
    out = []
    with open(path, newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            rec = [r.strip() for r in rec]
            if not rec or not rec[0] or rec[0].startswith("#") or rec[0] == "x":
                continue
            try:
                vals = [float(v) for v in rec]
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed number in {rec}") from None
            if len(vals) == 3:
                x, y, t = vals
            elif len(vals) == 2 and surface is not None:
                x, y = vals
                t = float(surface.w(x, y))
            else:
                raise ValueError(f"{path}:{lineno}: expected x, y, target")
            out.append(PointConstraint((x, y), t, zeta, cutoff))
    return out
