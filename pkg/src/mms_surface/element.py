"""Closed-form solutions for a single rectangular element.

Each element carries two 1D sections: the X-section along its horizontal
center line and the Y-section along its vertical center line. Every section
parameter is a polynomial in the running coordinate whose coefficients are
linear in the 12 inlet parameters, the load ``P`` and three auxiliary
constants ``A1, A2, A3``. The auxiliary constants are eliminated by matching
the two sections at the element center.

State vector layout (0-based index / meaning)::

    0 w_x    1 theta_n_x   2 theta_tau_x   3 m_n_x   4 m_tau_x   5 q_x
    6 w_y    7 theta_n_y   8 theta_tau_y   9 m_n_y  10 m_tau_y  11 q_y

Coordinates are element-local: ``x`` runs from the left side, ``y`` from
the bottom side.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

SECTION_PARAMS = ("w", "theta_n", "theta_tau", "m_n", "m_tau", "q")

# Column layout of the intermediate "linear form" representation used while
# deriving the transfer operators: 12 inlet parameters, A1..A3, P.
_A = 12
_P = 15
_NFORM = 16


class Axis(str, Enum):
    X = "x"
    Y = "y"


class DegenerateGeometryError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ElementGeometry:
    a: float
    b: float
    D: float = 1.0
    nu: float = 0.0
    P: float = 0.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"element sides must be positive, got a={self.a}, b={self.b}")
        if not self.D > 0:
            raise ValueError(f"rigidity must be positive, got D={self.D}")
        if not 0 <= self.nu < 1:
            raise ValueError(f"coupling ratio must lie in [0, 1), got nu={self.nu}")

    @property
    def key(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.D, self.nu)


@dataclass(frozen=True)
class CouplingCoefficients:
    """``A = alpha @ z0 + P * beta``."""

    alpha: np.ndarray  # (3, 12)
    beta: np.ndarray  # (3,)

    def constants(self, z0, P: float = 0.0) -> np.ndarray:
        return self.alpha @ np.asarray(z0, dtype=float) + P * self.beta


@dataclass(frozen=True)
class TransferOperator:
    coeff: np.ndarray  # (6, 12)
    load: np.ndarray  # (6,)
    at: float
    axis: Axis = Axis.X

    def apply(self, z0, P: float = 0.0) -> np.ndarray:
        return self.coeff @ np.asarray(z0, dtype=float) + P * self.load


@dataclass(frozen=True)
class SectionSample:
    w: float
    theta_n: float
    theta_tau: float
    m_n: float
    m_tau: float
    q: float

    @classmethod
    def from_array(cls, v) -> "SectionSample":
        return cls(*(float(t) for t in v))

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.theta_n, self.theta_tau, self.m_n, self.m_tau, self.q])


@dataclass(frozen=True)
class SectionStateVector:
    """The 12 inlet parameters of one element, ordered as in the module docstring."""

    z: np.ndarray = field(default_factory=lambda: np.zeros(12))

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        if z.shape != (12,):
            raise ValueError(f"state vector needs 12 entries, got shape {z.shape}")
        if not np.all(np.isfinite(z)):
            raise ValueError("state vector entries must be finite")
        object.__setattr__(self, "z", z)

    def __array__(self, dtype=None, copy=None):
        return self.z if dtype is None else self.z.astype(dtype)

    @property
    def x_inlet(self) -> np.ndarray:
        return self.z[:6]

    @property
    def y_inlet(self) -> np.ndarray:
        return self.z[6:]


def _unit(i: int) -> np.ndarray:
    v = np.zeros(_NFORM)
    v[i] = 1.0
    return v


def _averaged_moments(a, b):
    """Averaged bending moments of both sections as linear forms."""
    avg_x = _unit(3) + _unit(5) * a / 2 + _unit(_A) * a**2 / 6 - _unit(_A + 1) * a / 2
    y_load = _unit(_P) - _unit(_A)  # P - A1
    avg_y = _unit(9) + _unit(11) * b / 2 + y_load * b**2 / 6 - _unit(_A + 2) * b / 2
    return avg_x, avg_y


def _x_forms(a, b, D, nu, x) -> np.ndarray:
    """Rows w, theta_n, theta_tau, m_n, m_tau, q of the X-section at ``x``."""
    c = 1.0 / (D * (1.0 - nu**2))
    ct = 1.0 / (D * (1.0 - nu))
    e = _unit
    A1, A2, A3 = e(_A), e(_A + 1), e(_A + 2)
    _, avg_y = _averaged_moments(a, b)
    q = e(5) + A1 * x
    m_tau = e(4) + A3 * x
    m_n = e(3) + e(5) * x + A1 * x**2 / 2 - A2 * x
    theta_tau = e(2) + ct * (e(4) * x + A3 * x**2 / 2)
    theta_n = (
        e(1)
        + c * (e(3) * x + e(5) * x**2 / 2 + A1 * x**3 / 6 - A2 * x**2 / 2)
        - nu * c * avg_y * x
    )
    w = (
        e(0)
        + e(1) * x
        + c * (e(3) * x**2 / 2 + e(5) * x**3 / 6 + A1 * x**4 / 24 - A2 * x**3 / 6)
        - nu * c * avg_y * x**2 / 2
    )
    return np.stack([w, theta_n, theta_tau, m_n, m_tau, q])


def _y_forms(a, b, D, nu, y) -> np.ndarray:
    """Rows w, theta_n, theta_tau, m_n, m_tau, q of the Y-section at ``y``."""
    c = 1.0 / (D * (1.0 - nu**2))
    ct = 1.0 / (D * (1.0 - nu))
    e = _unit
    A2, A3 = e(_A + 1), e(_A + 2)
    load = e(_P) - e(_A)  # P - A1
    avg_x, _ = _averaged_moments(a, b)
    q = e(11) + load * y
    m_tau = e(10) + A2 * y
    m_n = e(9) + e(11) * y + load * y**2 / 2 - A3 * y
    theta_tau = e(8) + ct * (e(10) * y + A2 * y**2 / 2)
    theta_n = (
        e(7)
        + c * (e(9) * y + e(11) * y**2 / 2 + load * y**3 / 6 - A3 * y**2 / 2)
        - nu * c * avg_x * y
    )
    w = (
        e(6)
        + e(7) * y
        + c * (e(9) * y**2 / 2 + e(11) * y**3 / 6 + load * y**4 / 24 - A3 * y**3 / 6)
        - nu * c * avg_x * y**2 / 2
    )
    return np.stack([w, theta_n, theta_tau, m_n, m_tau, q])


@lru_cache(maxsize=4096)
def _coupling(a: float, b: float, D: float, nu: float) -> CouplingCoefficients:
    fx = _x_forms(a, b, D, nu, a / 2)
    fy = _y_forms(a, b, D, nu, b / 2)
    # w_x = w_y, theta_n_x = theta_tau_y, theta_tau_x = theta_n_y
    match = np.stack([fx[0] - fy[0], fx[1] - fy[2], fx[2] - fy[1]])
    lhs = match[:, _A:_A + 3]
    if abs(np.linalg.det(lhs)) < 1e-300 or np.linalg.cond(lhs) > 1e15:
        raise DegenerateGeometryError(f"matching system singular for a={a}, b={b}, D={D}, nu={nu}")
    sol = -np.linalg.solve(lhs, np.column_stack([match[:, :12], match[:, _P]]))
    alpha = sol[:, :12]
    beta = sol[:, 12]
    alpha.setflags(write=False)
    beta.setflags(write=False)
    return CouplingCoefficients(alpha=alpha, beta=beta)


def coupling_coefficients(geom: ElementGeometry) -> CouplingCoefficients:
    """Coefficients expressing A1..A3 through the inlet state and load.

    Results are cached per distinct ``(a, b, D, nu)``.
    """
    return _coupling(*geom.key)


def _eliminate(forms: np.ndarray, cc: CouplingCoefficients) -> tuple[np.ndarray, np.ndarray]:
    coeff = forms[:, :12] + forms[:, _A:_A + 3] @ cc.alpha
    load = forms[:, _P] + forms[:, _A:_A + 3] @ cc.beta
    return coeff, load


def _check_span(t, span, axis):
    if not (0.0 <= t <= span):
        raise ValueError(f"{axis} coordinate {t} outside element span [0, {span}]")


def transfer_x(geom: ElementGeometry, cc: CouplingCoefficients | None, x: float) -> TransferOperator:
    _check_span(x, geom.a, "x")
    cc = cc or coupling_coefficients(geom)
    if x == 0.0:
        coeff = np.zeros((6, 12))
        coeff[:, :6] = np.eye(6)
        return TransferOperator(coeff, np.zeros(6), 0.0, Axis.X)
    coeff, load = _eliminate(_x_forms(geom.a, geom.b, geom.D, geom.nu, x), cc)
    return TransferOperator(coeff, load, float(x), Axis.X)


def transfer_y(geom: ElementGeometry, cc: CouplingCoefficients | None, y: float) -> TransferOperator:
    _check_span(y, geom.b, "y")
    cc = cc or coupling_coefficients(geom)
    if y == 0.0:
        coeff = np.zeros((6, 12))
        coeff[:, 6:] = np.eye(6)
        return TransferOperator(coeff, np.zeros(6), 0.0, Axis.Y)
    coeff, load = _eliminate(_y_forms(geom.a, geom.b, geom.D, geom.nu, y), cc)
    return TransferOperator(coeff, load, float(y), Axis.Y)


def transfer(geom: ElementGeometry, cc: CouplingCoefficients | None, axis: Axis | str, t: float) -> TransferOperator:
    if Axis(axis) is Axis.X:
        return transfer_x(geom, cc, t)
    return transfer_y(geom, cc, t)


def transfer_batch(geom: ElementGeometry, axis: Axis | str, ts) -> tuple[np.ndarray, np.ndarray]:
    """Stacked operators for many coordinates: ``(len(ts), 6, 12)`` and ``(len(ts), 6)``."""
    ops = [transfer(geom, None, axis, float(t)) for t in ts]
    return np.stack([op.coeff for op in ops]), np.stack([op.load for op in ops])


def evaluate_section(
    geom: ElementGeometry,
    cc: CouplingCoefficients | None,
    z0,
    P: float,
    axis: Axis | str,
    t: float,
) -> SectionSample:
    op = transfer(geom, cc, axis, t)
    return SectionSample.from_array(op.apply(z0, P))


def center_moments(geom: ElementGeometry, cc: CouplingCoefficients | None, z0, P: float) -> np.ndarray:
    """``(m_n_x, m_tau_x, m_tau_y, m_n_y)`` at the element center."""
    sx = transfer_x(geom, cc, geom.a / 2).apply(z0, P)
    sy = transfer_y(geom, cc, geom.b / 2).apply(z0, P)
    return np.array([sx[3], sx[4], sy[4], sy[3]])


def element_energy(geom: ElementGeometry, cc: CouplingCoefficients | None, z0, P: float) -> float:
    m = center_moments(geom, cc, z0, P)
    return float(np.sum(m**2) * geom.a * geom.b)
