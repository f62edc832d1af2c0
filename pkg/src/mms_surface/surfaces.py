"""Analytic generating surfaces and published reference values.

Every surface exposes ``W`` and its first and second derivatives as
vectorised callables of ``(x, y)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import optimize

Fn = Callable[[np.ndarray, np.ndarray], np.ndarray]

HALF_PI = np.pi / 2
_COTH = 1.0 / np.tanh(np.pi / 2)


@dataclass(frozen=True)
class AnalyticSurface:
    identifier: str
    domain: tuple[float, float, float, float]
    w: Fn
    wx: Fn
    wy: Fn
    wxx: Fn
    wyy: Fn
    wxy: Fn
    energy: float | None = None  # known continuous thin-plate energy, if any

    def gradient(self, x, y):
        return self.wx(x, y), self.wy(x, y)

    def hessian(self, x, y):
        return self.wxx(x, y), self.wxy(x, y), self.wyy(x, y)

    def contains(self, x, y, margin: float = 0.0) -> bool:
        x0, x1, y0, y1 = self.domain
        return x0 + margin <= x <= x1 - margin and y0 + margin <= y <= y1 - margin


# cosine-like biharmonic patch, zero on the boundary of [-pi/2, pi/2]^2, W(0,0) = 1
def _g(t):
    return 0.5 * np.cosh(t) - _COTH * t / np.pi * np.sinh(t)


def _dg(t):
    return 0.5 * np.sinh(t) - _COTH / np.pi * np.sinh(t) - _COTH * t / np.pi * np.cosh(t)


def _ddg(t):
    return 0.5 * np.cosh(t) - 2 * _COTH / np.pi * np.cosh(t) - _COTH * t / np.pi * np.sinh(t)


def _cosine_biharmonic() -> AnalyticSurface:
    return AnalyticSurface(
        "cosine_biharmonic",
        (-HALF_PI, HALF_PI, -HALF_PI, HALF_PI),
        w=lambda x, y: np.cos(x) * _g(y) + np.cos(y) * _g(x),
        wx=lambda x, y: -np.sin(x) * _g(y) + np.cos(y) * _dg(x),
        wy=lambda x, y: np.cos(x) * _dg(y) - np.sin(y) * _g(x),
        wxx=lambda x, y: -np.cos(x) * _g(y) + np.cos(y) * _ddg(x),
        wyy=lambda x, y: -np.cos(y) * _g(x) + np.cos(x) * _ddg(y),
        wxy=lambda x, y: -np.sin(x) * _dg(y) - np.sin(y) * _dg(x),
    )


def _nonsymmetric_biharmonic() -> AnalyticSurface:
    # (pi/2 - x) e^{3x} cos 3y
    def u(x):
        return (HALF_PI - x) * np.exp(3 * x)

    def du(x):
        return (3 * HALF_PI - 3 * x - 1) * np.exp(3 * x)

    def ddu(x):
        return (9 * HALF_PI - 9 * x - 6) * np.exp(3 * x)

    return AnalyticSurface(
        "nonsymmetric_biharmonic",
        (0.0, HALF_PI, -np.pi, np.pi),
        w=lambda x, y: u(x) * np.cos(3 * y),
        wx=lambda x, y: du(x) * np.cos(3 * y),
        wy=lambda x, y: -3 * u(x) * np.sin(3 * y),
        wxx=lambda x, y: ddu(x) * np.cos(3 * y),
        wyy=lambda x, y: -9 * u(x) * np.cos(3 * y),
        wxy=lambda x, y: -3 * du(x) * np.sin(3 * y),
    )


def _cosine_product() -> AnalyticSurface:
    return AnalyticSurface(
        "cosine_product",
        (-HALF_PI, HALF_PI, -HALF_PI, HALF_PI),
        w=lambda x, y: np.cos(x) * np.cos(y),
        wx=lambda x, y: -np.sin(x) * np.cos(y),
        wy=lambda x, y: -np.cos(x) * np.sin(y),
        wxx=lambda x, y: -np.cos(x) * np.cos(y),
        wyy=lambda x, y: -np.cos(x) * np.cos(y),
        wxy=lambda x, y: np.sin(x) * np.sin(y),
        energy=float(np.pi**2),
    )


def _multipeak() -> AnalyticSurface:
    import sympy as sp

    x, y = sp.symbols("x y", real=True)
    expr = (
        3 * (1 - x) ** 2 * sp.exp(-(x**2) - (y + 1) ** 2)
        - 10 * (x / 5 - x**3 - y**5) * sp.exp(-(x**2) - y**2)
        - sp.Rational(1, 3) * sp.exp(-((x + 1) ** 2) - y**2)
    )
    derivs = [expr, sp.diff(expr, x), sp.diff(expr, y), sp.diff(expr, x, 2),
              sp.diff(expr, y, 2), sp.diff(expr, x, y)]
    fns = [sp.lambdify((x, y), d, modules="numpy") for d in derivs]
    return AnalyticSurface("multipeak", (-3.0, 3.0, -4.0, 4.0), *fns)


_FACTORIES = {
    "cosine_biharmonic": _cosine_biharmonic,
    "nonsymmetric_biharmonic": _nonsymmetric_biharmonic,
    "cosine_product": _cosine_product,
    "multipeak": _multipeak,
}

SURFACE_NAMES = tuple(_FACTORIES)


@lru_cache(maxsize=None)
def surface(identifier: str) -> AnalyticSurface:
    try:
        return _FACTORIES[identifier]()
    except KeyError:
        raise KeyError(
            f"unknown surface {identifier!r}; expected one of {', '.join(SURFACE_NAMES)}"
        ) from None


def biharmonic_residual(surf: AnalyticSurface, point, h: float = 1e-2) -> float:
    """Finite-difference estimate of the bilaplacian at ``point``.

    Composes two fourth-order accurate five-point Laplacians, so the stencil
    reaches ``4 h`` from the point in each direction.
    """
    px, py = float(point[0]), float(point[1])
    if not surf.contains(px, py, margin=4 * h):
        raise ValueError(f"stencil of radius {4 * h:g} around {point} leaves the domain {surf.domain}")
    weights = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12 * h * h)
    # full (9 x 9) grid covering the nested stencil
    g = np.arange(-4, 5) * h
    X, Y = np.meshgrid(px + g, py + g, indexing="ij")
    F = surf.w(X, Y)

    def lap(F):
        out = np.zeros((F.shape[0] - 4, F.shape[1] - 4))
        for k, wk in enumerate(weights):
            out += wk * F[k:k + out.shape[0], 2:2 + out.shape[1]]
            out += wk * F[2:2 + out.shape[0], k:k + out.shape[1]]
        return out

    return float(lap(lap(F))[0, 0])


def midpoint_energy(surf: AnalyticSurface, x_edges, y_edges) -> float:
    """Thin-plate energy by the element-center rule on a tensor grid."""
    x_edges = np.asarray(x_edges, dtype=float)
    y_edges = np.asarray(y_edges, dtype=float)
    xc = 0.5 * (x_edges[1:] + x_edges[:-1])
    yc = 0.5 * (y_edges[1:] + y_edges[:-1])
    X, Y = np.meshgrid(xc, yc)
    area = np.outer(np.diff(y_edges), np.diff(x_edges))
    dens = surf.wxx(X, Y) ** 2 + 2 * surf.wxy(X, Y) ** 2 + surf.wyy(X, Y) ** 2
    return float(np.sum(dens * area))


def quadrature_energy(surf: AnalyticSurface, n: int = 400, panels: int = 8) -> float:
    """Thin-plate energy by composite Gauss-Legendre quadrature."""
    x0, x1, y0, y1 = surf.domain
    t, wt = np.polynomial.legendre.leggauss(n // panels)

    def nodes(lo, hi):
        edges = np.linspace(lo, hi, panels + 1)
        half = np.diff(edges) / 2
        mid = (edges[1:] + edges[:-1]) / 2
        return (mid[:, None] + half[:, None] * t).ravel(), (half[:, None] * wt).ravel()

    xs, wx = nodes(x0, x1)
    ys, wy = nodes(y0, y1)
    X, Y = np.meshgrid(xs, ys)
    dens = surf.wxx(X, Y) ** 2 + 2 * surf.wxy(X, Y) ** 2 + surf.wyy(X, Y) ** 2
    return float(wy @ dens @ wx)


# approximate extrema of the multipeak surface, refined before use
MULTIPEAK_EXTREMA_APPROX = (
    (0.0, 1.59),
    (-0.45, -0.64),
    (1.29, 0.0),
    (0.24, -1.63),
    (-1.34, 0.19),
    (0.29, 0.32),
)


def refine_extremum(surf: AnalyticSurface, guess) -> tuple[float, float]:
    """Zero of the gradient closest to ``guess``."""
    sol = optimize.root(
        lambda p: [surf.wx(p[0], p[1]), surf.wy(p[0], p[1])],
        np.asarray(guess, dtype=float),
        jac=lambda p: [[surf.wxx(p[0], p[1]), surf.wxy(p[0], p[1])],
                       [surf.wxy(p[0], p[1]), surf.wyy(p[0], p[1])]],
        tol=1e-13,
    )
    if not sol.success:
        raise RuntimeError(f"extremum refinement from {guess} failed: {sol.message}")
    return float(sol.x[0]), float(sol.x[1])


def multipeak_extrema() -> list[tuple[float, float]]:
    surf = surface("multipeak")
    return [refine_extremum(surf, g) for g in MULTIPEAK_EXTREMA_APPROX]


# input points for the five-point cosine reconstruction, aligned with element
# centers of a 251 x 251 grid on [-pi/2, pi/2]^2
FIVE_POINTS = tuple(
    (cx * np.pi / 251, cy * np.pi / 251)
    for cx, cy in ((20, 20), (40, 80), (-90, 70), (-30, -80), (-60, -20))
)


@dataclass(frozen=True)
class ReferenceRow:
    y: float  # fraction of ly
    x: float  # fraction of lx
    deflection: float  # D W / (q lx^4)
    m_x: float  # Mx / (q lx^2)
    m_y: float  # My / (q lx^2)


@dataclass(frozen=True)
class ReferenceTable:
    rows: tuple[ReferenceRow, ...]

    def lookup(self, y: float, x: float) -> ReferenceRow:
        for r in self.rows:
            if abs(r.y - y) < 1e-12 and abs(r.x - x) < 1e-12:
                return r
        raise KeyError(f"no reference row at (y={y}, x={x})")


_CORNER_EXACT = (
    ReferenceRow(0.0, 0.25, 0.008098, 0.076216, 0.0),
    ReferenceRow(0.0, 0.5, 0.011237, 0.094329, 0.0),
    ReferenceRow(0.25, 0.0, 0.005163, 0.0, 0.071900),
    ReferenceRow(0.25, 0.25, 0.008934, 0.050837, 0.056157),
    ReferenceRow(0.25, 0.5, 0.010596, 0.066909, 0.052390),
    ReferenceRow(0.5, 0.0, 0.005797, 0.0, 0.062840),
    ReferenceRow(0.5, 0.25, 0.007316, 0.029028, 0.052692),
    ReferenceRow(0.5, 0.5, 0.008052, 0.037900, 0.049495),
)

# published results of the matched-sections scheme with boundary scaling
# (251 x 251, variant BAM, nu = 0.3)
CORNER_SCALED_PUBLISHED = ReferenceTable((
    ReferenceRow(0.0, 0.25, 0.008102, 0.076467, 0.0),
    ReferenceRow(0.0, 0.5, 0.011241, 0.094558, 0.0),
    ReferenceRow(0.25, 0.0, 0.005165, 0.0, 0.072110),
    ReferenceRow(0.25, 0.25, 0.008937, 0.050839, 0.056152),
    ReferenceRow(0.25, 0.5, 0.010598, 0.066911, 0.052379),
    ReferenceRow(0.5, 0.0, 0.005798, 0.0, 0.062970),
    ReferenceRow(0.5, 0.25, 0.007317, 0.029024, 0.052686),
    ReferenceRow(0.5, 0.5, 0.008053, 0.037898, 0.049488),
))

# published corner-variant comparison (171 x 171, no scaling, nu = 0.3):
# (center row, row at x = lx/4, y = ly/2)
CORNER_VARIANTS_PUBLISHED = {
    "B": (ReferenceRow(0.5, 0.5, 0.007936, 0.035962, 0.050924),
          ReferenceRow(0.5, 0.25, 0.007280, 0.027425, 0.054210)),
    "BA": (ReferenceRow(0.5, 0.5, 0.008026, 0.037794, 0.049389),
           ReferenceRow(0.5, 0.25, 0.007293, 0.028897, 0.052624)),
    "BAM": (ReferenceRow(0.5, 0.5, 0.008064, 0.037878, 0.049415),
            ReferenceRow(0.5, 0.25, 0.007328, 0.028983, 0.052667)),
}


def exact_corner_table() -> ReferenceTable:
    """High-precision reference values for the corner-supported square plate."""
    return ReferenceTable(_CORNER_EXACT)


# published blending results: mesh -> (w(p1), theta(p1), M(p1), w(p2), theta(p2), M(p2))
# cosine patch probes p1 = (0, 0), p2 = (pi/3, 0); the published rotation and
# moment columns for this surface carry the opposite sign of dW/dx, d2W/dx2
COSINE_KINEMATIC_PUBLISHED = {
    7: (0.9973, 0.0, 0.6934, 0.5952, 0.8213, 1.0125),
    21: (0.9997, 0.0, 0.6940, 0.5960, 0.8232, 1.0156),
    31: (0.9999, 0.0, 0.6941, 0.5960, 0.8234, 1.0146),
    71: (1.0000, 0.0, 0.6941, 0.5961, 0.8235, 1.0147),
}
COSINE_CURVATURE_PUBLISHED = {
    7: (1.0062, 0.0, 0.6996, 0.6004, 0.8288, 1.0211),
    21: (1.0008, 0.0, 0.6948, 0.5966, 0.8242, 1.0167),
    31: (1.0004, 0.0, 0.6944, 0.5963, 0.8238, 1.0152),
    71: (1.0001, 0.0, 0.6942, 0.5961, 0.8236, 1.0148),
}
# non-symmetric surface probes p1 = (pi/4, 0), p2 = (3 pi/8, 0)
NONSYMMETRIC_KINEMATIC_PUBLISHED = {
    21: (8.1251, 14.1549, 11.9868, 13.3142, 6.3979, 83.1234),
    51: (8.2612, 14.2841, 11.3837, 13.4350, 6.1488, 84.2887),
    101: (8.2801, 14.3026, 11.3018, 13.4523, 6.1148, 84.4478),
    251: (8.2855, 14.3078, 11.2788, 13.4572, 6.1053, 84.4930),
}
NONSYMMETRIC_CURVATURE_PUBLISHED = {
    21: (8.0376, 14.0985, 11.9612, 13.2100, 6.4043, 82.5687),
    51: (8.2485, 14.2773, 11.3828, 13.4206, 6.1511, 84.2140),
    101: (8.2770, 14.3010, 11.3017, 13.4488, 6.1155, 84.4296),
    251: (8.2850, 14.3076, 11.2788, 13.4566, 6.1055, 84.4901),
}

PUBLISHED_ENERGIES = {
    "cosine_biharmonic/kinematic/71": 17.1785,
    "cosine_biharmonic/curvature/71": 17.1821,
    "cosine_biharmonic/exact/71": 17.1850,
    "nonsymmetric_biharmonic/kinematic/251": 233201.0544,
    "nonsymmetric_biharmonic/curvature/251": 233192.9470,
    "nonsymmetric_biharmonic/exact/251": 233228.4505,
    "cosine_product/boundary/11": 6.9089,
    "cosine_product/center_0.3/11": 8.9159,
    "cosine_product/center/11": 9.3161,
    "cosine_product/center/251": 9.3145,
    "cosine_product/center_zeta50/251": 9.5280,
    "cosine_product/five/251": 9.5445,
    "cosine_product/five_zeta50/251": 9.7271,
    "multipeak/six/251": 2731.5228,
    "multipeak/six_zeta50/251": 3112.1235,
    "multipeak/fifteen_zeta50/251": 3920.1770,
    "multipeak/exact": 4161.9368,
}
