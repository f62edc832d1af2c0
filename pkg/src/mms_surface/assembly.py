"""Global sparse system: connection, conjugation, boundary and constraint rows.

Unknown layout: element ``e`` owns columns ``24 e .. 24 e + 23`` (inlet
parameters 0..11, outlet parameters 12..23 ordered X-outlet then
Y-outlet); constraint ``c`` owns column ``24 N + c``.

Rows are emitted in the order: 12 connection rows per element, 6
conjugation rows per interior edge (vertical edges first), 3 rows per
boundary side, one row per constraint.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import maximum_bipartite_matching

from .boundary import BoundarySpec, boundary_rows
from .constraints import ConstraintContribution, PointConstraint, constraint_contributions
from .element import ElementGeometry, transfer_x, transfer_y
from .mesh import Mesh

log = logging.getLogger(__name__)

UNKNOWNS_PER_ELEMENT = 24
# smallest admissible |pivot| relative to the largest after row scaling
PIVOT_RATIO = 1e-13


class RowKind(IntEnum):
    CONNECTION = 0
    CONJUGATION = 1
    BOUNDARY = 2
    CONSTRAINT = 3


class AssemblyError(RuntimeError):
    pass


class SolveError(RuntimeError):
    pass


@dataclass(frozen=True)
class UnknownMap:
    n_elements: int
    n_constraints: int = 0

    @property
    def size(self) -> int:
        return UNKNOWNS_PER_ELEMENT * self.n_elements + self.n_constraints

    def element(self, eid: int) -> int:
        return UNKNOWNS_PER_ELEMENT * eid

    def multiplier(self, c: int) -> int:
        return UNKNOWNS_PER_ELEMENT * self.n_elements + c

    def describe(self, col: int) -> str:
        if col >= UNKNOWNS_PER_ELEMENT * self.n_elements:
            return f"multiplier of constraint {col - UNKNOWNS_PER_ELEMENT * self.n_elements}"
        e, k = divmod(col, UNKNOWNS_PER_ELEMENT)
        return f"element {e} unknown z{k + 1}"


@dataclass
class GlobalSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    unknowns: UnknownMap
    row_kind: np.ndarray
    row_element: np.ndarray  # owning element per row (-1 for constraint rows)
    loads: np.ndarray  # fixed distributed load per element
    spread: sp.csr_matrix  # (n_elements, n_constraints) load weights of each multiplier
    constraints: list[ConstraintContribution] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def describe_row(self, r: int) -> str:
        kind = RowKind(int(self.row_kind[r])).name.lower()
        e = int(self.row_element[r])
        return f"row {r} ({kind} equation of element {e})" if e >= 0 else f"row {r} ({kind} equation)"

    def dump(self, path) -> None:
        """Write the matrix as ``row col value`` lines followed by ``rhs`` lines."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        with open(path, "w") as fh:
            fh.write(f"# {self.shape[0]} {self.shape[1]} {coo.nnz}\n")
            for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
                fh.write(f"{r} {c} {v:.17g}\n")
            for r, v in enumerate(self.rhs):
                if v != 0.0:
                    fh.write(f"rhs {r} {v:.17g}\n")


@dataclass(frozen=True)
class Solution:
    inlet: np.ndarray  # (N, 12)
    outlet: np.ndarray  # (N, 12)
    loads: np.ndarray  # (N,) resolved distributed load per element
    multipliers: np.ndarray  # (n_constraints,)
    residual: float
    stats: dict

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([np.hstack([self.inlet, self.outlet]).ravel(), self.multipliers])


class _Triplets:
    def __init__(self):
        self.rows, self.cols, self.vals = [], [], []

    def add(self, r, c, v):
        r, c, v = np.broadcast_arrays(np.asarray(r), np.asarray(c), np.asarray(v, dtype=float))
        self.rows.append(r.ravel())
        self.cols.append(c.ravel())
        self.vals.append(v.ravel())

    def matrix(self, shape) -> sp.csr_matrix:
        r = np.concatenate(self.rows) if self.rows else np.zeros(0, int)
        c = np.concatenate(self.cols) if self.cols else np.zeros(0, int)
        v = np.concatenate(self.vals) if self.vals else np.zeros(0)
        keep = v != 0.0
        m = sp.coo_matrix((v[keep], (r[keep], c[keep])), shape=shape).tocsr()
        m.sum_duplicates()
        m.sort_indices()
        return m


def _operators(mesh: Mesh, a: float, b: float):
    g = ElementGeometry(a, b, mesh.D, mesh.nu)
    return transfer_x(g, None, a), transfer_y(g, None, b), transfer_x(g, None, a / 2)


def assemble(
    mesh: Mesh,
    boundary: BoundarySpec,
    constraints: list[PointConstraint] | None = None,
    q: float = 0.0,
) -> GlobalSystem:
    constraints = list(constraints or [])
    if constraints and q != 0.0:
        raise AssemblyError("a uniform load cannot be combined with point constraints")
    N = mesh.n_elements
    umap = UnknownMap(N, len(constraints))
    contribs = constraint_contributions(mesh, constraints)
    nc = len(contribs)

    if nc:
        sr = np.concatenate([c.spread.elements for c in contribs])
        sc = np.concatenate([np.full(len(c.spread.elements), c.index) for c in contribs])
        sv = np.concatenate([c.spread.weights for c in contribs])
        spread = sp.csr_matrix((sv, (sr, sc)), shape=(N, nc))
    else:
        spread = sp.csr_matrix((N, 0))
    loads = np.full(N, float(q))

    n_v, n_h = len(mesh.v_edges), len(mesh.h_edges)
    n_bside = 2 * (mesh.nx + mesh.ny)
    n_rows = 12 * N + 6 * (n_v + n_h) + 3 * n_bside + nc
    if n_rows != umap.size:
        raise AssemblyError(f"{n_rows} equations for {umap.size} unknowns")

    trip = _Triplets()
    rhs = np.zeros(n_rows)
    row_kind = np.empty(n_rows, dtype=np.int8)
    row_element = np.full(n_rows, -1, dtype=np.int64)

    # connection rows: outlet - T @ inlet - load * (q + spread @ lam) = 0
    row_kind[: 12 * N] = RowKind.CONNECTION
    row_element[: 12 * N] = np.repeat(np.arange(N), 12)
    spread_csr = spread.tocsr()
    for (a, b), ids in mesh.geometry_groups().items():
        tx, ty, _ = _operators(mesh, a, b)
        coeff = np.vstack([tx.coeff, ty.coeff])  # (12, 12)
        load = np.concatenate([tx.load, ty.load])
        base_r = 12 * ids[:, None]  # (n, 1)
        base_c = 24 * ids[:, None]
        m = np.arange(12)
        trip.add(base_r + m, base_c + 12 + m, 1.0)
        trip.add((base_r + m)[:, :, None], (base_c[:, :, None] + np.arange(12)), -coeff[None, :, :])
        rhs[(base_r + m).ravel()] = (loads[ids][:, None] * load[None, :]).ravel()
        if nc:
            sub = spread_csr[ids].tocoo()
            if sub.nnz:
                e_rows = 12 * ids[sub.row]
                trip.add(e_rows[:, None] + m, umap.multiplier(0) + sub.col[:, None],
                         -sub.data[:, None] * load[None, :])

    # conjugation rows
    r0 = 12 * N
    m6 = np.arange(6)
    for pairs, out_off, in_off in ((mesh.v_edges, 12, 0), (mesh.h_edges, 18, 6)):
        if len(pairs) == 0:
            continue
        rows = r0 + 6 * np.arange(len(pairs))[:, None] + m6
        trip.add(rows, 24 * pairs[:, :1] + out_off + m6, 1.0)
        trip.add(rows, 24 * pairs[:, 1:] + in_off + m6, -1.0)
        row_kind[rows.ravel()] = RowKind.CONJUGATION
        row_element[rows.ravel()] = np.repeat(pairs[:, 0], 6)
        r0 += 6 * len(pairs)

    # boundary rows
    geoms: dict[int, ElementGeometry] = {}
    conds = boundary.conditions(mesh)
    br, bc, bv = [], [], []
    for eid, side, cond in conds:
        geom = geoms.get(eid) or geoms.setdefault(eid, mesh.geometry(eid))
        for row in boundary_rows(side, cond, geom):
            for k, v in row.coeffs.items():
                br.append(r0)
                bc.append(24 * eid + k)
                bv.append(v)
            rhs[r0] = row.rhs
            row_kind[r0] = RowKind.BOUNDARY
            row_element[r0] = eid
            r0 += 1
    trip.add(np.array(br, dtype=np.int64), np.array(bc, dtype=np.int64), np.array(bv))

    # constraint rows: center elevation of the attachment element
    for c in contribs:
        geom = mesh.geometry(c.attach)
        _, _, th = _operators(mesh, geom.a, geom.b)
        trip.add(r0, 24 * c.attach + np.arange(12), th.coeff[0])
        col = spread_csr[c.attach].tocoo()
        trip.add(r0, umap.multiplier(0) + col.col, th.load[0] * col.data)
        rhs[r0] = c.target - th.load[0] * loads[c.attach]
        row_kind[r0] = RowKind.CONSTRAINT
        r0 += 1

    if r0 != n_rows:
        raise AssemblyError(f"emitted {r0} rows, expected {n_rows}")
    A = trip.matrix((n_rows, umap.size))
    return GlobalSystem(A, rhs, umap, row_kind, row_element, loads, spread, contribs)


def _outlet_columns(N: int) -> np.ndarray:
    return (24 * np.arange(N)[:, None] + 12 + np.arange(12)).ravel()


def _reduce(system: GlobalSystem):
    """Eliminate the outlet unknowns through the connection rows."""
    A = system.matrix
    N = system.unknowns.n_elements
    n = system.unknowns.size
    out_cols = _outlet_columns(N)
    mask = np.ones(n, dtype=bool)
    mask[out_cols] = False
    rest_cols = np.flatnonzero(mask)
    conn = np.arange(12 * N)
    other = np.arange(12 * N, n)

    Acsc = A.tocsc()
    A_O = Acsc[:, out_cols].tocsr()
    A_R = Acsc[:, rest_cols].tocsr()
    C_O = A_O[conn]
    if C_O.nnz != 12 * N or not np.allclose(C_O.diagonal(), 1.0):
        raise SolveError("connection rows do not isolate the outlet unknowns")
    C_R = A_R[conn]
    K = (A_R[other] - A_O[other] @ C_R).tocsr()
    b = system.rhs
    rhs = b[other] - A_O[other] @ b[conn]
    return K, rhs, C_R, rest_cols, out_cols, other


def _diagnose_singular(system: GlobalSystem, K: sp.csr_matrix, other: np.ndarray) -> str:
    match = maximum_bipartite_matching(K, perm_type="column")
    unmatched = np.flatnonzero(match < 0)
    if len(unmatched):
        return "structurally singular at " + system.describe_row(int(other[unmatched[0]]))
    if K.shape[0] <= 3000:
        import scipy.linalg as sla

        # pivoted LU of K^T: the first vanishing pivot marks a dependent row of K
        _, _, U = sla.lu(K.T.toarray())
        d = np.abs(np.diag(U))
        tol = d.max() * K.shape[0] * np.finfo(float).eps
        bad = np.flatnonzero(d <= tol)
        if len(bad):
            return "numerically singular at " + system.describe_row(int(other[bad[0]]))
    return "numerically singular (no structural defect found)"


def _relative_residual(A, x, b) -> float:
    r = np.abs(A @ x - b)
    row_norm = np.asarray(abs(A).sum(axis=1)).ravel()
    scale = np.maximum(row_norm * np.max(np.abs(x), initial=0.0), np.abs(b))
    scale = np.where(scale > 0, scale, 1.0)
    return float(np.max(r / scale, initial=0.0))


def residual(system: GlobalSystem, x: np.ndarray) -> float:
    """Largest row residual relative to ``|row|_1 * |x|_inf`` (or ``|rhs_i|``)."""
    return _relative_residual(system.matrix, x, system.rhs)


def solve(system: GlobalSystem) -> Solution:
    t0 = time.perf_counter()
    K, rhs, C_R, rest_cols, out_cols, other = _reduce(system)
    scale = np.asarray(abs(K).max(axis=1).todense()).ravel()
    if np.any(scale == 0):
        r = int(np.flatnonzero(scale == 0)[0])
        raise SolveError("singular system: empty " + system.describe_row(int(other[r])))
    Ks = sp.diags(1.0 / scale) @ K
    t1 = time.perf_counter()
    try:
        lu = spla.splu(Ks.tocsc(), permc_spec="COLAMD")
    except RuntimeError as exc:
        raise SolveError(f"{exc}: {_diagnose_singular(system, K, other)}") from None
    pivots = np.abs(lu.U.diagonal())
    tiny = np.flatnonzero(pivots <= PIVOT_RATIO * pivots.max())
    if len(tiny):
        # perm_r sends original row i to elimination position perm_r[i]
        row = int(np.flatnonzero(lu.perm_r == tiny[0])[0])
        raise SolveError("numerically singular: zero pivot at " + system.describe_row(int(other[row])))
    x_rest = lu.solve(rhs / scale)
    stats = {"n_unknowns": system.unknowns.size, "n_reduced": K.shape[0],
             "nnz_lu": int(lu.L.nnz + lu.U.nnz)}
    del lu
    if not np.all(np.isfinite(x_rest)):
        raise SolveError("solution is not finite: " + _diagnose_singular(system, K, other))
    t2 = time.perf_counter()
    b = system.rhs
    x = np.empty(system.unknowns.size)
    x[rest_cols] = x_rest
    x[out_cols] = b[: 12 * system.unknowns.n_elements] - C_R @ x_rest
    res = residual(system, x)
    stats.update(reduce_s=t1 - t0, factor_solve_s=t2 - t1, residual=res,
                 condensed_residual=_relative_residual(K, x_rest, rhs))
    log.info("solved %d unknowns (%d reduced) in %.2fs, residual %.2e",
             system.unknowns.size, K.shape[0], t2 - t0, res)
    N = system.unknowns.n_elements
    z = x[: 24 * N].reshape(N, 24)
    lam = x[24 * N:]
    loads = system.loads + system.spread @ lam
    return Solution(z[:, :12].copy(), z[:, 12:].copy(), loads, lam, res, stats)


def solve_problem(mesh: Mesh, boundary: BoundarySpec, constraints=None, q: float = 0.0) -> Solution:
    return solve(assemble(mesh, boundary, constraints, q))
