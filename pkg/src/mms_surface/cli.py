"""Command-line front end: ``mms-surface --config run.cfg``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .assembly import AssemblyError, GlobalSystem, Solution, SolveError, assemble, solve
from .boundary import BoundaryConflictError, BoundarySpec, TabulatedBoundary
from .config import ConfigError, RunConfig, parse_config, parse_mesh_size
from .constraints import PointConstraint, read_constraints
from .element import Axis
from .fields import (
    FIELD_NAMES,
    compare_to_reference,
    cross_edge_jumps,
    matching_residuals,
    sample_line,
    sample_point,
    total_energy,
    write_grid_csv,
)
from .mesh import Mesh, build_mesh
from .surfaces import exact_corner_table, multipeak_extrema, surface

log = logging.getLogger("mms_surface")


@dataclass
class RunResult:
    mesh: Mesh
    system: GlobalSystem
    solution: Solution
    constraints: list[PointConstraint]


def boundary_spec(cfg: RunConfig) -> BoundarySpec:
    b = cfg.boundary
    return BoundarySpec(
        edges=dict(b.edges),
        kind=b.kind,
        surface=surface(b.surface) if b.surface else None,
        table=TabulatedBoundary.read_csv(b.table) if b.table else None,
        corners=dict(b.corners),
    )


def point_constraints(cfg: RunConfig) -> list[PointConstraint]:
    c = cfg.constraints
    surf = surface(cfg.boundary.surface) if cfg.boundary.surface else None
    if c.file is not None:
        return read_constraints(c.file, c.zeta, c.cutoff, surf)
    if c.points == "extrema":
        return [PointConstraint(p, float(surf.w(*p)), c.zeta, c.cutoff) for p in multipeak_extrema()]
    return []


def solve_config(cfg: RunConfig) -> RunResult:
    mesh = build_mesh(cfg.mesh, cfg.material.D, cfg.material.nu)
    pcs = point_constraints(cfg) if cfg.workflow == "reconstruct" else []
    system = assemble(mesh, boundary_spec(cfg), pcs, cfg.material.q)
    return RunResult(mesh, system, solve(system), pcs)


def probe(sol: Solution, mesh: Mesh, point) -> np.ndarray:
    """Section parameters at ``point`` from whichever skeleton line passes closest.

    Returns the six X-section values followed by the six Y-section values,
    with ``w`` of both taken from the closer line.
    """
    px = sample_point(sol, mesh, point, Axis.X)
    py = sample_point(sol, mesh, point, Axis.Y)
    out = np.concatenate([px.values, py.values])
    out[0] = out[6] = px["w"] if px.offset <= py.offset else py["w"]
    return out


def _fmt(v: float) -> str:
    return f"{v:.10g}"


def _write_lines(res: RunResult, cfg: RunConfig, out: Path) -> None:
    mode = cfg.output.lines
    if mode == "none":
        return
    mesh = res.mesh
    if mode == "all":
        lines = mesh.skeleton_lines()
    else:
        lines = [mesh.skeleton_line(Axis.X, mesh.ny // 2), mesh.skeleton_line(Axis.Y, mesh.nx // 2)]
    d = out / "solution_lines"
    d.mkdir(parents=True, exist_ok=True)
    for line in lines:
        name = f"{line.orientation.value}_{line.index:04d}.csv"
        sample_line(res.solution, mesh, line, cfg.output.resolution).write_csv(d / name)


def _solution_report(res: RunResult, cfg: RunConfig) -> list[str]:
    mesh, sol = res.mesh, res.solution
    lines = [
        f"mesh {mesh.nx}x{mesh.ny} elements {mesh.n_elements} unknowns {res.system.shape[0]}",
        f"residual {sol.residual:.3e}",
        f"energy {_fmt(total_energy(sol, mesh).total)}",
    ]
    jumps = cross_edge_jumps(sol, mesh)
    lines.append(f"max_edge_jump {np.max(jumps, initial=0.0):.3e}")
    lines.append(f"max_center_mismatch {np.max(np.abs(matching_residuals(sol, mesh))):.3e}")
    if cfg.report.probes:
        lines.append("")
        lines.append("probes x y " + " ".join(f"{n}_x" for n in FIELD_NAMES) + " " +
                     " ".join(f"{n}_y" for n in FIELD_NAMES))
        for p in cfg.report.probes:
            v = probe(sol, mesh, p)
            lines.append(" ".join(_fmt(t) for t in (*p, *v)))
    if res.constraints:
        lines.append("")
        lines.append("constraints x y target w_center multiplier")
        for pc, c in zip(res.constraints, res.system.constraints):
            w = sample_point(sol, mesh, mesh.center(c.attach), Axis.X)["w"]
            lines.append(" ".join(_fmt(t) for t in (*pc.location, pc.target, w, sol.multipliers[c.index])))
    if cfg.report.compare and cfg.boundary.surface:
        err = compare_to_reference(sol, mesh, surface(cfg.boundary.surface), resolution=cfg.output.resolution)
        lines.append("")
        lines.append(f"reference {cfg.boundary.surface} samples {err.n_samples}")
        for k in err.max:
            lines.append(f"error_{k} max {err.max[k]:.6e} rms {err.rms[k]:.6e}")
    return lines


def corner_table_report(res: RunResult, cfg: RunConfig) -> list[str]:
    """Normalized deflection D W / (q lx^4) and plate moments M / (q lx^2) at the reference rows."""
    mesh, sol = res.mesh, res.solution
    lx, ly = cfg.mesh.lx, cfg.mesh.ly
    x0, _, y0, _ = cfg.mesh.domain
    q, D = cfg.material.q, cfg.material.D
    lines = ["corner_table y/ly x/lx W M_x M_y W_exact M_x_exact M_y_exact"]
    for r in exact_corner_table().rows:
        v = probe(sol, mesh, (x0 + r.x * lx, y0 + r.y * ly))
        w = D * v[0] / (q * lx**4)
        # plate moments use the sagging-positive sign
        mx, my = -v[3] / (q * lx**2), -v[9] / (q * lx**2)
        lines.append(" ".join(_fmt(t) for t in (r.y, r.x, w, mx, my, r.deflection, r.m_x, r.m_y)))
    return lines


def _write_outputs(res: RunResult, cfg: RunConfig, report: list[str]) -> None:
    out = cfg.output.directory
    out.mkdir(parents=True, exist_ok=True)
    _write_lines(res, cfg, out)
    write_grid_csv(res.solution, res.mesh, out / "grid.csv")
    (out / "energy.txt").write_text(total_energy(res.solution, res.mesh).summary())
    (out / "report.txt").write_text("\n".join(report) + "\n")
    if cfg.output.dump_matrix:
        res.system.dump(out / "matrix.txt")


def run(cfg: RunConfig) -> int:
    header = [f"workflow {cfg.workflow}"]
    if cfg.workflow == "report":
        meshes = cfg.report.meshes
        rows = ["convergence mesh energy residual " +
                " ".join(f"w({_fmt(x)},{_fmt(y)}) m_n({_fmt(x)},{_fmt(y)})" for x, y in cfg.report.probes)]
        res = None
        for nx, ny in meshes:
            res = solve_config(cfg.with_mesh(nx, ny))
            vals = []
            for p in cfg.report.probes:
                v = probe(res.solution, res.mesh, p)
                vals += [v[0], v[3]]
            rows.append(" ".join([f"{nx}x{ny}", _fmt(total_energy(res.solution, res.mesh).total),
                                  f"{res.solution.residual:.3e}"] + [_fmt(t) for t in vals]))
            log.info("mesh %dx%d done", nx, ny)
        report = header + rows + [""] + _solution_report(res, cfg.with_mesh(*meshes[-1]))
        _write_outputs(res, cfg.with_mesh(*meshes[-1]), report)
        return 0
    res = solve_config(cfg)
    report = header + _solution_report(res, cfg)
    if cfg.workflow == "validate-corner" or cfg.report.reference_table:
        report += [""] + corner_table_report(res, cfg)
    _write_outputs(res, cfg, report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mms-surface", description="Energy-optimal surfaces by matched sections.")
    p.add_argument("--config", required=True, type=Path, help="run configuration file")
    p.add_argument("--mesh", type=parse_mesh_size, help="override the mesh size, e.g. 71x71")
    p.add_argument("--zeta", type=float, help="override the regularization parameter")
    p.add_argument("--out", type=Path, help="override the output directory")
    p.add_argument("--quiet", action="store_true", help="only report errors")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        cfg = parse_config(args.config)
        if args.mesh:
            cfg = cfg.with_mesh(*args.mesh)
        if args.zeta is not None:
            if args.zeta <= 0:
                raise ConfigError(f"--zeta must be positive, got {args.zeta}")
            cfg = cfg.with_zeta(args.zeta)
        if args.out:
            cfg = cfg.with_output(args.out)
        status = run(cfg)
    except (ConfigError, BoundaryConflictError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SolveError, AssemblyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not args.quiet:
        print((cfg.output.directory / "report.txt").read_text(), end="")
    return status


if __name__ == "__main__":
    sys.exit(main())
