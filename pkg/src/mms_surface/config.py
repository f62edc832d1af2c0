"""Run configuration: a plain ``key = value`` text format with ``[section]`` headers.

Every key must be known; typos are errors that name the offending line.
Numbers accept ``pi`` and simple arithmetic (``-pi/2``, ``3*pi/8``).
Relative file paths are resolved against the config file's directory.
"""
from __future__ import annotations

import ast
import operator
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .boundary import Corner
from .mesh import BoundaryScaling, MeshSpec, Side
from .surfaces import SURFACE_NAMES, surface

WORKFLOWS = ("validate-corner", "blend", "reconstruct", "report")
EDGE_CONDITIONS = ("data", "free", "clamped")
CORNER_VARIANTS = ("B", "BA", "BAM")


class ConfigError(ValueError):
    def __init__(self, message: str, path=None, line: int | None = None):
        where = f"{path}:{line}: " if path is not None and line is not None else (f"{path}: " if path else "")
        super().__init__(where + message)
        self.line = line


@dataclass(frozen=True)
class MaterialConfig:
    D: float = 1.0
    nu: float = 0.0
    q: float = 0.0


@dataclass(frozen=True)
class BoundaryConfig:
    surface: str | None = None
    table: Path | None = None
    kind: str = "kinematic"
    edges: dict = field(default_factory=lambda: {s: "data" for s in Side})
    corners: dict = field(default_factory=dict)  # Corner -> variant


@dataclass(frozen=True)
class ConstraintConfig:
    file: Path | None = None
    points: str | None = None  # "extrema": refined multipeak extrema
    zeta: float | None = None
    cutoff: float | None = None


@dataclass(frozen=True)
class OutputConfig:
    directory: Path = Path("out")
    resolution: int = 3
    lines: str = "center"  # all | center | none
    dump_matrix: bool = False


@dataclass(frozen=True)
class ReportConfig:
    probes: tuple[tuple[float, float], ...] = ()
    meshes: tuple[tuple[int, int], ...] = ()
    compare: bool = False  # error norms against the boundary surface
    reference_table: bool = False  # corner-plate table comparison


@dataclass(frozen=True)
class RunConfig:
    workflow: str
    mesh: MeshSpec
    material: MaterialConfig = MaterialConfig()
    boundary: BoundaryConfig = BoundaryConfig()
    constraints: ConstraintConfig = ConstraintConfig()
    output: OutputConfig = OutputConfig()
    report: ReportConfig = ReportConfig()
    source: Path | None = None

    def with_mesh(self, nx: int, ny: int) -> "RunConfig":
        return replace(self, mesh=replace(self.mesh, nx=nx, ny=ny))

    def with_zeta(self, zeta: float) -> "RunConfig":
        return replace(self, constraints=replace(self.constraints, zeta=zeta))

    def with_output(self, directory) -> "RunConfig":
        return replace(self, output=replace(self.output, directory=Path(directory)))


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_number(text: str) -> float:
    """Float literal or arithmetic over literals and ``pi``."""

    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return float(np.pi)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError

    try:
        return ev(ast.parse(text.strip(), mode="eval").body)
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise ValueError(f"malformed number {text!r}") from None


def parse_mesh_size(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if not m:
        raise ValueError(f"mesh size must look like NxM, got {text!r}")
    nx, ny = int(m.group(1)), int(m.group(2))
    if nx < 1 or ny < 1:
        raise ValueError(f"mesh size must be positive, got {text!r}")
    return nx, ny


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _int(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ValueError(f"malformed integer {text!r}") from None


def _numbers(text: str) -> list[float]:
    return [parse_number(t) for t in text.split(",")]


def _points(text: str) -> tuple[tuple[float, float], ...]:
    out = []
    for chunk in text.split(";"):
        if chunk.strip():
            v = _numbers(chunk)
            if len(v) != 2:
                raise ValueError(f"a point needs two coordinates, got {chunk.strip()!r}")
            out.append((v[0], v[1]))
    return tuple(out)


def _choice(options):
    def conv(text: str) -> str:
        t = text.strip()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {t!r}")
        return t
    return conv


def _str(text: str) -> str:
    return text.strip()


def _zeta(text: str) -> float | None:
    return None if text.strip().lower() == "none" else parse_number(text)


# section -> key -> converter
_KEYS = {
    "": {"workflow": _choice(WORKFLOWS)},
    "mesh": {"size": parse_mesh_size, "domain": _numbers, "scaling_rows": _int, "scaling_factor": parse_number},
    "material": {"D": parse_number, "nu": parse_number, "q": parse_number},
    "boundary": {
        "surface": _choice(SURFACE_NAMES), "table": _str, "kind": _choice(("kinematic", "curvature")),
        **{s.value: _choice(EDGE_CONDITIONS) for s in Side},
        **{f"corner_{c.value}": _choice(CORNER_VARIANTS) for c in Corner},
    },
    "constraints": {"file": _str, "points": _choice(("extrema",)), "zeta": _zeta, "cutoff": parse_number},
    "output": {"directory": _str, "resolution": _int, "lines": _choice(("all", "center", "none")),
               "dump_matrix": _bool},
    "report": {"probes": _points, "meshes": lambda t: tuple(parse_mesh_size(s) for s in t.split(",")),
               "compare": _bool, "reference_table": _bool},
}


def parse_config_text(text: str, path=None) -> RunConfig:
    base = Path(path).parent if path is not None else Path(".")
    values: dict[tuple[str, str], object] = {}
    lines: dict[tuple[str, str], int] = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or line[1:-1].strip() not in _KEYS:
                raise ConfigError(f"unknown section {line}", path, lineno)
            section = line[1:-1].strip()
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {line!r}", path, lineno)
        key, value = (t.strip() for t in line.split("=", 1))
        if key not in _KEYS[section]:
            where = f"section [{section}]" if section else "the top level"
            raise ConfigError(f"unknown key {key!r} in {where}", path, lineno)
        if (section, key) in values:
            raise ConfigError(f"duplicate key {key!r} (first set on line {lines[(section, key)]})", path, lineno)
        try:
            values[(section, key)] = _KEYS[section][key](value)
        except ValueError as exc:
            raise ConfigError(str(exc), path, lineno) from None
        lines[(section, key)] = lineno

    def get(sec, key, default=None):
        return values.get((sec, key), default)

    def err(msg, sec=None, key=None):
        return ConfigError(msg, path, lines.get((sec, key)))

    if ("", "workflow") not in values:
        raise ConfigError("missing required key 'workflow'", path)
    workflow = get("", "workflow")

    surf_name = get("boundary", "surface")
    table = get("boundary", "table")
    if surf_name is not None and table is not None:
        raise err("boundary data given both as 'surface' and as 'table'", "boundary", "table")
    table_path = None
    if table is not None:
        table_path = (base / table).resolve()
        if not table_path.is_file():
            raise err(f"tabulated boundary file {table_path} does not exist", "boundary", "table")

    edges = {s: get("boundary", s.value, "data") for s in Side}
    corners = {}
    for c in Corner:
        v = get("boundary", f"corner_{c.value}")
        if v is None:
            continue
        for s in c.sides:
            if edges[s] == "clamped":
                raise err(f"corner support at {c.value} lies on the clamped {s.value} edge",
                          "boundary", f"corner_{c.value}")
        corners[c] = v
    if any(e == "data" for e in edges.values()) and surf_name is None and table_path is None:
        raise err("edges set to 'data' need a boundary 'surface' or 'table'")

    # mesh
    if ("mesh", "size") not in values and workflow != "report":
        raise ConfigError("missing required key 'size' in [mesh]", path)
    nx, ny = get("mesh", "size", (1, 1))
    if ("mesh", "domain") in values:
        dom = get("mesh", "domain")
        if len(dom) != 4:
            raise err("domain needs four numbers x0, x1, y0, y1", "mesh", "domain")
        domain = tuple(dom)
    elif surf_name is not None:
        domain = surface(surf_name).domain
    else:
        domain = (0.0, 1.0, 0.0, 1.0)
    scaling = None
    if ("mesh", "scaling_rows") in values or ("mesh", "scaling_factor") in values:
        try:
            scaling = BoundaryScaling(get("mesh", "scaling_rows", 4), get("mesh", "scaling_factor", 0.25))
        except ValueError as exc:
            raise err(str(exc), "mesh", "scaling_factor") from None
    try:
        mesh = MeshSpec(nx, ny, domain, scaling)
    except ValueError as exc:
        raise err(str(exc), "mesh", "domain") from None

    material = MaterialConfig(get("material", "D", 1.0), get("material", "nu", 0.0), get("material", "q", 0.0))
    if material.D <= 0:
        raise err("D must be positive", "material", "D")

    cfile = get("constraints", "file")
    cpath = None
    if cfile is not None:
        cpath = (base / cfile).resolve()
        if not cpath.is_file():
            raise err(f"constraint file {cpath} does not exist", "constraints", "file")
    if cpath is not None and get("constraints", "points") is not None:
        raise err("give constraint points either as 'file' or as 'points'", "constraints", "points")
    constraints = ConstraintConfig(cpath, get("constraints", "points"), get("constraints", "zeta"),
                                   get("constraints", "cutoff"))
    if constraints.zeta is not None and constraints.zeta <= 0:
        raise err("zeta must be positive", "constraints", "zeta")

    output = OutputConfig((base / get("output", "directory", "out")), get("output", "resolution", 3),
                          get("output", "lines", "center"), get("output", "dump_matrix", False))
    if output.resolution < 2:
        raise err("resolution must be at least 2", "output", "resolution")
    report = ReportConfig(get("report", "probes", ()), get("report", "meshes", ()),
                          get("report", "compare", False), get("report", "reference_table", False))

    has_points = cpath is not None or constraints.points is not None
    if workflow == "reconstruct" and not has_points:
        raise err("the reconstruct workflow needs a constraint 'file' or 'points'")
    if workflow == "reconstruct" and material.q != 0.0:
        raise err("a uniform load cannot be combined with point constraints", "material", "q")
    if workflow == "report" and not report.meshes:
        raise err("the report workflow needs 'meshes' in [report]")
    if workflow == "validate-corner" and material.q == 0.0:
        raise err("the validate-corner workflow needs a nonzero load q in [material]")
    if report.compare and surf_name is None:
        raise err("'compare' needs a boundary surface", "report", "compare")
    if constraints.points == "extrema" and surf_name != "multipeak":
        raise err("'points = extrema' is defined for the multipeak surface only", "constraints", "points")

    return RunConfig(workflow, mesh, material,
                     BoundaryConfig(surf_name, table_path, get("boundary", "kind", "kinematic"), edges, corners),
                     constraints, output, report, Path(path) if path is not None else None)


def parse_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path) from None
    return parse_config_text(text, path)

