"""Write the constraint point files used by the shipped configs.

Five-point cosine inputs and the fifteen-point multipeak set (six refined
extrema plus nine seeded random points that land in distinct elements of the
251 x 251 mesh). Targets are left out, so runs sample them from the surface.
"""
import argparse
from pathlib import Path

import numpy as np

from mms_surface import MeshSpec, build_mesh, surface
from mms_surface.surfaces import FIVE_POINTS, multipeak_extrema

SEED = 20240517
N_RANDOM = 9


def write_points(path: Path, points, comment: str) -> None:
    with open(path, "w") as fh:
        fh.write(f"# {comment}\n")
        for x, y in points:
            fh.write(f"{x:.17g}, {y:.17g}\n")


def fifteen_points() -> list[tuple[float, float]]:
    surf = surface("multipeak")
    mesh = build_mesh(MeshSpec(251, 251, surf.domain))
    pts = multipeak_extrema()
    used = {mesh.locate_element(p)[0] for p in pts}
    x0, x1, y0, y1 = surf.domain
    rng = np.random.default_rng(SEED)
    while len(pts) < 6 + N_RANDOM:
        # keep away from the boundary rows where the data is already prescribed
        p = (float(rng.uniform(x0 + 0.5, x1 - 0.5)), float(rng.uniform(y0 + 0.5, y1 - 0.5)))
        e = mesh.locate_element(p)[0]
        if e not in used:
            used.add(e)
            pts.append(p)
    return pts


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dir", type=Path, default=Path(__file__).resolve().parents[1] / "configs" / "data")
    args = ap.parse_args(argv)
    args.dir.mkdir(parents=True, exist_ok=True)
    write_points(args.dir / "five_points.csv", FIVE_POINTS, "x, y (targets sampled from cosine_product)")
    write_points(args.dir / "multipeak_fifteen.csv", fifteen_points(),
                 f"x, y: six refined extrema then {N_RANDOM} random points, seed {SEED}")


if __name__ == "__main__":
    main()
