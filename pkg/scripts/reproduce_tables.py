"""Rerun the shipped configs and print computed values next to the published ones.

    python3 scripts/reproduce_tables.py            # everything, about 10 minutes
    python3 scripts/reproduce_tables.py --skip-251 # meshes up to 171 only
"""
import argparse
import gc
import time
from pathlib import Path

from mms_surface.cli import probe, solve_config
from mms_surface.config import parse_config
from mms_surface.fields import total_energy
from mms_surface.surfaces import (
    COSINE_CURVATURE_PUBLISHED,
    COSINE_KINEMATIC_PUBLISHED,
    CORNER_SCALED_PUBLISHED,
    CORNER_VARIANTS_PUBLISHED,
    NONSYMMETRIC_CURVATURE_PUBLISHED,
    NONSYMMETRIC_KINEMATIC_PUBLISHED,
    PUBLISHED_ENERGIES,
    exact_corner_table,
)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
COLUMNS = ("w1", "theta1", "M1", "w2", "theta2", "M2")


def run(name, n=None):
    cfg = parse_config(CONFIGS / f"{name}.cfg")
    if n:
        cfg = cfg.with_mesh(n, n)
    t0 = time.perf_counter()
    res = solve_config(cfg)
    return cfg, res, time.perf_counter() - t0


def blending_table(title, name, published, skip_large):
    print(f"\n{title}")
    print("mesh   " + "  ".join(f"{c:>19s}" for c in COLUMNS) + "   time")
    for n, pub in published.items():
        if skip_large and n > 171:
            continue
        cfg, res, dt = run(name, n)
        p1, p2 = (probe(res.solution, res.mesh, p) for p in cfg.report.probes)
        # the reference columns hold magnitudes of rotations and moments
        ours = (p1[0], abs(p1[1]), abs(p1[3]), p2[0], abs(p2[1]), abs(p2[3]))
        cells = [f"{o:9.4f} ({q:8.4f})" for o, q in zip(ours, pub)]
        print(f"{n:>3d}x{n:<3d}" + "  ".join(cells) + f"  {dt:5.1f}s")
        del res
        gc.collect()


def corner_tables(skip_large):
    print("\ncorner plate, center and quarter row (computed / published), 171x171")
    for variant, rows in CORNER_VARIANTS_PUBLISHED.items():
        cfg, res, dt = run(f"corner_{variant.lower()}")
        scale = 1.0 / (cfg.material.q * cfg.mesh.lx**4)
        for r in rows:
            v = probe(res.solution, res.mesh, (r.x, r.y))
            print(f"{variant:>4s} ({r.y}, {r.x})  W {v[0] * scale:.6f} / {r.deflection:.6f}"
                  f"  Mx {-v[3] * scale:.6f} / {r.m_x:.6f}  My {-v[9] * scale:.6f} / {r.m_y:.6f}")
        del res
        gc.collect()
    if skip_large:
        return
    print("\ncorner plate with boundary scaling, 251x251 (computed / published / exact)")
    cfg, res, dt = run("corner_scaled")
    scale = 1.0 / (cfg.material.q * cfg.mesh.lx**4)
    for exact in exact_corner_table().rows:
        pub = CORNER_SCALED_PUBLISHED.lookup(exact.y, exact.x)
        v = probe(res.solution, res.mesh, (exact.x, exact.y))
        print(f"({exact.y:4}, {exact.x:4})  W {v[0] * scale:.6f} / {pub.deflection:.6f} / {exact.deflection:.6f}"
              f"  Mx {-v[3] * scale:.6f} / {pub.m_x:.6f}  My {-v[9] * scale:.6f} / {pub.m_y:.6f}")
    del res
    gc.collect()


ENERGY_RUNS = [
    ("cosine_kinematic", 71, "cosine_biharmonic/kinematic/71"),
    ("cosine_curvature", 71, "cosine_biharmonic/curvature/71"),
    ("nonsymmetric_kinematic", 251, "nonsymmetric_biharmonic/kinematic/251"),
    ("nonsymmetric_curvature", 251, "nonsymmetric_biharmonic/curvature/251"),
    ("cos_product_blend", None, "cosine_product/boundary/11"),
    ("cos_product_center_low", None, "cosine_product/center_0.3/11"),
    ("cos_product_center", None, "cosine_product/center/11"),
    ("cos_product_center_fine", 251, "cosine_product/center/251"),
    ("cos_product_center_spread", 251, "cosine_product/center_zeta50/251"),
    ("cos_product_five", 251, "cosine_product/five/251"),
    ("cos_product_five_spread", 251, "cosine_product/five_zeta50/251"),
    ("multipeak_extrema", 251, "multipeak/six/251"),
    ("multipeak_extrema_spread", 251, "multipeak/six_zeta50/251"),
    ("multipeak_fifteen_spread", 251, "multipeak/fifteen_zeta50/251"),
]


def energy_table(skip_large):
    print("\nenergies (computed / published)")
    for name, n, key in ENERGY_RUNS:
        if skip_large and n == 251:
            continue
        # the blending configs default to a coarser mesh than the published energy
        cfg, res, dt = run(name, n if name.startswith(("cosine_", "nonsymmetric_")) else None)
        E = total_energy(res.solution, res.mesh).total
        pub = PUBLISHED_ENERGIES[key]
        print(f"{key:<40s} {E:14.4f} / {pub:14.4f}  ({100 * (E - pub) / pub:+.3f}%)  {dt:5.1f}s")
        del res
        gc.collect()


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--skip-251", action="store_true", help="leave out the 251 x 251 runs")
    args = ap.parse_args()
    blending_table("cosine patch, kinematic data", "cosine_kinematic", COSINE_KINEMATIC_PUBLISHED, args.skip_251)
    blending_table("cosine patch, curvature data", "cosine_curvature", COSINE_CURVATURE_PUBLISHED, args.skip_251)
    blending_table("non-symmetric patch, kinematic data", "nonsymmetric_kinematic",
                   NONSYMMETRIC_KINEMATIC_PUBLISHED, args.skip_251)
    blending_table("non-symmetric patch, curvature data", "nonsymmetric_curvature",
                   NONSYMMETRIC_CURVATURE_PUBLISHED, args.skip_251)
    corner_tables(args.skip_251)
    energy_table(args.skip_251)


if __name__ == "__main__":
    main()
