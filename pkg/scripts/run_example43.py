"""Full verification of the bundled reference immersion, with a residual table.

    python scripts/run_example43.py [--json-out report.json] [--seed 0]

Also prints the closed-form comparison for the curvature inequality and the
two variants of the invariant/slant normal identity side by side.
"""

import argparse
import time
from importlib import resources

import numpy as np

from skewprod.manifest import load_manifest
from skewprod.report import dumps, render, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--json-out")
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()

    path = resources.files("skewprod").joinpath("data", "example43.json")
    t0 = time.perf_counter()
    rep = run(load_manifest(path), seed=args.seed)
    elapsed = time.perf_counter() - t0
    print(render(rep))
    print(f"wall time {elapsed:.2f} s")

    xs = np.array([row.point[0] for row in rep.inequality])
    rhs = np.array([row.rhs for row in rep.inequality])
    lhs = np.array([row.lhs for row in rep.inequality])
    print(f"rhs vs 1/(60 x^2):  max abs err {np.abs(rhs - 1 / (60 * xs**2)).max():.2e}")
    print(f"lhs vs 8/(5 x^2):   max rel err {np.abs(lhs * 5 * xs**2 / 8 - 1).max():.2e}")
    for key in ("inv_sff_slant_normal", "inv_sff_slant_normal_full"):
        r = rep.identity(key)
        print(f"{key:<28} residual {r.residual:.3e} at x = {r.point[0]:.4f}  {r.status}")

    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(dumps(rep))


if __name__ == "__main__":
    main()
