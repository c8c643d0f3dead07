"""Operator and extrinsic residuals over the random immersion corpus.

    python scripts/sweep_corpus.py [--count 200] [--seed 2024]

Prints the worst value of each pointwise relation and a histogram of the
T^2 spectrum, which must stay in [0, 1].
"""

import argparse
from collections import Counter

import numpy as np

from skewprod import corpus
from skewprod.extrinsic import gauss_weingarten_check, h_symmetry
from skewprod.geometry import sample_points
from skewprod.operators import product_residuals
from skewprod.pipeline import Analyzer


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    worst = Counter()
    spectrum = []
    shapes = Counter()
    for imm in corpus.random_immersions(args.count, seed=args.seed):
        shapes[(imm.d, imm.n)] += 1
        for pd in Analyzer(imm).analyze(sample_points(imm, grid=2, random=3)):
            for k, v in product_residuals(pd.ops).items():
                worst[k] = max(worst[k], v)
            worst["gauss_weingarten"] = max(worst["gauss_weingarten"], gauss_weingarten_check(pd.ext))
            worst["h_symmetry"] = max(worst["h_symmetry"], h_symmetry(pd.ext))
            spectrum.extend(pd.spectrum.raw)

    print(f"{args.count} immersions, (d, n) counts: {dict(sorted(shapes.items()))}")
    for k, v in worst.items():
        print(f"  {k:<18} {v:.2e}")
    hist, edges = np.histogram(spectrum, bins=10, range=(0, 1))
    print("T^2 eigenvalue histogram:")
    for h, lo in zip(hist, edges):
        print(f"  [{lo:.1f}, {lo + 0.1:.1f})  {h}")
    print(f"  range [{min(spectrum):.3g}, {max(spectrum):.3g}]")


if __name__ == "__main__":
    main()
