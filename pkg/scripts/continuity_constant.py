"""Worst observed ratio ||theta(pi1) - theta(pi2)|| / rep_distance(pi1, pi2) against dim A."""

import argparse

from fdcstar import functionals as fn
from fdcstar.algebra import AlgebraDescriptor
from fdcstar.reps import random_representation, random_unit_vector, rep_distance, theta


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--algebras", nargs="+", default=["1", "1,1", "2", "2,1", "3,2,1"])
    ap.add_argument("--pairs", type=int, default=500)
    args = ap.parse_args()
    for text in args.algebras:
        desc = AlgebraDescriptor.parse(text)
        d = desc.d_min
        xi = random_unit_vector(d, [0, 99])
        worst = 0.0
        for k in range(args.pairs):
            p1 = random_representation(desc, d, [0, k, 0])
            p2 = random_representation(desc, d, [0, k, 1])
            dist = rep_distance(p1, p2)
            if dist > 1e-9:
                worst = max(worst, fn.qstate_distance(theta(p1, xi), theta(p2, xi)) / dist)
        print(f"{text:>8}: dim A = {desc.dim:>2}, worst ratio {worst:.4f}")


if __name__ == "__main__":
    main()
