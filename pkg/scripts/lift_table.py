"""Print the local lift table for seeded (phi, target) pairs.

Each row halves the distance to phi and reports how far the lifted
representation moved and whether theta hits the target exactly.
"""

import argparse

from fdcstar.algebra import AlgebraDescriptor
from fdcstar.experiments import ExperimentConfig, lift_table, monotone_violations


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--algebra", default="2,1")
    ap.add_argument("--pairs", type=int, default=3)
    ap.add_argument("--steps", type=int, default=12)
    ap.add_argument("--base-rank", type=int)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    dims = AlgebraDescriptor.parse(args.algebra).block_dims
    cfg = ExperimentConfig(block_dims=dims, seed=args.seed, lift_steps=args.steps, base_rank=args.base_rank)
    for k in range(args.pairs):
        rows, base = lift_table(cfg, k)
        print(f"pair {k}  (lift of phi itself moves pi by {base['rep_distance']:.1e})")
        print(f"{'n':>3} {'||phi_n - phi||':>16} {'rep_distance':>13} {'theta defect':>13}")
        for r in rows:
            if r["flagged"]:
                print(f"{r['n']:>3} {r['target_distance']:16.3e} {'rank jump':>13} {'-':>13}")
            else:
                print(f"{r['n']:>3} {r['target_distance']:16.3e} {r['rep_distance']:13.3e} {r['theta_defect']:13.1e}")
        print(f"monotone violations from n = 3: {monotone_violations(rows)}\n")


if __name__ == "__main__":
    main()
