"""Recover random elements from their fields and show the adversarial fields being refused."""

import argparse

from fdcstar import fields as fld
from fdcstar.algebra import AlgebraDescriptor, norm, random_element
from fdcstar.reps import random_unit_vector


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--algebra", default="2,1")
    ap.add_argument("--elements", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    desc = AlgebraDescriptor.parse(args.algebra)
    d = desc.d_min
    xi = random_unit_vector(d, [args.seed, 99])
    print(f"A = {'+'.join(f'M{n}' for n in desc.block_dims)}, dim {desc.dim}, H = C^{d}")
    for k in range(args.elements):
        a = random_element(desc, [args.seed, k])
        T = fld.field_from_element(a, d)
        audit = fld.compatibility_audit(T, seed=k, n_samples=25)
        errs = []
        for mode in (fld.QUASI_STATES, fld.STATES_ONLY):
            rec = fld.reconstruct_element(T, xi, mode, audit=audit)
            errs.append(norm(rec.element - a))
        print(f"element {k}: audit {audit.max_defect:.1e}, error {errs[0]:.1e} (Q(A)) {errs[1]:.1e} (S(A))")
    for name, make in fld.ADVERSARIAL_FIELDS.items():
        audit = fld.compatibility_audit(make(desc, d), seed=0)
        print(f"{name:>10} field: {audit.verdict}, max defect {audit.max_defect:.3g}")


if __name__ == "__main__":
    main()
