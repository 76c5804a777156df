"""Residual of the flat Dirac operator on Coulomb-type fields as h halves.

    python scripts/convergence_study.py --velocity 0.6 --n 17 --h 0.1 --levels 3
"""
import argparse
import json

import numpy as np

from stalab import algebra as ga
from stalab.boosts import boost_matrix
from stalab.em import coulomb_field, lienard_wiechert_uniform, pullback_field
from stalab.fields import constant_field, convergence_study


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--velocity", type=float, default=0.6)
    p.add_argument("--n", type=int, default=17)
    p.add_argument("--h", type=float, default=0.1)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--center", type=float, nargs=4, default=(0.0, 2.0, 1.0, 0.5))
    args = p.parse_args()

    L, _ = boost_matrix(args.velocity)
    fields = {
        "coulomb": coulomb_field(1.0),
        "pullback": pullback_field(L, coulomb_field(1.0)),
        "lienard-wiechert": lienard_wiechert_uniform(1.0, (-args.velocity, 0.0, 0.0)),
    }
    zero = constant_field(np.zeros(ga.N_BLADES))
    spacings = tuple(args.h / 2**k for k in range(args.levels))
    rows = {}
    for name, F in fields.items():
        s = convergence_study(F, zero, args.center, spacings, args.n)
        rows[name] = {"h": list(s.spacings), "residual_l2": list(s.residual_l2),
                      "ratios": list(s.ratios), "orders": list(s.orders), "events": s.common_events}
        print(f"{name:18s} " + "  ".join(f"h={h:.4f} r={r:.3e}" for h, r in zip(s.spacings, s.residual_l2))
              + "  ratios " + ", ".join(f"{r:.3f}" for r in s.ratios))
    print(json.dumps(rows, indent=2))


if __name__ == "__main__":
    main()
