"""Print F, its derivatives and the endpoints across the three regimes."""

import argparse
import math

import numpy as np

from artifact import equilibrium as eqm


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eta", type=float, default=math.log(5))
    ap.add_argument("--n", type=int, default=17)
    args = ap.parse_args()

    print(f"eta = {args.eta:.6f}, x_* = {eqm.x_star(args.eta):.6f}")
    print(f"{'x':>8} {'regime':>11} {'F':>12} {'dF':>12} {'d2F':>10}  endpoints")
    for x in np.linspace(-1.5, 2.5, args.n):
        p = eqm.profile(args.eta, x)
        ends = " ".join(f"{v:+.4f}" for v in p.endpoints) if p.endpoints else "-"
        print(f"{x:8.3f} {p.regime:>11} {p.F:12.6e} {p.dF:12.6e} {p.d2F:10.5f}  {ends}")


if __name__ == "__main__":
    main()
