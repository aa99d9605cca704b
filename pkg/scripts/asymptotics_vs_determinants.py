"""log Q from Fredholm determinants against the large-t expansion.

The residual log Q + t^2 F - log theta - A log t should flatten to the
unknown constant log C(x) as t grows.
"""

import argparse
import math

from artifact import asymptotics as asy
from artifact import equilibrium as eqm
from artifact import kernels as kr


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eta", type=float, default=math.log(5))
    ap.add_argument("--x", type=float, default=0.6)
    ap.add_argument("--t", type=float, nargs="+", default=[4, 6, 8, 10, 12, 14, 16])
    args = ap.parse_args()

    A = asy.a_coefficient(args.eta)
    print(f"A(eta) = {A:.10f}")
    print(f"{'t':>5} {'s':>4} {'logQ':>14} {'residual':>10} {'alpha err*t':>12} {'log beta err':>13}")
    for t in args.t:
        s = round(args.x * t)
        x = s / t
        lq = kr.log_Q(t, s, args.eta, tol=1e-12).logQ
        res = lq + t * t * eqm.rate_function(args.eta, x) - asy.log_theta_osc(args.eta, x, t) - A * math.log(t)
        o = kr.observables(t, args.x, args.eta)
        pr = asy.predict(args.eta, x, t, delta=0.0)
        print(f"{t:5.1f} {s:4d} {lq:14.6f} {res:10.5f} {t * (o.alphaHat - pr.predicted_alpha):12.5f} "
              f"{math.log(o.betaHat) - pr.predicted_log_beta:13.2e}")


if __name__ == "__main__":
    main()
