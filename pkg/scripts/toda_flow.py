"""Evolve Flaschka variables from Fredholm data and compare with later Fredholm data."""

import math
import time

import numpy as np

from artifact import toda


def main():
    eta = math.log(5)
    window = (-25, 45)
    for dt in (2e-3, 1e-3):
        t0 = time.perf_counter()
        end = toda.integrate_flaschka(1.0, 3.0, window, eta, dt=dt)
        ref = toda.flaschka(3.0, window, eta)
        print(f"dt={dt:g}: sup|a err| = {np.max(np.abs(end.a - ref.a)):.2e}, "
              f"sup|b err| = {np.max(np.abs(end.b - ref.b)):.2e}, {time.perf_counter() - t0:.2f}s")
    for x, t in ((-1.5, 10.0), (0.6, 12.0), (2.5, 10.0)):
        c = toda.compare_profiles(eta, x, t)
        print(f"x={x:+.2f} t={t:4.1f}: a={c.a:.6f} (profile {c.a0:.6f}), b={c.b:+.6f} (profile {c.b0:+.6f})")


if __name__ == "__main__":
    main()
