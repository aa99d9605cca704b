"""Compare the closed-form endpoint residues with a direct contour integral.

Run from the repository root so that tests/oracles.py is importable.
"""

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from artifact import asymptotics as asy  # noqa: E402
from oracles import residues_by_contour  # noqa: E402


def main():
    eta = math.log(5)
    for x, t in ((0.6, 3.0), (-0.4, 7.3), (1.2, 11.0)):
        closed = asy.residues(eta, x, t)
        contour = residues_by_contour(eta, x, t)
        worst = max(abs(closed[k].res11 - contour[k]) for k in "abcd")
        print(f"x={x:+.2f} t={t:5.1f}  X={closed.X:+.6f}  max |closed - contour| = {worst:.2e}")


if __name__ == "__main__":
    main()
