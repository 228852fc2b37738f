"""Sign pattern of the second difference of phi for b > 1.

Purely exploratory: convexity of phi is only established for b < 1, and the
b > 1 case is open. Prints, for each (b, p), how many interior points have a
negative, zero or positive second difference, and the largest value seen.
"""

import argparse

import numpy as np

from invbeta.config import DEFAULT_TOL
from invbeta.incbeta import BetaParams
from invbeta.quantile import quantile


def phi_second_differences(b, p, a_values, rel_step):
    out = []
    for a in a_values:
        h = rel_step * a
        f = [(x * quantile(BetaParams(x, b, p)).psi) for x in (a - h, a, a + h)]
        out.append((f[0] - 2 * f[1] + f[2]) / h**2)
    return np.array(out)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--b", type=float, nargs="+", default=[1.1, 1.5, 2.0, 3.0, 7.0, 20.0])
    parser.add_argument("--p", type=float, nargs="+", default=[0.01, 0.1, 0.5, 0.9, 0.99])
    parser.add_argument("--a-min", type=float, default=1e-2)
    parser.add_argument("--a-max", type=float, default=1e3)
    parser.add_argument("--points", type=int, default=120)
    parser.add_argument("--rel-step", type=float, default=DEFAULT_TOL.fd_rel_step)
    args = parser.parse_args()

    a_values = np.logspace(np.log10(args.a_min), np.log10(args.a_max), args.points)
    print(f"{'b':>6} {'p':>5} {'neg':>5} {'zero':>5} {'pos':>5} {'max':>12}")
    for b in args.b:
        for p in args.p:
            d2 = phi_second_differences(b, p, a_values, args.rel_step)
            print(
                f"{b:6g} {p:5g} {np.sum(d2 < 0):5d} {np.sum(d2 == 0):5d} "
                f"{np.sum(d2 > 0):5d} {d2.max():12.3e}"
            )


if __name__ == "__main__":
    main()
