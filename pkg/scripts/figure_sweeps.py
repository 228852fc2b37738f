"""Write the sweep CSVs behind the q, log q and phi plots at p = 1/2.

One file per b, named sweep_b<b>.csv, with the columns of ``invbeta sweep``.
"""

import argparse
import pathlib

from invbeta.cli import SweepSpec, sweep_csv

DEFAULT_B = (0.25, 0.5, 1.0, 2.0, 4.0)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="figures", type=pathlib.Path)
    parser.add_argument("--b", type=float, nargs="+", default=list(DEFAULT_B))
    parser.add_argument("--p", type=float, default=0.5)
    parser.add_argument("--a-min", type=float, default=1e-2)
    parser.add_argument("--a-max", type=float, default=1e2)
    parser.add_argument("--points", type=int, default=200)
    args = parser.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for b in args.b:
        spec = SweepSpec(b, args.p, args.a_min, args.a_max, args.points, "log")
        path = args.out_dir / f"sweep_b{b:g}.csv"
        with open(path, "w", newline="\n") as fh:
            fh.write(sweep_csv(spec))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
