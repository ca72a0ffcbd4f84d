"""Size and power of the Dumitrescu-Hurlin panel causality test.

    python3 scripts/dh_calibration.py --reps 500 --lags 1 2 3
"""

from __future__ import annotations

import argparse

from forumcast.experiments import dh_calibration


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--N", type=int, default=7)
    ap.add_argument("--T", type=int, default=120)
    ap.add_argument("--lags", type=int, nargs="+", default=[1])
    ap.add_argument("--coefficient", type=float, default=0.5)
    args = ap.parse_args()

    print(f"N={args.N} T={args.T} reps={args.reps}, nominal level 5%")
    for K in args.lags:
        cal = dh_calibration(args.reps, args.N, args.T, K, args.coefficient)
        print(f"K={K}: size {cal.size:.3f} (small-T statistic {cal.size_tilde:.3f}), "
              f"power {cal.power:.3f}")


if __name__ == "__main__":
    main()
