"""Monte Carlo calibration of the model confidence set.

    python3 scripts/mcs_calibration.py --runs 200
    python3 scripts/mcs_calibration.py --runs 200 --distinct

By default the second model is an exact copy of the best one; ``--distinct``
draws it independently with the same expected loss, in which case the pair
can be split by chance at roughly the test level.
"""

from __future__ import annotations

import argparse
import time

from forumcast.experiments import mcs_calibration


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--n", type=int, default=46)
    ap.add_argument("--n-boot", type=int, default=5000)
    ap.add_argument("--alpha", type=float, default=0.10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--distinct", action="store_true")
    args = ap.parse_args()

    t0 = time.perf_counter()
    cal = mcs_calibration(args.runs, args.n, args.n_boot, args.alpha, args.seed,
                          identical_pair=not args.distinct)
    print(f"{cal.runs} runs in {time.perf_counter() - t0:.0f} s")
    print(f"best retained      {cal.best_retained:.1%}")
    print(f"inflated dropped   {cal.inflated_eliminated:.1%}")
    print(f"pair separated     {cal.pair_separated} times")


if __name__ == "__main__":
    main()
