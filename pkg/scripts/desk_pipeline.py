"""Run the full pipeline on one synthetic city and print the three tables.

    python3 scripts/desk_pipeline.py --work /tmp/forumcast --horizons 1 12
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import pandas as pd

from forumcast.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--work", type=Path, default=Path("desk_run"))
    ap.add_argument("--horizons", type=int, nargs="+", default=[1, 12])
    ap.add_argument("--n-boot", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    argv = ["pipeline", "--data-dir", str(args.work / "data"), "--out-dir", str(args.work / "out"),
            "--n-boot", str(args.n_boot), "--seed", str(args.seed),
            "--horizons", *map(str, args.horizons)]
    t0 = time.perf_counter()
    code = cli_main(argv)
    print(f"pipeline exit code {code} after {time.perf_counter() - t0:.1f} s")
    if code:
        return code
    pd.set_option("display.width", 120)
    for name in ("table4", "table3", "table5"):
        print(f"\n{name}")
        print(pd.read_csv(args.work / "out" / f"{name}.csv").to_string(index=False))
    return 0


if __name__ == "__main__":
    sys.exit(main())
