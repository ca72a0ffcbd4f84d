"""Freeze reference values computed by the straight-line oracles.

    python scripts/freeze_oracles.py

Writes tests/fixtures/oracle_values.json. The tests compare the package
against these frozen numbers as well as against the live oracles.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracles import brute_betweenness, brute_complexity, brute_degree, brute_simpls, random_graph  # noqa: E402


def main() -> None:
    rng = np.random.default_rng(20240601)
    graphs = []
    for _ in range(12):
        n = int(rng.integers(3, 8))
        edges = random_graph(rng, n, 0.45)
        graphs.append({"n": n, "edges": edges, "degree": brute_degree(n, edges),
                       "betweenness": brute_betweenness(n, edges)})
    x = rng.standard_normal((40, 5))
    x -= x.mean(axis=0)
    y = x @ np.array([1.0, -0.5, 0.0, 0.25, 0.0]) + rng.standard_normal(40)
    y -= y.mean()
    pls = brute_simpls(x, y, 5)
    docs = [["a", "b", "c"], ["a", "d", "d", "e"], ["b", "c", "f"], ["a"]]
    out = {
        "graphs": graphs,
        "simpls": {"x": x.tolist(), "y": y.tolist(),
                   "weights": pls["weights"].tolist(), "criteria": pls["criteria"].tolist()},
        "complexity": {"docs": docs, "values": brute_complexity(docs)},
        "p1p2": {"docs": [["a", "a", "b"], ["a"]], "values": [math.log(2) / 3, 0.0]},
    }
    path = ROOT / "tests" / "fixtures" / "oracle_values.json"
    path.write_text(json.dumps(out, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
