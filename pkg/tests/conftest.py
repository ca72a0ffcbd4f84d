from __future__ import annotations

import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from forumcast.indicators import ALL_COLUMNS, FORUM_VARIABLES, SIMPLE_VARIABLES, TARGET  # noqa: E402
from forumcast.ingest import ForumPost  # noqa: E402
from forumcast.months import month_range  # noqa: E402
from forumcast.network import Arc, InteractionGraph  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
T0 = datetime(2015, 3, 1, tzinfo=timezone.utc)
WINDOW = (T0, datetime(2015, 4, 1, tzinfo=timezone.utc))


def graph_from_edges(n: int, edges) -> InteractionGraph:
    labels = [f"n{i}" for i in range(n)]
    arcs = tuple(Arc(labels[a], labels[b], T0) for a, b in edges)
    return InteractionGraph(frozenset(labels), arcs, WINDOW)


def post(pid, tid, author, hours, root=False, body="hello there", city="Rome", lang="en",
         start=T0) -> ForumPost:
    return ForumPost(pid, tid, city, author, start + timedelta(hours=hours), root, body, lang)


def thread(tid, authors, gaps_hours, start_hours=0.0, city="Rome", body="nice trip"):
    """Root by ``authors[0]``, then one reply per further author after each gap."""
    out = [post(f"{tid}-0", tid, authors[0], start_hours, True, body, city)]
    t = start_hours
    for k, (a, g) in enumerate(zip(authors[1:], gaps_hours), start=1):
        t += g
        out.append(post(f"{tid}-{k}", tid, a, t, False, body, city))
    return out


def factor_panel(seed: int, n_months: int = 120, loading: float = 1.0,
                 planted: int | None = None) -> pd.DataFrame:
    """City slice with a target whose difference loads on lagged predictor shocks."""
    rng = np.random.default_rng(seed)
    months = month_range("2007-01", month_range("2007-01", "2030-12")[n_months - 1])
    u = rng.standard_normal(n_months)
    k = len(FORUM_VARIABLES)
    loads = np.full(k, 1.0)
    if planted is not None:
        loads = np.full(k, 0.1)
        loads[planted] = 1.0
    noise = rng.standard_normal((n_months, k))
    x = np.cumsum(u[:, None] * loads + 0.5 * noise, axis=0)
    dy = np.zeros(n_months)
    e = rng.standard_normal(n_months)
    for t in range(1, n_months):
        dy[t] = 0.3 * dy[t - 1] + loading * u[t - 1] + e[t]
    frame = pd.DataFrame(index=pd.Index(months, name="month"), columns=list(ALL_COLUMNS),
                         dtype=float)
    for j, name in enumerate(FORUM_VARIABLES):
        frame[name] = x[:, j]
    frame["google_trend_flights"] = 50 + np.cumsum(rng.standard_normal(n_months))
    frame["google_trend_holidays"] = 50 + np.cumsum(rng.standard_normal(n_months))
    for name in SIMPLE_VARIABLES:
        frame[name] = 10 + np.cumsum(rng.standard_normal(n_months))
    frame[TARGET] = 1000 + np.cumsum(dy)
    return frame


@pytest.fixture
def oracle_values():
    import json

    return json.loads((FIXTURES / "oracle_values.json").read_text(encoding="utf-8"))


# acceptance verdicts, printed after the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
