"""City-by-month indicator panel assembled from forum records and external series."""

from __future__ import annotations

import csv
import math
import statistics
from bisect import bisect_left
from collections import defaultdict
from datetime import datetime
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import pandas as pd

from . import network, text
from .ingest import ExternalSeries, ForumPost, UserProfile
from .months import month_index, month_label, month_window

FORUM_VARIABLES = (
    "users_photos",
    "users_level",
    "percentage_male",
    "average_age",
    "activity",
    "group_betweenness_centrality",
    "group_degree_centrality",
    "rotating_leadership",
    "sentiment",
    "complexity",
    "avg_response_time",
    "new_users",
)
EXTERNAL_VARIABLES = {
    "trend_flights": "google_trend_flights",
    "trend_holidays": "google_trend_holidays",
    "arrivals": "target_arrivals",
}
PANEL_VARIABLES = FORUM_VARIABLES + tuple(EXTERNAL_VARIABLES.values())
# simpler substitutes used by the BRIDGE-OTH-GF comparison model
SIMPLE_VARIABLES = ("n_posts", "avg_replies_per_thread", "user_level_sd")
ALL_COLUMNS = PANEL_VARIABLES + SIMPLE_VARIABLES
TARGET = "target_arrivals"


class PanelSchemaError(ValueError):
    pass


@dataclass
class IndicatorConfig:
    sub_window_days: int = 7
    step_days: int = 1
    post_weighted_demographics: bool = False
    scorer: text.SentimentScorer | None = None


@dataclass
class IndicatorPanel:
    """Values indexed by ``(city, month)`` with NaN as the missing marker."""

    frame: pd.DataFrame
    notes: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.frame = self.frame.sort_index()
        self.validate()

    @property
    def cities(self) -> list[str]:
        return sorted(self.frame.index.get_level_values("city").unique())

    @property
    def months(self) -> list[str]:
        return sorted(self.frame.index.get_level_values("month").unique(), key=month_index)

    @property
    def census(self) -> dict[str, int]:
        return {c: int(self.frame[c].isna().sum()) for c in self.frame.columns}

    def city(self, name: str) -> pd.DataFrame:
        return self.frame.xs(name, level="city")

    def values(self) -> np.ndarray:
        """City x month x variable array over the core variables."""
        cube = np.full((len(self.cities), len(self.months), len(PANEL_VARIABLES)), np.nan)
        for i, c in enumerate(self.cities):
            sub = self.city(c).reindex(self.months)
            cube[i] = sub[list(PANEL_VARIABLES)].to_numpy(dtype=float)
        return cube

    def validate(self) -> None:
        f = self.frame
        missing = set(ALL_COLUMNS) - set(f.columns)
        extra = set(f.columns) - set(ALL_COLUMNS)
        if missing or extra:
            raise PanelSchemaError(
                f"panel columns: missing {sorted(missing)}, unexpected {sorted(extra)}"
            )
        for city in f.index.get_level_values("city").unique():
            idx = [month_index(m) for m in f.xs(city, level="city").index]
            idx.sort()
            if idx and idx != list(range(idx[0], idx[0] + len(idx))):
                raise PanelSchemaError(f"months for {city} are not gap-free")
        bounded = ["percentage_male", "sentiment", "group_betweenness_centrality",
                   "group_degree_centrality"]
        for col in bounded:
            v = f[col].dropna()
            if ((v < 0) | (v > 1)).any():
                raise PanelSchemaError(f"{col} outside [0, 1]")
        counts = ["users_photos", "users_level", "activity", "rotating_leadership",
                  "new_users", "n_posts"]
        for col in counts:
            if (f[col].dropna() < 0).any():
                raise PanelSchemaError(f"{col} has negative values")


def _demographics(
    month_posts: Sequence[ForumPost],
    profiles: Mapping[str, UserProfile],
    post_weighted: bool,
) -> dict[str, float]:
    if post_weighted:
        authors = [p.author_id for p in month_posts]
    else:
        authors = sorted({p.author_id for p in month_posts})
    known = [profiles[a] for a in authors if a in profiles]
    males = sum(1 for p in known if p.gender == "male")
    females = sum(1 for p in known if p.gender == "female")
    ages = [p.age for p in known if p.age is not None]
    levels = [p.level for p in known]
    distinct_levels = [profiles[a].level for a in {p.author_id for p in month_posts}
                       if a in profiles]
    return {
        "percentage_male": males / (males + females) if males + females else math.nan,
        "average_age": float(np.mean(ages)) if ages else math.nan,
        "users_level": float(sum(levels)),
        "users_photos": float(sum(p.photo_count for p in known)),
        "user_level_sd": (
            statistics.stdev(distinct_levels) if len(distinct_levels) >= 2 else math.nan
        ),
    }


def _centralization(vec: network.CentralityVector) -> float:
    try:
        return network.group_centralization(vec)
    except network.UndefinedForSize:
        return math.nan


def city_month_indicators(
    history: Sequence[ForumPost],
    month: str,
    profiles: Mapping[str, UserProfile],
    config: IndicatorConfig,
    roots: Mapping[str, ForumPost] | None = None,
    stamps: Sequence[datetime] | None = None,
    first_posts: Mapping[str, str] | None = None,
) -> dict[str, float]:
    """Forum-derived variables for one city and month.

    ``history`` is the city's full post history in time order, needed for new-user detection,
    response gaps spanning a month boundary and replies to older threads.
    Only posts timestamped before the month ends are read. ``stamps`` (the
    history's timestamps) and ``first_posts`` (author to id of their earliest
    post) are optional precomputations shared across months.
    """
    window = month_window(month)
    start, end = window
    if stamps is None:
        stamps = [p.timestamp for p in history]
    past = history[: bisect_left(stamps, end)]
    in_month = past[bisect_left(stamps, start, hi=len(past)) :]
    row = {v: math.nan for v in FORUM_VARIABLES + SIMPLE_VARIABLES}
    if not in_month:
        return row
    if roots is None:
        roots = network.thread_roots(past)
    scorer = config.scorer or text.LexiconScorer.default()

    g = network.build_graph(in_month, window, dict(roots))
    row.update(_demographics(in_month, profiles, config.post_weighted_demographics))
    row["activity"] = float(network.activity(g))
    row["group_degree_centrality"] = _centralization(network.degree_centrality(g))
    row["group_betweenness_centrality"] = _centralization(network.betweenness_centrality(g))
    row["rotating_leadership"] = network.rotating_leadership(
        in_month, window, config.sub_window_days, config.step_days, dict(roots)
    )
    bodies = [p.body for p in in_month]
    row["sentiment"] = text.monthly_sentiment(bodies, scorer)
    row["complexity"] = text.monthly_complexity(bodies)
    active = {p.thread_id for p in in_month}
    opened = min((roots[t].timestamp for t in active if t in roots), default=start)
    row["avg_response_time"] = network.avg_response_time(
        [p for p in past[bisect_left(stamps, min(opened, start)) :] if p.thread_id in active],
        window,
    )
    if first_posts is None:
        row["new_users"] = float(network.new_users(past, window))
    else:
        row["new_users"] = float(sum(1 for p in in_month if first_posts[p.author_id] == p.post_id))

    row["n_posts"] = float(len(in_month))
    replies: dict[str, int] = defaultdict(int)
    for p in in_month:
        replies[p.thread_id] += 0 if p.is_thread_root else 1
    row["avg_replies_per_thread"] = sum(replies.values()) / len(replies)
    return row


def compute_panel(
    posts: Iterable[ForumPost],
    profiles: Mapping[str, UserProfile],
    external: Iterable[ExternalSeries],
    months: Sequence[str],
    config: IndicatorConfig | None = None,
    cities: Sequence[str] | None = None,
) -> IndicatorPanel:
    """Measure every indicator for each city and month.

    Months with no posts leave the forum variables missing while the external
    series are still joined; the panel's ``census`` counts missing cells.
    """
    config = config or IndicatorConfig()
    if config.scorer is None:
        config = IndicatorConfig(**{**config.__dict__, "scorer": text.LexiconScorer.default()})
    by_city: dict[str, list[ForumPost]] = defaultdict(list)
    for p in posts:
        by_city[p.city].append(p)
    ext: dict[tuple[str, str], dict[str, float]] = {}
    for s in external:
        ext[(s.city, s.kind)] = s.as_dict()
    if cities is None:
        cities = sorted(set(by_city) | {c for c, _ in ext})
    notes = []

    rows = []
    for city in cities:
        history = sorted(by_city.get(city, []), key=lambda p: (p.timestamp, p.post_id))
        roots = network.thread_roots(history)
        stamps = [p.timestamp for p in history]
        first_posts: dict[str, str] = {}
        for p in history:
            first_posts.setdefault(p.author_id, p.post_id)
        for month in months:
            row = city_month_indicators(history, month, profiles, config, roots, stamps,
                                        first_posts)
            for kind, column in EXTERNAL_VARIABLES.items():
                series = ext.get((city, kind))
                row[column] = series.get(month, math.nan) if series else math.nan
            rows.append({"city": city, "month": month, **row})
        for kind in EXTERNAL_VARIABLES:
            if (city, kind) not in ext:
                notes.append(f"{city}: no {kind} series supplied")
    frame = pd.DataFrame(rows, columns=["city", "month", *ALL_COLUMNS])
    frame = frame.set_index(["city", "month"])
    return IndicatorPanel(frame, notes)


def _fmt(v: float) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return repr(float(v))


def export_panel(panel: IndicatorPanel, path: str | Path) -> None:
    """CSV with one row per (city, month); missing values are empty cells."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["city", "month", *ALL_COLUMNS])
        for city in panel.cities:
            sub = panel.city(city)
            for month in sorted(sub.index, key=month_index):
                vals = sub.loc[month, list(ALL_COLUMNS)]
                w.writerow([city, month, *(_fmt(v) for v in vals)])


def import_panel(path: str | Path) -> IndicatorPanel:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        expected = {"city", "month", *ALL_COLUMNS}
        missing, extra = expected - set(header), set(header) - expected
        if missing or extra:
            raise PanelSchemaError(
                f"panel file columns: missing {sorted(missing)}, unexpected {sorted(extra)}"
            )
        rows = []
        for line, r in enumerate(reader, start=2):
            try:
                month_label(month_index(r["month"]))
                rows.append(
                    {
                        "city": r["city"],
                        "month": r["month"],
                        **{c: float(r[c]) if r[c] != "" else math.nan for c in ALL_COLUMNS},
                    }
                )
            except ValueError as exc:
                raise PanelSchemaError(f"{path} line {line}: {exc}") from None
    frame = pd.DataFrame(rows, columns=["city", "month", *ALL_COLUMNS]).set_index(
        ["city", "month"]
    )
    return IndicatorPanel(frame)
