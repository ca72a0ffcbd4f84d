"""Synthetic threaded forum with a target series that loads on forum activity.

A latent monthly shock ``u_m`` moves the log posting rate (and the rate at
which new members join) through a mean-reverting level ``g_m``. The target's
first difference follows

    dy_t = sum_i phi_i dy_{t-i} + beta * u_{t-1} + gamma * v_{t-1} + e_t

where ``v`` drives the search-volume series. Differenced forum indicators
therefore carry genuine one-month-ahead information about the target, and
with ``factor_loading = 0`` they carry none.
"""

from __future__ import annotations

import calendar
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

import numpy as np

from .ingest import ExternalSeries, ForumPost, UserProfile
from .months import month_index, month_range, shift_month
from .text import LexiconScorer


@dataclass(frozen=True)
class TargetDGP:
    ar: tuple[float, ...] = (0.3,)
    factor_loading: float = 1.0
    gf_loading: float = 0.5
    noise_sd: float = 1.0
    base_level: float = 100_000.0
    scale: float = 2_000.0
    seasonal_amplitude: float = 0.0
    latent_sd: float = 0.3
    latent_persistence: float = 0.85


@dataclass(frozen=True)
class SyntheticConfig:
    seed: int = 0
    months: int = 120
    start: str = "2007-01"
    city: str = "Synthetica"
    n_users: int = 300
    mean_posts_per_user_month: float = 0.3
    hub_fraction: float = 0.1
    vocabulary_size: int = 400
    root_share: float = 0.25
    target_dgp: TargetDGP = field(default_factory=TargetDGP)

    def __post_init__(self) -> None:
        for name in ("months", "n_users", "vocabulary_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.mean_posts_per_user_month <= 0:
            raise ValueError("mean_posts_per_user_month must be positive")
        if not 0.0 <= self.hub_fraction <= 1.0:
            raise ValueError("hub_fraction must lie in [0, 1]")
        if not 0.0 < self.root_share <= 1.0:
            raise ValueError("root_share must lie in (0, 1]")
        month_index(self.start)


@dataclass
class SyntheticForum:
    posts: list[ForumPost]
    profiles: dict[str, UserProfile]
    target: ExternalSeries
    trends: list[ExternalSeries]
    latent: dict[str, np.ndarray]

    def as_tuple(self) -> tuple[list[ForumPost], dict[str, UserProfile], ExternalSeries]:
        return self.posts, self.profiles, self.target


_SYLLABLES = ("ka", "lo", "mi", "ra", "te", "su", "no", "vi", "pe", "do", "ga", "ze",
              "bu", "fi", "xo", "ly")


def _vocabulary(size: int) -> list[str]:
    words = []
    for i in range(size):
        n, parts = i, []
        while True:
            parts.append(_SYLLABLES[n % len(_SYLLABLES)])
            n //= len(_SYLLABLES)
            if n == 0:
                break
        words.append("".join(parts) + "q")  # suffix keeps them off the lexicon
    return words


def _latent(cfg: SyntheticConfig, rng: np.random.Generator) -> dict[str, np.ndarray]:
    d = cfg.target_dgp
    n = cfg.months
    u = rng.standard_normal(n)
    v = rng.standard_normal(n)
    e = rng.standard_normal(n) * d.noise_sd
    w = rng.standard_normal(n)
    g = np.zeros(n)
    for m in range(n):
        g[m] = (d.latent_persistence * g[m - 1] if m else 0.0) + d.latent_sd * u[m]
    dy = np.zeros(n)
    for t in range(n):
        ar = sum(phi * dy[t - i - 1] for i, phi in enumerate(d.ar) if t - i - 1 >= 0)
        lagged = d.factor_loading * u[t - 1] + d.gf_loading * v[t - 1] if t else 0.0
        dy[t] = ar + lagged + e[t]
    months = np.arange(n)
    season = d.seasonal_amplitude * np.sin(2 * np.pi * (months + month_index(cfg.start)) / 12)
    level = np.maximum(d.base_level + d.scale * (np.cumsum(dy) + season), 0.0)
    gf = np.zeros(n)
    hol = np.zeros(n)
    for m in range(n):
        gf[m] = 50 + (0.9 * (gf[m - 1] - 50) if m else 0.0) + 4.0 * v[m]
        hol[m] = 50 + (0.9 * (hol[m - 1] - 50) if m else 0.0) + 4.0 * w[m]
    return {"u": u, "v": v, "g": g, "dy": dy, "target": level,
            "trend_flights": np.clip(gf, 0, None), "trend_holidays": np.clip(hol, 0, None)}


def _profiles(cfg: SyntheticConfig, hubs: np.ndarray, rng: np.random.Generator
              ) -> dict[str, UserProfile]:
    out = {}
    for i in range(cfg.n_users):
        uid = f"u{i:05d}"
        gender = str(rng.choice(["male", "female", "unknown"], p=[0.45, 0.4, 0.15]))
        age = int(rng.integers(18, 71)) if rng.random() < 0.8 else None
        level = int(min(6, rng.integers(0, 4) + (3 if hubs[i] else 0)))
        photos = int(rng.geometric(0.02)) - 1
        out[uid] = UserProfile(uid, gender, age, level, photos)
    return out


def _body(rng: np.random.Generator, vocab: list[str], zipf: np.ndarray,
          positive: list[str], negative: list[str], mood: float, breadth: float) -> str:
    n = int(rng.integers(5, 25))
    common = rng.choice(len(vocab), size=n, p=zipf)
    rare = rng.integers(0, len(vocab), size=n)
    words = [vocab[r if rng.random() < breadth else c] for c, r in zip(common, rare)]
    n_lex = int(rng.integers(1, 4))
    for _ in range(n_lex):
        pool = positive if rng.random() < mood else negative
        words.insert(int(rng.integers(0, len(words) + 1)), pool[int(rng.integers(len(pool)))])
    return " ".join(words)


def generate_synthetic_forum(config: SyntheticConfig | None = None) -> SyntheticForum:
    """Posts, profiles, target and search-volume series; a pure function of ``config``."""
    cfg = config or SyntheticConfig()
    rng = np.random.default_rng(cfg.seed)
    lat = _latent(cfg, rng)
    n_users, n_months = cfg.n_users, cfg.months
    labels = month_range(cfg.start, shift_month(cfg.start, n_months - 1))

    hubs = np.zeros(n_users, dtype=bool)
    n_hubs = int(round(cfg.hub_fraction * n_users))
    hubs[rng.choice(n_users, size=n_hubs, replace=False)] = True
    profiles = _profiles(cfg, hubs, rng)
    uids = list(profiles)

    # a tenth of the members are present from the start, the rest join at a rate tracking exp(g)
    join = np.zeros(n_users, dtype=int)
    late = rng.permutation(n_users)[max(1, n_users // 10):]
    rate = np.exp(lat["g"])
    join[late] = rng.choice(n_months, size=len(late), p=rate / rate.sum())

    vocab = _vocabulary(cfg.vocabulary_size)
    zipf = 1.0 / np.arange(1, len(vocab) + 1)
    zipf /= zipf.sum()
    lex = LexiconScorer.default().weights
    positive = sorted(w for w, s in lex.items() if s > 0)
    negative = sorted(w for w, s in lex.items() if s < 0)

    end = _month_start(shift_month(cfg.start, n_months))

    posts: list[ForumPost] = []
    thread_no = 0
    for m, label in enumerate(labels):
        members = np.flatnonzero(join <= m)
        newcomers = np.flatnonzero(join == m)
        expected = cfg.mean_posts_per_user_month * n_users * rate[m] / rate.mean()
        n_posts = max(int(rng.poisson(expected)), len(newcomers), 2)
        n_roots = max(1, int(round(cfg.root_share * n_posts)))
        # busy months: cheerier, wider vocabulary, faster replies, hubs less dominant
        gm = lat["g"][m]
        mood = 1.0 / (1.0 + np.exp(-(0.3 + 1.5 * gm)))
        breadth = 0.3 / (1.0 + np.exp(-2.0 * gm))
        gap_hours = 36.0 * np.exp(-gm)
        root_weight = np.where(hubs, 20.0 * np.exp(-gm), 1.0)
        style = (positive, negative, mood, breadth)
        start = _month_start(label)
        seconds = _month_seconds(label)

        rw = root_weight[members] / root_weight[members].sum()
        threads = []
        for _ in range(n_roots):
            author = members[rng.choice(len(members), p=rw)]
            ts = start + timedelta(seconds=int(rng.integers(0, seconds)))
            tid = f"t{thread_no:07d}"
            thread_no += 1
            threads.append((tid, ts))
            posts.append(ForumPost(f"{tid}-0", tid, cfg.city, uids[author], ts, True,
                                   _body(rng, vocab, zipf, *style)))
        repliers = list(rng.permutation(newcomers))
        for k in range(n_posts - n_roots):
            author = repliers.pop() if repliers else members[rng.integers(len(members))]
            tid, root_ts = threads[int(rng.integers(len(threads)))]
            ts = root_ts + timedelta(seconds=1 + int(rng.exponential(gap_hours * 3600)))
            if ts >= end:
                continue
            posts.append(ForumPost(f"{tid}-r{k}", tid, cfg.city, uids[author], ts, False,
                                   _body(rng, vocab, zipf, *style)))
        # newcomers beyond the reply slots open their own thread
        for author in repliers:
            ts = start + timedelta(seconds=int(rng.integers(0, seconds)))
            tid = f"t{thread_no:07d}"
            thread_no += 1
            posts.append(ForumPost(f"{tid}-0", tid, cfg.city, uids[author], ts, True,
                                   _body(rng, vocab, zipf, *style)))

    posts.sort(key=lambda p: (p.timestamp, p.post_id))
    months = tuple(labels)
    target = ExternalSeries(cfg.city, "arrivals", months,
                            tuple(float(x) for x in lat["target"]))
    trends = [
        ExternalSeries(cfg.city, kind, months, tuple(float(x) for x in lat[kind]))
        for kind in ("trend_flights", "trend_holidays")
    ]
    return SyntheticForum(posts, profiles, target, trends, lat)


def latent_series(config: SyntheticConfig | None = None) -> dict[str, np.ndarray]:
    """The latent shocks, target and search-volume paths without building the corpus.

    They are the first draws from the seeded stream, so they equal
    ``generate_synthetic_forum(config).latent``.
    """
    cfg = config or SyntheticConfig()
    return _latent(cfg, np.random.default_rng(cfg.seed))


def _month_start(label: str) -> datetime:
    y, m = map(int, label.split("-"))
    return datetime(y, m, 1, tzinfo=timezone.utc)


def _month_seconds(label: str) -> int:
    y, m = map(int, label.split("-"))
    return calendar.monthrange(y, m)[1] * 86400
