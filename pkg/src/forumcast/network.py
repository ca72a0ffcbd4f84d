"""Monthly reply graphs and the structural indicators computed on them."""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .ingest import ForumPost, format_timestamp
from .months import month_window

log = logging.getLogger(__name__)

Window = tuple[datetime, datetime]


class UndefinedForSize(ValueError):
    """Group centralization needs at least three nodes."""


@dataclass(frozen=True)
class Arc:
    source: str
    target: str
    timestamp: datetime


@dataclass(frozen=True)
class InteractionGraph:
    """Directed reply multigraph over a half-open time window."""

    nodes: frozenset[str]
    arcs: tuple[Arc, ...]
    window: Window
    skipped_orphans: int = 0

    def node_list(self) -> list[str]:
        return sorted(self.nodes)

    def adjacency(self) -> tuple[list[str], np.ndarray]:
        """Sorted node labels and the 0/1 matrix of the undirected simple projection (no loops)."""
        labels = self.node_list()
        pos = {u: i for i, u in enumerate(labels)}
        adj = np.zeros((len(labels), len(labels)))
        for arc in self.arcs:
            i, j = pos[arc.source], pos[arc.target]
            if i != j:
                adj[i, j] = adj[j, i] = 1.0
        return labels, adj


@dataclass(frozen=True)
class CentralityVector:
    scores: dict[str, float]
    kind: str
    normalized: bool = True

    @property
    def n(self) -> int:
        return len(self.scores)


@dataclass
class SnapshotSeries:
    windows: list[Window] = field(default_factory=list)
    vectors: list[CentralityVector] = field(default_factory=list)


def thread_roots(posts: Iterable[ForumPost]) -> dict[str, ForumPost]:
    return {p.thread_id: p for p in posts if p.is_thread_root}


def build_graph(
    posts: Sequence[ForumPost],
    window: Window,
    roots: dict[str, ForumPost] | None = None,
) -> InteractionGraph:
    """One arc per in-window reply, from its author to the thread root's author.

    ``posts`` may be the full history; roots outside the window still anchor
    replies inside it. The root author is added as a node even when the root
    itself predates the window. Replies whose root is missing from the corpus
    are skipped and counted in ``skipped_orphans``.
    """
    start, end = window
    if not start < end:
        raise ValueError("empty window")
    if roots is None:
        roots = thread_roots(posts)
    nodes: set[str] = set()
    arcs: list[Arc] = []
    orphans = 0
    for post in posts:
        if not start <= post.timestamp < end:
            continue
        nodes.add(post.author_id)
        if post.is_thread_root:
            continue
        root = roots.get(post.thread_id)
        if root is None:
            orphans += 1
            continue
        if root.author_id == post.author_id:
            continue
        nodes.add(root.author_id)
        arcs.append(Arc(post.author_id, root.author_id, post.timestamp))
    if orphans:
        log.debug("skipped %d replies with no root in corpus", orphans)
    return InteractionGraph(frozenset(nodes), tuple(arcs), window, orphans)


def activity(g: InteractionGraph) -> int:
    return len(g.arcs)


def degree_centrality(g: InteractionGraph) -> CentralityVector:
    """Distinct-neighbour count over ``N - 1``; direction and multiplicity ignored."""
    labels, adj = g.adjacency()
    n = len(labels)
    if n <= 1:
        return CentralityVector({u: 0.0 for u in labels}, "degree")
    deg = adj.sum(axis=1) / (n - 1)
    return CentralityVector(dict(zip(labels, deg.tolist())), "degree")


def _brandes_all_sources(adj: np.ndarray) -> np.ndarray:
    """Raw betweenness of every node, counting each ordered source/target pair.

    Breadth-first search and the dependency accumulation of Brandes' algorithm
    are run for all sources at once: row ``s`` of each matrix is the state of
    the single-source pass from ``s``.
    """
    n = adj.shape[0]
    dist = np.full((n, n), -1, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    sigma = np.eye(n)
    frontier = np.eye(n)
    visited = np.eye(n, dtype=bool)
    level = 0
    while True:
        reach = frontier @ adj
        new = (reach > 0) & ~visited
        if not new.any():
            break
        level += 1
        sigma[new] = reach[new]
        dist[new] = level
        visited |= new
        frontier = np.where(new, sigma, 0.0)
    delta = np.zeros((n, n))
    safe_sigma = np.where(sigma > 0, sigma, 1.0)
    for d in range(level - 1, 0, -1):
        coeff = np.where(dist == d + 1, (1.0 + delta) / safe_sigma, 0.0)
        at_d = dist == d
        delta[at_d] = (sigma * (coeff @ adj))[at_d]
    return delta.sum(axis=0)


def betweenness_centrality(g: InteractionGraph) -> CentralityVector:
    """Shortest-path betweenness on the undirected simple projection.

    Normalized by ``(N - 1)(N - 2) / 2``, the number of unordered pairs that
    exclude the node; disconnected pairs contribute nothing.
    """
    labels, adj = g.adjacency()
    n = len(labels)
    if n <= 2:
        return CentralityVector({u: 0.0 for u in labels}, "betweenness")
    raw = _brandes_all_sources(adj)
    # ordered pairs count each undirected path twice
    scores = raw / ((n - 1) * (n - 2))
    return CentralityVector(dict(zip(labels, scores.tolist())), "betweenness")


def group_centralization(c: CentralityVector) -> float:
    """Freeman centralization of a normalized centrality vector.

    The largest possible sum of gaps to the maximum is attained by the star:
    ``N - 2`` for degree and ``N - 1`` for betweenness.
    """
    n = c.n
    if n < 3:
        raise UndefinedForSize(f"centralization undefined for N={n} < 3")
    if not c.normalized:
        raise ValueError("group_centralization expects normalized scores")
    values = np.fromiter(c.scores.values(), dtype=float, count=n)
    gap = float(np.sum(values.max() - values))
    if c.kind == "degree":
        bound = n - 2
    elif c.kind == "betweenness":
        bound = n - 1
    else:
        raise ValueError(f"unknown centrality kind {c.kind!r}")
    return min(max(gap / bound, 0.0), 1.0)


def count_extrema(values: Sequence[float], tol: float = 1e-12) -> int:
    """Strict local extrema of a trajectory after collapsing plateaus."""
    collapsed: list[float] = []
    for v in values:
        if not collapsed or abs(v - collapsed[-1]) > tol:
            collapsed.append(v)
    steps = np.sign(np.diff(collapsed))
    return int(np.count_nonzero(steps[1:] != steps[:-1]))


def sliding_windows(window: Window, sub_window_days: int, step_days: int) -> list[Window]:
    start, end = window
    width, step = timedelta(days=sub_window_days), timedelta(days=step_days)
    if width > end - start:
        raise ValueError("sub-window longer than the month")
    if step_days < 1:
        raise ValueError("step_days must be positive")
    out = []
    t = start
    while t + width <= end:
        out.append((t, t + width))
        t += step
    return out


def betweenness_snapshots(
    posts: Sequence[ForumPost],
    window: Window,
    sub_window_days: int = 7,
    step_days: int = 1,
    roots: dict[str, ForumPost] | None = None,
) -> SnapshotSeries:
    if roots is None:
        roots = thread_roots(posts)
    start, end = window
    inside = [p for p in posts if start <= p.timestamp < end]
    series = SnapshotSeries()
    for sub in sliding_windows(window, sub_window_days, step_days):
        g = build_graph(inside, sub, roots)
        series.windows.append(sub)
        series.vectors.append(betweenness_centrality(g))
    return series


def rotating_leadership(
    posts: Sequence[ForumPost],
    month: str | Window,
    sub_window_days: int = 7,
    step_days: int = 1,
    roots: dict[str, ForumPost] | None = None,
) -> float:
    """Total count of oscillations in users' betweenness over sliding sub-windows.

    A user's trajectory is their betweenness in the snapshots where they are a
    node; users present in fewer than three snapshots contribute nothing.
    """
    window = month_window(month) if isinstance(month, str) else month
    snaps = betweenness_snapshots(posts, window, sub_window_days, step_days, roots)
    if len(snaps.vectors) < 3:
        log.warning("rotating leadership: only %d snapshots, reporting 0", len(snaps.vectors))
        return 0.0
    trajectories: dict[str, list[float]] = defaultdict(list)
    for vec in snaps.vectors:
        for user, score in vec.scores.items():
            trajectories[user].append(score)
    total = sum(count_extrema(t) for t in trajectories.values() if len(t) >= 3)
    return float(total)


def new_users(posts: Iterable[ForumPost], month: str | Window) -> int:
    """Authors whose earliest post in ``posts`` falls inside the month."""
    start, end = month_window(month) if isinstance(month, str) else month
    first: dict[str, datetime] = {}
    for p in posts:
        if p.author_id not in first or p.timestamp < first[p.author_id]:
            first[p.author_id] = p.timestamp
    return sum(1 for ts in first.values() if start <= ts < end)


def avg_response_time(posts: Iterable[ForumPost], month: str | Window) -> float:
    """Mean hours between each in-month reply and the preceding post of its thread.

    Returns NaN when the month holds no replies with a predecessor.
    """
    start, end = month_window(month) if isinstance(month, str) else month
    threads: dict[str, list[ForumPost]] = defaultdict(list)
    for p in posts:
        threads[p.thread_id].append(p)
    gaps = []
    for items in threads.values():
        items.sort(key=lambda p: (p.timestamp, not p.is_thread_root, p.post_id))
        for prev, cur in zip(items, items[1:]):
            if cur.is_thread_root or not start <= cur.timestamp < end:
                continue
            gaps.append((cur.timestamp - prev.timestamp).total_seconds() / 3600.0)
    return float(np.mean(gaps)) if gaps else math.nan


def write_edge_list(g: InteractionGraph, path: str | Path) -> None:
    """Edge list ``source,target,timestamp`` for external visualization."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("source,target,timestamp\n")
        for arc in g.arcs:
            fh.write(f"{arc.source},{arc.target},{format_timestamp(arc.timestamp)}\n")
