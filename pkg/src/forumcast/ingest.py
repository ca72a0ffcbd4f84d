"""Forum posts, member profiles and exogenous monthly series.

Posts are stored one record per line::

    post_id|thread_id|city|author_id|2016-10-01T12:00:00Z|1|en|escaped body

The body escapes ``\\`` as ``\\\\``, ``|`` as ``\\p``, newline as ``\\n`` and
carriage return as ``\\r`` so that any text round-trips through a single line.
Loaders never drop a line silently: every line is either accepted or yields a
:class:`RecordError` carrying its line number.
"""

from __future__ import annotations

import csv
import io
import re
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Generic, Iterable, TypeVar

from .months import month_index, month_label

T = TypeVar("T")

GENDERS = ("male", "female", "unknown")
SERIES_KINDS = ("arrivals", "trend_flights", "trend_holidays")
_LANG_RE = re.compile(r"^[a-z]{2}$")
_ESCAPES = {"\\": "\\", "p": "|", "n": "\n", "r": "\r"}


class IngestError(ValueError):
    """Input file violates its format or a corpus invariant."""


class ErrorLevel(str, Enum):
    RECORD = "record"
    CORPUS = "corpus"


@dataclass(frozen=True)
class RecordError:
    line: int
    level: ErrorLevel
    message: str

    def __str__(self) -> str:
        return f"line {self.line} [{self.level.value}]: {self.message}"


@dataclass
class LoadReport(Generic[T]):
    """Accepted records plus one located error per rejected line."""

    data: T
    errors: list[RecordError] = field(default_factory=list)
    n_lines: int = 0

    def raise_on_error(self) -> T:
        if self.errors:
            shown = "; ".join(str(e) for e in self.errors[:10])
            more = f" (+{len(self.errors) - 10} more)" if len(self.errors) > 10 else ""
            raise IngestError(f"{len(self.errors)} invalid records: {shown}{more}")
        return self.data


@dataclass(frozen=True)
class ForumPost:
    post_id: str
    thread_id: str
    city: str
    author_id: str
    timestamp: datetime
    is_thread_root: bool
    body: str
    language: str = "en"


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    gender: str = "unknown"
    age: int | None = None
    level: int = 0
    photo_count: int = 0

    def __post_init__(self) -> None:
        if self.gender not in GENDERS:
            raise ValueError(f"gender must be one of {GENDERS}, got {self.gender!r}")
        if not 0 <= self.level <= 6:
            raise ValueError(f"level must lie in [0, 6], got {self.level}")
        if self.photo_count < 0:
            raise ValueError(f"photo_count must be non-negative, got {self.photo_count}")
        if self.age is not None and not 13 <= self.age <= 120:
            raise ValueError(f"age must lie in [13, 120], got {self.age}")


@dataclass(frozen=True)
class ExternalSeries:
    city: str
    kind: str
    months: tuple[str, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.kind not in SERIES_KINDS:
            raise ValueError(f"kind must be one of {SERIES_KINDS}, got {self.kind!r}")
        if len(self.months) != len(self.values):
            raise ValueError("months and values differ in length")
        _check_months(self.months)
        for month, value in zip(self.months, self.values):
            if value < 0:
                raise IngestError(f"negative value {value} at {month}")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.months, self.values))

    def __len__(self) -> int:
        return len(self.values)


def _check_months(months: Iterable[str]) -> None:
    prev = None
    for label in months:
        idx = month_index(label)
        if prev is not None:
            if idx <= prev:
                raise IngestError(f"months not strictly increasing at {label}")
            if idx != prev + 1:
                raise IngestError(f"missing month {month_label(prev + 1)}")
        prev = idx


# -- posts -------------------------------------------------------------------


def escape_body(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace("|", "\\p")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def unescape_body(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            if i + 1 >= len(text) or text[i + 1] not in _ESCAPES:
                raise ValueError(f"bad escape at offset {i}")
            out.append(_ESCAPES[text[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def parse_timestamp(text: str) -> datetime:
    """Parse ISO-8601; naive values are taken as UTC. Sub-second parts are truncated."""
    raw = text.strip()
    if raw.endswith("Z"):
        raw = raw[:-1] + "+00:00"
    ts = datetime.fromisoformat(raw)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def format_post(post: ForumPost) -> str:
    return "|".join(
        [
            post.post_id,
            post.thread_id,
            post.city,
            post.author_id,
            format_timestamp(post.timestamp),
            "1" if post.is_thread_root else "0",
            post.language,
            escape_body(post.body),
        ]
    )


def parse_post(line: str) -> ForumPost:
    parts = line.split("|")
    if len(parts) != 8:
        raise ValueError(f"expected 8 fields, found {len(parts)}")
    post_id, thread_id, city, author_id, ts, root, lang, body = parts
    for name, value in (("post_id", post_id), ("thread_id", thread_id), ("author_id", author_id)):
        if not value:
            raise ValueError(f"empty {name}")
    if root not in ("0", "1"):
        raise ValueError(f"is_root must be 0 or 1, got {root!r}")
    if not _LANG_RE.match(lang):
        raise ValueError(f"language must be an ISO 639-1 tag, got {lang!r}")
    try:
        timestamp = parse_timestamp(ts)
    except ValueError:
        raise ValueError(f"bad timestamp {ts!r}") from None
    text = unescape_body(body)
    if root == "1" and not text:
        raise ValueError("thread root with empty body")
    return ForumPost(post_id, thread_id, city, author_id, timestamp, root == "1", text, lang)


def _sort_key(post: ForumPost) -> tuple:
    return (post.timestamp, post.thread_id, not post.is_thread_root, post.post_id)


def parse_posts(
    lines: Iterable[str],
    city: str | None = None,
    language: str | None = None,
) -> LoadReport[list[ForumPost]]:
    errors: list[RecordError] = []
    parsed: list[tuple[int, ForumPost]] = []
    seen: set[str] = set()
    n_lines = 0
    for n_lines, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        try:
            post = parse_post(line)
        except ValueError as exc:
            errors.append(RecordError(n_lines, ErrorLevel.RECORD, str(exc)))
            continue
        if post.post_id in seen:
            errors.append(
                RecordError(n_lines, ErrorLevel.CORPUS, f"duplicate post_id {post.post_id}")
            )
            continue
        seen.add(post.post_id)
        parsed.append((n_lines, post))

    by_thread: dict[str, list[tuple[int, ForumPost]]] = defaultdict(list)
    for item in parsed:
        by_thread[item[1].thread_id].append(item)

    accepted: list[ForumPost] = []
    for thread_id, items in by_thread.items():
        roots = [p for _, p in items if p.is_thread_root]
        problem = None
        if len(roots) != 1:
            problem = f"thread {thread_id} has {len(roots)} roots"
        elif any(p.timestamp < roots[0].timestamp for _, p in items):
            problem = f"thread {thread_id} has a reply earlier than its root"
        elif len({p.city for _, p in items}) > 1:
            problem = f"thread {thread_id} spans several cities"
        if problem is None:
            accepted.extend(p for _, p in items)
        else:
            errors.extend(RecordError(n, ErrorLevel.CORPUS, problem) for n, _ in items)

    if city is not None:
        accepted = [p for p in accepted if p.city == city]
    if language is not None:
        accepted = [p for p in accepted if p.language == language]
    accepted.sort(key=_sort_key)
    errors.sort(key=lambda e: e.line)
    return LoadReport(accepted, errors, n_lines)


def load_posts(
    path: str | Path,
    city: str | None = None,
    language: str | None = None,
) -> LoadReport[list[ForumPost]]:
    """Load a posts file, validating every line and every thread.

    Records failing validation are reported, not silently dropped. The city and
    language filters apply after validation, so a filtered-out root can leave
    orphan replies behind; :func:`forumcast.network.build_graph` skips those.
    """
    with open(path, encoding="utf-8", newline="\n") as fh:
        return parse_posts(fh, city=city, language=language)


def write_posts(posts: Iterable[ForumPost], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for post in posts:
            fh.write(format_post(post) + "\n")


# -- profiles ----------------------------------------------------------------

PROFILE_HEADER = ["user_id", "gender", "age", "level", "photo_count"]


def _parse_profile(row: dict[str, str]) -> UserProfile:
    user_id = (row.get("user_id") or "").strip()
    if not user_id:
        raise ValueError("empty user_id")
    gender = (row.get("gender") or "").strip().lower() or "unknown"
    age_cell = (row.get("age") or "").strip()
    level_cell = (row.get("level") or "").strip()
    photo_cell = (row.get("photo_count") or "").strip()
    try:
        age = int(age_cell) if age_cell else None
        level = int(level_cell) if level_cell else 0
        photos = int(photo_cell) if photo_cell else 0
    except ValueError as exc:
        raise ValueError(f"non-integer field: {exc}") from None
    return UserProfile(user_id, gender, age, level, photos)


def load_profiles(path: str | Path) -> LoadReport[dict[str, UserProfile]]:
    """Load the profiles CSV; empty cells mean unknown."""
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_profiles(fh.read())


def parse_profiles(text: str) -> LoadReport[dict[str, UserProfile]]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        return LoadReport({}, [], 0)
    missing = set(PROFILE_HEADER) - set(reader.fieldnames)
    if missing:
        raise IngestError(f"profiles header lacks columns {sorted(missing)}")
    profiles: dict[str, UserProfile] = {}
    errors: list[RecordError] = []
    n = 0
    for n, row in enumerate(reader, start=1):
        line = n + 1  # header is line 1
        try:
            profile = _parse_profile(row)
        except ValueError as exc:
            errors.append(RecordError(line, ErrorLevel.RECORD, str(exc)))
            continue
        if profile.user_id in profiles:
            errors.append(
                RecordError(line, ErrorLevel.CORPUS, f"duplicate user_id {profile.user_id}")
            )
            continue
        profiles[profile.user_id] = profile
    return LoadReport(profiles, errors, n)


def write_profiles(profiles: Iterable[UserProfile], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PROFILE_HEADER)
        for p in profiles:
            writer.writerow(
                [p.user_id, p.gender, "" if p.age is None else p.age, p.level, p.photo_count]
            )


# -- external series -----------------------------------------------------------


def load_external_series(path: str | Path, kind: str, city: str = "") -> ExternalSeries:
    """Load a ``month,value`` CSV. Gaps and negative values raise :class:`IngestError`."""
    months: list[str] = []
    values: list[float] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or {"month", "value"} - set(reader.fieldnames):
            raise IngestError(f"{path}: header must be 'month,value'")
        for line, row in enumerate(reader, start=2):
            try:
                month_index(row["month"])
                value = float(row["value"])
            except (TypeError, ValueError) as exc:
                raise IngestError(f"{path} line {line}: {exc}") from None
            if value < 0:
                raise IngestError(f"{path} line {line}: negative value {value}")
            months.append(row["month"].strip())
            values.append(value)
    return ExternalSeries(city, kind, tuple(months), tuple(values))


def write_external_series(series: ExternalSeries, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("month,value\n")
        for month, value in zip(series.months, series.values):
            fh.write(f"{month},{value!r}\n")
