"""Year-month arithmetic on ``YYYY-MM`` labels."""

from __future__ import annotations

import calendar
import re
from datetime import datetime, timedelta, timezone

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


def month_index(label: str) -> int:
    """Months since year 0 for a ``YYYY-MM`` label."""
    m = _MONTH_RE.match(label.strip())
    if m is None:
        raise ValueError(f"not a YYYY-MM month: {label!r}")
    year, month = int(m.group(1)), int(m.group(2))
    if not 1 <= month <= 12:
        raise ValueError(f"month out of range: {label!r}")
    return year * 12 + month - 1


def month_label(index: int) -> str:
    return f"{index // 12:04d}-{index % 12 + 1:02d}"


def month_range(start: str, end: str) -> list[str]:
    """Inclusive list of month labels from ``start`` to ``end``."""
    a, b = month_index(start), month_index(end)
    if b < a:
        raise ValueError(f"empty month range {start}..{end}")
    return [month_label(i) for i in range(a, b + 1)]


def shift_month(label: str, k: int) -> str:
    return month_label(month_index(label) + k)


def month_of(ts: datetime) -> str:
    return f"{ts.year:04d}-{ts.month:02d}"


def month_window(label: str) -> tuple[datetime, datetime]:
    """Half-open UTC window ``[first instant, first instant of next month)``."""
    i = month_index(label)
    year, month = i // 12, i % 12 + 1
    start = datetime(year, month, 1, tzinfo=timezone.utc)
    days = calendar.monthrange(year, month)[1]
    return start, start + timedelta(days=days)
