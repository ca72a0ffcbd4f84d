from datetime import datetime, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import post, thread
from forumcast.ingest import (
    ErrorLevel,
    ExternalSeries,
    IngestError,
    UserProfile,
    escape_body,
    format_post,
    load_external_series,
    load_posts,
    load_profiles,
    parse_posts,
    parse_profiles,
    parse_timestamp,
    unescape_body,
    write_external_series,
    write_posts,
    write_profiles,
)
from forumcast.months import month_range


@given(st.text())
def test_escape_round_trip(text):
    escaped = escape_body(text)
    assert "|" not in escaped and "\n" not in escaped and "\r" not in escaped
    assert unescape_body(escaped) == text


def test_empty_file(tmp_path):
    path = tmp_path / "posts.txt"
    path.write_text("")
    report = load_posts(path)
    assert report.data == [] and report.errors == []


def test_minimal_thread(tmp_path):
    path = tmp_path / "posts.txt"
    posts = thread("t1", ["ann", "bob", "cy"], [1, 2])
    write_posts(posts, path)
    report = load_posts(path)
    assert len(report.data) == 3 and not report.errors
    assert [p.is_thread_root for p in report.data] == [True, False, False]


def test_round_trip_preserves_awkward_bodies(tmp_path):
    path = tmp_path / "posts.txt"
    posts = [post("a", "t", "u", 0, True, body="pipes | and\nnewlines\\ and \r returns")]
    write_posts(posts, path)
    assert load_posts(path).data == posts


def test_duplicate_id_is_corpus_error():
    lines = [format_post(p) for p in thread("t1", ["a", "b"], [1])]
    lines.append(lines[1])
    report = parse_posts(lines)
    assert len(report.errors) == 1
    err = report.errors[0]
    assert err.level is ErrorLevel.CORPUS and "t1-1" in err.message and err.line == 3


def test_malformed_line_is_located_record_error():
    lines = [format_post(p) for p in thread("t1", ["a", "b"], [1])]
    lines.insert(1, "not|enough|fields")
    report = parse_posts(lines)
    assert [(e.line, e.level) for e in report.errors] == [(2, ErrorLevel.RECORD)]
    assert len(report.data) == 2


def test_reply_before_root_rejects_thread():
    root = post("r", "t", "a", 5, True)
    early = post("x", "t", "b", 1, False)
    report = parse_posts([format_post(root), format_post(early)])
    assert report.data == []
    assert {e.level for e in report.errors} == {ErrorLevel.CORPUS}
    assert sorted(e.line for e in report.errors) == [1, 2]


def test_thread_without_root_rejected():
    report = parse_posts([format_post(post("x", "t", "b", 1, False))])
    assert report.data == [] and "0 roots" in report.errors[0].message


def test_accounting_is_total():
    lines = [format_post(p) for p in thread("t1", ["a", "b", "c"], [1, 1])]
    lines += ["garbage", format_post(post("y", "t9", "z", 3, False))]
    report = parse_posts(lines)
    assert len(report.data) + len(report.errors) == report.n_lines


def test_filters():
    posts = thread("t1", ["a", "b"], [1], city="Rome") + thread("t2", ["c", "d"], [1], city="Oslo")
    report = parse_posts([format_post(p) for p in posts], city="Oslo")
    assert {p.city for p in report.data} == {"Oslo"}


def test_timestamps_are_utc():
    ts = parse_timestamp("2015-03-01T10:00:00+02:00")
    assert ts == datetime(2015, 3, 1, 8, tzinfo=timezone.utc)
    assert parse_timestamp("2015-03-01T10:00:00Z").tzinfo == timezone.utc


def test_profiles(tmp_path):
    path = tmp_path / "profiles.csv"
    profiles = [UserProfile("a", "male", 30, 6, 10_000), UserProfile("b"),
                UserProfile("c", "female", None, 2, 0)]
    write_profiles(profiles, path)
    loaded = load_profiles(path).raise_on_error()
    assert len(loaded) == 3 and loaded["a"].level == 6 and loaded["b"].age is None


def test_profile_level_out_of_range():
    report = parse_profiles("user_id,gender,age,level,photo_count\nx,male,30,7,1\n")
    assert report.data == {} and report.errors[0].level is ErrorLevel.RECORD
    assert report.errors[0].line == 2


def test_profile_duplicate_is_corpus_error():
    text = "user_id,gender,age,level,photo_count\nx,,,1,1\nx,,,2,1\n"
    report = parse_profiles(text)
    assert report.errors[0].level is ErrorLevel.CORPUS


def test_series_round_trip(tmp_path):
    months = tuple(month_range("2007-01", "2016-12"))
    s = ExternalSeries("Rome", "arrivals", months, tuple(float(i) for i in range(120)))
    path = tmp_path / "s.csv"
    write_external_series(s, path)
    loaded = load_external_series(path, "arrivals", "Rome")
    assert len(loaded) == 120 and loaded == s


def test_series_gap_named(tmp_path):
    months = [m for m in month_range("2010-01", "2010-06") if m != "2010-03"]
    path = tmp_path / "s.csv"
    path.write_text("month,value\n" + "".join(f"{m},1\n" for m in months))
    with pytest.raises(IngestError, match="2010-03"):
        load_external_series(path, "arrivals")


def test_series_negative(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("month,value\n2010-01,1\n2010-02,-1\n")
    with pytest.raises(IngestError, match="negative"):
        load_external_series(path, "arrivals")
