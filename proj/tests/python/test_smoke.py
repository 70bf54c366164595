"""Smoke tests over the python bindings."""

import gzip

import pytest

import unicrawl as u


def test_version():
    assert u.__version__


def test_language_predicate():
    assert u.language_predicate(["amh"], "amh", "strict")
    assert not u.language_predicate(["amh", "eng"], "amh", "strict")
    assert u.language_predicate(["amh", "eng"], "amh", "lenient")
    assert not u.language_predicate(["eng"], "amh", "lenient")
    assert not u.language_predicate([], "amh", "lenient")
    with pytest.raises(ValueError):
        u.language_predicate(["amh"], "amh", "fuzzy")


def test_estimator():
    assert u.estimate_filtered_size(0.000036, 250e9) == 9.0e6
    assert u.estimate_filtered_size(0.0, 1e12) == 0.0
    assert u.estimate_filtered_size(1.0, 250e9) == 250e9


def test_range_arithmetic():
    assert u.range_header(0, 1) == "bytes=0-0"
    assert u.range_header(3000, 500) == "bytes=3000-3499"
    assert (
        u.range_url("https://host/", "crawl-data/x/y.warc.gz")
        == "https://host/crawl-data/x/y.warc.gz"
    )


def test_suffix_array():
    assert u.build_suffix_array(b"banana") == [5, 3, 1, 0, 4, 2]
    assert u.build_suffix_array(b"aaaa") == [3, 2, 1, 0]
    assert u.build_suffix_array(b"x") == [0]


def test_duplicate_spans_and_dedup():
    spans = u.find_duplicate_spans(["abcabc"], min_len=3)
    assert spans == [(0, 3, 6)]
    assert u.dedup_texts(["abcabc"], min_len=3, min_chars=0) == ["abc"]

    first = "unique prefix " + "shared boilerplate sentence repeated across documents " * 3
    second = "shared boilerplate sentence repeated across documents " * 3 + "own tail text here"
    out = u.dedup_texts([first, second], min_len=50, min_chars=1)
    assert out[0] == first
    assert "shared boilerplate" not in out[1]


def test_dedup_short_filter_boundary():
    assert u.dedup_texts(["x" * 99], min_chars=100) == []
    assert u.dedup_texts(["x" * 100], min_chars=100) == ["x" * 100]


def test_extract_text():
    html = (
        "<html><body><nav><a>Home</a><a>News</a></nav>"
        "<p>A paragraph long enough to survive the extractor's block threshold.</p>"
        "<footer>Copyright</footer></body></html>"
    )
    text = u.extract_text(html)
    assert text == "A paragraph long enough to survive the extractor's block threshold."
    assert u.extract_text("<nav><a>only links</a></nav>") is None

    blocks = u.html_blocks("<div><a>x y z w</a></div><p>plain text block</p>")
    assert len(blocks) == 2
    assert blocks[0]["link_density"] == 1.0
    assert blocks[1]["link_density"] == 0.0


def test_warc_parse_roundtrip():
    body = b"<html><body>\xe1\x88\xb0\xe1\x88\x8b\xe1\x88\x9d</body></html>"
    http_block = (
        b"HTTP/1.1 200 OK\r\nContent-Type: text/html; charset=utf-8\r\n"
        b"Content-Length: " + str(len(body)).encode() + b"\r\n\r\n" + body
    )
    record = (
        b"WARC/1.0\r\n"
        b"WARC-Type: response\r\n"
        b"WARC-Date: 2023-03-20T01:02:03Z\r\n"
        b"WARC-Target-URI: https://am.example/page\r\n"
        b"Content-Type: application/http; msgtype=response\r\n"
        b"Content-Length: " + str(len(http_block)).encode() + b"\r\n\r\n" + http_block +
        b"\r\n\r\n"
    )
    parsed = u.parse_warc(record)
    assert parsed["version"] == "WARC/1.0"
    assert parsed["http_status"] == 200
    assert parsed["target_uri"] == "https://am.example/page"
    assert parsed["payload"] == body

    member = gzip.compress(record)
    assert u.decompress_member(member) == record
    with pytest.raises(ValueError):
        u.parse_warc(b"not a warc record")


def test_reduction_percent():
    assert u.reduction_percent(100_000_000, 40_000_000) == pytest.approx(60.0)
    assert u.reduction_percent(4_000_000_000, 600_000_000) == pytest.approx(85.0)
