"""Cross-checks of the native parquet subset against pyarrow."""

import pytest

import unicrawl as u

pa = pytest.importorskip("pyarrow")
pq = pytest.importorskip("pyarrow.parquet")


def sample_rows(n=300):
    rows = []
    for i in range(n):
        langs = ["amh"] if i % 4 == 0 else ["amh", "eng"] if i % 4 == 1 else ["eng"] if i % 4 == 2 else []
        rows.append(
            {
                "url": f"https://site-{i % 17}.example/a/{i}",
                "crawl": "CC-MAIN-2023-14",
                "languages": langs,
                "filename": f"crawl-data/CC-MAIN-2023-14/warc/f-{i % 5}.warc.gz",
                "offset": i * 977,
                "length": 100 + i,
            }
        )
    return rows


@pytest.mark.parametrize("codec", ["gzip", "snappy", "none"])
def test_pyarrow_reads_our_shards(tmp_path, codec):
    rows = sample_rows()
    path = str(tmp_path / f"ours-{codec}.parquet")
    u.write_index_parquet(rows, path, codec)
    table = pq.read_table(path)
    assert table.num_rows == len(rows)
    assert table.column("url").to_pylist() == [r["url"] for r in rows]
    langs = table.column("content_languages").to_pylist()
    for got, row in zip(langs, rows):
        want = ",".join(row["languages"]) if row["languages"] else None
        assert got == want
    assert table.column("warc_record_offset").to_pylist() == [r["offset"] for r in rows]
    assert table.column("warc_record_length").to_pylist() == [r["length"] for r in rows]


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(compression="snappy", use_dictionary=True),
        dict(compression="gzip", use_dictionary=False),
        dict(compression="none", data_page_version="2.0"),
        dict(compression="snappy", data_page_version="2.0", use_dictionary=True),
    ],
    ids=["snappy-dict", "gzip-plain", "none-v2", "snappy-v2-dict"],
)
def test_our_reader_handles_pyarrow_output(tmp_path, kwargs):
    rows = sample_rows()
    table = pa.table(
        {
            "url": [r["url"] for r in rows],
            "content_languages": [
                ",".join(r["languages"]) if r["languages"] else None for r in rows
            ],
            "warc_filename": [r["filename"] for r in rows],
            "warc_record_offset": pa.array([r["offset"] for r in rows], pa.int64()),
            "warc_record_length": pa.array([r["length"] for r in rows], pa.int32()),
        }
    )
    path = str(tmp_path / "pa.parquet")
    pq.write_table(table, path, **kwargs)

    got = u.read_index_parquet(path)
    assert len(got) == len(rows)
    for g, r in zip(got, rows):
        assert g["url"] == r["url"]
        assert g["languages"] == (",".join(r["languages"]) if r["languages"] else None)
        assert g["filename"] == r["filename"]
        assert g["offset"] == r["offset"]
        assert g["length"] == r["length"]

    strict = u.filter_index_parquet(path, "amh", "strict")
    lenient = u.filter_index_parquet(path, "amh", "lenient")
    assert len(strict) == sum(1 for r in rows if r["languages"] == ["amh"])
    assert len(lenient) == sum(1 for r in rows if r["languages"][:1] == ["amh"])


def test_multi_row_group_pyarrow_file(tmp_path):
    rows = sample_rows(1000)
    table = pa.table(
        {
            "url": [r["url"] for r in rows],
            "content_languages": [
                ",".join(r["languages"]) if r["languages"] else None for r in rows
            ],
            "warc_filename": [r["filename"] for r in rows],
            "warc_record_offset": pa.array([r["offset"] for r in rows], pa.int64()),
            "warc_record_length": pa.array([r["length"] for r in rows], pa.int32()),
        }
    )
    path = str(tmp_path / "grouped.parquet")
    pq.write_table(table, path, row_group_size=128)
    got = u.read_index_parquet(path)
    assert [g["url"] for g in got] == [r["url"] for r in rows]
