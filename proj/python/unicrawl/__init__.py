"""Harvest one language's text from web crawl archives.

The heavy lifting lives in the `_unicrawl` extension module; this package
re-exports the operations most useful from Python: index predicate and
parquet helpers, range-request arithmetic, WARC parsing, main-text
extraction, and exact-substring deduplication.
"""

from _unicrawl import (  # noqa: F401
    ConfigError,
    ParseError,
    __version__,
    build_suffix_array,
    decompress_member,
    dedup_texts,
    estimate_filtered_size,
    extract_text,
    filter_index_parquet,
    find_duplicate_spans,
    html_blocks,
    language_predicate,
    parse_warc,
    range_header,
    range_url,
    read_index_parquet,
    reduction_percent,
    write_index_parquet,
    write_synth_archive,
)

__all__ = [
    "ConfigError",
    "ParseError",
    "__version__",
    "build_suffix_array",
    "decompress_member",
    "dedup_texts",
    "estimate_filtered_size",
    "extract_text",
    "filter_index_parquet",
    "find_duplicate_spans",
    "html_blocks",
    "language_predicate",
    "parse_warc",
    "range_header",
    "range_url",
    "read_index_parquet",
    "reduction_percent",
    "write_index_parquet",
    "write_synth_archive",
]
