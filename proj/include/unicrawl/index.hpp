#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "unicrawl/byte_source.hpp"
#include "unicrawl/retry.hpp"

namespace unicrawl {

// One row of the crawl's columnar index: the URL plus the WARC locator
// triple that lets the fetch stage pull exactly this record.
struct index_record {
    std::string url;
    std::string crawl_id;
    std::vector<std::string> content_languages; // ISO-639-3, primary first
    std::string warc_filename;                  // relative path, no scheme
    std::int64_t warc_record_offset = 0;
    std::int64_t warc_record_length = 0;
    int fetch_status = 0;

    friend bool operator==(const index_record&, const index_record&) = default;
};

enum class filter_mode {
    strict,  // the row's only language is the target
    lenient, // the row's primary (first-listed) language is the target
};

filter_mode parse_filter_mode(std::string_view name);
std::string_view filter_mode_name(filter_mode mode);

struct filtered_index {
    std::string crawl_id;
    std::string target_language;
    std::vector<index_record> records;
    std::int64_t created_at = 0;
};

// strict: languages == [target]; lenient: languages is non-empty and its
// first entry is the target. An empty list never matches.
bool language_predicate(const std::vector<std::string>& languages, std::string_view target,
                        filter_mode mode);

// Compressed-domain size estimate: fraction of the archive in the target
// language times the archive's index size.
double estimate_filtered_size(double language_fraction, double index_size_bytes);

// How index shards and WARC members are located and fetched. The default
// implementation performs HTTPS (range) requests against cc_base; tests
// substitute a local directory or mock endpoint via the same interface.
class shard_locator {
public:
    virtual ~shard_locator() = default;
    // Contents of crawl-data/<crawl_id>/cc-index-table.paths.gz, inflated.
    virtual std::string fetch_shard_listing(const std::string& crawl_id) = 0;
    virtual std::shared_ptr<byte_source> open_shard(const std::string& shard_uri) = 0;
    // Absolute URI for a path from the listing.
    virtual std::string shard_uri(const std::string& rel_path) = 0;
};

std::unique_ptr<shard_locator> make_http_shard_locator(std::string cc_base, retry_policy policy,
                                                       std::string user_agent = {});

// All index shard URIs (the "subset=warc" table partition) for one
// archive, in listing order. Unknown crawls raise fatal_error naming the
// crawl; transport problems raise network_error.
std::vector<std::string> list_index_shards(const std::string& crawl_id, shard_locator& locator);

struct index_filter_options {
    filter_mode mode = filter_mode::strict;
    int workers = 4;
    // Columns projected from the index; everything else is skipped at
    // read time.
    // url, content_languages, warc_filename, warc_record_offset,
    // warc_record_length
};

struct index_scan_stats {
    std::uint64_t rows_scanned = 0;
    std::uint64_t shard_bytes = 0;
    std::uint64_t shards = 0;
};

// Streams every shard of the archive's columnar index, keeps rows whose
// content_languages pass the predicate, and returns them sorted by
// (warc_filename, warc_record_offset) so the result does not depend on
// worker count. Rows without language annotations are dropped. A shard
// that cannot be read aborts the whole archive.
filtered_index filter_archive_index(const std::string& crawl_id, const std::string& target,
                                    shard_locator& locator, const index_filter_options& options,
                                    index_scan_stats* stats = nullptr);

// Filters the rows of a single already-opened shard (one worker's unit of
// work). Exposed for memory-bound harnesses.
std::vector<index_record> filter_index_shard(std::shared_ptr<byte_source> shard,
                                             const std::string& crawl_id,
                                             const std::string& target, filter_mode mode,
                                             index_scan_stats* stats = nullptr);

// Newline-delimited JSON with keys url, crawl, languages, filename,
// offset, length; optionally gzip-compressed when path ends in ".gz".
void write_filtered_index(const filtered_index& index, const std::string& path);
filtered_index read_filtered_index(const std::string& path);

// index/<crawl_id>.<target>.jsonl.gz under out_dir.
std::string filtered_index_path(const std::string& out_dir, const std::string& crawl_id,
                                const std::string& target, bool gzipped = true);

} // namespace unicrawl
