#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "unicrawl/index.hpp"

namespace unicrawl {

// Synthetic crawl archives laid out exactly like the public endpoint:
//   crawl-data/<crawl>/cc-index-table.paths.gz
//   cc-index/table/cc-main/warc/crawl=<crawl>/subset=warc/part-*.parquet
//   crawl-data/<crawl>/segments/<seg>/warc/<crawl>-*.warc.gz
// Everything is derived from the seed, so two generations with the same
// config are byte-identical.
struct synth_archive_config {
    std::string crawl_id = "CC-MAIN-2023-14";
    std::string target_language = "amh";
    std::uint64_t seed = 42;
    int target_pages = 40;  // content_languages == [target]
    int mixed_pages = 10;   // target primary plus extra languages
    int other_pages = 30;   // different primary language
    int unannotated_pages = 4; // rows without language annotation
    int index_shards = 2;
    int warc_files = 2;
    int min_paragraphs = 3;
    int max_paragraphs = 7;
    // Probability that a paragraph is drawn from the archive-wide
    // boilerplate pool instead of being freshly generated; this is what
    // the dedup stage later removes.
    double shared_paragraph_probability = 0.3;
};

struct synth_archive {
    std::string crawl_id;
    std::vector<index_record> all_rows;      // every index row, all languages
    std::vector<index_record> expected_strict;  // reference scan, strict
    std::vector<index_record> expected_lenient; // reference scan, lenient
    std::uint64_t raw_record_bytes = 0;      // WARC record bytes before gzip
};

synth_archive write_synth_archive(const std::string& root, const synth_archive_config& cfg);

// Serves a fixture tree over HTTP with range support, mirroring the data
// endpoint closely enough for every stage of the pipeline.
class mock_cc_server {
public:
    explicit mock_cc_server(std::string root);
    ~mock_cc_server();
    mock_cc_server(const mock_cc_server&) = delete;
    mock_cc_server& operator=(const mock_cc_server&) = delete;

    // Starts serving and returns the base URL, e.g.
    // "http://127.0.0.1:38201". port 0 picks a free one.
    std::string start(int port = 0);
    void stop();
    int port() const { return port_; }

private:
    struct impl;
    std::unique_ptr<impl> impl_;
    int port_ = 0;
};

} // namespace unicrawl
