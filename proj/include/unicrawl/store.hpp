#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "unicrawl/document.hpp"
#include "unicrawl/report.hpp"

namespace unicrawl {

struct shard_info {
    std::string path; // relative to the manifest's directory
    std::uint64_t doc_count = 0;
    std::uint64_t byte_size = 0; // compressed on-disk size
    std::string sha256;          // of the compressed file
    std::set<std::string> crawl_ids;
};

struct manifest {
    std::string target_language;
    std::string stage; // raw | extracted | deduped-archive | final
    std::vector<shard_info> shards;
    stage_stats stats;
    std::string tool_version;
    std::int64_t created_at = 0;

    std::uint64_t total_docs() const;
    // Digest over shard contents only; timestamps never participate.
    std::string content_digest() const;
};

// Streaming shard writer. Documents are appended as JSONL (keys id, url,
// crawl, date, text) into gzip shards named data-%05d.jsonl.gz, rolling
// when the next document would push the uncompressed size past
// max_shard_bytes. Nothing is visible under its final name until
// finalize(): shards are written as *.tmp and renamed, the manifest last.
// Abandoning the writer removes the in-progress temp shard.
class shard_writer {
public:
    shard_writer(std::string out_dir, std::string target_language, std::string stage,
                 std::uint64_t max_shard_bytes = 256ull << 20);
    ~shard_writer();
    shard_writer(const shard_writer&) = delete;
    shard_writer& operator=(const shard_writer&) = delete;

    void add(const document& doc);
    // Writes the manifest (atomically) and returns it.
    manifest finalize(stage_stats stats);

private:
    struct impl;
    std::unique_ptr<impl> impl_;
};

manifest write_shards(const std::vector<document>& docs, const std::string& out_dir,
                      const std::string& target_language, const std::string& stage,
                      stage_stats stats, std::uint64_t max_shard_bytes = 256ull << 20);

manifest read_manifest(const std::string& manifest_path);
void write_manifest(const manifest& m, const std::string& manifest_path);

// Streams every document in shard order, verifying per-shard digests and
// doc counts; integrity_error names the offending shard.
void read_shards(const std::string& manifest_path, const std::function<void(document)>& sink);
std::vector<document> read_all_documents(const std::string& manifest_path);

// Full integrity pass (manifest schema, shard digests, doc counts).
// Returns human-readable problems; empty means valid.
std::vector<std::string> validate_manifest(const std::string& manifest_path);

} // namespace unicrawl
