#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "unicrawl/dedup.hpp"
#include "unicrawl/extract.hpp"
#include "unicrawl/index.hpp"
#include "unicrawl/report.hpp"
#include "unicrawl/retry.hpp"

namespace unicrawl {

// Exit codes of the CLI.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_partial = 3;
inline constexpr int exit_fatal = 4;

struct pipeline_config {
    std::string target_language;
    std::vector<std::string> crawl_ids;
    filter_mode mode = filter_mode::strict;
    std::size_t min_dup_len = 50;   // bytes
    std::size_t min_doc_chars = 100; // Unicode scalar values
    int workers = 4;
    double rate_limit = 20.0; // requests/sec, process-wide
    std::string out_dir = "out";
    std::string cc_base; // resolved default: $UNICRAWL_CC_BASE or the public endpoint
    extract_config extract;
    bool resume = true;
    std::string user_agent;
    bool spool = false;      // keep raw fetched records under spool/
    bool span_dump = false;  // write dedup span audit files under spans/
    bool strict_exit = false;
    std::uint64_t max_shard_bytes = 256ull << 20;
    std::size_t dedup_budget_bytes = 256ull << 20;
    retry_policy retry;
    std::string compare_csv; // optional prior-works table for the report

    // Throws config_error; performs no network activity.
    void validate() const;
};

std::string default_cc_base();

// Stage progression per archive. A checkpoint names the last completed
// stage and the digest of that stage's persisted output; reruns recompute
// anything whose digest no longer matches.
struct checkpoint {
    std::string crawl_id;
    std::string completed_stage; // "", "index", "fetch_extract", "dedup_archive"
    std::string content_digest;
    std::map<std::string, std::string> stage_digests;
    std::map<std::string, stage_stats> stage_stats_by_name;
    std::map<std::string, std::uint64_t> skip_counts;
};

int stage_rank(std::string_view stage); // "" < index < fetch_extract < dedup_archive

// Runs index -> fetch+extract -> within-archive dedup for one archive,
// honoring checkpoints when cfg.resume is set.
archive_report run_archive(const pipeline_config& cfg, const std::string& crawl_id);

// Full pipeline: all archives (concurrently up to cfg.workers), then
// cross-archive dedup, final store, and reports. Returns an exit code.
int run_pipeline(const pipeline_config& cfg);

// Individually invocable stages (the CLI subcommands).
int run_index_only(const pipeline_config& cfg);
int run_fetch_only(const pipeline_config& cfg);
int run_dedup_only(const pipeline_config& cfg, const std::string& in_manifest,
                   const std::string& out_dir);
int run_report_only(const pipeline_config& cfg);

} // namespace unicrawl
