#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace unicrawl {

struct stage_stats {
    std::string stage;
    std::uint64_t bytes_in = 0;
    std::uint64_t bytes_out = 0;
    std::uint64_t doc_count_in = 0;
    std::uint64_t doc_count_out = 0;
    std::uint64_t records_failed = 0;
    double wall_seconds = 0;
};

// 100 * (1 - bytes_out/bytes_in). bytes_in == 0 has no defined reduction.
double reduction_percent(const stage_stats& stats);

struct prior_work_row {
    std::string dataset;
    std::string language; // ISO-639-3
    double size_mb = 0;
};

struct comparison_row {
    std::string dataset;
    double size_mb = 0;
    double ratio = 0; // ours / prior
};

// Reference sizes of earlier corpora per language; rows with unknown size
// are omitted. The bundled table ships in data/prior_works_sizes.csv.
std::vector<prior_work_row> bundled_prior_works();
std::vector<prior_work_row> load_prior_works_csv(const std::string& path);

std::vector<comparison_row> compare_with_prior(double ours_mb,
                                               const std::vector<prior_work_row>& prior);

// Reported magnitudes for a healthy Amharic-scale run; the report warns
// (never errors) when measured values are an order of magnitude off,
// since live crawls drift.
struct reference_expectations {
    double filtered_index_mb = 20;
    double warc_per_archive_gb = 3.5;
    double text_per_archive_mb = 90;
    double within_archive_reduction_pct = 60;
    double combined_reduction_pct = 85;
};

struct archive_report {
    std::string crawl_id;
    std::vector<stage_stats> stages;
    std::map<std::string, std::uint64_t> skip_counts;
    bool failed = false;
    std::string error;
};

struct pipeline_report {
    std::string target_language;
    std::vector<archive_report> archives;
    std::vector<stage_stats> global_stages; // cross-archive dedup, final store
    std::vector<std::string> warnings;
    std::optional<double> final_size_mb;
    std::vector<comparison_row> comparisons;
};

// Order-of-magnitude sanity warnings against the reference expectations.
std::vector<std::string> check_against_reference(const pipeline_report& report,
                                                 const reference_expectations& ref = {});

std::string render_report_text(const pipeline_report& report);
std::string render_report_json(const pipeline_report& report);

void write_reports(const pipeline_report& report, const std::string& out_dir);

} // namespace unicrawl
