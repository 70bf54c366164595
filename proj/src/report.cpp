#include "unicrawl/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "unicrawl/errors.hpp"
#include "unicrawl/util.hpp"

namespace unicrawl {

using ordered_json = nlohmann::ordered_json;

double reduction_percent(const stage_stats& stats) {
    if (stats.bytes_in == 0) {
        throw config_error("reduction undefined: stage '" + stats.stage + "' has bytes_in == 0");
    }
    return 100.0 * (1.0 - static_cast<double>(stats.bytes_out) /
                              static_cast<double>(stats.bytes_in));
}

std::vector<prior_work_row> bundled_prior_works() {
    // Known sizes (MB) of earlier corpora per language; also shipped as
    // data/prior_works_sizes.csv.
    return {
        {"OSCAR", "pus", 380},     {"OSCAR", "amh", 380},   {"OSCAR", "yor", 0.1},
        {"OSCAR", "sun", 0.2},     {"OSCAR", "snd", 360},
        {"mC4", "hau", 850},       {"mC4", "pus", 1500},    {"mC4", "amh", 1200},
        {"mC4", "yor", 160},       {"mC4", "sun", 460},     {"mC4", "snd", 4000},
        {"mC4", "zul", 840},
        {"CC-100", "hau", 60},     {"CC-100", "pus", 110},  {"CC-100", "amh", 130},
        {"CC-100", "yor", 1},      {"CC-100", "sun", 20},   {"CC-100", "snd", 70},
        {"CC-100", "zul", 4},
        {"Wikipedia", "hau", 60},  {"Wikipedia", "pus", 100}, {"Wikipedia", "amh", 20},
        {"Wikipedia", "yor", 20},  {"Wikipedia", "sun", 40},  {"Wikipedia", "snd", 40},
        {"Wikipedia", "zul", 6},
    };
}

std::vector<prior_work_row> load_prior_works_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open comparison table: " + path);
    std::vector<prior_work_row> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto parts = split(t, ',');
        if (first && parts.size() >= 3 && parts[0] == "dataset") {
            first = false;
            continue; // header
        }
        first = false;
        if (parts.size() < 3) {
            throw config_error("bad comparison row (want dataset,language,size_mb): " + t);
        }
        prior_work_row row;
        row.dataset = trim(parts[0]);
        row.language = trim(parts[1]);
        row.size_mb = std::stod(trim(parts[2]));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<comparison_row> compare_with_prior(double ours_mb,
                                               const std::vector<prior_work_row>& prior) {
    std::vector<comparison_row> rows;
    for (const auto& p : prior) {
        if (p.size_mb <= 0) continue;
        rows.push_back({p.dataset, p.size_mb, ours_mb / p.size_mb});
    }
    return rows;
}

namespace {

void warn_if_off(std::vector<std::string>& warnings, const std::string& what, double measured,
                 double expected) {
    if (measured <= 0 || expected <= 0) return;
    double ratio = measured / expected;
    if (ratio >= 10.0 || ratio <= 0.1) {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "%s is %.3g, an order of magnitude away from the reference %.3g; "
                      "crawls drift, but double-check the run",
                      what.c_str(), measured, expected);
        warnings.emplace_back(buf);
    }
}

const stage_stats* find_stage(const std::vector<stage_stats>& stages, std::string_view name) {
    for (const auto& s : stages) {
        if (s.stage == name) return &s;
    }
    return nullptr;
}

} // namespace

std::vector<std::string> check_against_reference(const pipeline_report& report,
                                                 const reference_expectations& ref) {
    std::vector<std::string> warnings;
    for (const auto& archive : report.archives) {
        if (archive.failed) continue;
        if (const auto* s = find_stage(archive.stages, "index")) {
            warn_if_off(warnings, archive.crawl_id + " filtered index MB",
                        static_cast<double>(s->bytes_out) / 1e6, ref.filtered_index_mb);
        }
        if (const auto* s = find_stage(archive.stages, "fetch_extract")) {
            warn_if_off(warnings, archive.crawl_id + " fetched WARC GB",
                        static_cast<double>(s->bytes_in) / 1e9, ref.warc_per_archive_gb);
            warn_if_off(warnings, archive.crawl_id + " extracted text MB",
                        static_cast<double>(s->bytes_out) / 1e6, ref.text_per_archive_mb);
        }
        if (const auto* s = find_stage(archive.stages, "dedup_archive")) {
            if (s->bytes_in > 0) {
                warn_if_off(warnings, archive.crawl_id + " within-archive reduction %",
                            reduction_percent(*s), ref.within_archive_reduction_pct);
            }
        }
    }
    return warnings;
}

namespace {

ordered_json stats_json(const stage_stats& s) {
    ordered_json j;
    j["stage"] = s.stage;
    j["bytes_in"] = s.bytes_in;
    j["bytes_out"] = s.bytes_out;
    j["doc_count_in"] = s.doc_count_in;
    j["doc_count_out"] = s.doc_count_out;
    j["records_failed"] = s.records_failed;
    j["wall_seconds"] = s.wall_seconds;
    if (s.bytes_in > 0) {
        j["reduction_pct"] = 100.0 * (1.0 - static_cast<double>(s.bytes_out) /
                                                static_cast<double>(s.bytes_in));
    }
    return j;
}

void render_stage_line(std::ostringstream& out, const stage_stats& s) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "  %-16s in: %12llu B / %8llu docs   out: %12llu B / %8llu docs",
                  s.stage.c_str(), static_cast<unsigned long long>(s.bytes_in),
                  static_cast<unsigned long long>(s.doc_count_in),
                  static_cast<unsigned long long>(s.bytes_out),
                  static_cast<unsigned long long>(s.doc_count_out));
    out << buf;
    if (s.bytes_in > 0) {
        std::snprintf(buf, sizeof(buf), "   (-%.1f%%)",
                      100.0 * (1.0 - static_cast<double>(s.bytes_out) /
                                         static_cast<double>(s.bytes_in)));
        out << buf;
    }
    if (s.records_failed > 0) {
        out << "   failed: " << s.records_failed;
    }
    out << '\n';
}

} // namespace

std::string render_report_text(const pipeline_report& report) {
    std::ostringstream out;
    out << "dataset report: " << report.target_language << "\n";
    for (const auto& a : report.archives) {
        out << "archive " << a.crawl_id;
        if (a.failed) {
            out << "  FAILED: " << a.error << "\n";
            continue;
        }
        out << "\n";
        for (const auto& s : a.stages) render_stage_line(out, s);
        if (!a.skip_counts.empty()) {
            out << "  skips:";
            for (const auto& [k, v] : a.skip_counts) out << " " << k << "=" << v;
            out << "\n";
        }
    }
    for (const auto& s : report.global_stages) render_stage_line(out, s);
    if (report.final_size_mb) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "final dataset: %.1f MB\n", *report.final_size_mb);
        out << buf;
    }
    if (!report.comparisons.empty()) {
        out << "vs prior datasets:\n";
        for (const auto& c : report.comparisons) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "  %-12s %10.1f MB   ours %.2fx\n", c.dataset.c_str(),
                          c.size_mb, c.ratio);
            out << buf;
        }
    }
    for (const auto& w : report.warnings) {
        out << "warning: " << w << "\n";
    }
    return out.str();
}

std::string render_report_json(const pipeline_report& report) {
    ordered_json j;
    j["target_language"] = report.target_language;
    j["archives"] = ordered_json::array();
    for (const auto& a : report.archives) {
        ordered_json aj;
        aj["crawl_id"] = a.crawl_id;
        aj["failed"] = a.failed;
        if (a.failed) aj["error"] = a.error;
        aj["stages"] = ordered_json::array();
        for (const auto& s : a.stages) aj["stages"].push_back(stats_json(s));
        aj["skip_counts"] = a.skip_counts;
        j["archives"].push_back(std::move(aj));
    }
    j["global_stages"] = ordered_json::array();
    for (const auto& s : report.global_stages) j["global_stages"].push_back(stats_json(s));
    if (report.final_size_mb) j["final_size_mb"] = *report.final_size_mb;
    j["comparisons"] = ordered_json::array();
    for (const auto& c : report.comparisons) {
        ordered_json cj;
        cj["dataset"] = c.dataset;
        cj["size_mb"] = c.size_mb;
        cj["ratio"] = c.ratio;
        j["comparisons"].push_back(std::move(cj));
    }
    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

void write_reports(const pipeline_report& report, const std::string& out_dir) {
    {
        std::ofstream out(out_dir + "/report.json", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write report.json under " + out_dir);
        out << render_report_json(report);
    }
    {
        std::ofstream out(out_dir + "/report.txt", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write report.txt under " + out_dir);
        out << render_report_text(report);
    }
}

} // namespace unicrawl
